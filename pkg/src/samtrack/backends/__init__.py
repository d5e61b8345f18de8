from .base import (
    BackendBundle,
    BoxPrompt,
    Detection,
    Detector,
    Frame,
    PointPrompt,
    PropagationMemory,
    Propagator,
    Segmenter,
    TextPrompt,
    rasterize_masks,
    update_memory,
)
from .classical import BoxFillSegmenter, ClassicalPropagator, UnavailableDetector
from .oracle import OracleBackend, oracle_backend_bundle
from .remote import RemoteModelClient, remote_bundle

__all__ = [
    "BackendBundle",
    "BoxFillSegmenter",
    "BoxPrompt",
    "ClassicalPropagator",
    "Detection",
    "Detector",
    "Frame",
    "OracleBackend",
    "PointPrompt",
    "PropagationMemory",
    "Propagator",
    "RemoteModelClient",
    "Segmenter",
    "TextPrompt",
    "UnavailableDetector",
    "oracle_backend_bundle",
    "rasterize_masks",
    "remote_bundle",
    "update_memory",
]
