"""samtrack: prompt-driven multi-object video segmentation and tracking."""

from . import backends, cmr, harness, maskops, metrics, pipeline
from .cmr import CmrConfig, CmrOutcome
from .maskops import BoundingBox, RleMask
from .pipeline import Session, SessionConfig
from .registry import ObjectRegistry

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CmrConfig",
    "CmrOutcome",
    "ObjectRegistry",
    "RleMask",
    "Session",
    "SessionConfig",
    "backends",
    "cmr",
    "harness",
    "maskops",
    "metrics",
    "pipeline",
]
