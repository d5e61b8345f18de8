"""Backend selection from a spec string shared by the CLI and the service.

Specs:
  oracle:PATH       ground-truth backends from a scenario file
  classical         box-fill segmenter + shift-match propagator (model-free)
  remote:URL        remote model server (URL defaults to SAMTRACK_BACKEND_URL)
  oracle:PATH+classical   oracle segmenter/detector with the classical propagator
"""
import os
from dataclasses import dataclass
from typing import Optional

from . import harness
from .backends.base import BackendBundle
from .backends.classical import BoxFillSegmenter, ClassicalPropagator, UnavailableDetector
from .backends.remote import remote_bundle


@dataclass
class ResolvedBackends:
    bundle: BackendBundle
    spec: str
    scenario: Optional[harness.Scenario] = None
    rendered: Optional[tuple] = None  # (frames, gts) when the oracle supplies video

    @property
    def frames(self):
        return self.rendered[0] if self.rendered else None


def resolve_backends(spec):
    spec = spec.strip()
    classical_prop = spec.endswith("+classical")
    base = spec[: -len("+classical")] if classical_prop else spec

    if base == "classical":
        bundle = BackendBundle(
            segmenter=BoxFillSegmenter(),
            detector=UnavailableDetector(),
            propagator=ClassicalPropagator(),
        )
        return ResolvedBackends(bundle=bundle, spec=spec)

    if base.startswith("oracle:"):
        scenario = harness.load_scenario(base.split(":", 1)[1])
        rendered = harness.render(scenario)
        bundle = harness.oracle_bundle(scenario, rendered)
        if classical_prop:
            bundle = BackendBundle(
                segmenter=bundle.segmenter,
                detector=bundle.detector,
                propagator=ClassicalPropagator(),
            )
        return ResolvedBackends(bundle=bundle, spec=spec, scenario=scenario, rendered=rendered)

    if base.startswith("remote") :
        url = base.split(":", 1)[1] if ":" in base else ""
        url = url or os.environ.get("SAMTRACK_BACKEND_URL", "")
        if not url:
            raise ValueError("remote backend needs remote:URL or SAMTRACK_BACKEND_URL")
        bundle = remote_bundle(url)
        if classical_prop:
            bundle = BackendBundle(
                segmenter=bundle.segmenter,
                detector=bundle.detector,
                propagator=ClassicalPropagator(),
            )
        return ResolvedBackends(bundle=bundle, spec=spec)

    raise ValueError(f"unknown backend spec {spec!r}")
