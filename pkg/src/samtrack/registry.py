"""Object ID lifecycle ledger.

IDs are issued strictly monotonically and never reused or deleted within a
session; tracking backends rely on this to keep object identities stable.
"""
import threading
from dataclasses import dataclass, field

from .errors import IdSpaceExhausted
from .maskops import MAX_LABEL

PROVENANCES = ("click", "box", "text", "keyframe")


@dataclass
class ObjectEntry:
    birth_frame: int
    provenance: str
    active: bool = True


@dataclass
class ObjectRegistry:
    next_id: int = 1
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        self._lock = threading.Lock()

    def issue(self, birth_frame, provenance):
        """Issue the next fresh ID; hard error past the 16-bit label space."""
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        with self._lock:
            if self.next_id > MAX_LABEL:
                raise IdSpaceExhausted(f"cannot issue ID beyond {MAX_LABEL}")
            oid = self.next_id
            self.next_id += 1
            self.entries[oid] = ObjectEntry(birth_frame=birth_frame, provenance=provenance)
            return oid

    def deactivate(self, object_id):
        self.entries[object_id].active = False

    def issued_ids(self):
        return sorted(self.entries)

    def dump(self):
        return {
            str(oid): {
                "birth_frame": e.birth_frame,
                "provenance": e.provenance,
                "active": e.active,
            }
            for oid, e in sorted(self.entries.items())
        }
