"""Report record data model

One record per task or suite row. Records serialize with a stable key order
so identical runs produce byte-identical output.
"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class ReportRecord:
    """Result of one task

    Attributes:
        task: Task name ('steinberg.dim', 'suite.gate', ...)
        params: Parameters the task ran with
        verdicts: Computed answers and boolean checks
        witnesses: Certificates backing the verdicts (subspace bases, elements)
        seed: Seed the run used, echoed even for deterministic tasks
        version: Package version that produced the record
        failures: Human-readable descriptions of failed checks
        timings: Elapsed time / memory, only filled when requested
    """

    task: str
    params: Dict[str, Any]
    verdicts: Dict[str, Any] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    version: str = ""
    failures: List[str] = field(default_factory=list)
    timings: Optional[Dict[str, float]] = None

    @property
    def ok(self) -> bool:
        """True when no check failed"""
        return not self.failures

    def fail(self, message: str) -> None:
        """Record a failed check"""
        self.failures.append(message)

    def check(self, condition: bool, message: str) -> bool:
        """Record a failure unless condition holds; returns the condition"""
        if not condition:
            self.fail(message)
        return bool(condition)

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization"""
        data = {
            "task": self.task,
            "params": self.params,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "seed": self.seed,
            "version": self.version,
            "ok": self.ok,
            "failures": self.failures,
        }
        if self.timings is not None:
            data["timings"] = self.timings
        return data

    def to_json(self) -> str:
        """Serialize as one JSON line with sorted keys"""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "ReportRecord":
        """Create from dictionary"""
        return cls(
            task=data["task"],
            params=data.get("params", {}),
            verdicts=data.get("verdicts", {}),
            witnesses=data.get("witnesses", {}),
            seed=data.get("seed", 0),
            version=data.get("version", ""),
            failures=list(data.get("failures", [])),
            timings=data.get("timings"),
        )


__all__ = ["ReportRecord"]
