"""Run configuration data model"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..utils.config import OUTPUT_FORMATS
from ..utils.errors import ConfigError


@dataclass
class RunConfig:
    """Validated parameters of one CLI invocation

    Attributes:
        command: Command group ('steinberg', 'suite', ...)
        action: Action inside the group ('dim', 'gate', suite name, ...)
        n: Matrix size
        q: Order of the building field F_q
        ell: Characteristic of the coefficient field F_ell
        p: Prime for field / solver commands
        e: Extension degree
        seed: 64-bit seed, echoed in every record
        caps: Size caps (group_order, scan_size, ...)
        output_format: 'json', 'csv' or 'text'
        timings: Whether to attach timings to records
        options: Action-specific extras (m, polynomial JSON, ...)
    """

    command: str
    action: Optional[str] = None
    n: Optional[int] = None
    q: Optional[int] = None
    ell: Optional[int] = None
    p: Optional[int] = None
    e: Optional[int] = None
    seed: int = 0
    caps: Dict[str, int] = field(default_factory=dict)
    output_format: str = "json"
    timings: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: Any, config: Dict[str, Any]) -> "RunConfig":
        """Build from an argparse namespace over a loaded configuration

        Flags win over the configuration; unset flags fall back to it.
        """
        caps = dict(config.get("caps", {}))
        if getattr(args, "cap_group", None) is not None:
            caps["group_order"] = args.cap_group
        if getattr(args, "cap_scan", None) is not None:
            caps["scan_size"] = args.cap_scan
        run = config.get("run", {})
        seed = getattr(args, "seed", None)
        options = {}
        for name in ("m", "which", "group", "poly", "vectors", "vector"):
            value = getattr(args, name, None)
            if value is not None:
                options[name] = value
        return cls(
            command=args.command,
            action=getattr(args, "action", None),
            n=getattr(args, "n", None),
            q=getattr(args, "q", None),
            ell=getattr(args, "ell", None),
            p=getattr(args, "p", None),
            e=getattr(args, "e", None),
            seed=seed if seed is not None else int(run.get("seed", 0)),
            caps=caps,
            output_format=getattr(args, "format", None) or run.get("format", "json"),
            timings=bool(getattr(args, "timings", False)),
            options=options,
        )

    def validate(self) -> None:
        """Check parameter ranges

        Raises:
            ConfigError: On the first invalid parameter
        """
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"Unknown output format: {self.output_format}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"Seed must fit in 64 bits: {self.seed}")
        for name in ("n", "q", "ell", "p", "e"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"--{name} must be positive (got {value})")
        for name in ("q", "ell", "p"):
            value = getattr(self, name)
            if value is not None and value < 2:
                raise ConfigError(f"--{name} must be at least 2 (got {value})")

    def params(self) -> Dict[str, Any]:
        """Parameters echoed into report records"""
        data: Dict[str, Any] = {}
        for name in ("n", "q", "ell", "p", "e"):
            value = getattr(self, name)
            if value is not None:
                data[name] = value
        data.update(self.options)
        return data


__all__ = ["RunConfig"]
