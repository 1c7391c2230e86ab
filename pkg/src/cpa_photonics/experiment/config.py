"""Sweep configuration."""

import json
import logging
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..circuits.lossybs import BeamSplitterKind, LossyBeamSplitter, solve, validate
from ..exceptions import CpaError, InvalidConfigError
from ..quantum.fock import InputState
from ..utils.serialization import complex_to_pair, config_hash, pair_to_complex

logger = logging.getLogger(__name__)

_KNOWN_KEYS = {
    "name",
    "bs_kind",
    "absorptions",
    "phi_grid",
    "input_state",
    "shots",
    "seed",
    "efficiencies",
    "custom",
    "mirror_branch",
    "filter_offset",
}


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one absorption/phase sweep.

    Attributes:
        name: Prefix for output files
        bs_kind: Device construction recipe
        absorptions: Absorption grid; ignored for custom devices
        phi_start: First phase, radians
        phi_stop: Last phase, radians (inclusive)
        phi_count: Number of phase points
        input_state: Single photon or two-photon NOON
        shots: Heralded trials per grid point, None for theory only
        seed: Master seed for counting emulation
        efficiencies: Per-detector efficiencies (3 single-photon, 6 NOON)
        custom_t: Transmission amplitude of a custom device
        custom_r: Reflection amplitude of a custom device
        mirror_branch: Use the mirror Type 1 root
        filter_offset: Extra external phase on the first MZI
    """

    name: str = "sweep"
    bs_kind: BeamSplitterKind = BeamSplitterKind.TYPE1
    absorptions: Tuple[float, ...] = (0.5,)
    phi_start: float = 0.0
    phi_stop: float = 2.0 * math.pi
    phi_count: int = 201
    input_state: InputState = InputState.SINGLE_PHOTON
    shots: Optional[int] = None
    seed: int = 0
    efficiencies: Optional[Tuple[float, ...]] = None
    custom_t: Optional[complex] = None
    custom_r: Optional[complex] = None
    mirror_branch: bool = False
    filter_offset: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "bs_kind", BeamSplitterKind(self.bs_kind))
            object.__setattr__(self, "input_state", InputState(self.input_state))
        except ValueError as exc:
            raise InvalidConfigError(str(exc)) from exc
        object.__setattr__(
            self, "absorptions", tuple(float(a) for a in self.absorptions)
        )
        if self.efficiencies is not None:
            object.__setattr__(
                self, "efficiencies", tuple(float(e) for e in self.efficiencies)
            )
        self._validate()

    def _validate(self) -> None:
        if self.phi_count < 2:
            raise InvalidConfigError(
                f"phi grid needs at least 2 points, got {self.phi_count}"
            )
        if not self.phi_stop > self.phi_start:
            raise InvalidConfigError("phi grid stop must exceed start")
        if self.shots is not None and self.shots < 1:
            raise InvalidConfigError(f"shots must be >= 1, got {self.shots}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError(
                f"seed must be a 64-bit unsigned integer, got {self.seed}"
            )
        if self.efficiencies is not None:
            expected = 3 if self.input_state is InputState.SINGLE_PHOTON else 6
            if len(self.efficiencies) != expected:
                raise InvalidConfigError(
                    f"{self.input_state.value} runs need {expected} detector "
                    f"efficiencies, got {len(self.efficiencies)}"
                )
            if any(not 0 < e <= 1 for e in self.efficiencies):
                raise InvalidConfigError("detector efficiencies must lie in (0, 1]")
        if self.bs_kind is BeamSplitterKind.CUSTOM:
            if self.custom_t is None or self.custom_r is None:
                raise InvalidConfigError("custom devices need 't' and 'r'")
        elif not self.absorptions:
            raise InvalidConfigError("absorption grid is empty")
        try:
            devices = self.devices()
        except CpaError as exc:
            raise InvalidConfigError(str(exc)) from exc
        for bs in devices:
            violations = validate(bs)
            if violations and bs.kind is BeamSplitterKind.CUSTOM:
                if not validate(bs, sign=1):
                    violations = []
            if violations:
                raise InvalidConfigError(
                    f"device t={bs.t}, r={bs.r} violates "
                    f"{[v.value for v in violations]}"
                )

    @property
    def phis(self) -> np.ndarray:
        return np.linspace(self.phi_start, self.phi_stop, self.phi_count)

    def devices(self) -> List[LossyBeamSplitter]:
        """Lossy beam splitters on the absorption grid."""
        if self.bs_kind is BeamSplitterKind.CUSTOM:
            return [solve(self.bs_kind, t=self.custom_t, r=self.custom_r)]
        return [
            solve(self.bs_kind, absorption=a, mirror=self.mirror_branch)
            for a in self.absorptions
        ]

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "name": self.name,
            "bs_kind": self.bs_kind.value,
            "absorptions": list(self.absorptions),
            "phi_grid": {
                "start": self.phi_start,
                "stop": self.phi_stop,
                "count": self.phi_count,
            },
            "input_state": self.input_state.value,
            "shots": self.shots,
            "seed": self.seed,
            "efficiencies": list(self.efficiencies) if self.efficiencies else None,
            "mirror_branch": self.mirror_branch,
            "filter_offset": self.filter_offset,
        }
        if self.bs_kind is BeamSplitterKind.CUSTOM:
            payload["custom"] = {
                "t": complex_to_pair(self.custom_t),
                "r": complex_to_pair(self.custom_r),
            }
        return payload

    @property
    def config_hash(self) -> str:
        return config_hash(self.to_dict())

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "SweepConfig":
        """Build a config from its JSON form.

        Raises:
            InvalidConfigError: On unknown keys or malformed values
        """
        if not isinstance(payload, dict):
            raise InvalidConfigError("sweep config must be a JSON object")
        unknown = set(payload) - _KNOWN_KEYS
        if unknown:
            raise InvalidConfigError(f"unknown sweep config keys: {sorted(unknown)}")
        kwargs: Dict[str, Any] = {}
        try:
            for key in ("name", "bs_kind", "input_state", "mirror_branch"):
                if key in payload:
                    kwargs[key] = payload[key]
            if "absorptions" in payload:
                kwargs["absorptions"] = tuple(float(a) for a in payload["absorptions"])
            if "phi_grid" in payload:
                grid = payload["phi_grid"]
                kwargs["phi_start"] = float(grid.get("start", 0.0))
                kwargs["phi_stop"] = float(grid.get("stop", 2.0 * math.pi))
                kwargs["phi_count"] = int(grid.get("count", 201))
            if payload.get("shots") is not None:
                kwargs["shots"] = int(payload["shots"])
            if "seed" in payload:
                kwargs["seed"] = int(payload["seed"])
            if payload.get("efficiencies") is not None:
                kwargs["efficiencies"] = tuple(
                    float(e) for e in payload["efficiencies"]
                )
            if "filter_offset" in payload:
                kwargs["filter_offset"] = float(payload["filter_offset"])
            if "custom" in payload:
                kwargs["custom_t"] = pair_to_complex(payload["custom"]["t"])
                kwargs["custom_r"] = pair_to_complex(payload["custom"]["r"])
        except (TypeError, ValueError, KeyError, AttributeError) as exc:
            raise InvalidConfigError(f"malformed sweep config: {exc}") from exc
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "SweepConfig":
        try:
            with open(path, encoding="utf-8") as f:
                payload = json.load(f)
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"{path}: invalid JSON ({exc})") from exc
        except OSError as exc:
            raise InvalidConfigError(f"{path}: {exc}") from exc
        logger.info(f"Loaded sweep config from {path}")
        return cls.from_dict(payload)

    def with_overrides(self, **overrides: Any) -> "SweepConfig":
        """Copy with every non-None override applied."""
        valid = {f.name for f in fields(self)}
        unknown = set(overrides) - valid
        if unknown:
            raise InvalidConfigError(f"unknown overrides: {sorted(unknown)}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self

