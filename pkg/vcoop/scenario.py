"""
Domain types shared by every other module: the validated `Scenario`, its `Regime` and one sampled `HelperConfig`.

All internal quantities are SI (m, s, bit/s, veh/m). Scenario files use the unit-suffixed keys of `ScenarioConfig`
(`d_km`, `wI_mbps`, ...) and are converted here, at the boundary.
"""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Tuple

import numpy as np
from omegaconf import OmegaConf

from .configs import ScenarioConfig
from .constants import KM, MBPS, RegimeType
from .utils import Logger


__all__ = [
    "Scenario",
    "Regime",
    "HelperConfig",
    "ScenarioValidationError",
    "validate_scenario",
    "serialize_scenario",
    "load_scenario",
    "classify_regime",
    "relative_span",
    "RegimeError",
    "REFERENCE_SCENARIO",
]

logger = Logger(__name__)

# file key -> (Scenario attribute, factor to SI)
_FILE_KEYS = {
    "d_km": ("d", KM),
    "rI_m": ("r_I", 1.0),
    "r0_m": ("r0", 1.0),
    "wI_mbps": ("w_I", MBPS),
    "wV_mbps": ("w_V", MBPS),
    "v1_mps": ("v1", 1.0),
    "v2_mps": ("v2", 1.0),
    "rho2_veh_per_m": ("rho2", 1.0),
    "rho1_veh_per_m": ("rho1", 1.0),
    "num_infra": ("num_infra", 1),
}


# The evaluation setting every preset and oracle suite starts from, in scenario-file keys
REFERENCE_SCENARIO = {
    "d_km": 10.0,
    "rI_m": 500.0,
    "r0_m": 250.0,
    "wI_mbps": 1.0,
    "wV_mbps": 5.0,
    "v1_mps": 15.0,
    "v2_mps": 25.0,
    "rho2_veh_per_m": 0.005,
}


class ScenarioValidationError(ValueError):
    """
    Raised with every violated scenario invariant, not only the first one.
    """

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("Invalid scenario:\n" + "\n".join(f"  - {v}" for v in self.violations))


class RegimeError(ValueError):
    """
    Raised when an operation is called on a scenario or cycle outside the regime it is defined for.
    """


@dataclass(frozen=True)
class Scenario:
    """
    Physical, radio and traffic parameters of one highway deployment, in SI units. Build it with `validate_scenario`.

    `rho1` (same-direction density) is carried as metadata only and never enters a computation.
    """

    d: float
    r_I: float
    r0: float
    w_I: float
    w_V: float
    v1: float
    v2: float
    rho2: float
    rho1: float = 0.0
    num_infra: int = 20

    def replace(self, **changes) -> "Scenario":
        """
        Copy with some SI fields changed; the result is validated again.
        """
        values = asdict(self)
        for attr in changes:
            if attr not in values:
                raise AttributeError(f"`Scenario` has no field `{attr}`!")
        values.update(changes)
        violations = _check_invariants(values)
        if violations:
            raise ScenarioValidationError(violations)
        values["num_infra"] = int(values["num_infra"])
        return Scenario(**values)


@dataclass(frozen=True)
class Regime:
    kind: RegimeType
    w_lo: float
    w_hi: float


@dataclass(frozen=True)
class HelperConfig:
    """
    One realization of the opposite-direction helpers met in a cycle.

    Args:
        n: Number of helpers
        l0: Coordinate of the first helper inside [0, span]
        gaps: The n - 1 distances between consecutive helpers
    """

    n: int
    l0: float = 0.0
    gaps: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(float(g) for g in self.gaps))
        if self.n < 0:
            raise ValueError(f"Helper count must be non-negative, got {self.n}")
        if len(self.gaps) != max(self.n - 1, 0):
            raise ValueError(f"Expected {max(self.n - 1, 0)} gaps for {self.n} helpers, got {len(self.gaps)}")
        if self.l0 < 0 or any(g < 0 or not math.isfinite(g) for g in self.gaps):
            raise ValueError("Helper offsets and gaps must be finite and non-negative!")

    @property
    def positions(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0)
        return self.l0 + np.concatenate(([0.0], np.cumsum(self.gaps)))

    @classmethod
    def from_gaps(cls, gaps, l0: float = 0.0) -> "HelperConfig":
        return cls(n=len(gaps) + 1, l0=l0, gaps=tuple(gaps))


def _as_number(key: str, value: Any, violations: List[str]):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        violations.append(f"`{key}` must be a number, got `{value!r}`")
        return None
    value = float(value)
    if not math.isfinite(value):
        violations.append(f"`{key}` must be a finite number, got `{value}`")
        return None
    if value < 0:
        violations.append(f"`{key}` must not be negative, got `{value}`")
        return None
    return value


def validate_scenario(raw: Mapping[str, Any] | ScenarioConfig) -> Scenario:
    """
    Check a raw scenario map (scenario-file keys) and return the normalized SI `Scenario`.

    Args:
        raw: Mapping with the keys of `ScenarioConfig`, or a `ScenarioConfig`

    Returns:
        A validated Scenario

    Raises:
        ScenarioValidationError: listing every violated invariant by name
    """
    if isinstance(raw, ScenarioConfig):
        raw = {k: v for k, v in raw.file_dict().items() if v is not None}
    raw = dict(raw)
    violations = []

    for key in raw:
        if key not in _FILE_KEYS:
            violations.append(f"unknown key `{key}`")
    for key in ScenarioConfig.required_keys():
        if key not in raw or raw[key] is None:
            violations.append(f"missing key `{key}`")

    values = {}
    for key, (attr, factor) in _FILE_KEYS.items():
        if key not in raw or raw[key] is None:
            continue
        number = _as_number(key, raw[key], violations)
        if number is not None:
            values[attr] = number * factor

    violations.extend(_check_invariants(values))
    if violations:
        raise ScenarioValidationError(violations)

    if "num_infra" in values:
        values["num_infra"] = int(values["num_infra"])
    return Scenario(**values)


def _check_invariants(values: Dict[str, Any]) -> List[str]:
    violations = []

    def _has(*names):
        return all(n in values for n in names)

    if _has("d", "r_I") and values["d"] <= 2 * values["r_I"]:
        violations.append("d must exceed 2·r_I")
    if _has("r_I", "r0") and values["r_I"] <= values["r0"]:
        violations.append("r_I must exceed r0")
    for attr, label in (("r0", "r0"), ("v1", "v1"), ("v2", "v2"), ("w_V", "w_V")):
        if attr in values and values[attr] <= 0:
            violations.append(f"{label} must be positive")

    if _has("w_I") and (not math.isfinite(values["w_I"]) or values["w_I"] < 0):
        violations.append("w_I must not be negative")
    if _has("rho2") and (not math.isfinite(values["rho2"]) or values["rho2"] < 0):
        violations.append("rho2 must not be negative")
    if _has("num_infra"):
        n = values["num_infra"]
        is_number = not isinstance(n, bool) and isinstance(n, (int, float, np.integer))
        if not is_number or not math.isfinite(n) or n != int(n) or n < 2:
            violations.append("num_infra must be an integer of at least 2")
    return violations


def serialize_scenario(s: Scenario) -> Dict[str, Any]:
    """
    Inverse of `validate_scenario`: the scenario in scenario-file keys and units.
    """
    raw = {}
    for key, (attr, factor) in _FILE_KEYS.items():
        value = getattr(s, attr)
        raw[key] = value if factor == 1 else value / factor
    return raw


def load_scenario(path: str | os.PathLike) -> Scenario:
    """
    Read a JSON (or YAML) scenario file and validate it
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Scenario file `{path}` does not exist!")
    raw = OmegaConf.to_container(OmegaConf.load(path))
    if not isinstance(raw, dict):
        raise ScenarioValidationError([f"`{path}` must contain a JSON object"])
    return validate_scenario(raw)


def classify_regime(s: Scenario) -> Regime:
    """
    Place w_I relative to the thresholds w_lo = r0·w_V·v2 / (r_I·(v1 + v2)) and w_hi = w_V·v2 / (v1 + v2).
    Both boundaries are inclusive on the outer regimes; w_I = 0 counts as infrastructure limited.
    """
    w_hi = s.w_V * s.v2 / (s.v1 + s.v2)
    w_lo = s.r0 * w_hi / s.r_I
    if s.w_I <= w_lo:
        kind = RegimeType.INFRASTRUCTURE_LIMITED
    elif s.w_I >= w_hi:
        kind = RegimeType.V2V_LIMITED
    else:
        kind = RegimeType.TRANSITIONAL
    return Regime(kind=kind, w_lo=w_lo, w_hi=w_hi)


def relative_span(s: Scenario) -> float:
    """
    Length of the helper stream the VoI sweeps during the V2V phase of one cycle, (d - 2·r_I)·(v1 + v2)/v1 + r0.
    """
    return (s.d - 2 * s.r_I) * (s.v1 + s.v2) / s.v1 + s.r0
