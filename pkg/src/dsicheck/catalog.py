"""Model catalog: parameter validation, derived combinations, partner shift."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import ConstraintViolation, UnknownFamily
from .families import FAMILIES, DerivedParams, Family, Interval

__all__ = [
    "ModelId",
    "RawParams",
    "DerivedParams",
    "Interval",
    "ModelSpec",
    "build_model",
    "partner_shift",
    "list_catalog",
    "reference_model",
    "rescale_hbar",
    "REFERENCE_PARAMS",
]


class ModelId(str, Enum):
    PT = "PT"
    RHO = "RHO"
    S = "S"
    C = "C"
    M = "M"
    E = "E"
    RM = "RM"
    SHO = "SHO"
    DRHO = "DRHO"
    DC = "DC"
    DRHO_EXT1 = "DRHO_EXT1"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, tag: "ModelId | str") -> "ModelId":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).strip().upper())
        except ValueError:
            raise UnknownFamily(f"unknown model family {tag!r}") from None


@dataclass(frozen=True)
class RawParams:
    """Physical parameters as they appear in the potential table.

    Only the subset relevant to a family is set; the rest stay ``None``.
    """

    hbar: float = 1.0
    A: Optional[float] = None
    B: Optional[float] = None
    omega: Optional[float] = None
    l: Optional[int] = None
    e2: Optional[float] = None
    d: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    lam: Optional[float] = None

    def as_dict(self) -> dict[str, float]:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    def replace(self, **changes: Any) -> "RawParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "RawParams":
        aliases = {"lambda": "lam", "ħ": "hbar", "w": "omega"}
        known = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            key = aliases.get(key, key)
            if key not in known:
                raise ConstraintViolation(f"unknown parameter {key!r}")
            kwargs[key] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class ModelSpec:
    id: ModelId
    raw: RawParams
    derived: DerivedParams
    domain: Interval
    shifts: int = 0  # number of partner shifts applied to ``derived.a``

    @property
    def family(self) -> Family:
        return FAMILIES[self.id.value]

    @property
    def hbar(self) -> float:
        return self.raw.hbar

    @property
    def a(self) -> float:
        return self.derived.a

    @property
    def b(self) -> Optional[float]:
        return self.derived.b

    @property
    def hbar_explicit(self) -> bool:
        return self.family.hbar_explicit

    def label(self) -> str:
        return self.id.value if not self.shifts else f"{self.id.value}[+{self.shifts}]"


def build_model(id: ModelId | str, raw: RawParams | Mapping[str, Any]) -> ModelSpec:
    """Validate ``raw`` against the family's constraints and derive (a, b, Δ)."""
    mid = ModelId.parse(id)
    if not isinstance(raw, RawParams):
        raw = RawParams.from_mapping(raw)
    fam = FAMILIES[mid.value]
    if raw.hbar is None or not raw.hbar > 0:
        raise ConstraintViolation("constraint violated: hbar > 0")
    missing = [p for p in fam.params if getattr(raw, p) is None]
    if missing:
        raise ConstraintViolation(f"{mid}: missing parameters {', '.join(missing)}")
    values = [getattr(raw, p) for p in fam.params] + [raw.hbar]
    if not all(math.isfinite(float(v)) for v in values):
        raise ConstraintViolation(f"{mid}: parameters must be finite")
    # drop parameters the family does not use so specs compare cleanly
    raw = RawParams(hbar=float(raw.hbar), **{p: getattr(raw, p) for p in fam.params})
    try:
        fam.check(raw)
    except ConstraintViolation as exc:
        raise ConstraintViolation(f"{mid}: {exc}") from None
    return ModelSpec(id=mid, raw=raw, derived=fam.derive(raw), domain=fam.domain(raw))


def partner_shift(spec: ModelSpec) -> ModelSpec:
    """Move to the partner: a -> a + ħ with b and the raw parameters unchanged."""
    derived = dataclasses.replace(spec.derived, a=spec.derived.a + spec.hbar)
    return dataclasses.replace(spec, derived=derived, shifts=spec.shifts + 1)


def with_a(spec: ModelSpec, a: float) -> ModelSpec:
    return dataclasses.replace(spec, derived=dataclasses.replace(spec.derived, a=a))


REFERENCE_PARAMS: dict[ModelId, RawParams] = {
    ModelId.PT: RawParams(hbar=1.0, alpha=1.0, A=2.0),
    ModelId.RHO: RawParams(hbar=1.0, alpha=1.0, omega=2.0, l=0),
    ModelId.S: RawParams(hbar=1.0, alpha=0.5, A=4.0, B=1.0),
    ModelId.C: RawParams(hbar=1.0, alpha=0.1, e2=10.0, l=0),
    ModelId.M: RawParams(hbar=1.0, alpha=0.5, A=6.0, B=4.0),
    ModelId.E: RawParams(hbar=1.0, alpha=-1.5, A=2.0, B=30.0),
    ModelId.RM: RawParams(hbar=1.0, alpha=0.5, beta=0.5, A=2.0, B=1.0),
    ModelId.SHO: RawParams(hbar=1.0, alpha=1.0, beta=0.5, omega=2.0, d=0.5),
    ModelId.DRHO: RawParams(hbar=1.0, omega=2.0, lam=-0.25, l=0),
    ModelId.DC: RawParams(hbar=1.0, lam=0.0025, e2=20.0, l=0),
    ModelId.DRHO_EXT1: RawParams(hbar=1.0, omega=2.0, lam=-0.25, l=0),
}


def list_catalog() -> list[tuple[ModelId, RawParams]]:
    return [(mid, REFERENCE_PARAMS[mid]) for mid in ModelId]


# Families whose strengths carry powers of ħ (A = ħ Ā, B = ħ^k B̄).  Moving
# along ħ at fixed barred strengths keeps constraints such as A > ħ intact.
HBAR_POWERS: dict[ModelId, dict[str, int]] = {
    ModelId.PT: {"A": 1},
    ModelId.S: {"A": 1, "B": 1},
    ModelId.M: {"A": 1, "B": 1},
    ModelId.E: {"A": 1, "B": 2},
    ModelId.RM: {"A": 1, "B": 2},
}


def rescale_hbar(id: ModelId | str, raw: RawParams, hbar: float) -> RawParams:
    """Move ``raw`` to another ħ, rescaling the strengths listed in ``HBAR_POWERS``."""
    mid = ModelId.parse(id)
    if hbar == raw.hbar:
        return raw
    ratio = hbar / raw.hbar
    scaled = {k: getattr(raw, k) * ratio**p for k, p in HBAR_POWERS.get(mid, {}).items()}
    return raw.replace(hbar=hbar, **scaled)


def reference_model(id: ModelId | str, hbar: Optional[float] = None) -> ModelSpec:
    """Reference entry, optionally moved to another ħ.

    For the families listed in ``HBAR_POWERS`` the strengths are rescaled
    with ħ; every other parameter is held fixed.
    """
    mid = ModelId.parse(id)
    raw = REFERENCE_PARAMS[mid]
    if hbar is not None:
        raw = rescale_hbar(mid, raw, hbar)
    return build_model(mid, raw)
