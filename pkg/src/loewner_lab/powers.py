"""The four entrywise power families and their derivatives.

=============  ===========================================
``plain``      ``x**alpha`` on ``x >= 0``
``even``       ``|x|**alpha``
``odd``        ``sign(x) * |x|**alpha``
``blend``      ``lam * even + (1 - lam) * odd``
=============  ===========================================

Every family maps 0 to 0, for every exponent including negative ones.
``blend_swapped`` (``lam * odd + (1 - lam) * even``) only appears as the
derivative of a blend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, PowerDomainError, PowerRangeError, UnsupportedQueryError
from .linalg import check_symmetric

FAMILIES = ("plain", "even", "odd", "blend", "blend_swapped")
OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class PowerMap:
    family: str
    alpha: float
    blend_lambda: float = 0.5

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown power family {self.family!r}")
        if not np.isfinite(self.alpha):
            raise InputError("alpha must be finite")
        if self.family.startswith("blend") and not 0.0 <= self.blend_lambda <= 1.0:
            raise InputError("blend_lambda must lie in [0, 1]")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "blend_lambda", float(self.blend_lambda))

    @classmethod
    def parse(cls, text: str) -> "PowerMap":
        """Parse ``plain:1.5``, ``even:3``, ``odd:2`` or ``blend:LAMBDA:ALPHA``."""
        parts = text.strip().lower().split(":")
        try:
            if parts[0] == "blend" and len(parts) == 3:
                return cls("blend", float(parts[2]), float(parts[1]))
            if parts[0] in ("plain", "even", "odd") and len(parts) == 2:
                return cls(parts[0], float(parts[1]))
        except ValueError as exc:
            raise InputError(f"cannot parse power map {text!r}: {exc}") from None
        raise InputError(
            f"cannot parse power map {text!r}; expected family:alpha or blend:lambda:alpha"
        )

    def __str__(self) -> str:
        a = _fmt(self.alpha)
        if self.family.startswith("blend"):
            return f"{self.family}:{_fmt(self.blend_lambda)}:{a}"
        return f"{self.family}:{a}"

    def with_alpha(self, alpha: float) -> "PowerMap":
        return PowerMap(self.family, alpha, self.blend_lambda)

    @property
    def nonneg_only(self) -> bool:
        return self.family == "plain"

    def __call__(self, A) -> np.ndarray:
        return apply_power(self, A)


@dataclass(frozen=True)
class DerivativeResult:
    coefficient: float
    map: PowerMap


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _abs_power(ax: np.ndarray, alpha: float) -> np.ndarray:
    out = np.zeros_like(ax)
    nz = ax != 0.0
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        out[nz] = np.power(ax[nz], alpha)
    out[ax == 1.0] = 1.0
    return out


def _raise_range(values: np.ndarray, p: PowerMap):
    bad = ~np.isfinite(values) | (np.abs(values) > OVERFLOW_LIMIT)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise PowerRangeError(f"{p} overflows at entry {idx}")


def apply_power(p: PowerMap, x) -> np.ndarray:
    """Apply ``p`` elementwise to an arbitrary real array (no symmetry check)."""
    x = np.asarray(x, dtype=float)
    if p.family == "plain" and np.any(x < 0):
        idx = tuple(int(i) for i in np.argwhere(x < 0)[0])
        raise PowerDomainError(
            f"plain power is undefined at negative entry {idx} (value {x[idx]:.6g})"
        )
    mag = _abs_power(np.abs(x), p.alpha)
    if p.family in ("plain", "even"):
        out = mag
    elif p.family == "odd":
        out = np.sign(x) * mag
    else:
        odd = np.sign(x) * mag
        lam = p.blend_lambda if p.family == "blend" else 1.0 - p.blend_lambda
        out = lam * mag + (1.0 - lam) * odd
    _raise_range(out, p)
    return out


def eval_scalar(p: PowerMap, x: float) -> float:
    return float(apply_power(p, np.array([float(x)]))[0])


def apply_entrywise(p: PowerMap, A) -> np.ndarray:
    """``f[A]`` for a symmetric matrix or a stack of them."""
    out = apply_power(p, check_symmetric(A))
    out.setflags(write=False)
    return out


def derivative(p: PowerMap) -> DerivativeResult:
    """Formal derivative as ``coefficient * map``, e.g. ``(|x|^a)' = a * odd(a - 1)``."""
    if p.alpha == 0.0:
        raise UnsupportedQueryError("derivative of the zeroth power is not supported")
    swap = {
        "plain": "plain",
        "even": "odd",
        "odd": "even",
        "blend": "blend_swapped",
        "blend_swapped": "blend",
    }
    return DerivativeResult(p.alpha, PowerMap(swap[p.family], p.alpha - 1.0, p.blend_lambda))


def derivative_values(p: PowerMap, x) -> np.ndarray:
    d = derivative(p)
    return d.coefficient * apply_power(d.map, x)


def monomial(i: int) -> PowerMap:
    """``x**i`` on the whole real line as a member of the even/odd families."""
    return PowerMap("even" if i % 2 == 0 else "odd", float(i))
