"""Closed-form classification of entrywise powers by Loewner property.

A :class:`PowerSet` is a finite union of rays, integer progressions,
intervals and point sets. Membership queries return a three-valued
:class:`Membership`: ``UNKNOWN`` only arises for blends, where the
closed form pins down the threshold but not every exponent below it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .exceptions import InputError, UnsupportedQueryError
from .properties import LoewnerProperty

INT_TOL = 1e-12
FAMILY_NAMES = ("plain", "even", "odd", "blend")


class Membership(str, enum.Enum):
    IN = "in"
    OUT = "out"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Cone:
    """Rank-constrained PSD matrices: ``n x n``, rank at most ``k``, entries in ``domain``."""

    n: int
    k: int
    domain: str = "real"

    def __post_init__(self):
        if int(self.n) != self.n or int(self.k) != self.k:
            raise InputError("n and k must be integers")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        if self.n < 2:
            raise InputError("cones need n >= 2")
        if not 1 <= self.k <= self.n:
            raise InputError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        dom = str(self.domain).lower()
        if dom in ("nonnegative", "[0,inf)"):
            dom = "nonneg"
        if dom not in ("nonneg", "real"):
            raise InputError(f"domain must be 'nonneg' or 'real', got {self.domain!r}")
        object.__setattr__(self, "domain", dom)

    @classmethod
    def for_family(cls, n: int, k: int, family: str) -> "Cone":
        return cls(n, k, "nonneg" if family == "plain" else "real")


# ---------------------------------------------------------------------------
# Set components


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "∞" if x > 0 else "−∞"
    s = str(int(x)) if float(x).is_integer() else repr(float(x))
    return s.replace("-", "−")


def _is_int(x: float) -> bool:
    return abs(x - round(x)) <= INT_TOL


@dataclass(frozen=True)
class Ray:
    """``[start, inf)``."""

    start: float

    def __contains__(self, a: float) -> bool:
        return a >= self.start - INT_TOL

    def render(self) -> str:
        return f"[{_fmt(self.start)}, ∞)"

    def to_dict(self) -> dict:
        return {"type": "ray", "start": self.start}


@dataclass(frozen=True)
class IntegerProgression:
    """``{start, start + step, ...}``."""

    start: int
    step: int

    def __contains__(self, a: float) -> bool:
        if not _is_int(a):
            return False
        m = int(round(a))
        return m >= self.start and (m - self.start) % self.step == 0

    def render(self) -> str:
        return {(1, 1): "ℕ", (2, 2): "2ℕ", (1, 2): "(−1+2ℕ)"}.get(
            (self.start, self.step), f"{{{self.start}, {self.start + self.step}, …}}"
        )

    def to_dict(self) -> dict:
        return {"type": "integers", "start": self.start, "step": self.step}


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __contains__(self, a: float) -> bool:
        lo_ok = a >= self.lo - INT_TOL if self.lo_closed else a > self.lo + INT_TOL
        hi_ok = a <= self.hi + INT_TOL if self.hi_closed else a < self.hi - INT_TOL
        return lo_ok and hi_ok

    def render(self) -> str:
        left = "[" if self.lo_closed and math.isfinite(self.lo) else "("
        right = "]" if self.hi_closed and math.isfinite(self.hi) else ")"
        return f"{left}{_fmt(self.lo)}, {_fmt(self.hi)}{right}"

    def to_dict(self) -> dict:
        return {
            "type": "interval",
            "lo": self.lo,
            "hi": self.hi,
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


@dataclass(frozen=True)
class FinitePoints:
    points: tuple[float, ...]

    def __contains__(self, a: float) -> bool:
        return any(abs(a - p) <= INT_TOL for p in self.points)

    def render(self) -> str:
        return "{" + ", ".join(_fmt(p) for p in self.points) + "}"

    def to_dict(self) -> dict:
        return {"type": "points", "points": list(self.points)}


_REALS = (Interval(-math.inf, 0.0, False, False), Ray(0.0))


@dataclass(frozen=True)
class PowerSet:
    """Union of components; for blends, ``outer`` holds exponents not yet ruled out.

    Exact sets have ``outer is None``. A blend set answers ``IN`` on its
    components, ``OUT`` outside ``outer`` and ``UNKNOWN`` in between.
    """

    components: tuple = ()
    outer: "PowerSet | None" = None
    label: str | None = None

    def _exact(self, alpha: float) -> bool:
        return any(alpha in c for c in self.components)

    def contains(self, alpha: float) -> Membership:
        alpha = float(alpha)
        if self._exact(alpha):
            return Membership.IN
        if self.outer is None or self.outer.contains(alpha) is Membership.OUT:
            return Membership.OUT
        return Membership.UNKNOWN

    def __contains__(self, alpha: float) -> bool:
        return self.contains(alpha) is Membership.IN

    @property
    def ray_start(self) -> float | None:
        starts = [c.start for c in self.components if isinstance(c, Ray)]
        return min(starts) if starts else None

    @property
    def is_exact(self) -> bool:
        return self.outer is None

    def render(self) -> str:
        if self.label:
            return self.label
        if not self.components:
            return "∅"
        if tuple(self.components) == _REALS:
            return "ℝ"
        return " ∪ ".join(c.render() for c in self.components)

    __str__ = render

    def to_dict(self) -> dict:
        d = {
            "components": [c.to_dict() for c in self.components],
            "render": self.render(),
            "exact": self.is_exact,
        }
        if self.outer is not None:
            d["outer"] = self.outer.to_dict()
        return d


def contains(s: PowerSet, alpha: float) -> Membership:
    return s.contains(alpha)


# ---------------------------------------------------------------------------
# Classification


_LATTICE = {"plain": (1, 1), "even": (2, 2), "odd": (1, 2)}


def _lattice_ray(family: str, start: float) -> PowerSet:
    lat = IntegerProgression(*_LATTICE[family])
    if start <= lat.start:
        return PowerSet((Ray(float(start)),))
    return PowerSet((lat, Ray(float(start))))


def _check_family(family: str, cone: Cone) -> str:
    family = str(family).lower()
    if family not in FAMILY_NAMES:
        raise InputError(f"unknown family {family!r}; expected one of {', '.join(FAMILY_NAMES)}")
    if family == "plain" and cone.domain != "nonneg":
        raise InputError("the plain power only acts on nonnegative matrices; use domain 'nonneg'")
    if family != "plain" and cone.domain == "nonneg":
        # even and odd extensions agree with the plain power on [0, inf)
        return "plain"
    return family


def _subadditive_set(family: str, n: int, k: int) -> PowerSet:
    if family == "even":
        return PowerSet(())
    if family == "plain":
        if k >= 2:
            return PowerSet((FinitePoints((1.0,)),))
        if n > 2:
            return PowerSet((FinitePoints((0.0, 1.0)),))
        return PowerSet((Interval(-math.inf, 0.0, False, True), FinitePoints((1.0,))))
    if (n, k) == (2, 1):
        return PowerSet((FinitePoints((0.0, 1.0)),))
    return PowerSet((FinitePoints((1.0,)),))


def _exact_set(prop: LoewnerProperty, family: str, n: int, k: int) -> PowerSet:
    P = LoewnerProperty
    if prop is P.SUB_ADDITIVITY:
        return _subadditive_set(family, n, k)
    if k == 1:
        if prop is P.POSITIVITY:
            return PowerSet(_REALS)
        if prop is P.MONOTONICITY:
            return PowerSet((Ray(0.0),))
        if prop is P.CONVEXITY:
            return PowerSet((Ray(1.0),))
    return _lattice_ray(family, critical_exponent(prop, family, Cone.for_family(n, k, family)))


def power_set(prop, family: str, cone: Cone, blend_lambda: float = 0.5) -> PowerSet:
    """The set of exponents ``alpha`` for which the family has ``prop`` on ``cone``.

    For ``family="blend"`` with ``0 < blend_lambda < 1`` the answer is
    three-valued: exponents where both the even and odd powers have the
    property are in (the property is preserved by convex combinations),
    exponents where the plain power fails are out (a blend restricted to
    nonnegative matrices is the plain power), the rest are unknown.
    Sub-additivity additionally fails for every positive exponent.
    """
    prop = LoewnerProperty.parse(prop)
    family = _check_family(family, cone)
    n, k = cone.n, cone.k
    if family != "blend":
        return _exact_set(prop, family, n, k)
    if not 0.0 <= blend_lambda <= 1.0:
        raise InputError("blend_lambda must lie in [0, 1]")
    if blend_lambda == 1.0:
        return _exact_set(prop, "even", n, k)
    if blend_lambda == 0.0:
        return _exact_set(prop, "odd", n, k)
    plain = _exact_set(prop, "plain", n, k)
    if prop is LoewnerProperty.SUB_ADDITIVITY:
        # every positive exponent fails; nonpositive ones survive only where the plain power does
        outer = tuple(
            FinitePoints(tuple(x for x in c.points if x <= 0)) if isinstance(c, FinitePoints) else c
            for c in plain.components
        )
        outer = tuple(c for c in outer if not (isinstance(c, FinitePoints) and not c.points))
        return PowerSet((), outer=PowerSet(outer))
    if k == 1 and prop is not LoewnerProperty.SUPER_ADDITIVITY:
        comps = _exact_set(prop, "even", n, k).components
    else:
        comps = (Ray(critical_exponent(prop, "plain", Cone(n, k, "nonneg"))),)
    return PowerSet(comps, outer=plain)


def critical_exponent(prop, family: str, cone: Cone) -> float:
    """Smallest ``alpha0`` such that every ``alpha >= alpha0`` has the property.

    ``n-2, n-1, n, n`` for positivity, monotonicity, convexity and
    super-additivity when ``k >= 2``, and ``0, 0, 1, n`` when ``k == 1``,
    for every family.
    """
    prop = LoewnerProperty.parse(prop)
    family = str(family).lower()
    if family not in FAMILY_NAMES:
        raise InputError(f"unknown family {family!r}")
    if family == "plain" and cone.domain != "nonneg":
        raise InputError("the plain power only acts on nonnegative matrices; use domain 'nonneg'")
    if prop is LoewnerProperty.SUB_ADDITIVITY:
        raise UnsupportedQueryError("sub-additivity sets contain no ray, so there is no critical exponent")
    n, k = cone.n, cone.k
    if k == 1:
        return float({"positivity": 0, "monotonicity": 0, "convexity": 1, "super-additivity": n}[prop.value])
    return float({"positivity": n - 2, "monotonicity": n - 1, "convexity": n, "super-additivity": n}[prop.value])


def bhatia_elsner_min_n(p: float, family: str) -> int:
    """Smallest ``n`` at which ``|x|^p`` or ``sign(x)|x|^p`` fails to preserve positivity.

    Powers in the matching integer lattice preserve positivity in every
    dimension and are rejected.
    """
    family = str(family).lower()
    if family not in ("even", "odd"):
        raise InputError("family must be 'even' or 'odd'")
    if not p > 0 or not math.isfinite(p):
        raise InputError("p must be a positive real")
    lat = IntegerProgression(*_LATTICE[family])
    if p in lat:
        raise InputError(f"{family}:{p} preserves positivity in every dimension (Schur product)")
    return int(math.floor(p + INT_TOL)) + 3


def table_rows(ns, ks, families=("plain", "even", "odd"), properties=None, blend_lambda=0.5):
    """Flattened rows ``{property, family, n, k, components, set, critical_exponent}``."""
    props = [LoewnerProperty.parse(p) for p in (properties or list(LoewnerProperty))]
    rows = []
    for prop in props:
        for fam in families:
            for n in ns:
                for k in ks:
                    if not 1 <= k <= n:
                        continue
                    cone = Cone.for_family(n, k, fam)
                    s = power_set(prop, fam, cone, blend_lambda)
                    try:
                        ce = critical_exponent(prop, fam, cone)
                    except UnsupportedQueryError:
                        ce = None
                    rows.append(
                        {
                            "property": prop.value,
                            "family": fam,
                            "n": n,
                            "k": k,
                            "components": [c.to_dict() for c in s.components],
                            "set": s.render(),
                            "exact": s.is_exact,
                            "critical_exponent": ce,
                        }
                    )
    return rows
