"""Explicit matrix families that witness failures of Loewner properties.

Every generator is deterministic. Formula indices are 1-based, matching
``1 + eps*i*j`` and ``cos((i - j) pi / r)``. Where a closed form for the
certificate is known (a determinant or an eigenvalue), it is stored in
:attr:`ConstructionOutput.certificate_value` and can be recomputed from the
matrices with :meth:`ConstructionOutput.recompute`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis
from .exceptions import InputError, PowerDomainError, PowerRangeError, SearchFailure, UnsupportedQueryError
from .linalg import DEFAULT_TOL, check_symmetric, eigen_sym, gram, is_psd, numeric_rank, ones, pad_to
from .powers import PowerMap, monomial
from .properties import LoewnerProperty, defect_matrix

#: ``2**-1, 2**-2, ..., 2**-40``: the "sufficiently small epsilon" search grid.
EPS_GRID = tuple(2.0**-j for j in range(1, 41))
INT_TOL = 1e-12


def is_integer(x: float) -> bool:
    return abs(x - round(x)) <= INT_TOL


@dataclass(frozen=True)
class ConstructionOutput:
    """Matrices of one construction together with its certificate.

    ``certificate_kind`` says how ``certificate_value`` is recomputed:
    ``"det"`` (determinant of the defect matrix), ``"min_eigenvalue"`` or
    ``"quadratic_form"`` (``witness^T defect witness``). Constructions that
    are not tied to a specific power map leave ``power_map`` unset.
    """

    name: str
    matrices: dict
    certificate_value: float | None = None
    witness: np.ndarray | None = None
    certificate_kind: str | None = None
    prop: LoewnerProperty | None = None
    power_map: PowerMap | None = None
    lam: float = 0.5
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    def defect(self, p: PowerMap | None = None) -> np.ndarray:
        p = p or self.power_map
        if p is None or self.prop is None:
            raise InputError(f"{self.name} carries no property/power map to evaluate")
        return defect_matrix(self.prop, p, self.matrices["A"], self.matrices.get("B"), self.lam)

    def recompute(self) -> float:
        if self.certificate_kind is None:
            raise InputError(f"{self.name} has no certificate")
        M = self.defect()
        if self.certificate_kind == "det":
            return float(np.linalg.det(M))
        if self.certificate_kind == "min_eigenvalue":
            return is_psd(M).min_eigenvalue
        if self.certificate_kind == "quadratic_form":
            return float(self.witness @ M @ self.witness)
        raise InputError(f"unknown certificate kind {self.certificate_kind!r}")

    def padded(self, n: int) -> "ConstructionOutput":
        mats = {k: pad_to(v, n) for k, v in self.matrices.items()}
        wit = None
        if self.witness is not None:
            wit = np.concatenate([self.witness, np.zeros(n - self.witness.size)])
        return replace(self, matrices=mats, witness=wit)


# ---------------------------------------------------------------------------
# Basic families


def fh_matrix(n: int, eps: float) -> np.ndarray:
    """``((1 + eps*i*j))_{i,j=1..n}``, a positive rank-2 matrix."""
    if n < 2 or eps <= 0:
        raise InputError("fh_matrix needs n >= 2 and eps > 0")
    i = np.arange(1, n + 1, dtype=float)
    return check_symmetric(1.0 + eps * np.outer(i, i))


def cosine_factors(r: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(1, r + 1, dtype=float)
    return np.cos(j * np.pi / r), np.sin(j * np.pi / r)


def cosine_matrix(r: int) -> np.ndarray:
    """``(cos((i - j) pi / r))_{i,j=1..r}``; rank 2, equal to ``u u^T + v v^T``."""
    if r < 2:
        raise InputError("cosine_matrix needs r >= 2")
    i = np.arange(1, r + 1, dtype=float)
    return check_symmetric(np.cos(np.subtract.outer(i, i) * np.pi / r))


def alternating_eigenvalue(alpha: int, p: float) -> float:
    """Eigenvalue of ``odd_p[A_{alpha+3}]`` on the vector ``(1, -1, 1, ..., 1)``.

    Equals ``1 + 2 sum_{j=1}^{alpha/2+1} (-1)^j cos(j pi / (alpha+3))^p``.
    """
    if alpha < 2 or not is_integer(alpha) or int(round(alpha)) % 2:
        raise InputError("alpha must be an even integer >= 2")
    if p <= 0:
        raise InputError("p must be positive")
    a = int(round(alpha))
    r = a + 3
    total = 1.0
    for j in range(1, a // 2 + 2):
        total += 2.0 * (-1) ** j * math.cos(j * math.pi / r) ** p
    return total


def alternating_vector(r: int) -> np.ndarray:
    return np.array([(-1.0) ** i for i in range(r)])


def nonpositive_power_matrix(n: int) -> np.ndarray:
    """Nonnegative rank-2 matrix whose plain power fails positivity for every alpha <= 0."""
    if n == 2:
        return check_symmetric([[1.0, 0.5], [0.5, 1.0]])
    if n < 2:
        raise InputError("need n >= 2")
    s = 1.0 / math.sqrt(2.0)
    base = np.array([[1.0, s, 0.0], [s, 1.0, s], [0.0, s, 1.0]])
    return pad_to(base, n)


def _check_abc(a, b, c, cond, msg):
    if not cond:
        raise InputError(f"parameters (a, b, c) = ({a}, {b}, {c}) violate {msg}")


def _abc_pair(a, b, c):
    v = np.array([a, b, -c], dtype=float)
    B = ones(3)
    return check_symmetric(B + np.outer(v, v)), B


def mono_phi_family(a: float, b: float, c: float) -> ConstructionOutput:
    """``B = 1``, ``A = B + v v^T`` with ``v = (a, b, -c)``: ``|x|`` is not monotone.

    The certificate is ``det(|A| - |B|) = -4 b^2 (ac - 1)^2``.
    """
    _check_abc(a, b, c, a > b > 0 and 1 / a < c < 1 / b, "a > b > 0, 1/a < c < 1/b")
    A, B = _abc_pair(a, b, c)
    return ConstructionOutput(
        "mono-phi",
        {"A": A, "B": B},
        certificate_value=-4.0 * b * b * (a * c - 1.0) ** 2,
        certificate_kind="det",
        prop=LoewnerProperty.MONOTONICITY,
        power_map=PowerMap("even", 1.0),
        params={"a": a, "b": b, "c": c},
    )


def convex_psi2_family(a: float, b: float, c: float) -> ConstructionOutput:
    """Midpoint convexity failure of ``sign(x) x^2`` on a rank-2 pair.

    ``det C = -4^{-3} (2 b (ac - 1))^4`` where
    ``C = (odd2[A] + odd2[B]) / 2 - odd2[(A + B) / 2]``.
    """
    _check_abc(
        a, b, c, 0 < b < a and 1 / a < c < min(1 / b, 2 / a), "0 < b < a, 1/a < c < min(1/b, 2/a)"
    )
    A, B = _abc_pair(a, b, c)
    return ConstructionOutput(
        "convex-psi2",
        {"A": A, "B": B},
        certificate_value=-(4.0**-3) * (2.0 * b * (a * c - 1.0)) ** 4,
        certificate_kind="det",
        prop=LoewnerProperty.CONVEXITY,
        power_map=PowerMap("odd", 2.0),
        lam=0.5,
        params={"a": a, "b": b, "c": c},
    )


def subadd_psi_2x2(alpha: float) -> ConstructionOutput:
    """Rank-one pair on which ``sign(x)|x|^alpha`` (alpha < 0) is not sub-additive.

    ``A = (1,-1)(1,-1)^T``, ``B = (1,1/2)(1,1/2)^T`` and the certificate is
    ``det C`` for ``C = odd[A] + odd[B] - odd[A+B]``, which satisfies
    ``4^alpha det C = (2 - 2^alpha)(4^alpha + 2^alpha - 1 - 5^alpha) < 0``.
    """
    if alpha >= 0:
        raise InputError("subadd_psi_2x2 needs alpha < 0")
    A = gram([[1.0, -1.0]])
    B = gram([[1.0, 0.5]])
    p = PowerMap("odd", alpha)
    out = ConstructionOutput(
        "subadd-psi",
        {"A": A, "B": B},
        certificate_kind="det",
        prop=LoewnerProperty.SUB_ADDITIVITY,
        power_map=p,
        params={"alpha": alpha},
    )
    C = out.defect()
    return replace(out, certificate_value=float(C[0, 0] * C[1, 1] - C[0, 1] * C[1, 0]))


def subadd_psi_2x2_closed_form(alpha: float) -> float:
    """``det C_alpha`` from ``4^alpha det C = (2 - 2^alpha)(4^alpha + 2^alpha - 1 - 5^alpha)``."""
    return (2.0 - 2.0**alpha) * (4.0**alpha + 2.0**alpha - 1.0 - 5.0**alpha) / 4.0**alpha


def subadd_psi0_family(a: float, b: float, c: float, n: int = 3) -> ConstructionOutput:
    """Rank-one pair on which ``sign(x)`` is not sub-additive (needs n >= 3)."""
    _check_abc(a, b, c, 0 < a < b < c, "0 < a < b < c")
    if n < 3:
        raise InputError("the sign-map pair needs n >= 3")
    out = ConstructionOutput(
        "subadd-psi0",
        {"A": gram([[-a, c, c]]), "B": gram([[c, -b, c]])},
        certificate_kind="min_eigenvalue",
        prop=LoewnerProperty.SUB_ADDITIVITY,
        power_map=PowerMap("odd", 0.0),
        params={"a": a, "b": b, "c": c},
    ).padded(n)
    v = is_psd(out.defect())
    return replace(out, certificate_value=v.min_eigenvalue, witness=v.witness)


def blend_subadd_counterexample(n: int, lam: float = 0.5, alpha: float = 1.0) -> ConstructionOutput:
    """``A = 1_{2x2} ⊕ 0``, ``B = [[1,-1],[-1,1]] ⊕ 0``.

    Defeats sub-additivity of ``|x|^alpha`` for every alpha and of the blend
    ``lam |x| + (1-lam) x`` for ``0 < lam < 1``.
    """
    if n < 2:
        raise InputError("need n >= 2")
    p = PowerMap("blend", alpha, lam)
    out = ConstructionOutput(
        "blend-subadd",
        {"A": pad_to(gram([[1.0, 1.0]]), n), "B": pad_to(gram([[1.0, -1.0]]), n)},
        certificate_kind="min_eigenvalue",
        prop=LoewnerProperty.SUB_ADDITIVITY,
        power_map=p,
        params={"n": n, "lam": lam, "alpha": alpha},
    )
    v = is_psd(out.defect())
    return replace(out, certificate_value=v.min_eigenvalue, witness=v.witness)


# ---------------------------------------------------------------------------
# Small structural pairs (no closed-form certificate)


def unit_monotone_pair(n: int):
    """``A = 1 + u u^T``, ``B = 1`` with ``u = (1, -1)``, padded; kills monotonicity for alpha < 1."""
    B = ones(2)
    A = B + gram([[1.0, -1.0]])
    return pad_to(A, n), pad_to(B, n)


def convex_half_pair(n: int):
    """``A = 1_{2x2} ⊕ 0``, ``B = 0``: the midpoint gap is ``(1/2 - 2^-alpha) f[A]``."""
    return pad_to(ones(2), n), np.zeros((n, n))


def convex_phi1_pair(n: int):
    """Pair whose segment crosses zero off the diagonal, so ``|x|`` leaves a positive off-diagonal gap."""
    B = gram([[1.0, -1.0]])
    A = B + 2.0 * gram([[1.0, 1.0]])
    return pad_to(A, n), pad_to(B, n)


def ones_pair(n: int):
    """``A = B = 1_{n x n}``: the additivity gap is ``±(2^alpha - 2) 1``."""
    return ones(n), ones(n)


def scaled_rank_one_pair(n: int):
    """``A = 1``, ``B = 1/4``: ``f[A] - f[B] = (1 - 4^-alpha) f[1]``, negative for alpha < 0."""
    return ones(n), ones(n) / 4.0


def perturbation_pair(r: int, n: int, eps: float):
    """``(A + eps z z^T, A)`` for ``A = A_r ⊕ 0`` and ``z`` in the image of ``A_r`` with no zero entry.

    First-order (monotonicity) and second-order (convexity) differences of
    ``f`` along this pair are governed by ``f'[A_r]`` and ``f''[A_r]``.
    """
    if r > n:
        raise InputError("cosine block larger than n")
    j = np.arange(1, r + 1, dtype=float)
    z = np.cos((j + 1.0 / 3.0) * np.pi / r)
    base = cosine_matrix(r)
    return pad_to(base + eps * np.outer(z, z), n), pad_to(base, n)


# ---------------------------------------------------------------------------
# Witness-vector constructions


def _relative_negative(q: float, M: np.ndarray, x: np.ndarray, tol: float) -> bool:
    return q < -tol * (1.0 + np.linalg.norm(M)) * float(x @ x)


def superadd_witness(p: PowerMap, n: int, tol: float = 1e-12) -> ConstructionOutput:
    """Rank-one certificate that ``p`` is not super-additive, with ``A = 1``.

    * plain power, non-integer alpha in (1, n): ``B = eps u u^T`` for the
      first ``eps`` in :data:`EPS_GRID` with a negative quadratic form;
    * ``|x|^alpha`` with odd alpha < n, or ``sign(x)|x|^alpha`` with even
      alpha < n: ``B = u u^T`` and the quadratic form equals -1.
    """
    a = p.alpha
    fam = p.family
    if fam in ("even", "odd") and is_integer(a) and 1 <= a < n:
        ai = int(round(a))
        if (fam == "even") != (ai % 2 == 1):
            raise UnsupportedQueryError(f"{p} is super-additive on rank-one matrices")
        gs = [monomial(i) for i in range(1, ai + 1)] + [PowerMap(fam, float(ai))]
        u, vs = analysis.witness_vectors(gs, None, n)
        x = vs[-1]
        A, B = ones(n), check_symmetric(np.outer(u, u))
        M = defect_matrix(LoewnerProperty.SUPER_ADDITIVITY, p, A, B)
        return ConstructionOutput(
            "superadd-witness",
            {"A": A, "B": B},
            certificate_value=float(x @ M @ x),
            witness=x,
            certificate_kind="quadratic_form",
            prop=LoewnerProperty.SUPER_ADDITIVITY,
            power_map=p,
            params={"n": n, "map": str(p), "u": u.tolist()},
        )
    if not is_integer(a) and 1 < a < n:
        fl = int(math.floor(a))
        gs = [PowerMap("plain", float(i)) for i in range(1, fl + 1)] + [PowerMap("plain", a)]
        u, vs = analysis.witness_vectors(gs, None, n)
        x = vs[-1]
        A = ones(n)
        for eps in EPS_GRID:
            B = check_symmetric(eps * np.outer(u, u))
            M = defect_matrix(LoewnerProperty.SUPER_ADDITIVITY, p, A, B)
            q = float(x @ M @ x)
            if _relative_negative(q, M, x, tol):
                return ConstructionOutput(
                    "superadd-witness",
                    {"A": A, "B": B},
                    certificate_value=q,
                    witness=x,
                    certificate_kind="quadratic_form",
                    prop=LoewnerProperty.SUPER_ADDITIVITY,
                    power_map=p,
                    params={"n": n, "map": str(p), "u": u.tolist(), "eps": eps},
                )
        raise SearchFailure(f"no epsilon in the grid certifies {p} at n={n}")
    raise UnsupportedQueryError(f"no super-additivity witness for {p} at n={n}")


def subadd_witness(p: PowerMap, n: int, tol: float = 1e-12) -> ConstructionOutput:
    """Rank-one nonnegative certificate against sub-additivity with ``A = 1``, ``B = eps u u^T``.

    Covers alpha in (0, 1) (n >= 2) and alpha < 0 (n >= 3).
    """
    a = p.alpha
    if 0 < a < 1 and n >= 2:
        gs = [PowerMap("plain", 1.0), PowerMap("plain", a)]
        target = 0
    elif a < 0 and n >= 3:
        gs = [PowerMap("plain", a), PowerMap("plain", 1.0), PowerMap("plain", 2.0)]
        target = 2
    else:
        raise UnsupportedQueryError(f"no sub-additivity witness for {p} at n={n}")
    u, vs = analysis.witness_vectors(gs, None, n)
    x = vs[target]
    A = ones(n)
    for eps in EPS_GRID:
        B = check_symmetric(eps * np.outer(u, u))
        try:
            M = defect_matrix(LoewnerProperty.SUB_ADDITIVITY, p, A, B)
        except PowerRangeError:
            break
        q = float(x @ M @ x)
        if _relative_negative(q, M, x, tol):
            return ConstructionOutput(
                "subadd-witness",
                {"A": A, "B": B},
                certificate_value=q,
                witness=x,
                certificate_kind="quadratic_form",
                prop=LoewnerProperty.SUB_ADDITIVITY,
                power_map=p,
                params={"n": n, "map": str(p), "u": u.tolist(), "eps": eps},
            )
    raise SearchFailure(f"no epsilon in the grid certifies {p} at n={n}")


# ---------------------------------------------------------------------------
# Rank lifting


def _orthonormal_completion(U: np.ndarray, count: int) -> np.ndarray:
    n = U.shape[0]
    basis = [U[:, i] for i in range(U.shape[1])]
    extra = []
    for i in range(n):
        if len(extra) == count:
            break
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            v = v / norm
            basis.append(v)
            extra.append(v)
    if len(extra) < count:
        raise SearchFailure("orthonormal completion ran out of directions")
    return np.stack(extra, axis=1)


def rank_lift(out: ConstructionOutput, k: int, p: PowerMap, prop, tol: float = DEFAULT_TOL) -> ConstructionOutput:
    """Raise the rank of ``A`` to exactly ``k`` while keeping the violation.

    ``A' = A + eps C`` and ``B' = B + eps C`` where ``C`` projects onto
    ``k - rank(A)`` directions orthogonal to the range of ``A``; ``eps``
    is halved from 1 until the defect matrix is still indefinite and
    ``rank(A') = k``.
    """
    prop = LoewnerProperty.parse(prop)
    A = check_symmetric(out.matrices["A"])
    B = out.matrices.get("B")
    n = A.shape[0]
    dec = eigen_sym(A)
    keep = np.abs(dec.eigenvalues) > tol * (1.0 + np.linalg.norm(A))
    l = int(keep.sum())
    if not l < k <= n:
        raise InputError(f"need rank(A) = {l} < k = {k} <= n = {n}")
    W = _orthonormal_completion(dec.eigenvectors[:, keep], k - l)
    C = W @ W.T
    C = (C + C.T) / 2.0
    eps = 1.0
    while eps >= 2.0**-40:
        A2 = check_symmetric(A + eps * C)
        B2 = None if B is None else check_symmetric(B + eps * C)
        try:
            M = defect_matrix(prop, p, A2, B2, out.lam)
        except (PowerDomainError, PowerRangeError):
            M = None
        if M is not None:
            v = is_psd(M, tol)
            if not v.is_psd and numeric_rank(A2, tol) == k:
                mats = {"A": A2} if B2 is None else {"A": A2, "B": B2}
                return ConstructionOutput(
                    f"{out.name}+lift{k}",
                    mats,
                    certificate_value=v.min_eigenvalue,
                    witness=v.witness,
                    certificate_kind="min_eigenvalue",
                    prop=prop,
                    power_map=p,
                    lam=out.lam,
                    params={**out.params, "k": k, "eps": eps},
                )
        eps /= 2.0
    raise SearchFailure(f"rank lift to k={k} failed for every eps >= 2^-40")
