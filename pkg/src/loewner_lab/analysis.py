"""Analytic helpers behind the counterexamples.

Generalised Dirichlet polynomials, generalised Vandermonde matrices of
even/odd powers, the witness-vector construction used for the
super/sub-additivity certificates, the integral form of ``f[A+B] - f[A]``
and the two-variable gap function for rank-one sub-additivity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InputError, PowerRangeError, SearchFailure
from .linalg import check_symmetric
from .powers import PowerMap, apply_power, derivative


# ---------------------------------------------------------------------------
# Dirichlet polynomials


@dataclass(frozen=True)
class DirichletPolynomial:
    """``x -> sum_i a_i * lambda_i**x`` with ``lambda_0 > lambda_1 > ... > 0``."""

    coefficients: tuple[float, ...]
    bases: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(c) for c in self.coefficients)
        lam = tuple(float(b) for b in self.bases)
        if len(a) != len(lam) or not a:
            raise InputError("coefficients and bases must be nonempty and of equal length")
        if a[0] == 0.0:
            raise InputError("leading coefficient must be nonzero")
        if any(b <= 0 for b in lam) or any(x <= y for x, y in zip(lam, lam[1:])):
            raise InputError("bases must be positive and strictly decreasing")
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "bases", lam)

    @property
    def max_zeros(self) -> int:
        return len(self.bases) - 1

    def __call__(self, x):
        return dirichlet_eval(self, x)


def dirichlet_eval(d: DirichletPolynomial, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        terms = [a * np.power(b, x) for a, b in zip(d.coefficients, d.bases)]
    out = np.sum(terms, axis=0)
    if not np.all(np.isfinite(out)):
        raise PowerRangeError("Dirichlet polynomial overflowed")
    return float(out) if out.ndim == 0 else out


def dirichlet_sign_changes(d: DirichletPolynomial, lo: float, hi: float, grid: int) -> int:
    """Strict sign changes of ``d`` on a uniform grid of ``grid`` points over [lo, hi].

    Exact zeros on the grid are skipped, so a crossing that lands on a
    node is still counted once. The count is a lower bound for the number
    of real zeros in the interval.
    """
    if not lo < hi or grid < 2:
        raise InputError("need lo < hi and grid >= 2")
    s = np.sign(dirichlet_eval(d, np.linspace(lo, hi, grid)))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def alternating_dirichlet(alpha: int) -> DirichletPolynomial:
    """The alternating eigenvalue of ``odd_p[A_{alpha+3}]`` as a Dirichlet polynomial in p."""
    r = alpha + 3
    js = range(alpha // 2 + 2)
    return DirichletPolynomial(
        tuple(1.0 if j == 0 else 2.0 * (-1) ** j for j in js),
        tuple(np.cos(j * np.pi / r) for j in js),
    )


# ---------------------------------------------------------------------------
# Elimination


def lu_factor(M: np.ndarray):
    """Gaussian elimination with partial pivoting; returns (LU, perm, sign)."""
    a = np.array(M, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InputError("lu_factor needs a square matrix")
    perm = np.arange(n)
    sign = 1.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
            sign = -sign
        if a[k, k] == 0.0:
            continue
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return a, perm, sign


def det(M) -> float:
    lu, _, sign = lu_factor(M)
    return float(sign * np.prod(np.diag(lu)))


def _lu_solve(lu, perm, b):
    n = lu.shape[0]
    y = np.array(b, dtype=float)[perm]
    for i in range(n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
    return y


def solve(M, b) -> np.ndarray:
    """Solve ``M x = b`` with one step of iterative refinement."""
    M = np.asarray(M, dtype=float)
    lu, perm, _ = lu_factor(M)
    if np.any(np.diag(lu) == 0.0):
        raise InputError("singular system")
    b = np.asarray(b, dtype=float)
    x = _lu_solve(lu, perm, b)
    return x + _lu_solve(lu, perm, b - M @ x)


# ---------------------------------------------------------------------------
# Generalised Vandermonde matrices and witness vectors


def psi_vandermonde(x, alphas) -> np.ndarray:
    """The ``2n x 2n`` matrix ``[[even_i(x_j), even_i(-x_j)], [odd_i(x_j), odd_i(-x_j)]]``."""
    x = np.asarray(x, dtype=float).ravel()
    al = np.asarray(alphas, dtype=float).ravel()
    if x.size != al.size or x.size == 0:
        raise InputError("nodes and exponents must be nonempty and of equal length")
    if np.any(np.diff(x) <= 0) or np.any(np.diff(al) <= 0):
        raise InputError("nodes and exponents must be strictly increasing")
    if np.any(x <= 0):
        raise InputError("nodes must be positive")
    n = x.size
    out = np.empty((2 * n, 2 * n))
    for i, a in enumerate(al):
        even, odd = PowerMap("even", a), PowerMap("odd", a)
        out[i, :n] = apply_power(even, x)
        out[i, n:] = apply_power(even, -x)
        out[n + i, :n] = apply_power(odd, x)
        out[n + i, n:] = apply_power(odd, -x)
    return out


def _gray_codes(m: int):
    for i in range(2**m):
        g = i ^ (i >> 1)
        yield tuple(-1.0 if (g >> b) & 1 else 1.0 for b in range(m))


def _normalised_det(G: np.ndarray) -> float:
    norms = np.linalg.norm(G, axis=0)
    if np.any(norms == 0):
        return 0.0
    return abs(det(G / norms))


def select_nodes(gs: Sequence[PowerMap], n: int, min_det: float = 1e-8) -> np.ndarray:
    """Pick ``u`` from ``±(2j-1)/(2n+1)`` so that ``(g_i(u_j))_{i,j<=m}`` is nonsingular.

    Magnitude subsets are tried in lexicographic order and signs in Gray-code
    order; plain maps restrict the search to positive nodes.
    """
    m = len(gs)
    if m == 0 or m > n:
        raise InputError(f"need 1 <= number of functions <= n, got {m} and n={n}")
    grid = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n + 1.0)
    positive_only = any(g.nonneg_only for g in gs)
    sign_patterns = [(1.0,) * m] if positive_only else list(_gray_codes(m))
    for subset in itertools.combinations(range(n), m):
        mags = grid[list(subset)]
        for signs in sign_patterns:
            nodes = mags * np.array(signs)
            G = np.array([apply_power(g, nodes) for g in gs])
            if _normalised_det(G) > min_det:
                rest = [grid[j] for j in range(n) if j not in subset]
                return np.concatenate([nodes, rest])
    raise SearchFailure("no node selection makes the function matrix nonsingular")


def witness_vectors(gs: Sequence[PowerMap], cs: Sequence[float] | None, n: int):
    """Return ``(u, [v_1, ..., v_m])`` with ``v_i^T F[u u^T] v_i = c_i`` for ``F = sum c_i g_i``.

    ``u`` and the ``v_i`` depend only on the functions, never on ``cs``;
    ``cs`` is accepted for symmetry with the mathematical statement and
    validated for length only. Each ``v_i`` is orthogonal to ``g_j[u]`` for
    ``j != i`` and satisfies ``v_i . g_i[u] = 1``.
    """
    gs = list(gs)
    if len({(g.family, g.alpha, g.blend_lambda) for g in gs}) != len(gs):
        raise InputError("functions must be pairwise distinct")
    if any(g.family.startswith("blend") for g in gs):
        raise InputError("witness vectors need multiplicative functions (plain/even/odd)")
    if cs is not None and len(cs) != len(gs):
        raise InputError("need one coefficient per function")
    m = len(gs)
    u = select_nodes(gs, n)
    G = np.array([apply_power(g, u[:m]) for g in gs])
    vs = []
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        v = np.zeros(n)
        v[:m] = solve(G, e)
        vs.append(v)
    return u, vs


def combination_matrix(gs: Sequence[PowerMap], cs: Sequence[float], X) -> np.ndarray:
    """``F[X]`` for ``F = sum_i c_i g_i``."""
    return sum(c * apply_power(g, X) for g, c in zip(gs, cs))


# ---------------------------------------------------------------------------
# Integral identity


def simpson(values: np.ndarray, h: float) -> np.ndarray:
    """Composite Simpson rule along axis 0 for an odd number of samples."""
    npts = values.shape[0]
    if npts < 3 or npts % 2 == 0:
        raise InputError("Simpson needs an odd number (>= 3) of samples")
    w = np.ones(npts)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (h / 3.0) * np.tensordot(w, values, axes=1)


MAX_QUAD_POINTS = 2**15


def _integral_residual(p: PowerMap, a: np.ndarray, b: np.ndarray, intervals: int) -> float:
    t = np.linspace(0.0, 1.0, intervals + 1)
    path = a[None] + t[:, None, None] * b[None]
    d = derivative(p)
    integrand = b[None] * (d.coefficient * apply_power(d.map, path))
    integral = simpson(integrand, 1.0 / intervals)
    residual = apply_power(p, a + b) - apply_power(p, a) - integral
    out = float(np.max(np.abs(residual)))
    if not np.isfinite(out):
        raise PowerRangeError("quadrature produced a non-finite residual")
    return out


def superadd_integral_residual(p: PowerMap, A, B, quad_points: int = 64) -> float:
    """Max-norm residual of ``f[A+B] = f[A] + int_0^1 B ∘ f'[A + tB] dt``.

    Composite Simpson with interval doubling, starting from ``quad_points``
    intervals, until two successive residuals differ by less than 1e-10 or
    ``2**15`` intervals are reached.
    """
    if p.alpha <= 1:
        raise InputError("the integral identity is checked for alpha > 1")
    if quad_points < 8:
        raise InputError("quad_points must be at least 8")
    a = check_symmetric(A)
    b = check_symmetric(B)
    if a.shape != b.shape:
        raise InputError("dimension mismatch")
    if p.nonneg_only and (np.any(a < 0) or np.any(a + b < 0)):
        raise InputError("plain power needs nonnegative matrices along the path")
    intervals = quad_points + (quad_points % 2)
    prev = _integral_residual(p, a, b, intervals)
    while intervals < MAX_QUAD_POINTS:
        intervals *= 2
        cur = _integral_residual(p, a, b, intervals)
        if abs(cur - prev) < 1e-10:
            return cur
        prev = cur
    return prev


# ---------------------------------------------------------------------------
# Rank-one sub-additivity gap on 2x2 matrices


def subadd_gap_2x2(alpha: float, x: float, y: float) -> tuple[float, float]:
    """``f = e^{ax} + e^{ay} - (e^x + e^y)^a`` and ``g = log f`` for ``a < 0``."""
    if alpha >= 0:
        raise InputError("the gap function is defined for alpha < 0")
    with np.errstate(over="raise"):
        try:
            f = np.exp(alpha * x) + np.exp(alpha * y) - (np.exp(x) + np.exp(y)) ** alpha
        except FloatingPointError:
            raise PowerRangeError("gap function overflowed") from None
    if not np.isfinite(f) or f <= 0:
        raise PowerRangeError(f"gap function not representable at ({x}, {y})")
    return float(f), float(np.log(f))


def subadd_gap_hessian(alpha: float, x: float, y: float) -> np.ndarray:
    """Closed-form Hessian of ``g(x, y) = log f(e^x, e^y)``."""
    f, _ = subadd_gap_2x2(alpha, x, y)
    ex, ey = np.exp(x), np.exp(y)
    E = ex + ey
    a = alpha
    fx = a * np.exp(a * x) - a * E ** (a - 1) * ex
    fy = a * np.exp(a * y) - a * E ** (a - 1) * ey
    fxx = a * a * np.exp(a * x) - a * E ** (a - 1) * ex - a * (a - 1) * E ** (a - 2) * ex * ex
    fyy = a * a * np.exp(a * y) - a * E ** (a - 1) * ey - a * (a - 1) * E ** (a - 2) * ey * ey
    fxy = -a * (a - 1) * E ** (a - 2) * ex * ey
    return np.array(
        [
            [(f * fxx - fx * fx) / f**2, (f * fxy - fx * fy) / f**2],
            [(f * fxy - fx * fy) / f**2, (f * fyy - fy * fy) / f**2],
        ]
    )
