"""Numerical cross-examination of the classification.

:func:`check_property` first runs every structured candidate that fits the
cone (explicit counterexample families, the ``1 + eps*i*j`` grid, padded
cosine matrices, perturbation pairs, rank-one witnesses) and then a budget
of seeded random instances. A reported violation always comes with a
witness vector whose quadratic form against the defect matrix is negative;
"no violation" is evidence, never proof.

Random instances come from a counter-based generator keyed by
``(seed, index)``, so the outcome does not depend on evaluation order or on
the number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import constructions as cx
from .classifier import Cone, Membership, critical_exponent, power_set
from .exceptions import InconclusiveError, InputError, PowerDomainError, PowerRangeError, SearchFailure, UnsupportedQueryError
from .linalg import DEFAULT_TOL, check_symmetric, eigen_sym, frobenius, min_eigenvalues, pad_to
from .powers import PowerMap, apply_power
from .properties import LoewnerProperty, defect_matrix

CHUNK = 64
CONVEX_LAMBDAS = (0.25, 0.5, 0.75)
#: epsilons used by the perturbation and ``1 + eps*i*j`` pair families
PAIR_EPS = tuple(2.0**-j for j in range(1, 21))


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class ViolationCertificate:
    """Matrices plus a witness ``x`` with ``x^T M x < 0`` for the defect matrix ``M``."""

    prop: LoewnerProperty
    power_map: PowerMap
    matrices: dict
    witness: np.ndarray
    quadratic_form_value: float
    source: dict
    lam: float | None = None

    def defect(self) -> np.ndarray:
        return defect_matrix(
            self.prop, self.power_map, self.matrices["A"], self.matrices.get("B"), self.lam or 0.5
        )

    def recompute(self) -> float:
        return float(self.witness @ self.defect() @ self.witness)

    def to_dict(self) -> dict:
        d = {
            "property": self.prop.value,
            "map": str(self.power_map),
            "matrices": {k: np.asarray(v).tolist() for k, v in self.matrices.items()},
            "witness": self.witness.tolist(),
            "quadratic_form_value": self.quadratic_form_value,
            "source": dict(self.source),
        }
        if self.lam is not None:
            d["lambda"] = self.lam
        return d


@dataclass(frozen=True)
class Verdict:
    certificate: ViolationCertificate | None
    samples_used: int
    constructions_tried: int
    skipped: int = 0

    @property
    def violation_found(self) -> bool:
        return self.certificate is not None

    @property
    def outcome(self) -> str:
        return "ViolationFound" if self.violation_found else "NoViolationFound"

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "samples_used": self.samples_used,
            "constructions_tried": self.constructions_tried,
            "skipped": self.skipped,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


# ---------------------------------------------------------------------------
# Sampling


def _generator(seed: int, index: int) -> np.random.Generator:
    if seed < 0 or index < 0:
        raise InputError("seed and index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=[int(seed), int(index)]))


def _factor(rng: np.random.Generator, n: int, k: int, nonneg: bool) -> np.ndarray:
    g = rng.standard_normal((n, k))
    return np.abs(g) if nonneg else g


def _rescale(A: np.ndarray) -> np.ndarray:
    return A / (1.0 + np.max(np.abs(A)))


def sample_psd(cone: Cone, seed: int, index: int) -> np.ndarray:
    """``G G^T`` with ``G`` an ``n x k`` Gaussian factor, scaled into (-1, 1)."""
    G = _factor(_generator(seed, index), cone.n, cone.k, cone.domain == "nonneg")
    return check_symmetric(_rescale(G @ G.T))


def sample_monotone_pair(cone: Cone, seed: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """``A = B + w w^T`` with ``rank B = k - 1`` and ``||w|| <= 1``.

    For ``k = 1`` the pair is ``(w w^T, t w w^T)`` with ``t`` uniform in (0, 1).
    """
    rng = _generator(seed, index)
    n, k, nonneg = cone.n, cone.k, cone.domain == "nonneg"
    w = _factor(rng, n, 1, nonneg)[:, 0]
    w = w / (1.0 + np.linalg.norm(w))
    if k == 1:
        t = rng.uniform()
        W = np.outer(w, w)
        return check_symmetric(W), check_symmetric(t * W)
    G = _factor(rng, n, k - 1, nonneg)
    B = _rescale(G @ G.T)
    return check_symmetric(B + np.outer(w, w)), check_symmetric(B)


def sample_pair(cone: Cone, seed: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """Independent ``A, B`` in the cone; both halved if ``A + B`` leaves (-1, 1)."""
    rng = _generator(seed, index)
    nonneg = cone.domain == "nonneg"
    G = _factor(rng, cone.n, cone.k, nonneg)
    H = _factor(rng, cone.n, cone.k, nonneg)
    A, B = _rescale(G @ G.T), _rescale(H @ H.T)
    if np.max(np.abs(A + B)) >= 1.0:
        A, B = A / 2.0, B / 2.0
    return check_symmetric(A), check_symmetric(B)


# ---------------------------------------------------------------------------
# Deterministic candidates


@dataclass
class Candidate:
    name: str
    A: np.ndarray
    B: np.ndarray | None = None
    lam: float = 0.5
    rank: int = 2
    witness: np.ndarray | None = None
    params: dict = field(default_factory=dict)


def _positivity_candidates(n: int) -> Iterator[Candidate]:
    yield Candidate("nonpositive-power", cx.nonpositive_power_matrix(n))
    for r in range(3, n + 1):
        yield Candidate("cosine", pad_to(cx.cosine_matrix(r), n), params={"r": r})
    for eps in cx.EPS_GRID:
        yield Candidate("fh", cx.fh_matrix(n, eps), params={"eps": eps})


def _ratio_pairs(n: int):
    for eps in PAIR_EPS:
        yield cx.fh_matrix(n, 2.0 * eps), cx.fh_matrix(n, eps), eps


def _perturbation_pairs(n: int):
    for r in range(3, n + 1):
        for eps in PAIR_EPS:
            A, B = cx.perturbation_pair(r, n, eps)
            yield A, B, r, eps


def _monotone_candidates(n: int, k: int) -> Iterator[Candidate]:
    A, B = cx.scaled_rank_one_pair(n)
    yield Candidate("scaled-rank-one", A, B, rank=1)
    if k < 2:
        return
    A, B = cx.unit_monotone_pair(n)
    yield Candidate("unit-monotone", A, B)
    if n >= 3:
        out = cx.mono_phi_family(2.0, 1.0, 0.75)
        yield Candidate("mono-phi", pad_to(out.matrices["A"], n), pad_to(out.matrices["B"], n))
    for A, B, r, eps in _perturbation_pairs(n):
        yield Candidate("perturbation", A, B, params={"r": r, "eps": eps})
    for A, B, eps in _ratio_pairs(n):
        yield Candidate("fh-pair", A, B, params={"eps": eps})


def _convex_candidates(n: int, k: int) -> Iterator[Candidate]:
    A, B = cx.convex_half_pair(n)
    yield Candidate("convex-half", A, B, rank=1)
    if k < 2:
        return
    A, B = cx.convex_phi1_pair(n)
    yield Candidate("convex-phi1", A, B)
    if n >= 3:
        out = cx.convex_psi2_family(2.0, 1.0, 0.6)
        yield Candidate("convex-psi2", pad_to(out.matrices["A"], n), pad_to(out.matrices["B"], n))
    for A, B, r, eps in _perturbation_pairs(n):
        yield Candidate("perturbation", A, B, params={"r": r, "eps": eps})
    for A, B, eps in _ratio_pairs(n):
        yield Candidate("fh-pair", A, B, params={"eps": eps})


def _witness_candidate(fn, p: PowerMap, n: int, name: str) -> Iterator[Candidate]:
    try:
        out = fn(p, n)
    except (UnsupportedQueryError, SearchFailure, InputError, PowerRangeError):
        return
    yield Candidate(
        name, out.matrices["A"], out.matrices["B"], rank=1, witness=out.witness, params=dict(out.params)
    )


def _superadd_candidates(p: PowerMap, n: int) -> Iterator[Candidate]:
    A, B = cx.ones_pair(n)
    yield Candidate("ones", A, B, rank=1)
    if p.family in ("even", "odd"):
        yield from _witness_candidate(cx.superadd_witness, p, n, "superadd-witness")
    if p.family != "blend_swapped":
        # on positive entries every family agrees with the plain power
        yield from _witness_candidate(cx.superadd_witness, PowerMap("plain", p.alpha), n, "superadd-witness")
    u = np.linspace(0.1, 1.0, n)
    for eps in cx.EPS_GRID:
        yield Candidate("rank-one-shift", cx.ones(n), check_symmetric(eps * np.outer(u, u)), rank=1, params={"eps": eps})


def _subadd_candidates(p: PowerMap, n: int, k: int) -> Iterator[Candidate]:
    out = cx.blend_subadd_counterexample(n)
    yield Candidate("blend-subadd", out.matrices["A"], out.matrices["B"], rank=1)
    A, B = cx.ones_pair(n)
    yield Candidate("ones", A, B, rank=1)
    out = cx.subadd_psi_2x2(-1.0)
    yield Candidate("subadd-psi", pad_to(out.matrices["A"], n), pad_to(out.matrices["B"], n), rank=1)
    if n >= 3:
        out = cx.subadd_psi0_family(1.0, 2.0, 3.0, n)
        yield Candidate("subadd-psi0", out.matrices["A"], out.matrices["B"], rank=1)
    yield Candidate("ones-vs-nonpositive", cx.ones(n), cx.nonpositive_power_matrix(n))
    yield from _witness_candidate(cx.subadd_witness, PowerMap("plain", p.alpha), n, "subadd-witness")


def candidates(prop, p: PowerMap, cone: Cone) -> Iterator[Candidate]:
    """Structured instances in ``cone`` to try before random sampling, in a fixed order."""
    prop = LoewnerProperty.parse(prop)
    n, k = cone.n, cone.k
    P = LoewnerProperty
    if prop is P.POSITIVITY:
        gen = _positivity_candidates(n)
    elif prop is P.MONOTONICITY:
        gen = _monotone_candidates(n, k)
    elif prop is P.CONVEXITY:
        gen = _convex_candidates(n, k)
    elif prop is P.SUPER_ADDITIVITY:
        gen = _superadd_candidates(p, n)
    else:
        gen = _subadd_candidates(p, n, k)
    nonneg = cone.domain == "nonneg"
    for c in gen:
        if c.rank > k:
            continue
        if nonneg and (np.any(c.A < 0) or (c.B is not None and np.any(c.B < 0))):
            continue
        yield c


# ---------------------------------------------------------------------------
# Checking


def _threads() -> int:
    raw = os.environ.get("LOEWNER_LAB_THREADS", "0").strip() or "0"
    try:
        t = int(raw)
    except ValueError:
        raise InputError(f"LOEWNER_LAB_THREADS must be an integer, got {raw!r}") from None
    if t < 0:
        raise InputError("LOEWNER_LAB_THREADS must be nonnegative")
    return t if t > 0 else min(8, os.cpu_count() or 1)


def _is_violation(M: np.ndarray, value: float, x: np.ndarray, tol: float) -> bool:
    return value < -tol * (1.0 + frobenius(M)) * float(x @ x)


def _certificate_from_min_eig(prop, p, mats, lam, M, source) -> ViolationCertificate:
    dec = eigen_sym(M)
    x = dec.eigenvectors[:, 0].copy()
    return ViolationCertificate(prop, p, mats, x, float(x @ M @ x), source, lam)


def _try_candidates(prop, p, cands: list, tol: float):
    """First violating candidate as ``(certificate, number tried)``; eigenvalues are batched."""
    defects = []
    for c in cands:
        try:
            defects.append(defect_matrix(prop, p, c.A, c.B, c.lam))
        except (PowerRangeError, PowerDomainError):
            defects.append(None)
    live = [M for M in defects if M is not None]
    if not live:
        return None, len(cands)
    lows = iter(min_eigenvalues(np.stack(live)))
    for i, (c, M) in enumerate(zip(cands, defects)):
        if M is None:
            continue
        low = next(lows)
        lam = c.lam if prop is LoewnerProperty.CONVEXITY else None
        mats = {"A": c.A} if c.B is None else {"A": c.A, "B": c.B}
        source = {"kind": "deterministic", "name": c.name, **c.params}
        if c.witness is not None:
            x = np.asarray(c.witness, dtype=float)
            q = float(x @ M @ x)
            if _is_violation(M, q, x, tol):
                return ViolationCertificate(prop, p, mats, x, q, source, lam), i + 1
        if low < -tol * (1.0 + frobenius(M)):
            cert = _certificate_from_min_eig(prop, p, mats, lam, M, source)
            if _is_violation(M, cert.quadratic_form_value, cert.witness, tol):
                return cert, i + 1
    return None, len(cands)


def _sample_instances(prop, cone: Cone, seed: int, index: int):
    """List of ``(A, B, lam)`` for one sample index."""
    P = LoewnerProperty
    if prop is P.POSITIVITY:
        return [(sample_psd(cone, seed, index), None, None)]
    if prop is P.MONOTONICITY:
        A, B = sample_monotone_pair(cone, seed, index)
        return [(A, B, None)]
    if prop is P.CONVEXITY:
        A, B = sample_monotone_pair(cone, seed, index)
        return [(A, B, lam) for lam in CONVEX_LAMBDAS]
    A, B = sample_pair(cone, seed, index)
    return [(A, B, None)]


def _evaluate_chunk(prop, p, cone, seed, indices, tol):
    """Return ``(first violating index or None, its instance, skipped count)``."""
    items = []
    for i in indices:
        for inst in _sample_instances(prop, cone, seed, i):
            items.append((i, inst))
    mats, owners, skipped = [], [], set()
    try:
        stack_a = np.stack([it[1][0] for it in items])
        stack_b = None if items[0][1][1] is None else np.stack([it[1][1] for it in items])
        if prop is LoewnerProperty.CONVEXITY:
            L = np.array([it[1][2] for it in items])[:, None, None]
            mix = L * stack_a + (1 - L) * stack_b
            Ms = L * apply_power(p, stack_a) + (1 - L) * apply_power(p, stack_b) - apply_power(p, mix)
        else:
            Ms = defect_matrix(prop, p, stack_a, stack_b)
        mats, owners = list(Ms), items
    except (PowerRangeError, PowerDomainError):
        for it in items:
            A, B, lam = it[1]
            try:
                mats.append(defect_matrix(prop, p, A, B, lam or 0.5))
                owners.append(it)
            except (PowerRangeError, PowerDomainError):
                skipped.add(it[0])
    if not mats:
        return None, None, len(skipped)
    stack = np.stack(mats)
    lows = min_eigenvalues(stack)
    thresh = tol * (1.0 + np.sqrt(np.sum(stack * stack, axis=(1, 2))))
    bad = np.nonzero(lows < -thresh)[0]
    if bad.size:
        j = int(bad[0])
        return owners[j][0], (owners[j][1], stack[j]), len(skipped)
    return None, None, len(skipped)


def check_property(
    prop,
    p: PowerMap,
    cone: Cone,
    budget: int = 500,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    use_constructions: bool = True,
) -> Verdict:
    """Search for a violation of ``prop`` by the entrywise map ``p`` on ``cone``.

    Deterministic candidates are tried first; the first one that violates
    wins. Otherwise ``budget`` random instances are evaluated and the
    violation with the lowest sample index is reported.
    """
    prop = LoewnerProperty.parse(prop)
    if budget < 0:
        raise InputError("budget must be nonnegative")
    if tol < 0:
        raise InputError("tol must be nonnegative")
    if p.family == "plain" and cone.domain != "nonneg":
        raise InputError("the plain power needs the nonnegative domain")
    tried = 0
    if use_constructions:
        cert, tried = _try_candidates(prop, p, list(candidates(prop, p, cone)), tol)
        if cert is not None:
            return Verdict(cert, 0, tried)
    chunks = [range(s, min(s + CHUNK, budget)) for s in range(0, budget, CHUNK)]
    workers = _threads()
    skipped = 0
    used = 0

    def run(idx):
        return _evaluate_chunk(prop, p, cone, seed, idx, tol)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for wave in range(0, len(chunks), workers):
            batch = chunks[wave : wave + workers]
            results = list(pool.map(run, batch)) if workers > 1 else [run(b) for b in batch]
            for idx, (hit, inst, sk) in zip(batch, results):
                skipped += sk
                if hit is not None:
                    used += hit - idx.start + 1
                    (A, B, lam), M = inst
                    mats = {"A": A} if B is None else {"A": A, "B": B}
                    source = {"kind": "sampled", "seed": seed, "index": hit}
                    cert = _certificate_from_min_eig(prop, p, mats, lam, M, source)
                    return Verdict(cert, used, tried, skipped)
                used += len(idx)
    return Verdict(None, used, tried, skipped)


# ---------------------------------------------------------------------------
# Scans and bisection


@dataclass(frozen=True)
class ScanRow:
    alpha: float
    verdict: Verdict
    membership: Membership

    @property
    def status(self) -> str:
        """``agree``, ``disagree`` (violation at an exponent classified in), ``unconfirmed`` or ``unknown``."""
        if self.membership is Membership.UNKNOWN:
            return "unknown"
        if self.verdict.violation_found:
            return "disagree" if self.membership is Membership.IN else "agree"
        return "agree" if self.membership is Membership.IN else "unconfirmed"

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "membership": self.membership.value,
            "status": self.status,
            "verdict": self.verdict.to_dict(),
        }


def scan_alpha(
    prop,
    family: str,
    cone: Cone,
    alphas: Sequence[float],
    budget: int = 500,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    blend_lambda: float = 0.5,
) -> list[ScanRow]:
    if len(alphas) == 0:
        raise InputError("alphas must be nonempty")
    s = power_set(prop, family, cone, blend_lambda)
    rows = []
    for a in alphas:
        p = PowerMap(family, float(a), blend_lambda)
        rows.append(ScanRow(float(a), check_property(prop, p, cone, budget, tol, seed), s.contains(a)))
    return rows


def _off_lattice(a: float, resolution: float) -> float:
    return a + resolution / 10.0 if abs(a - round(a)) <= 1e-12 else a


def empirical_critical_exponent(
    prop,
    family: str,
    cone: Cone,
    resolution: float = 0.25,
    budget: int = 500,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    blend_lambda: float = 0.5,
) -> tuple[float, float]:
    """Bisection bracket ``(lo, hi)`` of width at most ``resolution`` around the observed threshold.

    ``lo`` is an exponent with a violation and ``hi`` one without. Integer
    midpoints are nudged up by ``resolution / 10`` so that lattice
    exponents, which may be preserved below the threshold, do not mislead
    the search.
    """
    prop = LoewnerProperty.parse(prop)
    if prop is LoewnerProperty.SUB_ADDITIVITY:
        raise UnsupportedQueryError("sub-additivity has no critical exponent")
    if not resolution > 0:
        raise InputError("resolution must be positive")

    def violated(a: float) -> bool:
        p = PowerMap(family, a, blend_lambda)
        return check_property(prop, p, cone, budget, tol, seed).violation_found

    lo = _off_lattice(float(max(0, cone.n - 4)), resolution)
    hi = float(cone.n + 1)
    if not violated(lo):
        raise InconclusiveError(f"no violation at the lower end alpha={lo}; nothing to bracket")
    if violated(hi):
        raise InconclusiveError(f"violation persists at alpha={hi}; threshold lies beyond the search range")
    while hi - lo > resolution:
        mid = _off_lattice((lo + hi) / 2.0, resolution)
        if mid >= hi:
            mid = (lo + hi) / 2.0
        if violated(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def closed_form_in_bracket(prop, family: str, cone: Cone, bracket: tuple[float, float]) -> bool:
    ce = critical_exponent(prop, family, cone)
    return bracket[0] <= ce <= bracket[1] + 1e-12
