import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner_lab.constructions import (
    EPS_GRID,
    alternating_eigenvalue,
    alternating_vector,
    blend_subadd_counterexample,
    convex_psi2_family,
    cosine_factors,
    cosine_matrix,
    fh_matrix,
    mono_phi_family,
    nonpositive_power_matrix,
    perturbation_pair,
    rank_lift,
    subadd_psi0_family,
    subadd_psi_2x2,
    subadd_psi_2x2_closed_form,
    subadd_witness,
    superadd_witness,
)
from loewner_lab.exceptions import InputError, UnsupportedQueryError
from loewner_lab.linalg import is_psd, loewner_geq, numeric_rank, pad_direct_sum
from loewner_lab.powers import PowerMap, apply_power
from loewner_lab.properties import LoewnerProperty


def det2(M):
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


# fh_matrix


def test_fh_small():
    npt.assert_array_equal(fh_matrix(3, 1.0), [[2, 3, 4], [3, 5, 7], [4, 7, 10]])


def test_fh_rank_two():
    assert numeric_rank(fh_matrix(5, 0.01)) == 2


@pytest.mark.parametrize("n,eps", [(2, 0.5), (4, 1e-3), (6, 0.2)])
def test_fh_factorisation(n, eps):
    w = np.arange(1, n + 1, dtype=float)
    npt.assert_allclose(fh_matrix(n, eps) - np.ones((n, n)), eps * np.outer(w, w), atol=1e-15)


def test_fh_rejects():
    with pytest.raises(InputError):
        fh_matrix(1, 0.1)
    with pytest.raises(InputError):
        fh_matrix(3, 0.0)


def test_fh_power_fails_positivity():
    M = apply_power(PowerMap("plain", 1.5), fh_matrix(4, 2.0**-10))
    assert np.linalg.eigvalsh(M)[0] < 0


# cosine_matrix


def test_cosine_entry():
    assert cosine_matrix(4)[0, 1] == pytest.approx(0.70710678, abs=1e-8)


@pytest.mark.parametrize("r", [2, 3, 5, 9])
def test_cosine_structure(r):
    A = cosine_matrix(r)
    npt.assert_array_equal(np.diag(A), np.ones(r))
    u, v = cosine_factors(r)
    assert np.max(np.abs(A - np.outer(u, u) - np.outer(v, v))) <= 1e-12
    assert numeric_rank(A) == 2


def test_abs_of_padded_cosine_has_negative_eigenvalue():
    M = apply_power(PowerMap("even", 1.0), pad_direct_sum(cosine_matrix(4), 1))
    assert np.linalg.eigvalsh(M)[0] < -1e-3


# alternating eigenvalue


@pytest.mark.parametrize("p", [1.0, 3.0])
def test_alternating_roots(p):
    assert abs(alternating_eigenvalue(2, p)) <= 1e-12


def test_alternating_negative_between_roots():
    # direct summation oracle
    direct = 1 - 2 * math.cos(math.pi / 5) ** 2 + 2 * math.cos(2 * math.pi / 5) ** 2
    assert alternating_eigenvalue(2, 2.0) == pytest.approx(direct, abs=1e-15)
    assert direct < 0


@pytest.mark.parametrize("alpha", [2, 4, 6])
def test_alternating_is_eigenvalue(alpha):
    r = alpha + 3
    A, x = cosine_matrix(r), alternating_vector(r)
    for p in np.arange(1, 10 * r) / 10:
        lhs = apply_power(PowerMap("odd", p), A) @ x
        assert np.max(np.abs(lhs - alternating_eigenvalue(alpha, p) * x)) <= 1e-9


@pytest.mark.parametrize("alpha", [2, 4, 6])
def test_alternating_odd_integer_zeros(alpha):
    for p in range(1, alpha + 3, 2):
        assert abs(alternating_eigenvalue(alpha, p)) <= 1e-10


@pytest.mark.parametrize("bad", [(3, 1.0), (0, 1.0), (2, 0.0)])
def test_alternating_rejects(bad):
    with pytest.raises(InputError):
        alternating_eigenvalue(*bad)


# nonpositive powers


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("alpha", [-2.0, -0.5, 0.0])
def test_nonpositive_power_matrix(n, alpha):
    A = nonpositive_power_matrix(n)
    assert is_psd(A) and np.all(A >= 0) and numeric_rank(A) <= 2
    if n == 2 and alpha == 0.0:
        # the all-ones pattern is PSD, and 0 is a preserving exponent for 2x2
        return
    assert np.linalg.eigvalsh(apply_power(PowerMap("plain", alpha), A))[0] < -1e-3


# closed-form families


@pytest.mark.parametrize("abc", [(2.0, 1.0, 0.75), (3.0, 1.0, 0.5)])
def test_mono_phi_examples(abc):
    out = mono_phi_family(*abc)
    assert out.certificate_value == pytest.approx(-1.0, rel=1e-12)
    assert np.linalg.det(out.defect()) == pytest.approx(-1.0, rel=1e-9)
    assert loewner_geq(out.matrices["A"], out.matrices["B"])
    assert not loewner_geq(*(apply_power(PowerMap("even", 1.0), out.matrices[k]) for k in "AB"))


def test_convex_psi2_example():
    out = convex_psi2_family(2.0, 1.0, 0.6)
    assert out.certificate_value == pytest.approx(-4.0e-4, rel=1e-12)
    C = out.defect()
    assert np.linalg.det(C) == pytest.approx(-4.0e-4, rel=1e-9)
    assert C[0, 1] == pytest.approx(2.0**2 * 1.0**2 / 4)
    assert loewner_geq(out.matrices["A"], out.matrices["B"])


@pytest.mark.parametrize("bad", [(1.0, 2.0, 0.75), (2.0, 1.0, 0.4), (2.0, 1.0, 1.1)])
def test_mono_phi_rejects(bad):
    with pytest.raises(InputError):
        mono_phi_family(*bad)


def test_convex_psi2_rejects():
    with pytest.raises(InputError):
        convex_psi2_family(2.0, 1.0, 0.4)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_mono_phi_recomputes(a, bfrac, cfrac):
    b = a * bfrac
    c = 1 / a + cfrac * (1 / b - 1 / a)
    out = mono_phi_family(a, b, c)
    assert out.recompute() == pytest.approx(out.certificate_value, rel=1e-9, abs=1e-12)


# sub-additivity of the odd power on 2x2 matrices


def test_subadd_psi_minus_one_determinant():
    out = subadd_psi_2x2(-1.0)
    C = out.defect()
    assert C[0, 0] == pytest.approx(2 - 2**-1.0)
    # brute-force oracle: the 2x2 determinant of the explicitly built defect
    assert det2(C) == pytest.approx(-2.7, abs=1e-12)
    assert out.certificate_value == pytest.approx(-2.7, abs=1e-12)


@pytest.mark.parametrize("alpha", [-0.25, -0.5, -1.0, -2.0, -4.0])
def test_subadd_psi_corrected_identity(alpha):
    C = subadd_psi_2x2(alpha).defect()
    assert abs(det2(C) - subadd_psi_2x2_closed_form(alpha)) <= 1e-12 * max(1.0, abs(det2(C)))
    assert det2(C) < 0


def test_subadd_psi_rank_one_inputs():
    out = subadd_psi_2x2(-0.5)
    for k in "AB":
        assert numeric_rank(out.matrices[k]) == 1 and is_psd(out.matrices[k])


def test_subadd_psi_rejects_nonnegative_alpha():
    with pytest.raises(InputError):
        subadd_psi_2x2(0.0)


def test_subadd_psi0():
    out = subadd_psi0_family(1.0, 2.0, 3.0)
    assert out.certificate_value < 0
    assert out.recompute() == pytest.approx(np.linalg.eigvalsh(out.defect())[0], abs=1e-12)
    for k in "AB":
        assert numeric_rank(out.matrices[k]) == 1 and is_psd(out.matrices[k])
    assert set(np.unique(apply_power(PowerMap("odd", 0.0), out.matrices["A"]))) <= {-1.0, 0.0, 1.0}


def test_subadd_psi0_rejects():
    with pytest.raises(InputError):
        subadd_psi0_family(2.0, 1.0, 3.0)
    with pytest.raises(InputError):
        subadd_psi0_family(1.0, 2.0, 3.0, n=2)


# blend


def test_blend_subadd_n2():
    out = blend_subadd_counterexample(2)
    npt.assert_array_equal(out.matrices["A"] + out.matrices["B"], np.diag([2.0, 2.0]))
    for k in "AB":
        assert numeric_rank(out.matrices[k]) == 1 and is_psd(out.matrices[k])
    assert np.linalg.eigvalsh(out.defect())[0] < 0
    assert out.certificate_value < 0


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("n", [2, 4])
def test_blend_subadd_any_lambda(lam, n):
    assert blend_subadd_counterexample(n, lam).certificate_value < 0


# witnesses


@pytest.mark.parametrize("text,n", [("even:3", 4), ("odd:2", 3), ("even:1", 3), ("odd:4", 5)])
def test_superadd_integer_witness(text, n):
    out = superadd_witness(PowerMap.parse(text), n)
    assert out.certificate_value == pytest.approx(-1.0, abs=1e-6)
    assert out.recompute() == pytest.approx(out.certificate_value, rel=1e-9)
    assert numeric_rank(out.matrices["B"]) == 1


def test_superadd_plain_witness():
    out = superadd_witness(PowerMap("plain", 1.5), 3)
    assert out.certificate_value < 0
    assert out.params["eps"] in EPS_GRID
    assert np.all(out.matrices["B"] >= 0)


def test_superadd_witness_unsupported():
    with pytest.raises(UnsupportedQueryError):
        superadd_witness(PowerMap("even", 2.0), 4)
    with pytest.raises(UnsupportedQueryError):
        superadd_witness(PowerMap("plain", 3.5), 3)


@pytest.mark.parametrize("alpha,n", [(0.5, 2), (0.3, 4), (-1.0, 3), (-0.5, 4)])
def test_subadd_witness(alpha, n):
    out = subadd_witness(PowerMap("plain", alpha), n)
    assert out.certificate_value < 0
    assert out.recompute() == pytest.approx(out.certificate_value, rel=1e-9)


# perturbation pairs


def test_perturbation_pair_ordered():
    A, B = perturbation_pair(4, 5, 0.01)
    assert loewner_geq(A, B)
    assert numeric_rank(A) <= 3


# rank lifting


@pytest.mark.parametrize("k", [3, 4, 5])
def test_rank_lift_positivity(k):
    from loewner_lab.constructions import ConstructionOutput

    p = PowerMap("even", 1.0)
    base = ConstructionOutput(
        "cosine",
        {"A": pad_direct_sum(cosine_matrix(4), 1)},
        prop=LoewnerProperty.POSITIVITY,
        power_map=p,
    )
    out = rank_lift(base, k, p, "positivity")
    assert numeric_rank(out.matrices["A"]) == k
    assert out.certificate_value < 0
    assert np.linalg.eigvalsh(apply_power(p, out.matrices["A"]))[0] < 0


def test_rank_lift_keeps_order():
    out = rank_lift(mono_phi_family(2.0, 1.0, 0.75).padded(4), 3, PowerMap("even", 1.0), "monotonicity")
    assert loewner_geq(out.matrices["A"], out.matrices["B"])
    assert out.certificate_value < 0


def test_rank_lift_rejects_bad_k():
    out = mono_phi_family(2.0, 1.0, 0.75)
    with pytest.raises(InputError):
        rank_lift(out, 2, PowerMap("even", 1.0), "monotonicity")


# derivative spot check: the odd power of degree n-3 fails on the cosine matrix


@pytest.mark.parametrize("n", [5, 7])
def test_derivative_power_not_positive(n):
    A = cosine_matrix(n)
    assert np.linalg.eigvalsh(apply_power(PowerMap("odd", n - 3.0), A))[0] < -1e-6
