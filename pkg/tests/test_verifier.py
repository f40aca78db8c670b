import numpy as np
import pytest

from loewner_lab.classifier import Cone, Membership
from loewner_lab.exceptions import InconclusiveError, InputError, UnsupportedQueryError
from loewner_lab.linalg import is_psd, loewner_geq, numeric_rank
from loewner_lab.powers import PowerMap
from loewner_lab.verifier import (
    candidates,
    check_property,
    closed_form_in_bracket,
    empirical_critical_exponent,
    sample_monotone_pair,
    sample_pair,
    sample_psd,
    scan_alpha,
)


# samplers


@pytest.mark.parametrize("n,k,domain", [(3, 1, "real"), (4, 2, "nonneg"), (5, 5, "real"), (6, 3, "nonneg")])
def test_sample_psd_invariants(n, k, domain):
    cone = Cone(n, k, domain)
    for i in range(100):
        A = sample_psd(cone, 0, i)
        assert is_psd(A, 1e-10)
        assert numeric_rank(A) <= k
        assert np.max(np.abs(A)) < 1
        if domain == "nonneg":
            assert np.all(A >= 0)


def test_sample_psd_deterministic_and_keyed():
    cone = Cone(4, 2)
    assert np.array_equal(sample_psd(cone, 3, 7), sample_psd(cone, 3, 7))
    assert not np.array_equal(sample_psd(cone, 3, 7), sample_psd(cone, 3, 8))
    assert not np.array_equal(sample_psd(cone, 3, 7), sample_psd(cone, 4, 7))


def test_sample_rejects_negative_seed():
    with pytest.raises(InputError):
        sample_psd(Cone(3, 2), -1, 0)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_monotone_pair(k):
    cone = Cone(4, k, "nonneg")
    for i in range(50):
        A, B = sample_monotone_pair(cone, 1, i)
        assert loewner_geq(A, B, 1e-10)
        assert is_psd(B, 1e-10)
        assert numeric_rank(A) <= k
        assert np.all(A >= 0) and np.all(B >= 0)


def test_sample_pair_in_unit_box():
    cone = Cone(5, 3)
    for i in range(50):
        A, B = sample_pair(cone, 2, i)
        assert np.max(np.abs(A + B)) < 1
        assert numeric_rank(A) <= 3 and numeric_rank(B) <= 3


# check_property examples


def test_square_preserves_positivity():
    v = check_property("positivity", PowerMap("plain", 2.0), Cone(4, 4, "nonneg"), budget=500)
    assert not v.violation_found
    assert v.samples_used == 500


def test_fh_violation_with_tiny_budget():
    v = check_property("positivity", PowerMap("plain", 1.5), Cone(4, 2, "nonneg"), budget=1)
    assert v.violation_found
    assert v.certificate.source["name"] == "fh"


def test_abs_not_subadditive_rank_one():
    v = check_property("sub-additivity", PowerMap("even", 1.0), Cone(2, 1), budget=1)
    assert v.violation_found
    assert v.certificate.source["name"] == "blend-subadd"


def test_convexity_odd_square():
    v = check_property("convexity", PowerMap("odd", 2.0), Cone(3, 2), budget=0)
    assert v.violation_found
    assert v.certificate.source["name"] in {"convex-phi1", "convex-psi2"}


@pytest.mark.parametrize(
    "prop,text,n,k",
    [
        ("positivity", "even:3", 6, 2),
        ("monotonicity", "even:1", 3, 2),
        ("convexity", "plain:2.5", 4, 2),
        ("super-additivity", "odd:2", 3, 1),
        ("sub-additivity", "odd:-1", 2, 1),
    ],
)
def test_certificates_are_sound(prop, text, n, k):
    p = PowerMap.parse(text)
    v = check_property(prop, p, Cone.for_family(n, k, p.family), budget=50)
    cert = v.certificate
    assert cert is not None and cert.quadratic_form_value < 0
    assert cert.recompute() == pytest.approx(cert.quadratic_form_value, rel=1e-9, abs=1e-15)
    for M in cert.matrices.values():
        assert is_psd(M, 1e-9) and numeric_rank(M) <= k


def test_sampled_violation_source():
    v = check_property(
        "positivity", PowerMap("even", 1.0), Cone(5, 2), budget=300, use_constructions=False
    )
    assert v.violation_found
    assert v.certificate.source["kind"] == "sampled"
    assert v.certificate.recompute() < 0


def test_determinism_across_threads(monkeypatch):
    p, cone = PowerMap("odd", 1.5), Cone(5, 3)
    out = []
    for threads in ("1", "4"):
        monkeypatch.setenv("LOEWNER_LAB_THREADS", threads)
        v = check_property("monotonicity", p, cone, budget=200, use_constructions=False)
        out.append(v)
    a, b = out
    assert a.samples_used == b.samples_used
    assert a.certificate.source == b.certificate.source
    assert np.array_equal(a.certificate.witness, b.certificate.witness)


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("LOEWNER_LAB_THREADS", "many")
    with pytest.raises(InputError):
        check_property("positivity", PowerMap("odd", 1.0), Cone(3, 2), budget=10, use_constructions=False)


def test_plain_on_real_domain_rejected():
    with pytest.raises(InputError):
        check_property("positivity", PowerMap("plain", 1.0), Cone(3, 2, "real"))


def test_candidates_respect_rank():
    for c in candidates("sub-additivity", PowerMap("odd", -1.0), Cone(4, 1)):
        assert numeric_rank(c.A) <= 1
        if c.B is not None:
            assert numeric_rank(c.B) <= 1


def test_candidates_respect_domain():
    for c in candidates("monotonicity", PowerMap("plain", 0.5), Cone(4, 3, "nonneg")):
        assert np.all(c.A >= 0) and (c.B is None or np.all(c.B >= 0))


# scans


def test_scan_positivity_plain():
    cone = Cone(4, 2, "nonneg")
    alphas = [0.25 * j for j in range(1, 21)]
    rows = scan_alpha("positivity", "plain", cone, alphas, budget=100, tol=1e-12)
    for r in rows:
        non_integer = abs(r.alpha - round(r.alpha)) > 1e-12
        assert r.verdict.violation_found == (non_integer and r.alpha < 2)
        assert r.status == "agree"


def test_scan_status_flags():
    rows = scan_alpha("monotonicity", "plain", Cone(6, 2, "nonneg"), [4.5], budget=0)
    assert rows[0].membership is Membership.OUT
    assert rows[0].status in {"agree", "unconfirmed"}


def test_scan_needs_alphas():
    with pytest.raises(InputError):
        scan_alpha("positivity", "odd", Cone(3, 2), [])


# bisection


@pytest.mark.parametrize(
    "prop,n,expected",
    [("positivity", 4, 2), ("monotonicity", 4, 3), ("convexity", 3, 3)],
)
def test_critical_exponent_bracket(prop, n, expected):
    cone = Cone(n, 2, "nonneg")
    lo, hi = empirical_critical_exponent(prop, "plain", cone, 0.25, budget=100, tol=1e-12)
    assert hi - lo <= 0.25
    assert lo <= expected <= hi
    assert closed_form_in_bracket(prop, "plain", cone, (lo, hi))


def test_bisection_subadditivity_unsupported():
    with pytest.raises(UnsupportedQueryError):
        empirical_critical_exponent("sub-additivity", "odd", Cone(3, 2))


def test_bisection_inconclusive_when_nothing_fails():
    # every k=1 positivity exponent is preserved, so there is nothing to bracket
    with pytest.raises(InconclusiveError):
        empirical_critical_exponent("positivity", "odd", Cone(3, 1), budget=20)
