import json
import math

import pytest

import importlib

certify_mod = importlib.import_module("volterra_stability.certify")
from volterra_stability import (
    ASYMPTOTICALLY_STABLE,
    HEURISTIC,
    NOT_APPLICABLE,
    RIGOROUS,
    STABLE,
    UNSTABLE,
    Certificate,
    KernelSpec,
    TailModel,
    certify,
    classify,
    report_to_dict,
    solve,
    term,
    test_absolute_sum as check_absolute_sum,
    test_efp as check_efp,
    test_marginal_stable as check_marginal_stable,
    test_real_axis_root as check_real_axis_root,
    test_rouche_stable as check_rouche_stable,
    test_rouche_unstable as check_rouche_unstable,
)

from conftest import (
    alternating_cubic_kernel,
    geometric_half_kernel,
    geometric_null_kernel,
    paper_kernels,
    random_bounded_kernel,
    renewal_kernel,
    rouche_stable_pair_kernel,
    rouche_table_kernel,
    rouche_unstable_pair_kernel,
    small_radius_unstable_kernel,
)


# ---------------------------------------------------------------------------
# absolute-sum test


def test_absolute_sum_small_prefix():
    cert = check_absolute_sum(KernelSpec((0.5,), TailModel.zero()))
    assert cert.verdict == ASYMPTOTICALLY_STABLE and cert.rigor == RIGOROUS
    assert cert.witness["sum_hi"] < 1.0


def test_absolute_sum_geometric_third():
    cert = check_absolute_sum(KernelSpec((), TailModel.parametric(1.0, 1.0 / 3.0)))
    assert cert.verdict == ASYMPTOTICALLY_STABLE
    assert cert.witness["sum_hi"] == pytest.approx(0.5, abs=1e-12)


def test_absolute_sum_renewal_not_applicable():
    assert check_absolute_sum(renewal_kernel()).verdict == NOT_APPLICABLE


def test_absolute_sum_divergent_not_applicable():
    assert check_absolute_sum(small_radius_unstable_kernel()).verdict == NOT_APPLICABLE


# ---------------------------------------------------------------------------
# renewal-theorem test


def test_efp_renewal_fires():
    cert = check_efp(renewal_kernel())
    assert cert.verdict == ASYMPTOTICALLY_STABLE and cert.rigor == RIGOROUS
    assert cert.witness["gcd"] == 1
    assert cert.witness["sum_lo"] <= 1.0 <= cert.witness["sum_hi"]


def test_efp_geometric_half_finite_moment():
    cert = check_efp(geometric_half_kernel())
    assert cert.verdict == NOT_APPLICABLE
    assert "first moment" in cert.witness["reason"]


def test_efp_negative_terms():
    cert = check_efp(geometric_null_kernel())
    assert cert.verdict == NOT_APPLICABLE
    assert cert.witness["reason"] == "negative terms"


def test_efp_gcd_two_rejected():
    k = KernelSpec((0.0, 0.5, 0.0, 0.5), TailModel.zero())
    cert = check_efp(k)
    assert cert.verdict == NOT_APPLICABLE and cert.witness["gcd"] == 2


# ---------------------------------------------------------------------------
# real-axis scan


def test_real_axis_single_prefix_two():
    cert = check_real_axis_root(KernelSpec((2.0,), TailModel.zero()))
    assert cert.verdict == UNSTABLE and cert.rigor == RIGOROUS
    lo, hi = cert.witness["root_bracket"]
    assert lo <= 0.5 <= hi


def test_real_axis_geometric_supercritical():
    # sum (3/4)(1/2)^(n-1) = 3/2 > 1: b changes sign inside (0, 1)
    k = KernelSpec((), TailModel.parametric(1.5, 0.5))
    cert = check_real_axis_root(k)
    assert cert.verdict == UNSTABLE
    lo, hi = cert.witness["root_bracket"]
    # oracle: b(t) = 1 - (3t/4)/(1 - t/2) vanishes at t = 4/5... solve: 1 - t/2 = 3t/4 -> t = 4/5? no:
    # 1 - (3t/4)/(1-t/2) = 0  =>  1 - t/2 = 3t/4  =>  t = 4/5 * (1/ (1 + ... )) compute directly:
    t_root = 4.0 / 5.0
    assert abs(1.0 - (3 * t_root / 4) / (1 - t_root / 2)) < 1e-12
    assert lo <= t_root <= hi


def test_real_axis_small_radius_not_applicable():
    assert check_real_axis_root(small_radius_unstable_kernel()).verdict == NOT_APPLICABLE


def test_real_axis_negative_side():
    # negative mass at odd lags: b(t) = 1 + 2t has a certified sign change at t = -1/2
    cert = check_real_axis_root(KernelSpec((-2.0,), TailModel.zero()))
    assert cert.verdict == UNSTABLE
    lo, hi = cert.witness["root_bracket"]
    assert lo <= -0.5 <= hi


def test_real_axis_validates_grid():
    with pytest.raises(ValueError):
        check_real_axis_root(renewal_kernel(), grid_points=1)


# ---------------------------------------------------------------------------
# Rouché stability


@pytest.mark.parametrize("sign", [+1.0, -1.0])
def test_rouche_stable_pair_fires_at_two(sign):
    cert = check_rouche_stable(rouche_stable_pair_kernel(sign), 2)
    assert cert.verdict == ASYMPTOTICALLY_STABLE and cert.rigor == RIGOROUS
    assert cert.witness["r_n"] == pytest.approx(0.75, abs=1e-9)
    assert cert.witness["tail_hi"] == pytest.approx(1.0 / 19.0, abs=1e-12)
    assert cert.witness["tail_hi"] < cert.witness["threshold"] <= 0.0625


def test_rouche_stable_table_degrees():
    k = rouche_table_kernel()
    assert check_rouche_stable(k, 4).verdict == NOT_APPLICABLE
    assert check_rouche_stable(k, 5).verdict == NOT_APPLICABLE
    cert = check_rouche_stable(k, 6)
    assert cert.verdict == ASYMPTOTICALLY_STABLE
    assert cert.witness["tail_hi"] == pytest.approx(0.00024414, abs=1e-8)


def test_rouche_stable_zero_kernel():
    cert = check_rouche_stable(KernelSpec((), TailModel.zero()), 1)
    assert cert.verdict == ASYMPTOTICALLY_STABLE
    assert cert.witness["r_n"] == 0.0 and cert.witness["tail_hi"] == 0.0


def test_rouche_stable_divergent_tail_not_applicable():
    assert check_rouche_stable(small_radius_unstable_kernel(), 3).verdict == NOT_APPLICABLE


# ---------------------------------------------------------------------------
# Rouché instability


def test_rouche_unstable_pair_via_e1():
    cert = check_rouche_unstable(rouche_unstable_pair_kernel(), 2)
    assert cert.verdict == UNSTABLE and cert.rigor == RIGOROUS
    assert cert.witness["bound"] == "E1"
    assert cert.witness["bound_value"] == pytest.approx(1.0, abs=1e-9)
    assert cert.witness["tail_hi"] == pytest.approx(0.5, abs=1e-12)


def test_rouche_unstable_pair_zero_tail():
    cert = check_rouche_unstable(rouche_unstable_pair_kernel(zero_tail=True), 2)
    assert cert.verdict == UNSTABLE
    # oracle: the trajectory genuinely blows up
    assert classify(solve(rouche_unstable_pair_kernel(zero_tail=True), 200)).kind == "unbounded"


def test_rouche_unstable_divergent_tail():
    assert check_rouche_unstable(small_radius_unstable_kernel(), 4).verdict == NOT_APPLICABLE


def test_rouche_unstable_inside_roots_not_applicable():
    assert check_rouche_unstable(geometric_half_kernel(), 8).verdict == NOT_APPLICABLE


def test_rouche_unstable_delta_fallback():
    # roots 2 and 1.0 make E3 applicable; engineered tail between E3 and delta max
    # p_2(z) = (z-2)(z-1) = z^2 - 3z + 2  =>  a_1 = 3, a_2 = -2
    # E3 = (1/3)^2 = 1/9; delta max at rho=1: |1-2||1-1| = 0 -> delta via interior max
    k = KernelSpec((3.0, -2.0), TailModel.parametric(0.12, 0.5))
    cert = check_rouche_unstable(k, 2)
    # tail = 0.12 * (0.5^3)/(0.5) = 0.03 < 1/9: E3 already decides
    assert cert.verdict == UNSTABLE
    assert cert.witness["bound"] in ("E3", "delta")


# ---------------------------------------------------------------------------
# marginal heuristic


def test_marginal_alternating_cubic():
    cert = check_marginal_stable(alternating_cubic_kernel())
    assert cert.verdict == STABLE and cert.rigor == HEURISTIC
    zeros = cert.witness["circle_zeros"]
    assert len(zeros) == 1
    assert abs(zeros[0]["theta"] - math.pi) <= 2.0 * math.pi / 4096 + 1e-9


def test_marginal_geometric_half():
    cert = check_marginal_stable(geometric_half_kernel())
    assert cert.verdict == STABLE and cert.rigor == HEURISTIC
    zeros = cert.witness["circle_zeros"]
    assert len(zeros) == 1
    theta = zeros[0]["theta"]
    assert min(theta, 2.0 * math.pi - theta) <= 2.0 * math.pi / 4096 + 1e-9


def test_marginal_plain_contraction_not_applicable():
    cert = check_marginal_stable(KernelSpec((0.5,), TailModel.zero()))
    assert cert.verdict == NOT_APPLICABLE
    assert cert.witness["reason"] == "no near-zero on the circle"


def test_marginal_divergent_moment_not_applicable():
    cert = check_marginal_stable(small_radius_unstable_kernel())
    assert cert.verdict == NOT_APPLICABLE


def test_marginal_requires_min_degree():
    with pytest.raises(ValueError):
        check_marginal_stable(renewal_kernel(), n=8)


def test_marginal_rejects_certified_root():
    cert = check_marginal_stable(KernelSpec((2.0,), TailModel.zero()))
    assert cert.verdict == NOT_APPLICABLE
    assert "root" in cert.witness["reason"]


# ---------------------------------------------------------------------------
# pipeline


def test_certify_renewal_stops_at_efp():
    rep = certify(renewal_kernel())
    assert (rep.final_verdict, rep.final_criterion, rep.final_rigor) == (
        ASYMPTOTICALLY_STABLE,
        "EFP",
        RIGOROUS,
    )
    assert rep.empirical is None and rep.trajectory_summary is None
    assert [a["criterion"] for a in rep.attempts] == ["AbsoluteSum", "EFP"]


def test_certify_small_radius_all_na_then_unbounded():
    rep = certify(small_radius_unstable_kernel())
    assert rep.final_verdict == UNSTABLE and rep.final_rigor == "empirical"
    assert rep.certificate is None
    assert all(a["verdict"] == NOT_APPLICABLE for a in rep.attempts)
    assert rep.empirical.kind == "unbounded"


def test_certify_table_fires_exactly_at_six():
    rep = certify(rouche_table_kernel(), max_degree=6)
    assert rep.final_criterion == "RoucheStable" and rep.final_witness["n"] == 6
    fired = [a for a in rep.attempts if a["criterion"] == "RoucheStable" and a["verdict"] != NOT_APPLICABLE]
    assert len(fired) == 1 and fired[0]["n"] == 6


def test_certify_unstable_pair_real_axis_first():
    rep = certify(rouche_unstable_pair_kernel())
    assert rep.final_verdict == UNSTABLE and rep.final_rigor == RIGOROUS
    assert rep.final_criterion == "RealAxisRoot"


def test_certify_geometric_null_empirical_decay():
    rep = certify(geometric_null_kernel())
    assert rep.final_verdict == ASYMPTOTICALLY_STABLE
    assert rep.final_criterion == "Empirical"
    assert rep.empirical.kind == "decaying"


def test_certify_marginal_kernels_heuristic_stable():
    for k in (alternating_cubic_kernel(), geometric_half_kernel()):
        rep = certify(k, steps=2000)
        assert rep.final_verdict == STABLE and rep.final_rigor == HEURISTIC
        assert rep.empirical is not None and rep.empirical.kind != "unbounded"


def test_certify_validates_arguments():
    with pytest.raises(ValueError):
        certify(renewal_kernel(), max_degree=0)
    with pytest.raises(ValueError):
        certify(renewal_kernel(), steps=50)


def test_certify_deterministic():
    a = report_to_dict(certify(rouche_table_kernel(), max_degree=6))
    b = report_to_dict(certify(rouche_table_kernel(), max_degree=6))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_heuristic_never_overrides_unbounded(monkeypatch):
    fake = Certificate(STABLE, "MarginalStable", HEURISTIC, {"circle_zeros": []})
    monkeypatch.setattr(certify_mod, "test_marginal_stable", lambda *a, **kw: fake)
    rep = certify_mod.certify(small_radius_unstable_kernel())
    assert rep.final_verdict == "inconclusive"
    assert rep.certificate is fake
    assert rep.empirical.kind == "unbounded"


def test_report_json_interface():
    rep = certify(renewal_kernel())
    d = report_to_dict(rep)
    assert set(d) >= {"kernel_id", "final", "attempts"}
    assert d["final"]["verdict"] in {"asymptotically_stable", "stable", "unstable", "inconclusive"}
    assert isinstance(d["attempts"], list) and d["attempts"]
    rep2 = certify(small_radius_unstable_kernel())
    d2 = report_to_dict(rep2)
    assert d2["empirical"]["kind"] == "unbounded"
    assert d2["final"]["verdict"] == "unstable"
    json.dumps(d), json.dumps(d2)


# ---------------------------------------------------------------------------
# cross-criterion invariants


def _all_rigorous_certs(kernel, max_degree=8):
    certs = [check_absolute_sum(kernel), check_efp(kernel), check_real_axis_root(kernel, 512)]
    for n in range(1, max_degree + 1):
        certs.append(check_rouche_stable(kernel, n))
        certs.append(check_rouche_unstable(kernel, n))
    return [c for c in certs if c.fired]


def test_exclusivity_no_conflicting_rigorous_certificates(rng):
    kernels = list(paper_kernels().values())
    for _ in range(20):
        kernels.append(random_bounded_kernel(rng, 0.1, 1.8))
    for k in kernels:
        fired = _all_rigorous_certs(k)
        verdicts = {c.verdict for c in fired}
        assert not ({ASYMPTOTICALLY_STABLE, UNSTABLE} <= verdicts), f"conflict on {k}"


def test_rouche_window_monotone_under_refinement(rng):
    # a certificate with strict slack keeps firing when tail terms move into the prefix
    hits = 0
    for _ in range(40):
        k = random_bounded_kernel(rng, 0.1, 0.8, q_max=0.45)
        fired_n = None
        for n in range(1, 9):
            cert = check_rouche_stable(k, n)
            if cert.fired and cert.witness["tail_hi"] < 0.5 * cert.witness["threshold"]:
                fired_n = n
                break
        if fired_n is None:
            continue
        hits += 1
        extra = int(rng.integers(1, 6))
        longer = KernelSpec(
            k.prefix + tuple(term(k, len(k.prefix) + i + 1) for i in range(extra)), k.tail
        )
        assert any(check_rouche_stable(longer, n).fired for n in range(1, 33))
    assert hits >= 10


def test_theorem1_rouche_agreement_small_ratio(rng):
    # absolute mass < 1 with a slowly decaying tail cannot be resolved by the
    # finite window: (1-r_n)^n shrinks faster than the tail; agreement is
    # checked where it is attainable, |q| <= 0.45
    for _ in range(25):
        k = random_bounded_kernel(rng, 0.1, 0.9, q_max=0.45)
        assert check_absolute_sum(k).fired
        assert any(check_rouche_stable(k, n).fired for n in range(1, 33))


def test_rigorous_certificates_match_long_simulation(rng):
    # desk-scale soundness: a rigorous certificate never contradicts the
    # observed trajectory class
    for name, k in paper_kernels().items():
        fired = _all_rigorous_certs(k, max_degree=6)
        if not fired:
            continue
        verdict = fired[0].verdict
        emp = classify(solve(k, 20_000))
        if verdict == ASYMPTOTICALLY_STABLE:
            assert emp.kind != "unbounded", name
        if verdict == UNSTABLE:
            assert emp.kind == "unbounded", name
