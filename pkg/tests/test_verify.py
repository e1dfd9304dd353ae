import json
import math
from fractions import Fraction

import numpy as np
import pytest

from simplexgeom import errors
from simplexgeom.embeddings import MarkovPartition, MarkovPatch, random_partition
from simplexgeom.tensors import ConeMetric, custom, scaled, tensor_d, tensor_lm, tensor_s
from simplexgeom.verify import (
    DEFAULT_GRID,
    CheckReport,
    FamilyOracle,
    Grid,
    M_profile,
    admissible_c,
    barycenter_quantity,
    check_C1,
    check_C2,
    check_alpha_scaling,
    check_campbell_iota,
    check_campbell_j,
    check_family_invariance,
    check_markov_invariance,
    check_patch_invariance,
    check_sym_u,
    factorization_check_markov,
    factorization_check_patched,
    psi_point,
    reconstruct_lambda,
    reconstruct_mu,
    relative_deviation,
    u_alpha_ij,
)

F = Fraction


def test_report_serializes():
    rep = CheckReport("x", False, math.inf, 3, {"p": np.array([0.5, 0.5]), "f": F(1, 3)})
    d = json.loads(json.dumps(rep.to_dict()))
    assert set(d) >= {"name", "passed", "max_deviation", "trials", "witness"}
    assert d["witness"] == {"p": [0.5, 0.5], "f": "1/3"}
    assert d["max_deviation"] == "inf"


def test_relative_deviation():
    assert relative_deviation(22 / 9, 2.0) == pytest.approx(2 / 9)
    assert relative_deviation(1e-3, 0.0) == pytest.approx(1e-3)
    assert relative_deviation(F(1, 2), F(1, 4)) == 0.25
    assert relative_deviation(F(6), F(4)) == 0.5


def test_psi_point_and_u_alpha():
    P = psi_point(0.25, 0.8, (2, 3, 1))
    np.testing.assert_allclose(P.q.w, [0.2, 0.2, 0.6])
    assert u_alpha_ij(0.25, 0.8, 1, 2) == pytest.approx(0.25)
    assert u_alpha_ij(0.25, 0.8, 3, 1) == pytest.approx(0.2 / 0.4)


def test_invariance_lm_passes():
    rep = check_family_invariance(FamilyOracle.lm(3, -1), 500, rng=1)
    assert rep.passed and rep.max_deviation <= 1e-9


def test_invariance_fisher_fails_with_alpha_witness():
    rep = check_family_invariance(FamilyOracle.fisher(), 100, rng=1)
    assert not rep.passed
    assert rep.witness["ratio"] == pytest.approx(rep.witness["alpha"], rel=1e-9)


def test_invariance_zero_and_exact():
    assert check_family_invariance(FamilyOracle.zero(), 100, rng=1).max_deviation == 0
    rep = check_family_invariance(FamilyOracle.lm(F(3), F(-1), 4), 100, rng=1, exact=True)
    assert rep.passed and rep.max_deviation == 0


def test_invariance_needs_two_levels():
    with pytest.raises(errors.OutOfRange):
        check_family_invariance(FamilyOracle.zero(max_n=1), 10)


def test_alpha_scaling_and_markov_invariance_of_fisher():
    assert check_alpha_scaling(FamilyOracle.fisher(), 200, rng=2).passed
    assert check_markov_invariance(FamilyOracle.fisher(8), 30, rng=2).passed
    assert not check_markov_invariance(FamilyOracle.d(1, 8), 30, rng=2).passed


def test_patch_invariance_closed_witness(oracle):
    patch = MarkovPatch(1, (1, 2, 3), [0.5, 0.9])
    rep = check_patch_invariance(patch, 1, 0)
    assert not rep.passed and rep.max_deviation > 1e-6
    scalar = MarkovPatch(1, (2, 3, 1), [0.4, 0.4])
    rep = check_patch_invariance(scalar, 1, 1, max_random=50, rng=0)
    assert rep.passed
    assert any("inconclusive" in n for n in rep.notes)


def test_sym_u():
    assert check_sym_u(tensor_s(1)).passed
    assert check_sym_u(tensor_d(1)).passed
    assert not check_sym_u(custom(1, lambda w, x, y: w[0])).passed


def test_barycenter_quantity(oracle):
    value, rep = barycenter_quantity(FamilyOracle.lm(1, 0), 2)
    assert value == pytest.approx(float(oracle["d_b2_Z1Z1"]) / 6)
    assert rep.passed
    for n in range(1, 7):
        value, rep = barycenter_quantity(FamilyOracle.lm(-2.5, 4.0), n)
        assert value == pytest.approx(-2.5, rel=1e-12) and rep.passed
    assert barycenter_quantity(FamilyOracle.zero(), 3)[0] == 0


def test_m_profile(oracle):
    A1 = scaled(tensor_s(1), 2.25)
    assert M_profile(A1, 1 / 3) ** 2 == pytest.approx(float(oracle["s_2_25_A1_third"]))
    assert M_profile(A1, 1 / 3) < 0
    assert M_profile(A1, 0.5) == 0.0
    for u in DEFAULT_GRID.u:
        assert M_profile(A1, u) == pytest.approx(-M_profile(A1, 1 - u), abs=1e-10)
    with pytest.raises(errors.NegativeValue):
        M_profile(scaled(tensor_d(1), -1.0), 0.3)


def test_c1_ratios_match_oracle(oracle):
    table, rep = check_C1(tensor_d(2), tensor_d(1))
    assert rep.passed
    by_u = {round(t / (1 + t), 12): r for t, r in table}
    for cell in oracle["c1_cells"]:
        assert by_u[round(float(cell["u"]), 12)] == pytest.approx(float(cell["ratio_d"]), rel=1e-12)


def test_c1_mixed_family_depends_on_alpha(oracle):
    ratios = {}
    for cell in oracle["c1_cells"]:
        if cell["ratio_lm11"] is not None:
            ratios.setdefault(cell["u"], set()).add(cell["ratio_lm11"])
    assert any(len(v) > 1 for v in ratios.values())
    _, rep = check_C1(tensor_lm(2, 1, 1), tensor_lm(1, 1, 1))
    assert not rep.passed


def test_c1_precondition_and_degenerate_denominator():
    table, rep = check_C1(tensor_s(2), tensor_s(1))
    assert table == [] and not rep.passed
    assert rep.witness["clause"] == "precondition"
    with pytest.raises(errors.DegenerateDenominator):
        check_C1(tensor_lm(2, 1, 1), tensor_lm(1, 1, 1), exclude_vanishing=False)
    _, rep = check_C1(tensor_lm(2, 1, 1), tensor_lm(1, 1, 1))
    assert any("excluded" in n for n in rep.notes)


def test_c1_zero_family_is_vacuous():
    table, rep = check_C1(tensor_lm(2, 0, 0), tensor_lm(1, 0, 0))
    assert rep.passed and table == []


def test_c2():
    small = Grid(u=(1 / 4, 1 / 3, 1 / 2, 3 / 4), alpha=(0.2, 0.7))
    assert check_C2(FamilyOracle.s(2.25), small).passed
    assert check_C2(FamilyOracle.zero(), small).passed
    rep = check_C2(FamilyOracle.d(1), small)
    assert not rep.passed
    assert rep.witness["clause"] == "degeneracy"
    assert rep.witness["A1_at_b1"] == pytest.approx(2.0)
    assert not check_C2(FamilyOracle.lm(1, 1), small).passed


def test_reconstructions(oracle):
    lam, rep = reconstruct_lambda(FamilyOracle.d(3.7), rng=0)
    assert lam == pytest.approx(3.7, rel=1e-12) and rep.passed
    lam, _ = reconstruct_lambda(FamilyOracle.d(-1.2), rng=0)
    assert lam == pytest.approx(-1.2, rel=1e-12)
    assert reconstruct_lambda(FamilyOracle.zero(), rng=0)[0] == 0
    mu, rep = reconstruct_mu(FamilyOracle.s(2.25), rng=0)
    assert mu == pytest.approx(float(oracle["s_2_25_mu"]), rel=1e-12) and rep.passed
    assert reconstruct_mu(FamilyOracle.zero(), rng=0)[0] == 0


def test_reconstruction_prerequisites():
    with pytest.raises(errors.PrereqFailed) as info:
        reconstruct_lambda(FamilyOracle.fisher(), rng=0)
    assert info.value.report is not None and not info.value.report.passed
    with pytest.raises(errors.PrereqFailed):
        reconstruct_lambda(FamilyOracle.s(1), rng=0)
    with pytest.raises(errors.PrereqFailed):
        reconstruct_mu(FamilyOracle.d(1), rng=0)


def test_factorization_markov():
    rng = np.random.default_rng(0)
    part = random_partition(2, 6, rng, exact=True)
    rep = factorization_check_markov(part, 50, rng)
    assert rep.passed and rep.max_deviation == 0
    ident = MarkovPartition(2, 2, (1, 2, 3), [F(1)] * 3)
    assert factorization_check_markov(ident, 10, rng).passed
    t = np.array(sum(part.measure(i) for i in range(1, 4)), dtype=object)
    t[0] += F(1, 10)
    rep = factorization_check_markov(part, 10, rng, t=t)
    assert not rep.passed and rep.witness["I"] == 1


def test_factorization_patched(oracle):
    a = [F(1, 2), F(9, 10), F(7, 10)]
    patch = MarkovPatch(2, (1, 2, 3, 4), a)
    b = F(2, 5)
    c = admissible_c(patch, 1, b)
    assert c == oracle["patched_c_mid"]
    rep = factorization_check_patched(patch, 1, b, c, 50, rng=0)
    assert rep.passed and rep.max_deviation == 0
    with pytest.raises(errors.InfeasibleConstraints):
        factorization_check_patched(patch, 1, b, oracle["patched_interval"][1])
    bad = list(oracle["patched_t_mid"])
    bad[3] += F(1, 10)
    assert not factorization_check_patched(patch, 1, b, c, 5, rng=0, t=bad).passed


def test_factorization_patched_scalar_and_float():
    scalar = MarkovPatch(2, (3, 1, 4, 2), [F(3, 10)] * 3)
    assert factorization_check_patched(scalar, 2, F(1, 3), F(3, 10), 20, rng=0).passed
    flt = MarkovPatch(2, (1, 2, 3, 4), [0.5, 0.9, 0.7])
    assert factorization_check_patched(flt, 1, 0.4, admissible_c(flt, 1, 0.4), 50, rng=0).passed
    with pytest.raises(errors.OutOfRange):
        factorization_check_patched(flt, 1, 1.2, 0.7)


def test_campbell():
    for lam in (lambda h: 1.0, lambda h: 2.0 + h, lambda h: 0.5 * h * h):
        g = ConeMetric(lam, lambda h: h)
        assert check_campbell_iota(g, rng=0).passed
    rep = check_campbell_j(ConeMetric(lambda h: 1.0, lambda h: 0.0))
    assert not rep.passed
    assert rep.witness["j_pullback"] == pytest.approx(4.0)
    assert rep.witness["A_lambda_mu"] == pytest.approx(200 / 9)
