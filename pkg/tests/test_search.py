import warnings
from math import comb

import numpy as np
import pytest

from grasscurv import (
    VeroneseSpec,
    binomial_match,
    build_ansatz,
    classify,
    constraints_from_ansatz,
    enumerate_exponents,
    infeasibility_probe,
    macfarlane_gram_det,
    solve_multistart,
    veronese_macfarlane,
)
from grasscurv.errors import BadExponents, PowerMismatch
from grasscurv.search import (
    FLOOR_LABEL,
    SolveOutcome,
    certified_residual,
    find_witness,
    g26_r7_pattern,
    g26_r7_reference_point,
    missing_powers,
    probe_target,
    pruned_trace,
    verify_witness,
)


def branch_key(a):
    return (a.r, a.s1)


def veronese_point(n):
    """Veronese chart with rows 1, 2 and the two columns swapped, read as ansatz values."""
    K = veronese_macfarlane(VeroneseSpec(n, 2)).K
    values = {}
    for i, row in enumerate(K, start=1):
        values[f"alpha{i}"] = row[1].coeffs[-1].real
        values[f"beta{i}"] = row[0].coeffs[-1]
    return values


class TestAnsatz:
    def test_powers_g24_r3_case(self):
        assert sorted(build_ansatz(4, (1, 2), 1).powers()) == [0, 1, 1, 2, 2, 3]

    def test_powers_top_case(self):
        assert sorted(build_ansatz(4, (1, 3), 2).powers()) == [0, 1, 2, 3, 4, 5]

    def test_g26_pattern_powers(self):
        a = g26_r7_pattern()
        assert a.tag("alpha4") == "zero"
        assert sorted(a.powers()) == [0, 1, 2, 2, 3, 3, 4, 4, 4, 5, 5, 6, 6, 7]

    def test_s_offsets_constant(self):
        a = build_ansatz(6, (1, 2, 2, 5), 3)
        assert a.s == (3, 4, 4, 7)

    def test_gauge_tags(self):
        a = build_ansatz(5, (1, 2, 3), 2, zero_pattern=("beta3",))
        assert [a.tag(s) for s in a.slots] == ["real", "real", "real", "real", "complex", "zero"]

    @pytest.mark.parametrize("args", [
        (3, (1,), 1), (4, (1,), 1), (4, (2, 3), 1), (4, (1, 0), 1), (5, (1, 3, 2), 1), (4, (1, 2), 0),
    ])
    def test_bad_exponents(self, args):
        with pytest.raises(BadExponents):
            build_ansatz(*args)

    def test_bad_zero_pattern(self):
        with pytest.raises(BadExponents):
            build_ansatz(4, (1, 2), 1, zero_pattern=("alpha3",))
        with pytest.raises(BadExponents):
            build_ansatz(4, (1, 2), 1, zero_pattern=("gamma1",))
        with pytest.raises(BadExponents):
            build_ansatz(5, (1, 2, 2), 1, vanishing=[(2, 1)])

    def test_relax_r1(self):
        with pytest.raises(BadExponents):
            build_ansatz(4, (2, 3), 1)
        assert build_ansatz(4, (2, 3), 1, relax_r1=True).r == (2, 3)
        default = {branch_key(a) for a in enumerate_exponents(4, 4)}
        relaxed = {branch_key(a) for a in enumerate_exponents(4, 4, relax_r1=True)}
        assert default < relaxed
        assert all(r[0] == 1 for r, _ in default)
        assert any(r[0] > 1 for r, _ in relaxed)


class TestEnumeration:
    def test_g24_r3_branch_present(self):
        assert ((1, 2), 1) in {branch_key(a) for a in enumerate_exponents(4, 3)}

    def test_top_power_g24_single_class(self):
        assert [branch_key(a) for a in enumerate_exponents(4, 5)] == [((1, 3), 2)]

    def test_g25_r7_branches(self):
        keys = {branch_key(a) for a in enumerate_exponents(5, 7)}
        assert ((1, 2, 4), 2) in keys and ((1, 2, 3), 3) in keys

    def test_every_branch_reaches_target(self):
        for n, R in [(4, 3), (5, 6), (5, 8), (6, 9)]:
            for a in enumerate_exponents(n, R):
                assert a.max_power == R
                assert set(a.powers()) == set(range(R + 1))
                assert all(ri <= R for ri in a.r) and a.s1 <= R

    def test_transposition_dedupe(self):
        for R in range(1, 6):
            for a in enumerate_exponents(4, R):
                assert a.r[1] >= a.s1

    def test_top_power_needs_collision(self):
        assert enumerate_exponents(6, comb(6, 2) - 1) == []

    def test_no_covering_branch_at_r9(self):
        assert enumerate_exponents(5, 9) == []
        assert pruned_trace(5, 9)

    def test_missing_powers(self):
        a = build_ansatz(4, (1, 2), 2, vanishing=[(1, 2)])
        assert missing_powers(a, 4) == [4]
        assert missing_powers(build_ansatz(4, (1, 2), 1), 3) == []

    def test_target_must_be_positive(self):
        with pytest.raises(ValueError):
            enumerate_exponents(4, 0)


class TestConstraints:
    def test_g24_top_equations(self):
        sys = constraints_from_ansatz(build_ansatz(4, (1, 3), 2), 5)
        assert sys.unknowns == ("alpha1", "alpha2", "beta1", "beta2.re", "beta2.im")
        got = [(e.power, e.labels, e.rhs) for e in sys.equations]
        assert got == [(0, ((1, 2),), 1), (1, ((2, 3),), 5), (2, ((1, 3),), 10), (3, ((2, 4),), 10),
                       (4, ((1, 4),), 5), (5, ((3, 4),), 1)]
        x = sys.point({"alpha1": 2.0, "alpha2": 3.0, "beta1": 0.5, "beta2": 1 + 1j})
        lhs = sys.lhs(x)
        gamma = 2.0 * (1 + 1j) - 3.0 * 0.5
        assert np.allclose(lhs, [1, 4, 0.25, 9, 2, abs(gamma) ** 2])

    def test_g26_equations(self):
        sys = constraints_from_ansatz(g26_r7_pattern(), 7)
        eqs = {e.power: (set(e.labels), e.rhs) for e in sys.equations}
        assert eqs[2] == ({(1, 3), (2, 4)}, 21)
        assert eqs[6] == ({(4, 5), (4, 6)}, 7)
        assert eqs[3] == ({(1, 4), (2, 5)}, 35)
        assert len(sys.equations) == 8

    def test_power_mismatch(self):
        with pytest.raises(PowerMismatch):
            constraints_from_ansatz(build_ansatz(4, (1, 2), 1), 4)

    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_veronese_values_solve_system(self, n):
        R = 2 * (n - 2)
        a = build_ansatz(n, tuple(range(1, n - 1)), 2)
        sys = constraints_from_ansatz(a, R)
        x = sys.point(veronese_point(n))
        assert sys.residual(x) < 1e-12
        assert binomial_match(macfarlane_gram_det(sys.macfarlane(x))).r == R

    def test_constraint_sum_identity(self):
        rng = np.random.default_rng(0)
        for n, R in [(4, 3), (5, 6), (6, 7)]:
            for a in enumerate_exponents(n, R)[:3]:
                sys = constraints_from_ansatz(a, R)
                x = rng.normal(size=sys.dim)
                det = macfarlane_gram_det(sys.macfarlane(x))
                forced = sys.residual_vector(x)[R + 1:]
                assert det(1.0) == pytest.approx(sys.lhs(x).sum() + forced @ forced, rel=1e-12)
        sys = constraints_from_ansatz(g26_r7_pattern(), 7)
        out = solve_multistart(sys, 20, 1)
        assert sys.lhs(out.x).sum() == pytest.approx(2 ** 7, rel=1e-10)

    def test_vanishing_rows(self):
        a = build_ansatz(5, (1, 2, 5), 2, vanishing=[(2, 3)])
        sys = constraints_from_ansatz(a, 7)
        assert sys.vanishing == ((4, 5),)
        assert sys.residual_vector(np.ones(sys.dim)).shape == (8 + 2,)

    def test_point_round_trip(self):
        sys = constraints_from_ansatz(g26_r7_pattern(), 7)
        vals = g26_r7_reference_point()
        back = sys.slot_values(sys.point(vals))
        for k, v in vals.items():
            assert back[k] == pytest.approx(v)
        assert back["alpha4"] == 0

    def test_jacobian_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        sys = constraints_from_ansatz(g26_r7_pattern(), 7)
        x = rng.normal(size=sys.dim)
        J = sys.jacobian(x)
        h = 1e-6
        for j in range(sys.dim):
            e = np.zeros(sys.dim)
            e[j] = h
            fd = (sys.residual_vector(x + e) - sys.residual_vector(x - e)) / (2 * h)
            assert np.allclose(J[:, j], fd, rtol=1e-6, atol=1e-6)


class TestSolve:
    def test_g24_r3_system_solved(self):
        sys = constraints_from_ansatz(build_ansatz(4, (1, 2), 1), 3)
        out = solve_multistart(sys, 100, 42)
        assert out.status == "solved" and out.residual <= 1e-10
        assert binomial_match(macfarlane_gram_det(out.witness())).r == 3

    def test_top_g24_floor(self):
        sys = constraints_from_ansatz(build_ansatz(4, (1, 3), 2), 5)
        out = solve_multistart(sys, 100, 42)
        assert out.status == "residual_floor" and out.residual > 0.1
        assert out.restarts_used == 100 and out.witness() is None

    def test_g26_r7(self):
        sys = constraints_from_ansatz(g26_r7_pattern(), 7)
        out = solve_multistart(sys, 100, 42)
        assert out.status == "solved"
        m = binomial_match(macfarlane_gram_det(out.witness()))
        assert m.r == 7 and m.c == pytest.approx(1, abs=1e-8)
        assert sys.residual(sys.point(g26_r7_reference_point())) < 1e-4

    def test_determinism(self):
        sys = constraints_from_ansatz(enumerate_exponents(5, 7)[0], 7)
        a = solve_multistart(sys, 10, 7)
        b = solve_multistart(sys, 10, 7)
        assert a.to_dict() == b.to_dict()
        assert np.array_equal(a.x, b.x)
        c = solve_multistart(sys, 10, 8)
        assert c.to_dict() != a.to_dict()

    def test_round_trip_of_solved_outcomes(self):
        for n, R in [(4, 1), (4, 2), (4, 3), (5, 5), (6, 7)]:
            w = find_witness(n, R)
            m = binomial_match(macfarlane_gram_det(w.mmap), 1e-8)
            assert m is not None and m.r == R and m.c == pytest.approx(1, abs=1e-8)

    def test_restarts_validated(self):
        sys = constraints_from_ansatz(build_ansatz(4, (1, 2), 1), 3)
        with pytest.raises(ValueError):
            solve_multistart(sys, 0)

    def test_outcome_invariant(self):
        with pytest.raises(ValueError):
            SolveOutcome("solved", {}, 1.0, 1, 0)

    def test_zero_dimensional_system(self):
        a = build_ansatz(4, (1, 1), 1, zero_pattern=("alpha1", "alpha2", "beta2"))
        sys = constraints_from_ansatz(a, 1)
        sys_out = solve_multistart(sys, 3, 0)
        assert sys.dim == 1 and sys_out.status == "solved"


class TestProbe:
    def test_g25_r7_branch_floor(self):
        res = infeasibility_probe(constraints_from_ansatz(build_ansatz(5, (1, 2, 4), 2), 7), 100, 42)
        assert res.floor > 0.01 and res.label == FLOOR_LABEL
        assert res.trace[0]["r2"] == 2 and res.trace[0]["s1"] == 2

    def test_r8_branches_positive(self):
        systems = [constraints_from_ansatz(a, 8) for a in enumerate_exponents(5, 8)]
        assert {a.s1 for a in enumerate_exponents(5, 8)} <= {2, 3, 4, 5, 6, 7, 8}
        res = infeasibility_probe(systems, 50, 42)
        assert all(t["floor"] > 0 for t in res.trace)
        assert res.floor > 0.01

    def test_feasible_control(self):
        sys = constraints_from_ansatz(build_ansatz(5, (1, 2, 3), 2), 6)
        res = infeasibility_probe(sys, 20, 42)
        assert res.floor < 1e-10 and res.label == "solution found"

    def test_probe_target_includes_pruned(self):
        res = probe_target(5, 9, 10)
        assert res.floor > 0.01
        assert res.trace and all(t["kind"] == "pruned" for t in res.trace)
        assert res.to_dict()["label"] == FLOOR_LABEL

    def test_pruned_bound(self):
        for t in pruned_trace(4, 5):
            assert t["floor"] == sum(comb(5, k) ** 2 for k in t["missing"])


class TestClassify:
    def test_g24(self):
        rows = classify(4, range(1, 6))
        assert [r.status for r in rows] == ["solved"] * 4 + ["residual_floor"]
        assert [r.kappa for r in rows[:4]] == [4.0, 2.0, 4 / 3, 1.0]
        assert all(r.residual <= 1e-10 for r in rows[:4])
        assert rows[3].source == "veronese"
        assert rows[4].residual > 1e-2 and rows[4].label == FLOOR_LABEL
        for row in rows[:4]:
            assert verify_witness(row.witness, row.r)
            assert certified_residual(row.witness, row.r) == row.residual

    def test_unknown_n_warns(self):
        with pytest.warns(UserWarning):
            rows = classify(7, [2], restarts=5)
        assert rows[0].source == "embedding"

    def test_embedding_rows(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rows = classify(5, [3, 6])
        assert [r.source for r in rows] == ["embedding", "veronese"]
