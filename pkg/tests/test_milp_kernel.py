"""Kernel checks: simplex vs HiGHS on random LPs, branch-and-bound vs
enumeration on random MILPs, determinism, incremental edits, error paths."""

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from aidroute import milp_kernel as mk


def random_lp(rng, n, m, bounded=True):
    model = mk.MipModel()
    for j in range(n):
        lb = float(rng.uniform(-5, 0))
        ub = lb + float(rng.uniform(0.5, 8)) if bounded or rng.random() < 0.7 else math.inf
        model.add_column(lb=lb, ub=ub, obj=float(rng.uniform(-3, 3)), name=f"x{j}")
    for i in range(m):
        nz = rng.choice(n, size=rng.integers(1, min(n, 4) + 1), replace=False)
        coefs = {int(j): float(rng.uniform(-2, 2)) for j in nz}
        sense = ("<=", ">=", "=")[int(rng.integers(0, 3))]
        model.add_row(coefs, sense, float(rng.uniform(-4, 4)))
    return model


def scipy_reference(model):
    std = mk._Std(model)
    ub_rows = [i for i, s in enumerate(std.senses) if s == "<="]
    ge_rows = [i for i, s in enumerate(std.senses) if s == ">="]
    eq_rows = [i for i, s in enumerate(std.senses) if s == "="]
    a = std.dense()
    a_ub, b_ub = [], []
    for i in ub_rows:
        a_ub.append(a[i]); b_ub.append(std.b[i])
    for i in ge_rows:
        a_ub.append(-a[i]); b_ub.append(-std.b[i])
    res = linprog(std.c,
                  A_ub=np.array(a_ub) if a_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=a[eq_rows] if eq_rows else None,
                  b_eq=std.b[eq_rows] if eq_rows else None,
                  bounds=np.column_stack([std.lb, std.ub]), method="highs")
    return res


class TestSolveLp:
    def test_single_constraint_dual(self):
        m = mk.MipModel()
        x = m.add_column(lb=0, ub=10, obj=1.0)
        m.add_row({x: 1.0}, ">=", 3.0)
        s = mk.solve_lp(m)
        assert s.status == "optimal"
        assert s.objective == pytest.approx(3.0, abs=1e-9)
        assert s.duals[0] == pytest.approx(1.0, abs=1e-9)

    def test_symmetric_vertex(self):
        m = mk.MipModel()
        x = m.add_column(0, 1, -1.0)
        y = m.add_column(0, 1, -1.0)
        m.add_row({x: 1.0, y: 1.0}, "<=", 1.0)
        s = mk.solve_lp(m)
        assert s.status == "optimal"
        assert s.objective == pytest.approx(-1.0, abs=1e-9)
        assert s.duals[0] == pytest.approx(-1.0, abs=1e-9)

    def test_infeasible_detected(self):
        m = mk.MipModel()
        x = m.add_column(0, 1, 1.0)
        m.add_row({x: 1.0}, ">=", 2.0)
        assert mk.solve_lp(m).status == "infeasible"

    def test_unbounded_detected(self):
        m = mk.MipModel()
        x = m.add_column(0, math.inf, -1.0)
        m.add_row({x: -1.0}, "<=", 0.0)
        assert mk.solve_lp(m).status == "unbounded"

    def test_random_lps_match_highs(self):
        rng = np.random.default_rng(42)
        n_opt = 0
        for _ in range(120):
            model = random_lp(rng, n=int(rng.integers(2, 7)), m=int(rng.integers(1, 7)))
            mine = mk.solve_lp(model, engine="own")
            ref = scipy_reference(model)
            if ref.status == 2:
                assert mine.status == "infeasible"
            elif ref.status == 3:
                assert mine.status == "unbounded"
            else:
                n_opt += 1
                assert mine.status == "optimal"
                assert mine.objective == pytest.approx(ref.fun, abs=1e-7, rel=1e-7)
                audit = mk.check_lp_solution(model, mine)
                assert audit["violation_ok"], audit
                assert audit["gap_ok"], audit
        assert n_opt > 30

    def test_duals_price_rhs_perturbation(self):
        # dual value predicts objective change for a nondegenerate rhs shift
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 10:
            model = random_lp(rng, n=4, m=3)
            base = mk.solve_lp(model, engine="own")
            if base.status != "optimal":
                continue
            i = int(rng.integers(0, model.n_rows))
            eps = 1e-5
            model.rows[i].rhs += eps
            bumped = mk.solve_lp(model, engine="own")
            model.rows[i].rhs -= eps
            if bumped.status != "optimal":
                continue
            predicted = base.objective + eps * base.duals[i]
            assert bumped.objective == pytest.approx(predicted, abs=1e-8)
            checked += 1

    def test_engine_parity_lp(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            model = random_lp(rng, n=5, m=4)
            a = mk.solve_lp(model, engine="own")
            b = mk.solve_lp(model, engine="highs")
            assert a.status == b.status
            if a.status == "optimal":
                assert a.objective == pytest.approx(b.objective, abs=1e-7, rel=1e-7)

    def test_determinism(self):
        rng = np.random.default_rng(11)
        model = random_lp(rng, n=6, m=5)
        s1 = mk.solve_lp(model, engine="own")
        s2 = mk.solve_lp(model, engine="own")
        assert np.array_equal(s1.primal, s2.primal)
        assert np.array_equal(s1.duals, s2.duals)


def enumerate_binary_optimum(model):
    std = mk._Std(model)
    n = std.n
    best = math.inf
    a = std.dense()
    for mask in range(2 ** n):
        x = np.array([(mask >> j) & 1 for j in range(n)], float)
        if (x < std.lb - 1e-12).any() or (x > std.ub + 1e-12).any():
            continue
        ax = a @ x
        ok = True
        for i, s in enumerate(std.senses):
            r = ax[i] - std.b[i]
            if (s == "<=" and r > 1e-9) or (s == ">=" and r < -1e-9) or (s == "=" and abs(r) > 1e-9):
                ok = False
                break
        if ok:
            best = min(best, float(std.c @ x))
    return best


class TestSolveMilp:
    def test_knapsack(self):
        m = mk.MipModel(sense="max")
        a = m.add_column(0, 1, 3, is_int=True)
        b = m.add_column(0, 1, 4, is_int=True)
        c = m.add_column(0, 1, 5, is_int=True)
        m.add_row({a: 2, b: 3, c: 4}, "<=", 5)
        s = mk.solve_milp(m)
        assert s.status == "optimal"
        assert s.objective == pytest.approx(7.0, abs=1e-9)
        assert np.allclose(s.primal, [1, 1, 0])

    def test_integral_lp_needs_no_branching(self):
        m = mk.MipModel()
        x = m.add_column(0, 4, 1.0, is_int=True)
        m.add_row({x: 1.0}, ">=", 2.0)
        lp = mk.solve_lp(m)
        s = mk.solve_milp(m)
        assert s.objective == pytest.approx(lp.objective, abs=1e-9)
        assert s.node_count == 1

    def test_random_binary_models_match_enumeration(self):
        rng = np.random.default_rng(5)
        solved = 0
        for _ in range(80):
            n = int(rng.integers(2, 7))
            model = mk.MipModel()
            for j in range(n):
                model.add_column(0, 1, float(rng.uniform(-4, 4)), is_int=True)
            for _i in range(int(rng.integers(1, 4))):
                nz = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
                coefs = {int(j): float(rng.integers(-3, 4)) for j in nz}
                sense = ("<=", ">=")[int(rng.integers(0, 2))]
                model.add_row(coefs, sense, float(rng.integers(-2, 5)))
            best = enumerate_binary_optimum(model)
            sol = mk.solve_milp(model, engine="own")
            if math.isinf(best):
                assert sol.status == "infeasible"
            else:
                solved += 1
                assert sol.status == "optimal"
                assert sol.objective == pytest.approx(best, abs=1e-7)
                assert sol.objective >= sol.best_bound - 1e-6 * (1 + abs(sol.objective))
        assert solved > 30

    def test_milp_at_least_lp_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            model = mk.MipModel()
            for j in range(n):
                model.add_column(0, 3, float(rng.uniform(0, 4)), is_int=True)
            model.add_row({j: 1.0 for j in range(n)}, ">=", float(rng.integers(2, 3 * n)))
            lp = mk.solve_lp(model)
            s = mk.solve_milp(model)
            if s.status == "optimal" and lp.status == "optimal":
                assert s.objective >= lp.objective - 1e-6

    def test_start_vector_used_as_incumbent(self):
        model = mk.MipModel()
        x = model.add_column(0, 5, 1.0, is_int=True)
        model.add_row({x: 1.0}, ">=", 2.0)
        s = mk.solve_milp(model, start=np.array([4.0]))
        assert s.status == "optimal"
        assert s.objective == pytest.approx(2.0)

    def test_engine_parity_milp(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            model = mk.MipModel()
            for j in range(n):
                model.add_column(0, 2, float(rng.uniform(-2, 3)), is_int=(j % 2 == 0))
            model.add_row({j: float(rng.integers(1, 3)) for j in range(n)}, "<=",
                          float(rng.integers(2, 7)))
            a = mk.solve_milp(model, engine="own")
            b = mk.solve_milp(model, engine="highs")
            assert a.status == b.status
            if a.status == "optimal":
                assert a.objective == pytest.approx(b.objective, abs=1e-7)

    def test_integer_values_within_tolerance(self):
        rng = np.random.default_rng(23)
        model = random_lp(rng, n=5, m=4)
        for c in model.columns:
            c.is_int = True
            c.lb, c.ub = math.floor(c.lb), math.ceil(c.ub)
        s = mk.solve_milp(model)
        if s.status == "optimal":
            assert np.abs(s.primal - np.round(s.primal)).max() <= 1e-6


class TestIncrementalEdits:
    def make_base(self):
        m = mk.MipModel()
        x = m.add_column(0, 10, 2.0)
        y = m.add_column(0, 10, 3.0)
        m.add_row({x: 1.0, y: 1.0}, ">=", 4.0)
        return m, x, y

    def test_add_column_relaxes_minimization(self):
        m, x, y = self.make_base()
        before = mk.solve_lp(m).objective
        m.add_column(lb=0, ub=10, obj=1.0, coefs={0: 1.0})
        after = mk.solve_lp(m).objective
        assert after <= before + 1e-9

    def test_add_row_tightens_minimization(self):
        m, x, y = self.make_base()
        before = mk.solve_lp(m).objective
        m.add_row({x: 1.0}, ">=", 3.0)
        after = mk.solve_lp(m).objective
        assert after >= before - 1e-9

    def test_ids_stable(self):
        m, x, y = self.make_base()
        j = m.add_column(lb=0, ub=1, obj=0.5)
        assert j == 2
        r = m.add_row({j: 1.0}, "<=", 1.0)
        assert r == 1
        assert m.rows[r].coefs == {j: 1.0}

    def test_dangling_column_rejected(self):
        m, x, y = self.make_base()
        with pytest.raises(mk.MalformedModel):
            m.add_row({99: 1.0}, "<=", 1.0)
        with pytest.raises(mk.MalformedModel):
            m.add_column(coefs={99: 1.0})

    def test_nan_rejected(self):
        m, x, y = self.make_base()
        with pytest.raises(mk.MalformedModel):
            m.add_row({x: float("nan")}, "<=", 1.0)
        with pytest.raises(mk.MalformedModel):
            m.add_column(lb=float("nan"))

    def test_bad_bounds_rejected(self):
        m = mk.MipModel()
        with pytest.raises(mk.MalformedModel):
            m.add_column(lb=2.0, ub=1.0)


class TestLimits:
    def test_no_incumbent_at_limit(self):
        # an infeasible-looking search starved of time before any incumbent
        rng = np.random.default_rng(31)
        model = mk.MipModel()
        n = 30
        for j in range(n):
            model.add_column(0, 1, float(rng.uniform(-1, 1)), is_int=True)
        for i in range(12):
            nz = rng.choice(n, size=8, replace=False)
            model.add_row({int(j): float(rng.uniform(0.2, 1)) for j in nz}, "=",
                          0.5371)   # fractional rhs: hard / infeasible in binaries
        with pytest.raises(mk.NoIncumbentAtLimit):
            mk.solve_milp(model, time_limit=0.0, engine="own")

    def test_feasible_limit_keeps_bound(self):
        rng = np.random.default_rng(33)
        model = mk.MipModel(sense="max")
        n = 24
        w = rng.integers(3, 30, n)
        v = rng.integers(1, 20, n)
        for j in range(n):
            model.add_column(0, 1, float(v[j]), is_int=True)
        model.add_row({j: float(w[j]) for j in range(n)}, "<=", float(w.sum() // 3))
        full = mk.solve_milp(model, engine="own")
        assert full.status == "optimal"
        assert full.objective <= full.best_bound + 1e-6 * (1 + abs(full.objective))


def test_lp_format_dump(tmp_path):
    m = mk.MipModel()
    x = m.add_column(0, 2, 1.5, is_int=True, name="x")
    m.add_row({x: 1.0}, ">=", 1.0)
    path = tmp_path / "model.lp"
    m.write_lp_format(path)
    text = path.read_text()
    assert "Minimize" in text and "General" in text and ">= 1" in text
