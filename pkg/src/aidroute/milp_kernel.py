"""Linear-programming and branch-and-bound MILP kernel.

Provides primal solutions, dual prices, reduced costs, and incremental
column/row addition for every master, pricing, and scenario-generation
model in the suite.

Conventions (used identically by all callers):
  * models are stated as minimize or maximize over bounded columns;
  * duals are reported as d(objective)/d(rhs) in the model's own sense,
    so for a minimization: duals of ``<=`` rows are <= 0, duals of
    ``>=`` rows are >= 0, duals of ``=`` rows are free;
  * reduced costs are ``c - A^T y`` in the minimized form.

Small models are solved by the built-in bounded-variable revised
simplex / branch-and-bound (deterministic: Dantzig pricing with lowest
index tie-break, Bland fallback after 1000 degenerate pivots,
most-fractional branching, best-bound node order with FIFO ties).
Models beyond OWN_* size limits are handed to HiGHS through scipy
behind the same interface.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

FEAS_TOL = 1e-7
INT_TOL = 1e-6
DEFAULT_MIP_GAP = 1e-6
PIVOT_TOL = 1e-9
RC_TOL = 1e-9

# Largest model the built-in engine accepts before dispatch to HiGHS.
OWN_MAX_ROWS = 700
OWN_MAX_COLS = 700
OWN_MAX_INTS = 100

SENSES = ("<=", "=", ">=")

# nonbasic status codes
_BASIC, _AT_LO, _AT_UP, _NB_FREE = 0, 1, 2, 3


class MalformedModel(ValueError):
    """Model violates its structural invariants (dangling reference, NaN, bad bounds)."""


class NoIncumbentAtLimit(RuntimeError):
    """MILP limit hit before any integer-feasible point was found."""


@dataclass
class Column:
    lb: float = 0.0
    ub: float = math.inf
    obj: float = 0.0
    is_int: bool = False
    name: str = ""


@dataclass
class Row:
    coefs: dict[int, float]
    sense: str
    rhs: float
    name: str = ""


@dataclass
class MipModel:
    """Sparse linear model: bounded columns, sense rows, optional offset."""

    sense: str = "min"
    columns: list[Column] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    offset: float = 0.0

    def add_column(self, lb=0.0, ub=math.inf, obj=0.0, is_int=False, name="",
                   coefs: dict[int, float] | None = None) -> int:
        """Append a column; optional coefs add it to existing rows. Returns its id."""
        if not (lb <= ub):
            raise MalformedModel(f"column {name!r}: lb {lb} > ub {ub}")
        for v in (lb, ub, obj):
            if math.isnan(v):
                raise MalformedModel(f"column {name!r}: NaN bound/objective")
        j = len(self.columns)
        self.columns.append(Column(float(lb), float(ub), float(obj), bool(is_int), name))
        if coefs:
            for i, v in coefs.items():
                if not 0 <= i < len(self.rows):
                    self.columns.pop()
                    raise MalformedModel(f"column {name!r}: row {i} does not exist")
                if math.isnan(v) or math.isinf(v):
                    self.columns.pop()
                    raise MalformedModel(f"column {name!r}: bad coefficient in row {i}")
                self.rows[i].coefs[j] = float(v)
        return j

    def add_row(self, coefs: dict[int, float], sense: str, rhs: float, name="") -> int:
        """Append a row over existing columns. Returns its id."""
        if sense not in SENSES:
            raise MalformedModel(f"row {name!r}: bad sense {sense!r}")
        if math.isnan(rhs) or math.isinf(rhs):
            raise MalformedModel(f"row {name!r}: bad rhs {rhs}")
        for j, v in coefs.items():
            if not 0 <= j < len(self.columns):
                raise MalformedModel(f"row {name!r}: column {j} does not exist")
            if math.isnan(v) or math.isinf(v):
                raise MalformedModel(f"row {name!r}: bad coefficient on column {j}")
        self.rows.append(Row({int(j): float(v) for j, v in coefs.items()}, sense, float(rhs), name))
        return len(self.rows) - 1

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_ints(self) -> int:
        return sum(1 for c in self.columns if c.is_int)

    def validate(self) -> None:
        if self.sense not in ("min", "max"):
            raise MalformedModel(f"bad model sense {self.sense!r}")
        for j, c in enumerate(self.columns):
            if math.isnan(c.lb) or math.isnan(c.ub) or math.isnan(c.obj) or math.isinf(c.obj):
                raise MalformedModel(f"column {j}: NaN/inf data")
            if c.lb > c.ub:
                raise MalformedModel(f"column {j}: lb {c.lb} > ub {c.ub}")
        for i, r in enumerate(self.rows):
            if r.sense not in SENSES:
                raise MalformedModel(f"row {i}: bad sense")
            if math.isnan(r.rhs) or math.isinf(r.rhs):
                raise MalformedModel(f"row {i}: bad rhs")
            for j, v in r.coefs.items():
                if not 0 <= j < len(self.columns):
                    raise MalformedModel(f"row {i}: dangling column {j}")
                if math.isnan(v) or math.isinf(v):
                    raise MalformedModel(f"row {i}: bad coefficient on column {j}")

    def dense_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_rows, self.n_cols))
        for i, r in enumerate(self.rows):
            for j, v in r.coefs.items():
                a[i, j] = v
        return a

    def sparse_matrix(self) -> sp.csr_matrix:
        data, ri, ci = [], [], []
        for i, r in enumerate(self.rows):
            for j, v in r.coefs.items():
                ri.append(i)
                ci.append(j)
                data.append(v)
        return sp.csr_matrix((data, (ri, ci)), shape=(self.n_rows, self.n_cols))

    def write_lp_format(self, path) -> None:
        """Dump the model as LP-format text for external cross-checking."""
        def term(j, v, lead):
            s = "+" if v >= 0 else "-"
            return f" {s} {abs(v):.12g} c{j}" if not lead else f"{'-' if v < 0 else ''}{abs(v):.12g} c{j}"

        lines = ["Minimize" if self.sense == "min" else "Maximize", " obj:"]
        parts = []
        for j, c in enumerate(self.columns):
            if c.obj != 0.0:
                parts.append(term(j, c.obj, not parts))
        lines[1] += " " + ("".join(parts) if parts else "0 c0") if self.columns else " 0"
        lines.append("Subject To")
        op = {"<=": "<=", ">=": ">=", "=": "="}
        for i, r in enumerate(self.rows):
            parts = []
            for j, v in r.coefs.items():
                parts.append(term(j, v, not parts))
            body = "".join(parts) if parts else "0 c0"
            lines.append(f" r{i}: {body} {op[r.sense]} {r.rhs:.12g}")
        lines.append("Bounds")
        for j, c in enumerate(self.columns):
            lo = f"{c.lb:.12g}" if math.isfinite(c.lb) else "-inf"
            hi = f"{c.ub:.12g}" if math.isfinite(c.ub) else "+inf"
            lines.append(f" {lo} <= c{j} <= {hi}")
        ints = [j for j, c in enumerate(self.columns) if c.is_int]
        if ints:
            lines.append("General")
            lines.append(" " + " ".join(f"c{j}" for j in ints))
        lines.append("End")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass
class LpSolution:
    status: str                 # optimal | infeasible | unbounded
    objective: float
    primal: np.ndarray
    duals: np.ndarray
    reduced_costs: np.ndarray


@dataclass
class MipSolution:
    status: str                 # optimal | infeasible | feasible-limit | unbounded
    objective: float
    primal: np.ndarray
    best_bound: float
    node_count: int


def add_column(model: MipModel, **kw) -> int:
    return model.add_column(**kw)


def add_row(model: MipModel, coefs, sense, rhs, name="") -> int:
    return model.add_row(coefs, sense, rhs, name)


# ----------------------------------------------------------------------
# standardized arrays shared by both engines
# ----------------------------------------------------------------------

_SLACK_BOUNDS = {"<=": (0.0, math.inf), ">=": (-math.inf, 0.0), "=": (0.0, 0.0)}


class _Std:
    """Minimization standard form: A x + s = b with bounded x and s."""

    def __init__(self, model: MipModel):
        model.validate()
        self.n = model.n_cols
        self.m = model.n_rows
        self.max_flip = model.sense == "max"
        sgn = -1.0 if self.max_flip else 1.0
        self.c = sgn * np.array([c.obj for c in model.columns], float)
        self.lb = np.array([c.lb for c in model.columns], float)
        self.ub = np.array([c.ub for c in model.columns], float)
        self.is_int = np.array([c.is_int for c in model.columns], bool)
        self.b = np.array([r.rhs for r in model.rows], float)
        self.senses = [r.sense for r in model.rows]
        self.slack_lb = np.array([_SLACK_BOUNDS[s][0] for s in self.senses], float)
        self.slack_ub = np.array([_SLACK_BOUNDS[s][1] for s in self.senses], float)
        self.offset = model.offset
        self._dense = None
        self._sparse = None
        self._model = model

    def dense(self) -> np.ndarray:
        if self._dense is None:
            self._dense = self._model.dense_matrix()
        return self._dense

    def sparse(self) -> sp.csr_matrix:
        if self._sparse is None:
            self._sparse = self._model.sparse_matrix()
        return self._sparse

    def finish_lp(self, status, obj_min, x, y_min, rc_min) -> LpSolution:
        sgn = -1.0 if self.max_flip else 1.0
        if status != "optimal":
            return LpSolution(status, math.nan, np.zeros(self.n), np.zeros(self.m), np.zeros(self.n))
        return LpSolution("optimal", sgn * obj_min + self.offset, x, sgn * y_min, rc_min)

    def finish_mip(self, status, obj_min, x, bound_min, nodes) -> MipSolution:
        sgn = -1.0 if self.max_flip else 1.0
        if status in ("infeasible", "unbounded"):
            return MipSolution(status, math.nan, np.zeros(self.n), math.nan, nodes)
        return MipSolution(status, sgn * obj_min + self.offset, x,
                           sgn * bound_min + self.offset, nodes)


# ----------------------------------------------------------------------
# built-in bounded-variable revised simplex
# ----------------------------------------------------------------------

class _Simplex:
    """Two-phase bounded revised simplex over a _Std instance.

    Artificial columns carry phase-1 cost; Dantzig pricing with lowest
    column index tie-break switches to Bland's rule after 1000
    consecutive degenerate pivots.
    """

    REFACTOR_EVERY = 150

    def __init__(self, std: _Std, lb=None, ub=None):
        self.std = std
        self.m = std.m
        self.n = std.n
        a = std.dense()
        self.A = a
        self.N = self.n + self.m                     # structurals + slacks
        self.lb = np.concatenate([std.lb if lb is None else lb, std.slack_lb])
        self.ub = np.concatenate([std.ub if ub is None else ub, std.slack_ub])
        self.c = np.concatenate([std.c, np.zeros(self.m)])
        self.b = std.b
        # artificial bookkeeping: var id -> (row, sign)
        self.art: dict[int, tuple[int, float]] = {}

    # -- column access ------------------------------------------------
    def col(self, j) -> np.ndarray:
        if j < self.n:
            return self.A[:, j]
        if j < self.N:
            e = np.zeros(self.m)
            e[j - self.n] = 1.0
            return e
        row, sgn = self.art[j]
        e = np.zeros(self.m)
        e[row] = sgn
        return e

    def _refactor(self):
        bmat = np.empty((self.m, self.m))
        for p, j in enumerate(self.basis):
            bmat[:, p] = self.col(j)
        try:
            self.binv = np.linalg.inv(bmat)
        except np.linalg.LinAlgError as exc:     # pragma: no cover - guarded by construction
            raise ArithmeticError("singular basis") from exc

    def solve(self) -> tuple[str, float, np.ndarray, np.ndarray, np.ndarray]:
        """Returns (status, objective_min, x, duals_min, reduced_costs_min)."""
        m, n = self.m, self.n
        if any(self.lb[j] > self.ub[j] for j in range(self.N)):
            return "infeasible", math.nan, None, None, None
        # nonbasic start: finite bound nearest zero, free at zero
        self.vstat = np.empty(self.N, dtype=np.int8)
        x = np.zeros(self.N)
        for j in range(self.N):
            lo, hi = self.lb[j], self.ub[j]
            if math.isfinite(lo) and (abs(lo) <= abs(hi) or not math.isfinite(hi)):
                x[j], self.vstat[j] = lo, _AT_LO
            elif math.isfinite(hi):
                x[j], self.vstat[j] = hi, _AT_UP
            else:
                x[j], self.vstat[j] = 0.0, _NB_FREE
        resid = self.b - self.A @ x[:n]
        self.basis = []
        for i in range(m):
            s = n + i
            lo, hi = self.lb[s], self.ub[s]
            if lo - 1e-11 <= resid[i] <= hi + 1e-11:
                x[s] = resid[i]
                self.vstat[s] = _BASIC
                self.basis.append(s)
            else:
                x[s] = min(max(resid[i], lo), hi)   # clamp slack to nearest bound
                self.vstat[s] = _AT_LO if x[s] == lo else _AT_UP
                gap = resid[i] - x[s]
                aj = self.N + len(self.art)
                self.art[aj] = (i, 1.0 if gap > 0 else -1.0)
                x = np.append(x, abs(gap))
                self.vstat = np.append(self.vstat, _BASIC)
                self.basis.append(aj)
        self.lb = np.concatenate([self.lb, np.zeros(len(self.art))])
        self.ub = np.concatenate([self.ub, np.full(len(self.art), math.inf)])
        self.c = np.concatenate([self.c, np.zeros(len(self.art))])
        self.x = x
        self._refactor()

        if self.art:
            c1 = np.zeros(self.x.size)
            for aj in self.art:
                c1[aj] = 1.0
            status = self._iterate(c1, phase1=True)
            if status == "iterlimit":
                raise ArithmeticError("simplex iteration limit in phase 1")
            infeas = sum(self.x[aj] for aj in self.art)
            if infeas > 1e-7 * (1.0 + np.abs(self.b).max(initial=0.0)):
                return "infeasible", math.nan, None, None, None
            for aj in self.art:                     # freeze artificials at zero
                self.lb[aj] = self.ub[aj] = 0.0
                self.x[aj] = min(max(self.x[aj], 0.0), 0.0)

        c2 = np.zeros(self.x.size)
        c2[: self.N] = self.c[: self.N]
        status = self._iterate(c2, phase1=False)
        if status == "iterlimit":
            raise ArithmeticError("simplex iteration limit in phase 2")
        if status == "unbounded":
            return "unbounded", math.nan, None, None, None
        xs = self.x[: n]
        cb = c2[self.basis]
        y = cb @ self.binv
        rc = self.std.c - self.A.T @ y
        obj = float(self.std.c @ xs)
        return "optimal", obj, xs.copy(), y.copy(), rc

    def _iterate(self, cost: np.ndarray, phase1: bool) -> str:
        m = self.m
        degenerate_run = 0
        bland = False
        it = 0
        max_iter = 2000 + 200 * (m + self.n)
        since_refactor = 0
        nb_idx = None
        while True:
            it += 1
            if it > max_iter:
                return "iterlimit"
            cb = cost[self.basis]
            y = cb @ self.binv
            # reduced costs for structurals and slacks (artificials never re-enter)
            rc_struct = cost[: self.n] - self.A.T @ y
            rc_slack = cost[self.n: self.N] - y
            rc = np.concatenate([rc_struct, rc_slack])
            stat = self.vstat[: self.N]
            fixed = self.lb[: self.N] >= self.ub[: self.N] - 1e-15
            cand_lo = (stat == _AT_LO) & ~fixed & (rc < -RC_TOL)
            cand_up = (stat == _AT_UP) & ~fixed & (rc > RC_TOL)
            cand_fr = (stat == _NB_FREE) & (np.abs(rc) > RC_TOL)
            mask = cand_lo | cand_up | cand_fr
            if not mask.any():
                return "optimal"
            idx = np.nonzero(mask)[0]
            if bland:
                j = int(idx[0])
            else:
                j = int(idx[np.argmax(np.abs(rc[idx]))])
                # lowest-index tie-break among equal violations
                best = abs(rc[j])
                ties = idx[np.abs(rc[idx]) >= best - 1e-15]
                j = int(ties[0])
            if self.vstat[j] == _AT_LO:
                direction = 1.0
            elif self.vstat[j] == _AT_UP:
                direction = -1.0
            else:
                direction = 1.0 if rc[j] < 0 else -1.0
            d = self.binv @ self.col(j)
            w = direction * d
            xb = self.x[self.basis]
            lbb = self.lb[self.basis]
            ubb = self.ub[self.basis]
            # blocking step per basic variable; tie-break by lowest basic var index
            pos = w > PIVOT_TOL
            neg = w < -PIVOT_TOL
            rows = np.nonzero(pos | neg)[0]
            t_best = math.inf
            r_best = -1
            if rows.size:
                steps = np.where(pos, xb - lbb, xb - ubb)[rows] / w[rows]
                tmin = float(steps.min())
                cand = rows[steps <= tmin + 1e-12]
                basis_arr = np.asarray(self.basis)
                r_best = int(cand[np.argmin(basis_arr[cand])])
                t_best = max(tmin, 0.0)
            t_flip = self.ub[j] - self.lb[j]
            if t_flip <= t_best + 1e-12 and math.isfinite(t_flip) and self.vstat[j] != _NB_FREE:
                # bound flip: no basis change
                self.x[self.basis] = xb - w * t_flip
                self.x[j] = self.ub[j] if direction > 0 else self.lb[j]
                self.vstat[j] = _AT_UP if direction > 0 else _AT_LO
                degenerate_run = 0
                continue
            if not math.isfinite(t_best):
                return "optimal" if phase1 else "unbounded"
            # pivot
            t = max(t_best, 0.0)
            self.x[self.basis] = xb - w * t
            self.x[j] = (self.x[j] if self.vstat[j] == _NB_FREE else
                         (self.lb[j] if direction > 0 else self.ub[j])) + direction * t
            leave = self.basis[r_best]
            self.x[leave] = lbb[r_best] if w[r_best] > 0 else ubb[r_best]
            self.vstat[leave] = _AT_LO if w[r_best] > 0 else _AT_UP
            if leave >= self.N:                      # artificial leaves for good
                self.lb[leave] = self.ub[leave] = 0.0
            self.basis[r_best] = j
            self.vstat[j] = _BASIC
            # product-form inverse update
            piv = d[r_best]
            if abs(piv) < 1e-11:
                self._refactor()
            else:
                row = self.binv[r_best, :] / piv
                self.binv -= np.outer(d, row)
                self.binv[r_best, :] = row
                since_refactor += 1
                if since_refactor >= self.REFACTOR_EVERY:
                    self._refactor()
                    since_refactor = 0
            if t <= 1e-12:
                degenerate_run += 1
                if degenerate_run >= 1000:
                    bland = True
            else:
                degenerate_run = 0
                bland = False


def _solve_lp_own(std: _Std, lb=None, ub=None) -> LpSolution:
    sx = _Simplex(std, lb=lb, ub=ub)
    status, obj, x, y, rc = sx.solve()
    return std.finish_lp(status, obj, x, y, rc)


# ----------------------------------------------------------------------
# HiGHS backends
# ----------------------------------------------------------------------

def _row_bounds(std: _Std):
    lo = np.where(np.array(std.senses) == "<=", -np.inf, std.b)
    hi = np.where(np.array(std.senses) == ">=", np.inf, std.b)
    return lo, hi


def _solve_lp_highs(std: _Std, lb=None, ub=None) -> LpSolution:
    lb = std.lb if lb is None else lb
    ub = std.ub if ub is None else ub
    a = std.sparse()
    ub_rows = [i for i, s in enumerate(std.senses) if s == "<="]
    ge_rows = [i for i, s in enumerate(std.senses) if s == ">="]
    eq_rows = [i for i, s in enumerate(std.senses) if s == "="]
    blocks, rhs_ub = [], []
    if ub_rows:
        blocks.append(a[ub_rows, :])
        rhs_ub.extend(std.b[ub_rows])
    if ge_rows:
        blocks.append(-a[ge_rows, :])
        rhs_ub.extend(-std.b[ge_rows])
    a_ub = sp.vstack(blocks, format="csr") if blocks else None
    a_eq = a[eq_rows, :] if eq_rows else None
    res = linprog(std.c, A_ub=a_ub, b_ub=np.array(rhs_ub) if rhs_ub else None,
                  A_eq=a_eq, b_eq=std.b[eq_rows] if eq_rows else None,
                  bounds=np.column_stack([lb, ub]), method="highs")
    if res.status == 2:
        return std.finish_lp("infeasible", math.nan, None, None, None)
    if res.status == 3:
        return std.finish_lp("unbounded", math.nan, None, None, None)
    if not res.success:
        raise ArithmeticError(f"HiGHS LP failed: {res.message}")
    y = np.zeros(std.m)
    k = 0
    for i in ub_rows:
        y[i] = res.ineqlin.marginals[k]
        k += 1
    for i in ge_rows:
        y[i] = -res.ineqlin.marginals[k]
        k += 1
    for pos, i in enumerate(eq_rows):
        y[i] = res.eqlin.marginals[pos]
    rc = std.c - a.T @ y
    return std.finish_lp("optimal", float(std.c @ res.x), res.x.copy(), y, rc)


def _solve_milp_highs(std: _Std, time_limit, gap) -> MipSolution:
    lo, hi = _row_bounds(std)
    cons = LinearConstraint(std.sparse(), lo, hi) if std.m else []
    opts = {"mip_rel_gap": gap if gap is not None else DEFAULT_MIP_GAP}
    if time_limit is not None:
        opts["time_limit"] = float(time_limit)
    res = milp(std.c, constraints=cons, integrality=std.is_int.astype(int),
               bounds=Bounds(std.lb, std.ub), options=opts)
    if res.status == 2:
        return std.finish_mip("infeasible", math.nan, None, math.nan, 0)
    if res.status == 3:
        return std.finish_mip("unbounded", math.nan, None, math.nan, 0)
    if res.status not in (0, 1):
        raise ArithmeticError(f"HiGHS MILP failed: {res.message}")
    nodes = int(getattr(res, "mip_node_count", 0) or 0)
    bound = getattr(res, "mip_dual_bound", None)
    if res.x is None:
        raise NoIncumbentAtLimit("limit reached before an integer-feasible point")
    x = np.asarray(res.x, float)
    x_r = np.where(std.is_int, np.round(x), x)
    obj = float(std.c @ x_r)
    if bound is None or not math.isfinite(bound):
        bound = obj
    status = "optimal" if res.status == 0 else "feasible-limit"
    return std.finish_mip(status, obj, x_r, float(bound), nodes)


# ----------------------------------------------------------------------
# built-in branch and bound
# ----------------------------------------------------------------------

def _check_start(std: _Std, start: np.ndarray) -> float | None:
    """Objective (minimized form) of a feasible integral start vector, else None."""
    x = np.asarray(start, float)
    if x.shape != (std.n,):
        return None
    if (x < std.lb - 1e-7).any() or (x > std.ub + 1e-7).any():
        return None
    if np.abs(x[std.is_int] - np.round(x[std.is_int])).max(initial=0.0) > INT_TOL:
        return None
    ax = std.dense() @ x if std.n else np.zeros(std.m)
    for i, s in enumerate(std.senses):
        r = ax[i] - std.b[i]
        scale = 1.0 + abs(std.b[i])
        if s == "<=" and r > 1e-7 * scale:
            return None
        if s == ">=" and r < -1e-7 * scale:
            return None
        if s == "=" and abs(r) > 1e-7 * scale:
            return None
    return float(std.c @ x)


def _solve_milp_own(std: _Std, time_limit, gap, start=None) -> MipSolution:
    gap = DEFAULT_MIP_GAP if gap is None else gap
    t0 = time.monotonic()
    int_idx = np.nonzero(std.is_int)[0]
    incumbent = None
    inc_obj = math.inf
    if start is not None:
        v = _check_start(std, start)
        if v is not None:
            incumbent = np.where(std.is_int, np.round(start), np.asarray(start, float))
            inc_obj = v
    root = _solve_lp_own(std)
    if root.status == "infeasible":
        if incumbent is not None:
            return std.finish_mip("optimal", inc_obj, incumbent, inc_obj, 1)
        return std.finish_mip("infeasible", math.nan, None, math.nan, 1)
    if root.status == "unbounded":
        return std.finish_mip("unbounded", math.nan, None, math.nan, 1)

    sgn = -1.0 if std.max_flip else 1.0
    root_obj = sgn * (root.objective - std.offset)
    heap = []
    seq = 0
    heapq.heappush(heap, (root_obj, seq, std.lb.copy(), std.ub.copy(), root))
    nodes = 0
    hit_limit = False
    while heap:
        if time_limit is not None and time.monotonic() - t0 > time_limit:
            hit_limit = True
            break
        bound, _, lb, ub, sol = heapq.heappop(heap)
        if incumbent is not None:
            if bound >= inc_obj - 1e-9 * (1.0 + abs(inc_obj)):
                continue
            if inc_obj - bound <= gap * (1.0 + abs(inc_obj)):
                continue
        nodes += 1
        if sol is None:
            lp = _solve_lp_own(std, lb=lb, ub=ub)
            if lp.status != "optimal":
                continue
            node_obj = sgn * (lp.objective - std.offset)
            if node_obj >= inc_obj - 1e-9 * (1.0 + abs(inc_obj)):
                continue
        else:
            lp = sol
            node_obj = bound
        x = lp.primal
        frac = np.abs(x[int_idx] - np.round(x[int_idx]))
        if frac.size == 0 or frac.max() <= INT_TOL:
            if node_obj < inc_obj - 1e-12:
                inc_obj = node_obj
                incumbent = np.where(std.is_int, np.round(x), x)
            continue
        # most-fractional branching, lowest column index tie-break
        dist = np.abs((x[int_idx] - np.floor(x[int_idx])) - 0.5)
        dist[frac <= INT_TOL] = math.inf
        best = dist.min()
        j = int(int_idx[np.nonzero(dist <= best + 1e-15)[0][0]])
        xv = x[j]
        lo_lb, lo_ub = lb.copy(), ub.copy()
        lo_ub[j] = math.floor(xv)
        hi_lb, hi_ub = lb.copy(), ub.copy()
        hi_lb[j] = math.ceil(xv)
        for nlb, nub in ((lo_lb, lo_ub), (hi_lb, hi_ub)):
            if nlb[j] > nub[j] + 1e-12:
                continue
            seq += 1
            heapq.heappush(heap, (node_obj, seq, nlb, nub, None))

    open_bounds = [h[0] for h in heap]
    best_bound = min(open_bounds) if (hit_limit and open_bounds) else inc_obj
    if incumbent is None:
        if hit_limit:
            raise NoIncumbentAtLimit("limit reached before an integer-feasible point")
        return std.finish_mip("infeasible", math.nan, None, math.nan, nodes)
    status = "feasible-limit" if (hit_limit and open_bounds) else "optimal"
    if status == "optimal":
        best_bound = inc_obj
    return std.finish_mip(status, inc_obj, incumbent, best_bound, nodes)


# ----------------------------------------------------------------------
# public entry points
# ----------------------------------------------------------------------

def _fits_own(model: MipModel) -> bool:
    return (model.n_rows <= OWN_MAX_ROWS and model.n_cols <= OWN_MAX_COLS
            and model.n_ints <= OWN_MAX_INTS)


def solve_lp(model: MipModel, engine: str = "auto") -> LpSolution:
    """Solve the LP relaxation (integrality ignored); returns duals and reduced costs."""
    std = _Std(model)
    if engine == "own" or (engine == "auto" and model.n_rows <= OWN_MAX_ROWS
                           and model.n_cols <= OWN_MAX_COLS):
        return _solve_lp_own(std)
    return _solve_lp_highs(std)


def solve_milp(model: MipModel, time_limit: float | None = None,
               gap: float | None = None, start=None, engine: str = "auto") -> MipSolution:
    """Branch-and-bound solve; ``start`` may seed a feasible incumbent."""
    std = _Std(model)
    if engine == "own" or (engine == "auto" and _fits_own(model)):
        return _solve_milp_own(std, time_limit, gap, start=start)
    return _solve_milp_highs(std, time_limit, gap)


def check_lp_solution(model: MipModel, sol: LpSolution,
                      feas_tol: float = FEAS_TOL) -> dict:
    """Feasibility / complementary-slackness / duality-gap audit of an optimal solve."""
    std = _Std(model)
    x, y = sol.primal, sol.duals * (-1.0 if std.max_flip else 1.0)
    ax = std.dense() @ x if std.n else np.zeros(std.m)
    bscale = 1.0 + (np.abs(std.b).max() if std.m else 0.0)
    viol = 0.0
    comp = 0.0
    for i, s in enumerate(std.senses):
        r = ax[i] - std.b[i]
        if s == "<=":
            viol = max(viol, r)
            comp = max(comp, abs(y[i] * min(r, 0.0)))
        elif s == ">=":
            viol = max(viol, -r)
            comp = max(comp, abs(y[i] * max(r, 0.0)))
        else:
            viol = max(viol, abs(r))
    viol = max(viol, float((std.lb - x).max(initial=0.0)), float((x - std.ub).max(initial=0.0)))
    rc = std.c - (std.dense().T @ y if std.m else 0.0)
    obj_min = float(std.c @ x)
    dual_obj = float(std.b @ y) if std.m else 0.0
    dual_obj += float(np.sum(rc * x))            # bound contribution at nonbasic levels
    gap = abs(obj_min - dual_obj)
    return {"primal_violation": viol, "violation_ok": viol <= feas_tol * bscale,
            "complementarity": comp, "duality_gap": gap,
            "gap_ok": gap <= 1e-6 * (1.0 + abs(obj_min))}
