"""Bounded-variable primal simplex (dense tableau, Bland's rule).

Problems are stated as::

    maximize   <objective, x>
    subject to eq_lhs @ x == eq_rhs
               ineq_lhs @ x <= ineq_rhs
               lower <= x <= upper        (+-inf allowed)

Internally every variable is shifted/reflected/split so that it lives in
``[0, ub]`` with ``ub`` possibly infinite. Nonbasic variables sitting at a
finite upper bound are handled by complementing their column
(``x = ub - x'``), so the tableau only ever carries nonbasic variables at
zero. Phase 1 minimizes the sum of artificials; Bland's smallest-index rule
is used for both entering and leaving choices, so the method cannot cycle.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidProblem, SolverStalled

FEAS_TOL = 1e-8
OPT_TOL = 1e-8
EPS_STRICT = 1e-6
ITER_FACTOR = 50

_PIVOT_TOL = 1e-9
_DUAL_TOL = 1e-10


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LpProblem:
    objective: np.ndarray
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    ineq_lhs: np.ndarray
    ineq_rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = self.objective.shape[0]
        if self.objective.ndim != 1:
            raise InvalidProblem("objective must be 1-D")
        for name, lhs, rhs in (("eq", self.eq_lhs, self.eq_rhs),
                               ("ineq", self.ineq_lhs, self.ineq_rhs)):
            if lhs.ndim != 2 or lhs.shape[1] != n:
                raise InvalidProblem(f"{name}_lhs has shape {lhs.shape}, expected (*, {n})")
            if rhs.shape != (lhs.shape[0],):
                raise InvalidProblem(f"{name}_rhs length {rhs.shape} does not match {lhs.shape[0]} rows")
            if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
                raise InvalidProblem(f"{name} constraints contain NaN or Inf")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise InvalidProblem("bounds must have one entry per variable")
        if not np.all(np.isfinite(self.objective)):
            raise InvalidProblem("objective contains NaN or Inf")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise InvalidProblem("bounds contain NaN")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise InvalidProblem("lower bound +inf or upper bound -inf")
        if np.any(self.lower > self.upper):
            raise InvalidProblem("lower bound exceeds upper bound")

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @classmethod
    def build(cls, objective, *, eq=None, ineq=None, lower=None, upper=None) -> "LpProblem":
        """Convenience constructor.

        ``eq`` / ``ineq`` are ``(lhs, rhs)`` pairs or None. Bounds default to
        ``x >= 0`` with no upper bound; scalars are broadcast.
        """
        c = np.asarray(objective, dtype=np.float64).ravel()
        n = c.shape[0]

        def pair(p):
            if p is None:
                return np.zeros((0, n)), np.zeros(0)
            lhs, rhs = p
            lhs = np.asarray(lhs, dtype=np.float64)
            if lhs.ndim == 1:
                lhs = lhs.reshape(-1, n) if lhs.size else np.zeros((0, n))
            return lhs, np.atleast_1d(np.asarray(rhs, dtype=np.float64))

        E, f = pair(eq)
        G, h = pair(ineq)
        lo = np.broadcast_to(np.asarray(0.0 if lower is None else lower, dtype=np.float64), (n,)).copy()
        up = np.broadcast_to(np.asarray(np.inf if upper is None else upper, dtype=np.float64), (n,)).copy()
        return cls(c, E, f, G, h, lo, up)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective_value: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass
class _StandardForm:
    A: np.ndarray          # r x N
    b: np.ndarray          # r
    c: np.ndarray          # N, minimized
    ub: np.ndarray         # N, may be inf
    slack_row: dict = field(default_factory=dict)   # row -> slack column with +1 coefficient
    x_offset: np.ndarray = None
    x_map: np.ndarray = None   # n x N, x = x_offset + x_map @ z


def _standardize(p: LpProblem) -> _StandardForm:
    n = p.num_vars
    cols = []       # (orig var, sign)
    offset = np.zeros(n)
    ubs = []
    for j in range(n):
        lo, up = p.lower[j], p.upper[j]
        if math.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            ubs.append(up - lo)
        elif math.isfinite(up):
            offset[j] = up
            cols.append((j, -1.0))
            ubs.append(np.inf)
        else:
            cols.append((j, 1.0))
            ubs.append(np.inf)
            cols.append((j, -1.0))
            ubs.append(np.inf)
    ns = len(cols)
    x_map = np.zeros((n, ns))
    for k, (j, s) in enumerate(cols):
        x_map[j, k] = s

    E = p.eq_lhs @ x_map
    f = p.eq_rhs - p.eq_lhs @ offset
    G = p.ineq_lhs @ x_map
    h = p.ineq_rhs - p.ineq_lhs @ offset
    n_eq, n_in = E.shape[0], G.shape[0]
    r = n_eq + n_in
    N = ns + n_in
    A = np.zeros((r, N))
    A[:n_eq, :ns] = E
    A[n_eq:, :ns] = G
    A[n_eq:, ns:] = np.eye(n_in)
    b = np.concatenate([f, h])
    slack_row = {n_eq + i: ns + i for i in range(n_in)}
    c = np.zeros(N)
    c[:ns] = -(x_map.T @ p.objective)
    ub = np.concatenate([np.asarray(ubs, dtype=np.float64), np.full(n_in, np.inf)])
    return _StandardForm(A=A, b=b, c=c, ub=ub, slack_row=slack_row, x_offset=offset, x_map=x_map)


class _Tableau:
    """Dense tableau with objective row last; columns carry a complement flag."""

    def __init__(self, A, b, ub, basis, max_iter):
        self.T = np.hstack([A, b[:, None]]).astype(np.float64)
        self.r = A.shape[0]
        self.ub = ub.astype(np.float64)
        self.flipped = np.zeros(A.shape[1], dtype=bool)
        self.basis = list(basis)
        self.iterations = 0
        self.max_iter = max_iter
        self.T = np.vstack([self.T, np.zeros((1, self.T.shape[1]))])

    @property
    def ncols(self):
        return self.T.shape[1] - 1

    def set_cost(self, cost):
        eff = np.where(self.flipped, -cost, cost)
        row = np.zeros(self.T.shape[1])
        row[:-1] = eff
        if self.basis:
            row -= eff[self.basis] @ self.T[:self.r]
        self.T[-1] = row
        scale = float(np.max(np.abs(cost), initial=0.0))
        self.dual_tol = _DUAL_TOL * (scale if scale > 0 else 1.0)

    def complement(self, j):
        col = self.T[:, j].copy()
        self.T[:, -1] -= col * self.ub[j]
        self.T[:, j] = -col
        self.flipped[j] = ~self.flipped[j]

    def complement_basic(self, i):
        j = self.basis[i]
        self.complement(j)
        # restore the unit column of the basic variable
        self.T[i] *= -1.0

    def pivot(self, i, j):
        T = self.T
        T[i] /= T[i, j]
        col = T[:, j].copy()
        col[i] = 0.0
        T -= np.outer(col, T[i])
        T[:, j] = 0.0
        T[i, j] = 1.0
        self.basis[i] = j

    def run(self, allowed):
        """Iterate to optimality. Returns 'optimal' or 'unbounded'."""
        T = self.T
        r = self.r
        basic = np.zeros(self.ncols, dtype=bool)
        while True:
            basic[:] = False
            basic[self.basis] = True
            d = T[-1, :-1]
            cand = np.flatnonzero((d < -self.dual_tol) & allowed & ~basic)
            if cand.size == 0:
                return "optimal"
            if self.iterations >= self.max_iter:
                raise SolverStalled(f"simplex iteration cap {self.max_iter} reached")
            self.iterations += 1
            j = int(cand[0])
            col = T[:r, j]
            vals = T[:r, -1]
            basis = np.asarray(self.basis, dtype=int)
            thetas = np.full(r, np.inf)
            pos = col > _PIVOT_TOL
            thetas[pos] = np.maximum(vals[pos], 0.0) / col[pos]
            ub_b = self.ub[basis]
            upper = (col < -_PIVOT_TOL) & np.isfinite(ub_b)
            thetas[upper] = np.maximum(ub_b[upper] - vals[upper], 0.0) / (-col[upper])
            tmin = thetas.min() if r else np.inf
            if not math.isfinite(tmin) and not math.isfinite(self.ub[j]):
                return "unbounded"
            if self.ub[j] <= tmin:
                self.complement(j)
                continue
            ties = np.flatnonzero(thetas <= tmin + 1e-12 * (1.0 + tmin))
            leave = int(ties[np.argmin(basis[ties])])
            if upper[leave]:
                self.complement_basic(leave)
            self.pivot(leave, j)

    def basic_values(self):
        return self.T[:self.r, -1]


def _recover(A, b, ub, flipped, basis, vals):
    """Primal point in standard-form variables, basic block re-solved."""
    N = A.shape[1]
    z = np.where(flipped, ub, 0.0)
    z_tab = z.copy()
    for i, bj in enumerate(basis):
        z_tab[bj] = ub[bj] - vals[i] if flipped[bj] else vals[i]
    z_ref = z_tab.copy()
    if basis.size:
        nonbasic = np.ones(N, dtype=bool)
        nonbasic[basis] = False
        rhs = b - A[:, nonbasic] @ z[nonbasic]
        try:
            zb = np.linalg.solve(A[:, basis], rhs)
            z_ref[basis] = zb
        except np.linalg.LinAlgError:
            pass

    def err(zz):
        res = float(np.max(np.abs(A @ zz - b))) if A.size else 0.0
        lo = float(np.max(-zz, initial=0.0))
        hi = float(np.max(zz - ub, initial=0.0))
        return max(res, lo, hi)

    z = z_ref if err(z_ref) <= err(z_tab) else z_tab
    return np.clip(z, 0.0, ub)


def solve(p: LpProblem, feas_tol: float = FEAS_TOL) -> LpSolution:
    """Solve ``p``; status is certified by phase 1 / ray detection."""
    if not isinstance(p, LpProblem):
        raise InvalidProblem("expected an LpProblem")
    sf = _standardize(p)
    A, b = sf.A.copy(), sf.b.copy()
    r, N = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    basis = []
    art_rows = []
    for i in range(r):
        s = sf.slack_row.get(i)
        if s is not None and not neg[i]:
            basis.append(s)
        else:
            basis.append(None)
            art_rows.append(i)
    n_art = len(art_rows)
    A1 = np.hstack([A, np.zeros((r, n_art))])
    for k, i in enumerate(art_rows):
        A1[i, N + k] = 1.0
        basis[i] = N + k
    ub1 = np.concatenate([sf.ub, np.full(n_art, np.inf)])
    max_iter = ITER_FACTOR * (N + r)
    tab = _Tableau(A1, b, ub1, basis, max_iter)

    allowed = np.ones(N + n_art, dtype=bool)
    if n_art:
        cost1 = np.zeros(N + n_art)
        cost1[N:] = 1.0
        tab.set_cost(cost1)
        tab.run(allowed)
        vals = tab.basic_values()
        infeas = sum(vals[i] for i, bj in enumerate(tab.basis) if bj >= N)
        if infeas > feas_tol:
            return LpSolution(LpStatus.INFEASIBLE, iterations=tab.iterations)
        # drive remaining artificials out of the basis; drop redundant rows
        keep = []
        for i in range(r):
            if tab.basis[i] < N:
                keep.append(i)
                continue
            row = tab.T[i, :N]
            cand = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
            if cand.size:
                j = int(cand[np.argmax(np.abs(row[cand]))])
                tab.pivot(i, j)
                keep.append(i)
        if len(keep) < r:
            keep_arr = np.asarray(keep, dtype=int)
            tab.T = np.vstack([tab.T[keep_arr], tab.T[-1:]])
            tab.basis = [tab.basis[i] for i in keep]
            tab.r = len(keep)
        rows = np.asarray(keep, dtype=int)
        allowed[N:] = False
    else:
        rows = np.arange(r)

    cost2 = np.concatenate([sf.c, np.zeros(n_art)])
    tab.set_cost(cost2)
    status = tab.run(allowed)
    if status == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, iterations=tab.iterations)

    basis = np.asarray(tab.basis, dtype=int)
    z = _recover(A[rows][:, :N], b[rows], sf.ub, tab.flipped[:N], basis, tab.basic_values())
    x = sf.x_offset + sf.x_map @ z[:sf.x_map.shape[1]]
    x = np.clip(x, p.lower, p.upper)
    return LpSolution(LpStatus.OPTIMAL, x=x, objective_value=float(p.objective @ x),
                      iterations=tab.iterations)


def feasible(p: LpProblem, feas_tol: float = FEAS_TOL) -> bool:
    """Phase-1 feasibility; the objective of ``p`` is ignored."""
    zero = LpProblem(np.zeros_like(p.objective), p.eq_lhs, p.eq_rhs, p.ineq_lhs,
                     p.ineq_rhs, p.lower, p.upper)
    return solve(zero, feas_tol=feas_tol).status is LpStatus.OPTIMAL


def residuals(p: LpProblem, x) -> float:
    """Max constraint/bound violation of ``x`` (0 when feasible)."""
    x = np.asarray(x, dtype=np.float64)
    parts = [0.0]
    if p.eq_lhs.size:
        parts.append(float(np.max(np.abs(p.eq_lhs @ x - p.eq_rhs))))
    if p.ineq_lhs.size:
        parts.append(float(np.max(p.ineq_lhs @ x - p.ineq_rhs)))
    parts.append(float(np.max(p.lower - x, initial=0.0)))
    parts.append(float(np.max(x - p.upper, initial=0.0)))
    return max(parts)
