"""Omnidirectionality tests.

A matrix is omnidirectional when every open linear halfspace contains one of
its rows; equivalently 0 is interior to the convex hull of the rows, and
equivalently ``A d <= 0`` forces ``d = 0``. Three LP routes are offered:

* ``is_omnidirectional_hull``: convex-combination feasibility (fast, but it
  cannot tell interior from boundary),
* ``is_omnidirectional_cone``: 2n box-bounded LPs over ``{A d <= 0}``,
* ``is_omnidirectional_stiemke``: strictly positive null combination, a
  weaker diagnostic.

``is_omnidirectional`` runs hull and cone together and lets the cone test
arbitrate, flagging a disagreement as boundary-degenerate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import as_matrix, as_vector
from .lp import FEAS_TOL, LpProblem, LpStatus, solve

TOL_ZERO = 1e-7
EPS_POS = 1e-6
POINT_TOL = 1e-7
_ZERO_ROW = 1e-12


class OmniMethod(str, enum.Enum):
    HULL_LP = "HullLp"
    CONE_TEST = "ConeTest"
    STIEMKE = "Stiemke"


@dataclass(frozen=True)
class OmniVerdict:
    is_omni: bool
    method: OmniMethod
    witness: np.ndarray | None = None
    boundary_degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "is_omni": self.is_omni,
            "method": self.method.value,
            "witness": None if self.witness is None else self.witness.tolist(),
            "boundary_degenerate": self.boundary_degenerate,
        }


def nonzero_rows(A: np.ndarray) -> np.ndarray:
    """Boolean mask of rows that are not (numerically) zero."""
    if A.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    norms = np.linalg.norm(A, axis=1)
    return norms > _ZERO_ROW * max(1.0, float(norms.max()))


def is_omnidirectional_hull(A, feas_tol: float = FEAS_TOL) -> OmniVerdict:
    """Is 0 in the convex hull of the rows (and are there more rows than columns)?

    The witness is the vector of convex weights, zero on dropped zero rows.
    """
    A = as_matrix(A)
    m, n = A.shape
    keep = nonzero_rows(A)
    B = A[keep]
    mk = B.shape[0]
    if n == 0:
        return OmniVerdict(True, OmniMethod.HULL_LP)
    if mk <= n:
        return OmniVerdict(False, OmniMethod.HULL_LP)
    eq_lhs = np.vstack([B.T, np.ones((1, mk))])
    eq_rhs = np.concatenate([np.zeros(n), [1.0]])
    p = LpProblem.build(np.ones(mk), eq=(eq_lhs, eq_rhs), lower=0.0, upper=1.0)
    sol = solve(p, feas_tol=feas_tol)
    if sol.status is not LpStatus.OPTIMAL:
        return OmniVerdict(False, OmniMethod.HULL_LP)
    w = np.zeros(m)
    w[keep] = sol.x
    return OmniVerdict(True, OmniMethod.HULL_LP, witness=w)


def recession_probe(A, feas_tol: float = FEAS_TOL):
    """Yield ``(optimum, d)`` of ``max s*d_j`` over ``{A d <= 0, |d| <= 1}``."""
    A = as_matrix(A)
    m, n = A.shape
    for j in range(n):
        for s in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = s
            p = LpProblem.build(c, ineq=(A, np.zeros(m)), lower=-1.0, upper=1.0)
            sol = solve(p, feas_tol=feas_tol)
            yield sol.objective_value, sol.x


def is_omnidirectional_cone(A, feas_tol: float = FEAS_TOL, tol_zero: float = TOL_ZERO) -> OmniVerdict:
    """Omnidirectional iff the cone ``{A d <= 0}`` is ``{0}``.

    Stops at the first coordinate LP with a positive optimum; that maximizer
    is returned as the witness direction.
    """
    A = as_matrix(A)
    A = A[nonzero_rows(A)] if A.shape[0] else A
    for value, d in recession_probe(A, feas_tol):
        if value > tol_zero:
            return OmniVerdict(False, OmniMethod.CONE_TEST, witness=d)
    return OmniVerdict(True, OmniMethod.CONE_TEST)


def is_omnidirectional_stiemke(A, feas_tol: float = FEAS_TOL, eps_pos: float = EPS_POS) -> OmniVerdict:
    """Feasibility of ``{A^T x = 0, eps_pos <= x <= 1}``.

    This certifies that no y has ``0 != A y <= 0``. It does not exclude
    ``A y = 0`` with y nonzero, so it is a diagnostic, not a decision.
    """
    A = as_matrix(A)
    m, n = A.shape
    keep = nonzero_rows(A)
    B = A[keep]
    mk = B.shape[0]
    if mk == 0:
        # every row is zero; A^T x = 0 for any positive x
        return OmniVerdict(m > 0, OmniMethod.STIEMKE, witness=np.full(m, 1.0 / m) if m else None)
    p = LpProblem.build(np.zeros(mk), eq=(B.T, np.zeros(n)), lower=eps_pos, upper=1.0)
    sol = solve(p, feas_tol=feas_tol)
    if sol.status is not LpStatus.OPTIMAL:
        return OmniVerdict(False, OmniMethod.STIEMKE)
    w = np.full(m, eps_pos)
    w[keep] = sol.x
    return OmniVerdict(True, OmniMethod.STIEMKE, witness=w / w.sum())


def is_omnidirectional(A, feas_tol: float = FEAS_TOL) -> OmniVerdict:
    """Hull LP with cone-test arbitration."""
    hull = is_omnidirectional_hull(A, feas_tol)
    cone = is_omnidirectional_cone(A, feas_tol)
    if hull.is_omni == cone.is_omni:
        return hull if hull.is_omni else cone
    return OmniVerdict(cone.is_omni, OmniMethod.CONE_TEST, witness=cone.witness,
                       boundary_degenerate=True)


def is_omnidirectional_for_point(A, b, p, tol: float = POINT_TOL, feas_tol: float = FEAS_TOL) -> bool:
    """All hyperplanes ``<a_i, x> + b_i = 0`` pass through ``p`` and the rows are omnidirectional."""
    A = as_matrix(A)
    b = as_vector(b, "b")
    p = as_vector(p, "p")
    if A.shape != (b.shape[0], p.shape[0]):
        raise InvalidInput(f"shape mismatch: A {A.shape}, b {b.shape}, p {p.shape}")
    if A.shape[0] and np.max(np.abs(A @ p + b)) > tol:
        return False
    return is_omnidirectional_cone(A, feas_tol).is_omni


def hull_boundary_distance(A, feas_tol: float = FEAS_TOL) -> float:
    """Upper bound on the Euclidean distance from 0 to the boundary of conv(rows).

    Outside the hull: ``sqrt(n) * min_{x in simplex} ||A^T x||_inf``.
    Inside: the largest t with every ``+-t e_j`` in the hull, which bounds the
    inscribed-ball radius from above.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m == 0 or n == 0:
        return math.inf if m == 0 else 0.0
    # outside distance: min t s.t. -t <= A^T x <= t, x in simplex
    c = np.zeros(m + 1)
    c[-1] = -1.0
    G = np.vstack([np.hstack([A.T, -np.ones((n, 1))]),
                   np.hstack([-A.T, -np.ones((n, 1))])])
    eq = (np.concatenate([np.ones(m), [0.0]])[None, :], [1.0])
    p = LpProblem.build(c, eq=eq, ineq=(G, np.zeros(2 * n)), lower=0.0,
                        upper=np.concatenate([np.ones(m), [np.inf]]))
    sol = solve(p, feas_tol=feas_tol)
    t_out = -sol.objective_value
    if t_out > feas_tol:
        return math.sqrt(n) * t_out
    depth = math.inf
    for j in range(n):
        for s in (1.0, -1.0):
            # max tau s.t. A^T x = tau * s * e_j, x in simplex
            c = np.zeros(m + 1)
            c[-1] = 1.0
            e = np.zeros(n)
            e[j] = s
            eq_lhs = np.vstack([np.hstack([A.T, -e[:, None]]),
                                np.concatenate([np.ones(m), [0.0]])[None, :]])
            eq_rhs = np.concatenate([np.zeros(n), [1.0]])
            p = LpProblem.build(c, eq=(eq_lhs, eq_rhs), lower=np.concatenate([np.zeros(m), [-np.inf]]),
                                upper=np.concatenate([np.ones(m), [np.inf]]))
            sol = solve(p, feas_tol=feas_tol)
            depth = min(depth, max(sol.objective_value, 0.0))
    return depth
