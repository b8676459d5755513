"""Preimages of single ReLU layers ``y = relu(A x + b)``.

Given y, the preimage is the polyhedron

    A_P x + b_P  = y_P      (P: coordinates with y_i > 0)
    A_Z x + b_Z <= 0        (Z: the rest)

Writing ``x = x_part + O^T d`` with ``O`` an orthonormal basis of N(A_P)
turns the inequality block into ``Abar d + bbar <= 0``. The preimage is a
single point when ``rank(A_P) = n``, has finite volume when ``Abar`` is
omnidirectional, and is unbounded otherwise.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BudgetExceeded, InconsistentOutput, InvalidInput,
                     NotAReluOutput, ProbeInfeasible)
from .linalg import (RANK_TOL, as_matrix, as_vector, min_norm_solution,
                     nullspace_basis, rank)
from .lp import FEAS_TOL, LpProblem, LpStatus, solve
from .omni import is_omnidirectional, is_omnidirectional_for_point

ACT_TOL = 1e-9
CONSISTENCY_TOL = 1e-6
SINGLETON_TOL = 1e-7
MAX_EXHAUSTIVE_ROWS = 20
EXHAUSTIVE_BUDGET = 200_000


@dataclass(frozen=True)
class AffineLayer:
    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        W = as_matrix(self.weight, "weight")
        b = as_vector(self.bias, "bias")
        if b.shape[0] != W.shape[0]:
            raise InvalidInput(f"bias length {b.shape[0]} != weight rows {W.shape[0]}")
        object.__setattr__(self, "weight", W)
        object.__setattr__(self, "bias", b)

    @property
    def rows(self) -> int:
        return self.weight.shape[0]

    @property
    def cols(self) -> int:
        return self.weight.shape[1]

    def preactivation(self, x) -> np.ndarray:
        x = as_vector(x, "x")
        if x.shape[0] != self.cols:
            raise InvalidInput(f"input length {x.shape[0]} != layer cols {self.cols}")
        return self.weight @ x + self.bias

    def forward(self, x) -> np.ndarray:
        return np.maximum(self.preactivation(x), 0.0)


def forward(layer: AffineLayer, x) -> np.ndarray:
    return layer.forward(x)


@dataclass(frozen=True)
class SignPattern:
    positive: np.ndarray
    zero: np.ndarray
    act_tol: float


def sign_pattern(y, act_tol: float = ACT_TOL) -> SignPattern:
    y = as_vector(y, "y")
    if np.any(y < -act_tol):
        i = int(np.argmin(y))
        raise NotAReluOutput(f"y[{i}] = {y[i]!r} is negative")
    pos = y > act_tol
    return SignPattern(positive=np.flatnonzero(pos), zero=np.flatnonzero(~pos), act_tol=act_tol)


@dataclass(frozen=True)
class ReducedSystem:
    """Inequality block in nullspace coordinates: ``Abar d + bbar <= 0``."""

    O: np.ndarray
    k: int
    Abar: np.ndarray
    bbar: np.ndarray
    ktilde: int
    x_part: np.ndarray
    pattern: SignPattern

    def lift(self, d) -> np.ndarray:
        return self.x_part + self.O.T @ np.asarray(d, dtype=np.float64)


class PreimageKind(str, enum.Enum):
    SINGLETON = "Singleton"
    FINITE_VOLUME = "FiniteVolume"
    INFINITE_VOLUME = "InfiniteVolume"


@dataclass(frozen=True)
class PreimageClass:
    kind: PreimageKind
    reduced: ReducedSystem | None = None
    point: np.ndarray | None = None
    diagnostics: str = ""
    boundary_degenerate: bool = False

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "diagnostics": self.diagnostics,
               "boundary_degenerate": self.boundary_degenerate}
        if self.point is not None:
            out["point"] = self.point.tolist()
        if self.reduced is not None:
            out["k"] = self.reduced.k
            out["ktilde"] = self.reduced.ktilde
        return out


def _check_layer_y(layer: AffineLayer, y) -> np.ndarray:
    y = as_vector(y, "y")
    if y.shape[0] != layer.rows:
        raise InvalidInput(f"output length {y.shape[0]} != layer rows {layer.rows}")
    return y


def _consistency_tol(y: np.ndarray) -> float:
    return CONSISTENCY_TOL * max(1.0, float(np.max(np.abs(y), initial=0.0)))


def reduce_system(layer: AffineLayer, y, act_tol: float = ACT_TOL,
                  rank_tol: float = RANK_TOL) -> ReducedSystem:
    """Split by sign pattern and project the inequality block onto N(A_P).

    Raises ``InconsistentOutput`` when the equality block has no solution.
    """
    y = _check_layer_y(layer, y)
    pat = sign_pattern(y, act_tol)
    A, b = layer.weight, layer.bias
    A_P = A[pat.positive]
    rhs = y[pat.positive] - b[pat.positive]
    x_part = min_norm_solution(A_P, rhs, rank_tol)
    if A_P.shape[0]:
        resid = float(np.max(np.abs(A_P @ x_part - rhs)))
        if resid > _consistency_tol(y):
            raise InconsistentOutput(f"equality block unsolvable (residual {resid:.3e})")
    O = nullspace_basis(A_P, rank_tol)
    A_Z = A[pat.zero]
    return ReducedSystem(O=O, k=O.shape[0], Abar=A_Z @ O.T, bbar=b[pat.zero] + A_Z @ x_part,
                         ktilde=len(pat.zero), x_part=x_part, pattern=pat)


def _inequality_block_feasible(red: ReducedSystem, tol: float, feas_tol: float) -> bool:
    if red.ktilde == 0:
        return True
    k = red.k
    if k == 0:
        return bool(np.all(red.bbar <= tol))
    p = LpProblem.build(np.zeros(k), ineq=(red.Abar, -red.bbar + tol), lower=-np.inf, upper=np.inf)
    return solve(p, feas_tol=feas_tol).status is LpStatus.OPTIMAL


def classify_preimage(layer: AffineLayer, y, act_tol: float = ACT_TOL,
                      rank_tol: float = RANK_TOL, feas_tol: float = FEAS_TOL) -> PreimageClass:
    """Singleton / finite-volume / infinite-volume classification of relu^-1(y)."""
    y = _check_layer_y(layer, y)
    red = reduce_system(layer, y, act_tol, rank_tol)
    tol = _consistency_tol(y)
    if red.k == 0:
        point = red.x_part
        if red.ktilde and np.max(red.bbar) > tol:
            raise InconsistentOutput("unique equality solution violates the inequality block")
        out = layer.forward(point)
        if np.max(np.abs(out - y)) > tol:
            raise InconsistentOutput("unique equality solution does not reproduce y")
        return PreimageClass(PreimageKind.SINGLETON, reduced=red, point=point,
                             diagnostics="rank(A|P) = n: equality block pins x")
    if not _inequality_block_feasible(red, tol, feas_tol):
        raise InconsistentOutput("inequality block has no solution on the equality affine set")
    if red.ktilde <= red.k:
        return PreimageClass(PreimageKind.INFINITE_VOLUME, reduced=red,
                             diagnostics=f"ktilde={red.ktilde} <= k={red.k}: too few inequalities")
    verdict = is_omnidirectional(red.Abar, feas_tol)
    note = " (hull/cone disagreement: boundary degenerate)" if verdict.boundary_degenerate else ""
    if verdict.is_omni:
        return PreimageClass(PreimageKind.FINITE_VOLUME, reduced=red,
                             diagnostics="reduced matrix omnidirectional" + note,
                             boundary_degenerate=verdict.boundary_degenerate)
    return PreimageClass(PreimageKind.INFINITE_VOLUME, reduced=red,
                         diagnostics="reduced matrix not omnidirectional" + note,
                         boundary_degenerate=verdict.boundary_degenerate)


class BoundednessVerdict(str, enum.Enum):
    SINGLETON = "Singleton"
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"


def preimage_bounded_oracle(layer: AffineLayer, y, act_tol: float = ACT_TOL,
                            feas_tol: float = FEAS_TOL) -> BoundednessVerdict:
    """Decide boundedness directly in x-space with 2n coordinate LPs."""
    y = _check_layer_y(layer, y)
    pat = sign_pattern(y, act_tol)
    A, b = layer.weight, layer.bias
    n = layer.cols
    eq = (A[pat.positive], y[pat.positive] - b[pat.positive])
    ineq = (A[pat.zero], -b[pat.zero])
    extent = []
    for j in range(n):
        bounds = []
        for s in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = s
            sol = solve(LpProblem.build(c, eq=eq, ineq=ineq, lower=-np.inf, upper=np.inf),
                        feas_tol=feas_tol)
            if sol.status is LpStatus.INFEASIBLE:
                raise InconsistentOutput("preimage polyhedron is empty")
            if sol.status is LpStatus.UNBOUNDED:
                return BoundednessVerdict.UNBOUNDED
            bounds.append(s * sol.objective_value)
        extent.append(bounds[0] - bounds[1])
    if all(e <= SINGLETON_TOL for e in extent):
        return BoundednessVerdict.SINGLETON
    return BoundednessVerdict.BOUNDED


def singleton_in_reduced(Abar, bbar, tol: float = SINGLETON_TOL, feas_tol: float = FEAS_TOL,
                         max_rows: int = MAX_EXHAUSTIVE_ROWS, budget: int = EXHAUSTIVE_BUDGET) -> bool:
    """Is ``{d : Abar d + bbar <= 0}`` a single point?

    Enumerates the vertices of the hyperplane arrangement (k-subsets of rows
    with full rank) and tests whether the rows active at a feasible vertex
    are omnidirectional for it.
    """
    Abar = as_matrix(Abar, "Abar")
    bbar = as_vector(bbar, "bbar")
    kt, k = Abar.shape
    if kt > max_rows:
        raise BudgetExceeded(f"{kt} inequality rows exceed the search guard of {max_rows}")
    if k == 0:
        return bool(np.all(bbar <= tol))
    if kt <= k:
        return False
    if math.comb(kt, k) > budget:
        raise BudgetExceeded(f"C({kt},{k}) = {math.comb(kt, k)} candidate vertices exceed budget {budget}")
    seen = set()
    scale = 1.0 + float(np.max(np.abs(bbar), initial=0.0))
    for S in itertools.combinations(range(kt), k):
        M = Abar[list(S)]
        if rank(M) < k:
            continue
        p = np.linalg.solve(M, -bbar[list(S)])
        slack = Abar @ p + bbar
        if np.max(slack) > tol * scale:
            continue
        active = np.flatnonzero(np.abs(slack) <= tol * scale)
        key = tuple(active)
        if key in seen:
            continue
        seen.add(key)
        if len(active) > k and is_omnidirectional_for_point(
                Abar[active], bbar[active], p, tol=tol * scale, feas_tol=feas_tol):
            return True
    return False


def singleton_exhaustive(layer: AffineLayer, y, act_tol: float = ACT_TOL,
                         rank_tol: float = RANK_TOL, **kwargs) -> bool:
    red = reduce_system(layer, y, act_tol, rank_tol)
    if red.k == 0:
        return True
    return singleton_in_reduced(red.Abar, red.bbar, **kwargs)


def retrieval_under_relu(A, x, act_tol: float = ACT_TOL, rank_tol: float = RANK_TOL,
                         feas_tol: float = FEAS_TOL) -> bool:
    """Is x the only point with ``relu(A x') = relu(A x)``?

    True when the positive rows span R^n, or when the rows with zero
    preactivation, projected onto the orthogonal complement of that span,
    are omnidirectional there. Rows with strictly negative preactivation
    have slack at x and cannot pin it.
    """
    A = as_matrix(A)
    x = as_vector(x, "x")
    if A.shape[1] != x.shape[0]:
        raise InvalidInput(f"x length {x.shape[0]} != A cols {A.shape[1]}")
    n = A.shape[1]
    z = A @ x
    scale = 1.0 + float(np.max(np.abs(A), initial=0.0)) * float(np.max(np.abs(x), initial=0.0))
    pos = z > act_tol
    A_pos = A[pos]
    if rank(A_pos, rank_tol) == n:
        return True
    Q = nullspace_basis(A_pos, rank_tol)
    tight = np.abs(z) <= act_tol * scale
    proj = A[tight & ~pos] @ Q.T
    return is_omnidirectional(proj, feas_tol).is_omni


def invariance_probe(layer: AffineLayer, x_star, c, lower, upper, act_tol: float = ACT_TOL,
                     feas_tol: float = FEAS_TOL) -> np.ndarray:
    """Maximize ``<c, x>`` over the part of relu^-1(relu(A x_star + b)) inside the box."""
    x_star = as_vector(x_star, "x_star")
    c = as_vector(c, "c")
    n = layer.cols
    lo = np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,)).copy()
    up = np.broadcast_to(np.asarray(upper, dtype=np.float64), (n,)).copy()
    if x_star.shape[0] != n or c.shape[0] != n:
        raise InvalidInput(f"x_star and c must have length {n}")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
        raise InvalidInput("probe box must be finite")
    if np.any(x_star < lo) or np.any(x_star > up):
        raise InvalidInput("x_star lies outside the probe box")
    y_star = layer.forward(x_star)
    pat = sign_pattern(y_star, act_tol)
    A, b = layer.weight, layer.bias
    p = LpProblem.build(c, eq=(A[pat.positive], y_star[pat.positive] - b[pat.positive]),
                        ineq=(A[pat.zero], -b[pat.zero]), lower=lo, upper=up)
    sol = solve(p, feas_tol=feas_tol)
    if sol.status is not LpStatus.OPTIMAL:
        raise ProbeInfeasible(f"invariance LP returned {sol.status.value}")
    return sol.x
