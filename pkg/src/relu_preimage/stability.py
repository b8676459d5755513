"""Exact linearization of rectifier MLPs and singular-value bookkeeping.

On the activation region containing x, a ReLU network is affine:
``F(x) = a_p @ x + b_p`` where ``a_p`` is the chain of weight matrices with
the deactivated rows of every hidden layer zeroed out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._concurrency import thread_map
from .errors import DegenerateRow, InvalidInput, NothingRemoved
from .linalg import (SingularSpectrum, as_matrix, as_vector, condition_number,
                     relative_zero_tol, rowspace_basis, singular_values, spectrum)
from .lp import EPS_STRICT, FEAS_TOL, LpProblem, LpStatus, solve
from .preimage import ACT_TOL, AffineLayer

ACTIVATIONS = ("relu", "none", "softmax_ignored")
ADMISSIBLE_BOX = 1e3
LEMMA_TOL = 1e-9
ROWSPACE_TOL = 1e-7


@dataclass(frozen=True)
class MlpModel:
    """Stack of affine layers; ``activations[l]`` follows layer l.

    By default every layer but the last is followed by ReLU. A softmax head
    is recorded as ``softmax_ignored`` and treated as affine.
    """

    layers: tuple
    activations: tuple = None

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise InvalidInput("model needs at least one layer")
        acts = self.activations
        if acts is None:
            acts = ("relu",) * (len(layers) - 1) + ("none",)
        acts = tuple(acts)
        if len(acts) != len(layers):
            raise InvalidInput("one activation tag per layer required")
        for a in acts:
            if a not in ACTIVATIONS:
                raise InvalidInput(f"unknown activation {a!r}")
        for l in range(1, len(layers)):
            if layers[l].cols != layers[l - 1].rows:
                raise InvalidInput(
                    f"layer {l + 1} expects {layers[l].cols} inputs but layer {l} emits {layers[l - 1].rows}")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "activations", acts)

    @property
    def input_dim(self) -> int:
        return self.layers[0].cols

    @property
    def output_dim(self) -> int:
        return self.layers[-1].rows

    def forward(self, x, upto: int | None = None) -> np.ndarray:
        """Run the first ``upto`` layers (all by default), activations included."""
        h = as_vector(x, "x")
        if h.shape[0] != self.input_dim:
            raise InvalidInput(f"input length {h.shape[0]} != model input {self.input_dim}")
        for layer, act in list(zip(self.layers, self.activations))[:upto]:
            h = layer.weight @ h + layer.bias
            if act == "relu":
                h = np.maximum(h, 0.0)
        return h


@dataclass(frozen=True)
class MaskChain:
    """Deactivated units per ReLU layer (empty arrays for affine layers)."""

    index_sets: tuple


@dataclass(frozen=True)
class LinearizationResult:
    a_p: np.ndarray
    b_p: np.ndarray
    chain: MaskChain


def _masks(model: MlpModel, x, act_tol: float):
    h = as_vector(x, "x")
    if h.shape[0] != model.input_dim:
        raise InvalidInput(f"input length {h.shape[0]} != model input {model.input_dim}")
    sets = []
    for layer, act in zip(model.layers, model.activations):
        z = layer.weight @ h + layer.bias
        if act == "relu":
            off = z <= act_tol
            sets.append(np.flatnonzero(off))
            h = np.where(off, 0.0, z)
        else:
            sets.append(np.zeros(0, dtype=int))
            h = z
    return sets


def mask_chain(model: MlpModel, x, act_tol: float = ACT_TOL) -> MaskChain:
    return MaskChain(tuple(_masks(model, x, act_tol)))


def _chain_product(model: MlpModel, sets):
    n = model.input_dim
    a = np.eye(n)
    b = np.zeros(n)
    stages = []
    for l, (layer, act) in enumerate(zip(model.layers, model.activations)):
        a = layer.weight @ a
        b = layer.weight @ b + layer.bias
        stages.append((l, "affine", a))
        if act == "relu":
            a = a.copy()
            b = b.copy()
            a[sets[l]] = 0.0
            b[sets[l]] = 0.0
            stages.append((l, "relu", a))
    return a, b, stages


def linearize(model: MlpModel, x, act_tol: float = ACT_TOL) -> LinearizationResult:
    sets = _masks(model, x, act_tol)
    a, b, _ = _chain_product(model, sets)
    return LinearizationResult(a_p=a, b_p=b, chain=MaskChain(tuple(sets)))


def layer_chain(model: MlpModel, x, layer_index: int, act_tol: float = ACT_TOL):
    """Accumulated map up to the affine step of a 1-based layer, plus its off-set.

    Returns ``(A, I)``: ``A`` is the masked product feeding that layer's
    preactivation and ``I`` the units its ReLU switches off at ``x``.
    """
    if not 1 <= layer_index <= len(model.layers):
        raise InvalidInput(f"layer index {layer_index} outside 1..{len(model.layers)}")
    sets = _masks(model, x, act_tol)
    _, _, stages = _chain_product(model, sets)
    A = next(a for l, stage, a in stages if l == layer_index - 1 and stage == "affine")
    return A, sets[layer_index - 1]


def _index_set(I, m: int) -> np.ndarray:
    idx = np.unique(np.asarray(list(I), dtype=int))
    if idx.size and (idx[0] < 0 or idx[-1] >= m):
        raise InvalidInput(f"index set {idx.tolist()} out of range for {m} rows")
    return idx


def is_admissible(layer: AffineLayer, I, box: float = ADMISSIBLE_BOX,
                  eps_strict: float = EPS_STRICT, feas_tol: float = FEAS_TOL) -> bool:
    """Can the units in I be off while all others are strictly on?"""
    A, b = layer.weight, layer.bias
    m, n = A.shape
    idx = _index_set(I, m)
    off = np.zeros(m, dtype=bool)
    off[idx] = True
    # on rows: -<a_i, x> <= b_i - eps ; off rows: <a_i, x> <= -b_i
    G = np.vstack([-A[~off], A[off]])
    h = np.concatenate([b[~off] - eps_strict, -b[off]])
    p = LpProblem.build(np.zeros(n), ineq=(G, h), lower=-box, upper=box)
    return solve(p, feas_tol=feas_tol).status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class SpectrumEffect:
    before: SingularSpectrum
    after: SingularSpectrum
    k: int
    max_bound_holds: bool
    min_bound_holds: bool | None   # None when k <= 0 (bound vacuous)


def spectrum_effect(A, I, tol: float = LEMMA_TOL) -> SpectrumEffect:
    """Compare the spectrum of A with that of A after zeroing rows I."""
    A = as_matrix(A)
    idx = _index_set(I, A.shape[0])
    before = spectrum(A)
    DA = A.copy()
    DA[idx] = 0.0
    after = spectrum(DA, zero_tol=before.zero_tol)
    N = before.num_nonzero
    k = N - idx.size
    nz_after = after.nonzero
    max_ok = bool(nz_after.size == 0 or nz_after[0] <= before.sigma_max + tol)
    min_ok = None
    if k > 0 and nz_after.size:
        min_ok = bool(nz_after[-1] <= before.values[k - 1] + tol)
    elif k > 0:
        min_ok = True
    return SpectrumEffect(before, after, k, max_ok, min_ok)


@dataclass(frozen=True)
class CorrelationBound:
    c_min: float
    sigma_min_after: float
    bound_applies: bool

    @property
    def holds(self) -> bool:
        return (not self.bound_applies) or self.sigma_min_after <= self.c_min + LEMMA_TOL


def correlation_bound(A, I, k: int) -> CorrelationBound:
    """Smallest c for which removed row ``a_k`` is weakly correlated with every survivor.

    ``sigma_min_after`` is the smallest nonzero singular value of ``D_I A``
    (0.0 when there is none). ``bound_applies`` says whether ``a_k`` lies in
    the row space of ``D_I A``, which the bound needs.
    """
    A = as_matrix(A)
    m = A.shape[0]
    idx = _index_set(I, m)
    if k not in set(idx.tolist()):
        raise InvalidInput(f"row {k} is not in the removal set")
    M = m - idx.size
    if M < 1:
        raise InvalidInput("no rows remain after removal")
    ak = A[k]
    nk = float(np.linalg.norm(ak))
    if nk == 0.0:
        raise DegenerateRow(f"row {k} is zero")
    keep = np.ones(m, dtype=bool)
    keep[idx] = False
    c_min = float(np.max(np.abs(A[keep] @ ak))) * math.sqrt(M) / nk
    DA = A.copy()
    DA[idx] = 0.0
    sv = singular_values(DA)
    ztol = relative_zero_tol(A.shape, float(singular_values(A)[0]))
    nz = sv[sv > ztol]
    sigma_min = float(nz[-1]) if nz.size else 0.0
    R = rowspace_basis(DA)
    resid = float(np.linalg.norm(ak - R.T @ (R @ ak))) if R.shape[0] else nk
    applies = resid <= ROWSPACE_TOL * nk
    return CorrelationBound(c_min=c_min, sigma_min_after=sigma_min, bound_applies=applies)


@dataclass(frozen=True)
class CorrelationSweep:
    c_grid: np.ndarray
    counts: np.ndarray          # (len(c_grid), |I|): survivors satisfying the condition per removed row
    removed: np.ndarray         # row indices matching the columns of ``counts``
    m_remaining: int

    @property
    def threshold_row_count(self) -> int:
        return self.m_remaining

    @property
    def max_counts(self) -> np.ndarray:
        return self.counts.max(axis=1)

    @property
    def best_rows(self) -> np.ndarray:
        return self.removed[np.argmax(self.counts, axis=1)]


def correlation_sweep(A, I, c_grid) -> CorrelationSweep:
    """Count survivors with ``|<a_i, a_k>| <= c ||a_k|| / sqrt(M)`` for each c and removed k."""
    A = as_matrix(A)
    m = A.shape[0]
    idx = _index_set(I, m)
    if idx.size == 0:
        raise NothingRemoved("correlation sweep needs at least one removed row")
    grid = as_vector(c_grid, "c_grid")
    if np.any(np.diff(grid) < 0):
        raise InvalidInput("c_grid must be ascending")
    keep = np.ones(m, dtype=bool)
    keep[idx] = False
    M = int(keep.sum())
    if M == 0:
        return CorrelationSweep(grid, np.zeros((grid.size, idx.size), dtype=int), idx, 0)
    corr = np.abs(A[keep] @ A[idx].T)                 # (M, |I|)
    norms = np.linalg.norm(A[idx], axis=1)            # (|I|,)
    thresh = grid[:, None] * norms[None, :] / math.sqrt(M)
    counts = (corr[None, :, :] <= thresh[:, None, :]).sum(axis=1)
    return CorrelationSweep(grid, counts.astype(int), idx, M)


@dataclass
class LayerwiseReport:
    """Per-stage medians over the probed inputs.

    ``rows`` follow the CSV schema (layer_index, stage, stat, value,
    n_samples) with 1-based layer indices. ``median_spectra`` maps
    ``(layer_index, stage)`` to the elementwise median singular values.
    """

    rows: list = field(default_factory=list)
    median_spectra: dict = field(default_factory=dict)
    n_samples: int = 0

    def value(self, layer_index: int, stage: str, stat: str) -> float:
        for li, st, name, v, _ in self.rows:
            if (li, st, name) == (layer_index, stage, stat):
                return v
        raise KeyError((layer_index, stage, stat))


STATS = ("sigma_max", "sigma_min_nonzero", "num_nonzero", "cond")


def _stage_stats(a: np.ndarray):
    S = spectrum(a)
    cond = condition_number(S) if S.num_nonzero else float("nan")
    return S.values, (S.sigma_max, S.sigma_min_nonzero, float(S.num_nonzero), cond)


def _per_input(model: MlpModel, x, act_tol: float):
    sets = _masks(model, x, act_tol)
    _, _, stages = _chain_product(model, sets)
    return [(l, stage) + _stage_stats(a) for l, stage, a in stages]


def _nanmedian(values) -> float:
    arr = np.asarray(values, dtype=np.float64)
    if np.all(np.isnan(arr)):
        return float("nan")
    return float(np.nanmedian(arr))


def layerwise_report(model: MlpModel, inputs, act_tol: float = ACT_TOL,
                     max_workers: int | None = None) -> LayerwiseReport:
    inputs = [as_vector(x, "input") for x in inputs]
    if not inputs:
        raise InvalidInput("layerwise_report needs at least one input")
    for x in inputs:
        if x.shape[0] != model.input_dim:
            raise InvalidInput(f"input length {x.shape[0]} != model input {model.input_dim}")
    per = thread_map(lambda x: _per_input(model, x, act_tol), inputs, max_workers)
    report = LayerwiseReport(n_samples=len(inputs))
    for s, entry in enumerate(per[0]):
        l, stage = entry[0], entry[1]
        spectra = np.stack([p[s][2] for p in per])
        report.median_spectra[(l + 1, stage)] = np.median(spectra, axis=0)
        for t, name in enumerate(STATS):
            report.rows.append((l + 1, stage, name, _nanmedian([p[s][3][t] for p in per]), len(inputs)))
    return report
