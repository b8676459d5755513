"""Seeded random suites behind the ``trend`` and ``crosscheck`` subcommands."""
from __future__ import annotations

import numpy as np

from .lp import FEAS_TOL
from .omni import hull_boundary_distance, is_omnidirectional_cone, is_omnidirectional_hull
from .preimage import ACT_TOL, AffineLayer, PreimageKind, classify_preimage

REGIMES = ("gaussian-input", "inactive")
BOUNDARY_TOL = 1e-6


def random_layer_output(rng, m: int, n: int, regime: str):
    """Draw (layer, y) for one trial.

    ``gaussian-input``: A ~ N(0,1), b = 0, y = relu(A x) with x ~ N(0, I).
    ``inactive``: same A, b = -1, y = 0 (every unit off), so the preimage is
    the polyhedron {A x <= 1} around the origin; it is a polytope with
    nonempty interior iff A is omnidirectional.
    """
    A = rng.standard_normal((m, n))
    if regime == "gaussian-input":
        layer = AffineLayer(A, np.zeros(m))
        return layer, layer.forward(rng.standard_normal(n))
    if regime == "inactive":
        return AffineLayer(A, -np.ones(m)), np.zeros(m)
    raise ValueError(f"unknown regime {regime!r}")


def finite_preimage_trend(n: int, ms, trials: int, seed: int, regime: str = "gaussian-input",
                          act_tol: float = ACT_TOL, feas_tol: float = FEAS_TOL) -> list:
    """Fraction of each preimage kind per row count m (``finite`` = singleton or finite volume)."""
    out = []
    for m in ms:
        rng = np.random.default_rng([seed, n, m])
        counts = {k: 0 for k in PreimageKind}
        for _ in range(trials):
            layer, y = random_layer_output(rng, m, n, regime)
            counts[classify_preimage(layer, y, act_tol=act_tol, feas_tol=feas_tol).kind] += 1
        s = counts[PreimageKind.SINGLETON] / trials
        f = counts[PreimageKind.FINITE_VOLUME] / trials
        out.append({"m": m, "n": n, "trials": trials, "singleton": s, "finite_volume": f,
                    "infinite_volume": counts[PreimageKind.INFINITE_VOLUME] / trials,
                    "finite": s + f})
    return out


def omni_crosscheck(trials: int, seed: int, n_range=(2, 8), feas_tol: float = FEAS_TOL) -> dict:
    """Hull vs cone verdicts on Gaussian matrices with m in {n-1, ..., 4n}.

    Disagreements are certified by an upper bound on the distance of 0 to the
    hull boundary; ``uncertified`` counts those farther than 1e-6.
    """
    rng = np.random.default_rng(seed)
    records = []
    agree = uncertified = omni_small_m = 0
    for _ in range(trials):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(n - 1, 4 * n + 1))
        A = rng.standard_normal((m, n))
        h = is_omnidirectional_hull(A, feas_tol).is_omni
        c = is_omnidirectional_cone(A, feas_tol).is_omni
        rec = {"m": m, "n": n, "hull": h, "cone": c}
        if h == c:
            agree += 1
        else:
            rec["boundary_distance"] = hull_boundary_distance(A, feas_tol)
            if rec["boundary_distance"] > BOUNDARY_TOL:
                uncertified += 1
        if m <= n and (h or c):
            omni_small_m += 1
        records.append(rec)
    return {"trials": trials, "seed": seed, "agree": agree, "agreement": agree / trials,
            "disagreements": trials - agree, "uncertified_disagreements": uncertified,
            "omni_with_m_le_n": omni_small_m, "records": records}
