"""Seeded random instances shared by the unit and acceptance suites."""
import numpy as np

from relu_preimage.lp import LpProblem
from relu_preimage.preimage import AffineLayer
from relu_preimage.stability import MlpModel


def random_lp(rng, max_vars=10, max_rows=16):
    """Small LP with x >= 0, some finite upper bounds and mixed constraints.

    Every third problem uses small integer data to provoke degenerate vertices.
    """
    n = int(rng.integers(1, max_vars + 1))
    m_in = int(rng.integers(0, min(4, max_rows - n) + 1))
    m_eq = int(rng.integers(0, min(2, n) + 1)) if rng.random() < 0.4 else 0
    n_up = int(rng.integers(0, max(0, max_rows - n - m_in) + 1))
    n_up = min(n_up, n)
    integer = rng.random() < 1 / 3

    def draw(*shape):
        if integer:
            return rng.integers(-3, 4, size=shape).astype(float)
        return rng.standard_normal(shape)

    c = draw(n)
    G = draw(m_in, n)
    h = np.abs(draw(m_in)) + (0 if integer else 0.1) if rng.random() < 0.8 else draw(m_in)
    x0 = np.abs(draw(n))
    E = draw(m_eq, n)
    f = E @ x0 if rng.random() < 0.8 else draw(m_eq)
    upper = np.full(n, np.inf)
    idx = rng.choice(n, size=n_up, replace=False)
    upper[idx] = np.abs(draw(n_up)) + 1.0
    return LpProblem.build(c, eq=(E, f), ineq=(G, h), lower=0.0, upper=upper)


def random_pair(rng, max_n=6, max_m=24):
    """(layer, x) with Gaussian weights; bias is zero, small or large at random."""
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    A = rng.standard_normal((m, n))
    b = rng.choice([0.0, 0.3, 1.0]) * rng.standard_normal(m)
    return AffineLayer(A, b), rng.standard_normal(n)


def random_model(rng, dims, bias_scale=0.5):
    layers = [AffineLayer(rng.standard_normal((dims[i + 1], dims[i])) / np.sqrt(dims[i]),
                          bias_scale * rng.standard_normal(dims[i + 1]))
              for i in range(len(dims) - 1)]
    return MlpModel(tuple(layers))


def region_interior_point(model, rng, margin=1e-3, tries=1000):
    """Input whose every hidden preactivation has magnitude >= margin."""
    for _ in range(tries):
        x = rng.standard_normal(model.input_dim)
        h = x
        ok = True
        for layer, act in zip(model.layers, model.activations):
            z = layer.weight @ h + layer.bias
            if act == "relu":
                if np.min(np.abs(z)) < margin:
                    ok = False
                    break
                h = np.maximum(z, 0)
            else:
                h = z
        if ok:
            return x
    raise RuntimeError("no interior point found")


def random_mlp(rng, max_layers=4, max_width=12):
    """Model with random depth, widths, activations and magnitudes for roundtrips."""
    depth = int(rng.integers(1, max_layers + 1))
    dims = [int(d) for d in rng.integers(1, max_width + 1, size=depth + 1)]
    layers = [AffineLayer(rng.standard_normal((dims[i + 1], dims[i])) * 10.0 ** rng.uniform(-8, 8),
                          rng.standard_normal(dims[i + 1]))
              for i in range(depth)]
    acts = tuple(rng.choice(["relu", "none"]) for _ in range(depth - 1)) + (
        str(rng.choice(["none", "softmax_ignored"])),)
    return MlpModel(tuple(layers), acts)


TINY_MODEL = (b"relu-mlp 1\n"
              b"layers 2\n"
              b"layer 1 2 3 relu text\n"
              b"1 2 3\n"
              b"4 5 6\n"
              b"0.5 -0.5\n"
              b"layer 2 1 2 none text\n"
              b"1 -1\n"
              b"0\n"
              b"end\n")


def corruptions():
    """(name, file bytes, expected error class name) for the malformed-file suite."""
    good = TINY_MODEL
    return [
        ("bad magic", good.replace(b"relu-mlp", b"relu-mpl"), "MalformedHeader"),
        ("future version", good.replace(b"relu-mlp 1", b"relu-mlp 7"), "UnsupportedVersion"),
        ("unknown activation", good.replace(b"relu text", b"tanh text"), "UnknownActivation"),
        ("unparsable weight", good.replace(b"4 5 6", b"4 x 6"), "MalformedValue"),
        ("nan weight", good.replace(b"4 5 6", b"4 nan 6"), "NonFiniteValue"),
        ("short weight row", good.replace(b"4 5 6", b"4 5"), "SizeMismatch"),
        ("broken chain", good.replace(b"layer 2 1 2", b"layer 2 1 3").replace(b"1 -1\n", b"1 -1 0\n"),
         "DimensionMismatch"),
        ("truncated", good[:good.index(b"layer 2")], "TruncatedFile"),
        ("trailing data", good + b"1 2 3\n", "TrailingData"),
        ("fewer layers than declared", good.replace(b"layers 2", b"layers 3"), "SizeMismatch"),
        ("more layers than declared", good.replace(b"layers 2", b"layers 1"), "SizeMismatch"),
        ("layer out of sequence", good.replace(b"layer 2 1 2", b"layer 3 1 2"), "MalformedHeader"),
        ("binary block too long",
         b"relu-mlp 1\nlayers 1\nlayer 1 2 2 none f32le\n" + np.zeros(7, "<f4").tobytes() + b"\nend\n",
         "SizeMismatch"),
        ("binary block truncated",
         b"relu-mlp 1\nlayers 1\nlayer 1 2 2 none f32le\n" + np.zeros(3, "<f4").tobytes(), "TruncatedFile"),
        ("binary inf",
         b"relu-mlp 1\nlayers 1\nlayer 1 1 1 none f32le\n" + np.array([np.inf, 0], "<f4").tobytes() + b"\nend\n",
         "NonFiniteValue"),
    ]
