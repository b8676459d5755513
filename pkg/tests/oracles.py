"""Independent reference implementations used only by the tests.

Nothing here imports from ``relu_preimage`` beyond data containers, so each
routine checks the library against a different algorithm.
"""
import itertools
import math

import numpy as np


def jacobi_eigh(S, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigenvalues of a symmetric matrix, sorted descending."""
    A = np.array(S, dtype=np.float64)
    n = A.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(A ** 2) - np.sum(np.diag(A) ** 2))
        if off <= tol * max(1.0, np.linalg.norm(A)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
    return np.sort(np.diag(A))[::-1]


def rref_rank(M, tol=1e-9):
    """Rank by Gaussian elimination with partial pivoting."""
    A = np.array(M, dtype=np.float64)
    m, n = A.shape
    r = 0
    for j in range(n):
        if r == m:
            break
        p = r + int(np.argmax(np.abs(A[r:, j])))
        if abs(A[p, j]) <= tol:
            continue
        A[[r, p]] = A[[p, r]]
        A[r] /= A[r, j]
        for i in range(m):
            if i != r:
                A[i] -= A[i, j] * A[r]
        r += 1
    return r


def lp_vertices(p, tol=1e-9):
    """All vertices of the LP feasible set, by brute-force basis enumeration.

    Every finite bound becomes an inequality row; a vertex is a feasible
    point where n linearly independent constraints are tight.
    """
    n = p.num_vars
    rows, rhs = [], []
    for a, b in zip(p.ineq_lhs, p.ineq_rhs):
        rows.append(a), rhs.append(b)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(p.upper[j]):
            rows.append(e), rhs.append(p.upper[j])
        if np.isfinite(p.lower[j]):
            rows.append(-e), rhs.append(-p.lower[j])
    G = np.array(rows).reshape(-1, n)
    h = np.array(rhs)
    E, f = p.eq_lhs, p.eq_rhs
    need = n - (np.linalg.matrix_rank(E) if E.shape[0] else 0)
    out = []
    for S in itertools.combinations(range(G.shape[0]), need):
        M = np.vstack([E, G[list(S)]])
        if np.linalg.matrix_rank(M) < n:
            continue
        x = np.linalg.lstsq(M, np.concatenate([f, h[list(S)]]), rcond=None)[0]
        if E.shape[0] and np.max(np.abs(E @ x - f)) > tol:
            continue
        if G.shape[0] and np.max(G @ x - h) > tol:
            continue
        out.append(x)
    return out, G, h


def _null_vectors(M, n):
    if M.shape[0] == 0:
        return np.eye(n)
    _, sv, Vt = np.linalg.svd(M, full_matrices=True)
    r = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
    return Vt[r:]


def lp_unbounded_ray(p, G, tol=1e-9):
    """Does the recession cone {E r = 0, G r <= 0} have an extreme ray with <c, r> > 0?

    The cone is pointed whenever every variable has a finite bound on at
    least one side, so its extreme rays (n-1 independent tight rows) suffice.
    """
    n = p.num_vars
    E = p.eq_lhs
    need = n - 1 - (np.linalg.matrix_rank(E) if E.shape[0] else 0)
    if need < 0:
        return False
    for S in itertools.combinations(range(G.shape[0]), need):
        N = _null_vectors(np.vstack([E, G[list(S)]]), n)
        if N.shape[0] != 1:
            continue
        for ray in (N[0], -N[0]):
            if G.shape[0] and np.max(G @ ray) > tol:
                continue
            if E.shape[0] and np.max(np.abs(E @ ray)) > tol:
                continue
            if p.objective @ ray > tol:
                return True
    return False


def lp_oracle(p, tol=1e-9):
    """("Infeasible" | "Unbounded" | "Optimal", best value or None)."""
    verts, G, _ = lp_vertices(p, tol)
    if not verts:
        return "Infeasible", None
    if lp_unbounded_ray(p, G, tol):
        return "Unbounded", None
    return "Optimal", max(float(p.objective @ v) for v in verts)


def pos_hull_interior_sampled(A, rng, samples=10_000):
    """Every sampled open halfspace contains a row of A."""
    n = A.shape[1]
    D = rng.standard_normal((samples, n))
    D /= np.linalg.norm(D, axis=1, keepdims=True)
    return bool(np.all(np.max(A @ D.T, axis=0) > 0))


def wendel_probability(m, n):
    """P(0 not in conv of m symmetric i.i.d. points in general position in R^n)."""
    return 2.0 ** (-(m - 1)) * sum(math.comb(m - 1, k) for k in range(n))
