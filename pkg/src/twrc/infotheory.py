"""Entropy / mutual-information primitives and the generic optimizers
used by the strategy evaluators.

Conventions: all logarithms are base 2, all rates in bits per channel
use; 0·log 0 = 0.  Dividing a positive probability by an impossible
event (p > 0 against q = 0) raises, because every distribution here is
derived from a channel and such a query signals an inconsistency, not a
limit.

Defaults: tol = 1e-7, iteration cap = 1e5 for the alternating-
maximization loops; product-distribution grid resolution 1/200 per
simplex coordinate with two rounds of local refinement.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import NonConvergenceError

DEFAULT_TOL = 1e-7
MAX_ITER = 100_000
DEFAULT_GRID = 200

# joint grid cells above this are auto-coarsened (large alphabets only)
_GRID_CELL_CAP = 200_000


def entropy(p) -> float:
    """Shannon entropy of a probability vector, in bits."""
    p = np.asarray(p, dtype=float).reshape(-1)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def binary_entropy(rho: float) -> float:
    return entropy([rho, 1.0 - rho])


def _entropy_rows(rows: np.ndarray) -> np.ndarray:
    """Entropy of each row of a matrix (rows need not be checked here)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(rows > 0, rows * np.log2(np.where(rows > 0, rows, 1.0)),
                     0.0)
    return -t.sum(axis=-1)


def kl_div(p, q) -> float:
    """D(p || q) in bits; raises if p puts mass on a q-impossible event."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if np.any((p > 0) & (q == 0)):
        raise ValueError("impossible-event inconsistency: p > 0 where q = 0")
    mask = p > 0
    return float((p[mask] * np.log2(p[mask] / q[mask])).sum())


def _clip0(x: float) -> float:
    """Clamp float-noise negatives of quantities that are >= 0 exactly."""
    return 0.0 if -1e-12 < x < 0 else x


def mutual_info(px, ch) -> float:
    """I(X;Y) for input distribution px and channel rows ch[x, :]."""
    px = np.asarray(px, dtype=float).reshape(-1)
    W = np.asarray(ch, dtype=float)
    if W.ndim != 2 or W.shape[0] != px.size:
        raise ValueError(
            f"dimension mismatch: |X|={px.size} vs channel rows {W.shape}")
    py = px @ W
    return _clip0(entropy(py) - float(px @ _entropy_rows(W)))


def cond_entropy(joint) -> float:
    """H(A|B) from a joint array indexed [a, b]."""
    j = np.asarray(joint, dtype=float)
    if j.ndim != 2:
        raise ValueError("cond_entropy expects a 2-D joint")
    return _clip0(entropy(j) - entropy(j.sum(axis=0)))


def cond_mutual_info(joint) -> float:
    """I(A;B|C) from a joint array indexed [a, b, c]."""
    j = np.asarray(joint, dtype=float)
    if j.ndim != 3:
        raise ValueError("cond_mutual_info expects a 3-D joint")
    h_ac = entropy(j.sum(axis=1))
    h_bc = entropy(j.sum(axis=0))
    h_abc = entropy(j)
    h_c = entropy(j.sum(axis=(0, 1)))
    return _clip0(h_ac + h_bc - h_abc - h_c)


# ---------------------------------------------------------------------------
# channel capacity (alternating maximization)
# ---------------------------------------------------------------------------

def dmc_capacity(ch, tol: float = DEFAULT_TOL,
                 max_iter: int = MAX_ITER) -> tuple[float, np.ndarray]:
    """Capacity of a discrete memoryless channel and an achieving input
    distribution.

    Alternating maximization over the input distribution; convergence is
    declared when the standard upper bound max_x D(W_x || q) and the
    lower bound I(r) close to within tol, so the returned value is
    within tol of the true maximum and is itself achievable by the
    returned distribution.
    """
    W = np.asarray(ch, dtype=float)
    m = W.shape[0]
    r = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        q = r @ W
        # D(W_x || q); W_x puts no mass where q = 0 as long as r > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(W > 0, np.log2(np.where(W > 0, W, 1.0)
                                         / np.where(q > 0, q, 1.0)), 0.0)
        d = (W * lg).sum(axis=1)
        i_low = float(r @ d)
        i_up = float(d.max())
        if i_up - i_low < tol:
            return max(i_low, 0.0), r
        r = r * np.exp2(d)
        r /= r.sum()
    raise NonConvergenceError(
        f"capacity iteration did not close the bound gap within "
        f"{max_iter} iterations (gap {i_up - i_low:.3e})")


# ---------------------------------------------------------------------------
# concave maximization over the probability simplex
# ---------------------------------------------------------------------------

def _golden_max(f, lo: float = 0.0, hi: float = 1.0,
                iters: int = 120) -> tuple[float, float]:
    """Golden-section maximum of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < 1e-13:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _eg_max(f, grad, p0: np.ndarray, iters: int = 4000,
            tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Multiplicative-update (exponentiated-gradient) ascent of a concave
    f on the simplex, starting from p0.  Returns the best iterate."""
    p = np.asarray(p0, dtype=float).copy()
    p = np.maximum(p, 1e-12)
    p /= p.sum()
    best_p, best_v = p.copy(), f(p)
    stale = 0
    for it in range(1, iters + 1):
        g = grad(p)
        g = g - g.max()  # shift-invariant; keeps exp2 bounded
        p = p * np.exp2(g / math.sqrt(it))
        s = p.sum()
        if s <= 0 or not np.isfinite(s):
            break
        p /= s
        v = f(p)
        if v > best_v + tol * 1e-3:
            best_v, best_p = v, p.copy()
            stale = 0
        else:
            stale += 1
            if stale > 200:
                break
    return best_p, best_v


def _mi_gradient(p: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Gradient of I(p, W) with respect to p, up to an additive constant."""
    q = p @ W
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(W > 0, np.log2(np.where(W > 0, W, 1.0)
                                     / np.where(q > 0, q, 1.0)), 0.0)
    return (W * lg).sum(axis=1)


def maximize_concave_on_simplex(f, m: int, grad=None,
                                starts=None) -> tuple[np.ndarray, float]:
    """Maximize a concave function over the m-simplex.

    Binary case via golden section (exact to line-search tolerance);
    otherwise multiplicative-update ascent from each start, keeping the
    best.  grad must return a supergradient when given (defaults to a
    central finite difference).
    """
    if m == 1:
        p = np.array([1.0])
        return p, f(p)
    if m == 2:
        x, v = _golden_max(lambda t: f(np.array([t, 1.0 - t])))
        return np.array([x, 1.0 - x]), v
    if grad is None:
        def grad(p, _f=f, _m=m, eps=1e-6):
            g = np.zeros(_m)
            for i in range(_m):
                d = np.full(_m, -eps / (_m - 1))
                d[i] = eps
                g[i] = (_f(np.clip(p + d, 0, None) /
                           np.clip(p + d, 0, None).sum())
                        - _f(np.clip(p - d, 0, None) /
                             np.clip(p - d, 0, None).sum())) / (2 * eps)
            return g
    if starts is None:
        starts = [np.full(m, 1.0 / m)]
    best_p, best_v = None, -np.inf
    for s in starts:
        p, v = _eg_max(f, grad, np.asarray(s, dtype=float))
        if v > best_v:
            best_p, best_v = p, v
    return best_p, best_v


def maximin_downlink(spec, tol: float = DEFAULT_TOL) \
        -> tuple[float, np.ndarray]:
    """max over p(x3) of min{ I(X3;Y1), I(X3;Y2) } and an achieving
    distribution.

    Both mutual informations are concave in p(x3), so their minimum is
    concave: solved by golden section on the simplex edge for binary
    relay alphabets, multiplicative-update ascent (seeded with the
    uniform and each link's capacity achiever) otherwise.
    """
    ch1, ch2 = spec.downlink_marginals()
    m = ch1.shape[0]

    def f(p):
        return min(mutual_info(p, ch1), mutual_info(p, ch2))

    if m == 2:
        x, v = _golden_max(lambda t: f(np.array([t, 1.0 - t])))
        return max(v, 0.0), np.array([x, 1.0 - x])

    def grad(p):
        i1, i2 = mutual_info(p, ch1), mutual_info(p, ch2)
        if abs(i1 - i2) < 1e-12:
            return 0.5 * (_mi_gradient(p, ch1) + _mi_gradient(p, ch2))
        return _mi_gradient(p, ch1) if i1 < i2 else _mi_gradient(p, ch2)

    _, p1 = dmc_capacity(ch1, tol)
    _, p2 = dmc_capacity(ch2, tol)
    starts = [np.full(m, 1.0 / m), p1, p2]
    p, v = maximize_concave_on_simplex(f, m, grad=grad, starts=starts)
    return max(v, 0.0), p


# ---------------------------------------------------------------------------
# product-distribution sum-rate maximization
# ---------------------------------------------------------------------------

def simplex_grid(m: int, steps: int) -> np.ndarray:
    """All probability vectors of length m with entries k/steps, in
    lexicographic order of the integer compositions."""
    combos = itertools.combinations(range(steps + m - 1), m - 1)
    pts = []
    for bars in combos:
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(steps + m - 2 - prev)
        pts.append(parts)
    return np.asarray(pts, dtype=float) / steps


def _grid_count(m: int, steps: int) -> int:
    return math.comb(steps + m - 1, m - 1)


def _joint_mi_grid(up3: np.ndarray, P1: np.ndarray,
                   P2: np.ndarray) -> np.ndarray:
    """I(X1,X2;Y3) for every pair of grid marginals (vectorized)."""
    h_rows = _entropy_rows(up3)                      # (n1, n2)
    py = np.einsum("ai,bj,ijy->aby", P1, P2, up3)    # (A, B, ny)
    h_y = _entropy_rows(py)                          # (A, B)
    h_y_given = np.einsum("ai,bj,ij->ab", P1, P2, h_rows)
    return h_y - h_y_given


def _product_mi(up3: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> float:
    py = np.einsum("i,j,ijy->y", p1, p2, up3)
    h_given = float(np.einsum("i,j,ij->", p1, p2, _entropy_rows(up3)))
    return _clip0(entropy(py) - h_given)


def max_product_sum_rate(up3, grid: int = DEFAULT_GRID,
                         tol: float = DEFAULT_TOL) \
        -> tuple[float, np.ndarray, np.ndarray]:
    """Maximum of I(X1,X2;Y3) over product input distributions
    p(x1)p(x2) for an uplink given as an [x1, x2, y3] array.

    Grid search at the requested per-coordinate resolution (auto-
    coarsened if the joint lattice would exceed ~2e5 cells), two rounds
    of local refinement around the incumbent, then coordinate ascent
    (the objective is concave in each marginal separately, not jointly,
    so the result is certified only as a lower bound).  Ties in the grid
    phase resolve to the lexicographically smallest grid coordinate.
    """
    up3 = np.asarray(up3, dtype=float)
    n1, n2, _ = up3.shape
    steps = grid
    while _grid_count(n1, steps) * _grid_count(n2, steps) > _GRID_CELL_CAP \
            and steps > 8:
        steps //= 2

    P1 = simplex_grid(n1, steps)
    P2 = simplex_grid(n2, steps)
    vals = _joint_mi_grid(up3, P1, P2)
    a, b = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best_p1, best_p2, best = P1[a].copy(), P2[b].copy(), float(vals[a, b])

    # two rounds of local refinement around the incumbent
    span = 1.0 / steps
    for _ in range(2):
        loc1 = _local_simplex_grid(best_p1, span, steps=10)
        loc2 = _local_simplex_grid(best_p2, span, steps=10)
        vals = _joint_mi_grid(up3, loc1, loc2)
        a, b = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if float(vals[a, b]) > best:
            best, best_p1, best_p2 = float(vals[a, b]), loc1[a], loc2[b]
        span /= 10.0

    # coordinate ascent: each marginal problem is concave
    for _ in range(60):
        p1n, _ = maximize_concave_on_simplex(
            lambda p: _product_mi(up3, p, best_p2), n1)
        p2n, _ = maximize_concave_on_simplex(
            lambda p: _product_mi(up3, p1n, p), n2)
        v = _product_mi(up3, p1n, p2n)
        if v > best:
            best, best_p1, best_p2 = v, p1n, p2n
        else:
            break
    return max(best, 0.0), best_p1, best_p2


def _local_simplex_grid(center: np.ndarray, span: float,
                        steps: int) -> np.ndarray:
    """A small lattice of distributions around `center`, radius ~span."""
    m = center.size
    if m == 2:
        t0 = center[0]
        ts = np.clip(np.linspace(t0 - span, t0 + span, 2 * steps + 1), 0, 1)
        return np.stack([ts, 1.0 - ts], axis=1)
    base = simplex_grid(m, steps)
    centroid = np.full(m, 1.0 / m)
    pts = center[None, :] + (base - centroid[None, :]) * (span * m)
    pts = np.clip(pts, 0, None)
    return pts / pts.sum(axis=1, keepdims=True)
