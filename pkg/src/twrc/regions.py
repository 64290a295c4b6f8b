"""Evaluators for the four relaying strategies on a TWRC.

Each evaluator returns a StrategyResult holding the per-user rates, the
constituent mutual informations as diagnostics (so tests can pin
intermediate values, not just sums), the achieving parameters, and a
certification tag: "exact-at-tolerance" when the search space was
covered exhaustively, "search-lower-bound" when the reported point is
merely the best found (the product-distribution and quantizer searches
are nonconvex).

Strategies:

* fdf-l  — the relay decodes the field sum U = X1 ⊕ X2 of the users'
  linear codewords; symmetric rate min{I(U;Y3), downlink maximin},
  maximized over all alphabet relabelings/restrictions.
* fdf-s  — uncoded transmissions followed by a linear refinement stage;
  uplink rate C_MAC·log2(q) / (C_MAC + 2·H(U|Y3)).
* cdf    — the relay decodes both messages; multiple-access region on
  the uplink intersected with the broadcast constraints.
* cf     — the relay quantizes Y3 and broadcasts the quantization
  index; randomized-restart search over the auxiliary parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .channel import (Relabeling, TwrcSpec, enumerate_restrictions,
                      induced_u_channel)
from .errors import NoFeasiblePointError, SpecValidationError, TwrcError
from .gf import FIELD_ORDER_CAP
from .infotheory import (DEFAULT_GRID, DEFAULT_TOL, _clip0, _entropy_rows,
                         cond_mutual_info, dmc_capacity, entropy,
                         maximin_downlink, max_product_sum_rate,
                         maximize_concave_on_simplex, mutual_info,
                         simplex_grid, _grid_count, _local_simplex_grid,
                         _GRID_CELL_CAP)

CERT_EXACT = "exact-at-tolerance"
CERT_LOWER = "search-lower-bound"
CERT_FAILED = "failed"

_LN2 = math.log(2.0)

STRATEGIES = ("fdf-l", "fdf-s", "cdf", "cf")

CF_T_SIZE = 4          # auxiliary time-sharing alphabet bound
CF_QUANT_EXTRA = 3     # |quantizer output| <= |Y3| + 3
CF_MARGIN = 1e-9       # strict-inequality margin for the cf constraints


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    r1: float
    r2: float
    sum: float
    diagnostics: dict
    params: dict
    certified: str
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "r1": self.r1,
            "r2": self.r2,
            "sum": self.sum,
            "diagnostics": dict(self.diagnostics),
            "params": dict(self.params),
            "certified": self.certified,
            "error": self.error,
        }


def _result(strategy, r1, r2, diagnostics, params, certified,
            error=None) -> StrategyResult:
    r1 = max(0.0, float(r1))
    r2 = max(0.0, float(r2))
    diags = {}
    for k, v in diagnostics.items():
        if isinstance(v, (bool, int, np.integer)):
            diags[k] = int(v)
        elif isinstance(v, (float, np.floating)):
            diags[k] = max(0.0, float(v))
        else:
            diags[k] = v
    return StrategyResult(strategy=strategy, r1=r1, r2=r2, sum=r1 + r2,
                          diagnostics=diags, params=params,
                          certified=certified, error=error)


@dataclass(frozen=True)
class CompareConfig:
    """Shared knobs for compare_all / the CLI."""

    seed: int = 0
    restarts: int = 500
    grid: int = DEFAULT_GRID
    max_q: int = FIELD_ORDER_CAP
    tol: float = DEFAULT_TOL

    def to_dict(self) -> dict:
        return {"seed": self.seed, "restarts": self.restarts,
                "grid": self.grid, "max_q": self.max_q, "tol": self.tol}


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def _relabeling_scores(spec: TwrcSpec, max_q: int):
    """(relabeling, I(U;Y3)) for every restriction, enumeration order."""
    if spec.x1.size < 2 or spec.x2.size < 2:
        raise SpecValidationError(
            "user alphabets need at least 2 symbols for a field restriction")
    out = []
    for rel in enumerate_restrictions(spec, max_q):
        ch = induced_u_channel(spec, rel)
        q = rel.field.q
        out.append((rel, mutual_info(np.full(q, 1.0 / q), ch)))
    return out


def _downlink(spec: TwrcSpec, tol: float, shared=None):
    return shared if shared is not None else maximin_downlink(spec, tol)


# ---------------------------------------------------------------------------
# functional-decode-forward with linear codes
# ---------------------------------------------------------------------------

def eval_fdf_l(spec: TwrcSpec, max_q: int = FIELD_ORDER_CAP,
               tol: float = DEFAULT_TOL, downlink=None) -> StrategyResult:
    """Symmetric rate min{ max_relabelings I(U;Y3), downlink maximin }."""
    scored = _relabeling_scores(spec, max_q)
    best_rel, best_iu = max(scored, key=lambda t: t[1])
    down_val, p3 = _downlink(spec, tol, downlink)
    rate = min(best_iu, down_val)
    return _result(
        "fdf-l", rate, rate,
        diagnostics={"I_U_Y3": best_iu, "downlink_maximin": down_val,
                     "field_order": best_rel.field.q,
                     "relabelings_searched": len(scored)},
        params={"relabeling": best_rel.describe(),
                "x3_dist": [float(v) for v in p3]},
        certified=CERT_EXACT)


# ---------------------------------------------------------------------------
# functional-decode-forward with systematic computation codes
# ---------------------------------------------------------------------------

def eval_fdf_s(spec: TwrcSpec, max_q: int = FIELD_ORDER_CAP,
               grid: int = DEFAULT_GRID, tol: float = DEFAULT_TOL,
               downlink=None, cmac=None) -> StrategyResult:
    """Uncoded phase + linear refinement: per-user uplink rate
    C_MAC·log2(q) / (C_MAC + 2·H(U|Y3)), capped by the downlink.

    The messages enter the channel uncoded and uniform (W_i = X_i on the
    relabeled subset), so H(U|Y3) = log2(q) − I(U;Y3) and the same
    relabeling search as fdf-l applies; C_MAC is the free maximum
    sum-rate of the uplink as a multiple-access channel.  Rate 0 by
    convention when C_MAC = 0.
    """
    if cmac is None:
        cmac = max_product_sum_rate(spec.uplink3d(), grid, tol)
    c_mac, p1, p2 = cmac
    down_val, p3 = _downlink(spec, tol, downlink)
    best = None
    for rel, i_u in _relabeling_scores(spec, max_q):
        logq = math.log2(rel.field.q)
        h_u = max(0.0, logq - i_u)
        if c_mac <= 0.0:
            up_rate = 0.0
        else:
            up_rate = c_mac * logq / (c_mac + 2.0 * h_u)
        rate = min(up_rate, down_val)
        if best is None or rate > best[0] + 1e-15:
            best = (rate, rel, i_u, h_u)
    rate, rel, i_u, h_u = best
    return _result(
        "fdf-s", rate, rate,
        diagnostics={"C_MAC": c_mac, "H_U_given_Y3": h_u, "I_U_Y3": i_u,
                     "downlink_maximin": down_val,
                     "field_order": rel.field.q},
        params={"relabeling": rel.describe(),
                "x1_dist": [float(v) for v in p1],
                "x2_dist": [float(v) for v in p2],
                "x3_dist": [float(v) for v in p3]},
        certified=CERT_LOWER)


# ---------------------------------------------------------------------------
# complete-decode-forward
# ---------------------------------------------------------------------------

def _downlink_candidates(spec: TwrcSpec, tol: float, downlink=None):
    """A few good p(x3) choices with their (I(X3;Y1), I(X3;Y2)) pairs."""
    ch1, ch2 = spec.downlink_marginals()
    down_val, p3_star = _downlink(spec, tol, downlink)
    _, p3_1 = dmc_capacity(ch1, tol)
    _, p3_2 = dmc_capacity(ch2, tol)
    cands = []
    for p in (p3_star, p3_1, p3_2):
        cands.append((mutual_info(p, ch1), mutual_info(p, ch2), p))
    return down_val, cands


def _cdf_objective_grids(up3, P1, P2):
    """Vectorized (A, B, c) = (I(X1;Y3|X2), I(X2;Y3|X1), I(X1,X2;Y3))
    for every pair of grid marginals."""
    h_rows = _entropy_rows(up3)                        # (n1, n2)
    m2 = np.einsum("ai,ijy->ajy", P1, up3)             # p(y|x2) per P1 row
    h_y_x2 = np.einsum("bj,aj->ab", P2, _entropy_rows(m2))
    m1 = np.einsum("bj,ijy->biy", P2, up3)             # p(y|x1) per P2 row
    h_y_x1 = np.einsum("ai,bi->ab", P1, _entropy_rows(m1))
    py = np.einsum("ajy,bj->aby", m2, P2)
    h_y = _entropy_rows(py)
    h_cond = np.einsum("ai,bj,ij->ab", P1, P2, h_rows)
    return h_y_x2 - h_cond, h_y_x1 - h_cond, h_y - h_cond


def _cdf_point(up3, p1, p2):
    """(A, B, c) at a single product distribution."""
    p1 = np.asarray(p1, float)
    p2 = np.asarray(p2, float)
    A, B, c = _cdf_objective_grids(up3, p1[None, :], p2[None, :])
    return float(A[0, 0]), float(B[0, 0]), float(c[0, 0])


def _best_p3_for(spec, A, B, cands, tol):
    """Exact inner maximization of min(A, I(X3;Y2)) + min(B, I(X3;Y1))
    over p(x3); concave, so golden section / ascent suffices."""
    ch1, ch2 = spec.downlink_marginals()

    def g(p):
        return (min(A, mutual_info(p, ch2))
                + min(B, mutual_info(p, ch1)))

    m = ch1.shape[0]
    p_best, v_best = max(((np.asarray(p), g(p)) for *_ignored, p in cands),
                         key=lambda t: t[1])
    p_opt, v_opt = maximize_concave_on_simplex(g, m, starts=[p_best])
    if v_opt > v_best:
        return p_opt, v_opt
    return p_best, v_best


def eval_cdf(spec: TwrcSpec, grid: int = DEFAULT_GRID,
             tol: float = DEFAULT_TOL, downlink=None) -> StrategyResult:
    """Complete-decode-forward: for fixed p(x1)p(x2), p(x3) the maximal
    sum rate is min{a + b, c} with a = min{I(X1;Y3|X2), I(X3;Y2)},
    b = min{I(X2;Y3|X1), I(X3;Y1)}, c = I(X1,X2;Y3).

    Grid + coordinate ascent over the product input distributions; the
    relay distribution is chosen by the same concave maximin machinery,
    evaluated as needed.  The (r1, r2) split of the optimal sum breaks
    ties toward r1 = r2.
    """
    up3 = spec.uplink3d()
    n1, n2, _ = up3.shape
    down_val, cands = _downlink_candidates(spec, tol, downlink)

    steps = grid
    while _grid_count(n1, steps) * _grid_count(n2, steps) > _GRID_CELL_CAP \
            and steps > 8:
        steps //= 2
    P1 = simplex_grid(n1, steps)
    P2 = simplex_grid(n2, steps)
    A, B, c = _cdf_objective_grids(up3, P1, P2)
    obj = None
    for i1, i2, _p in cands:
        cur = np.minimum(np.minimum(A, i2) + np.minimum(B, i1), c)
        obj = cur if obj is None else np.maximum(obj, cur)
    ai, bi = np.unravel_index(int(np.argmax(obj)), obj.shape)
    p1, p2 = P1[ai].copy(), P2[bi].copy()

    # local refinement around the incumbent cell
    span = 1.0 / steps
    best_val = float(obj[ai, bi])
    for _ in range(2):
        L1 = _local_simplex_grid(p1, span, steps=10)
        L2 = _local_simplex_grid(p2, span, steps=10)
        A_, B_, c_ = _cdf_objective_grids(up3, L1, L2)
        o = None
        for i1, i2, _p in cands:
            cur = np.minimum(np.minimum(A_, i2) + np.minimum(B_, i1), c_)
            o = cur if o is None else np.maximum(o, cur)
        la, lb = np.unravel_index(int(np.argmax(o)), o.shape)
        if float(o[la, lb]) > best_val:
            best_val, p1, p2 = float(o[la, lb]), L1[la], L2[lb]
        span /= 10.0

    # alternate: exact p3 for the incumbent caps, then ascend p1 / p2
    for _ in range(5):
        A0, B0, c0 = _cdf_point(up3, p1, p2)
        p3, _g = _best_p3_for(spec, A0, B0, cands, tol)
        ch1, ch2 = spec.downlink_marginals()
        i1c, i2c = mutual_info(p3, ch1), mutual_info(p3, ch2)

        def f1(p, _p2=p2, _i1=i1c, _i2=i2c):
            a, b, cc = _cdf_point(up3, p, _p2)
            return min(min(a, _i2) + min(b, _i1), cc)

        p1n, _ = maximize_concave_on_simplex(f1, n1, starts=[p1])

        def f2(p, _p1=p1n, _i1=i1c, _i2=i2c):
            a, b, cc = _cdf_point(up3, _p1, p)
            return min(min(a, _i2) + min(b, _i1), cc)

        p2n, v2 = maximize_concave_on_simplex(f2, n2, starts=[p2])
        if v2 > best_val + tol * 1e-2:
            best_val, p1, p2 = v2, p1n, p2n
        else:
            break

    A0, B0, c0 = _cdf_point(up3, p1, p2)
    p3, _ = _best_p3_for(spec, A0, B0, cands, tol)
    ch1, ch2 = spec.downlink_marginals()
    i1c, i2c = mutual_info(p3, ch1), mutual_info(p3, ch2)
    a_cap = min(A0, i2c)
    b_cap = min(B0, i1c)
    total = max(0.0, min(a_cap + b_cap, c0))
    # split ties toward equality within the per-user caps
    r1 = min(a_cap, max(total - b_cap, total / 2.0))
    r2 = total - r1
    return _result(
        "cdf", r1, r2,
        diagnostics={"I_X1_Y3_given_X2": A0, "I_X2_Y3_given_X1": B0,
                     "I_X1X2_Y3": c0, "I_X3_Y1": i1c, "I_X3_Y2": i2c,
                     "downlink_maximin": down_val},
        params={"x1_dist": [float(v) for v in p1],
                "x2_dist": [float(v) for v in p2],
                "x3_dist": [float(v) for v in p3]},
        certified=CERT_LOWER)


# ---------------------------------------------------------------------------
# compress-forward
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CfParams:
    """Auxiliary parameters of a compress-forward operating point."""

    t_dist: tuple
    x1_given_t: tuple
    x2_given_t: tuple
    quantizer: tuple        # |Y3| rows over the quantizer output alphabet
    x3_dist: tuple

    def __post_init__(self):
        if len(self.t_dist) > CF_T_SIZE:
            raise SpecValidationError(
                f"|T| must be <= {CF_T_SIZE}, got {len(self.t_dist)}")
        ny = len(self.quantizer)
        nyh = len(self.quantizer[0])
        if nyh > ny + CF_QUANT_EXTRA:
            raise SpecValidationError(
                f"quantizer output alphabet must be <= |Y3|+{CF_QUANT_EXTRA}")

    def to_dict(self) -> dict:
        return {
            "t_dist": [float(v) for v in self.t_dist],
            "x1_given_t": [[float(v) for v in r] for r in self.x1_given_t],
            "x2_given_t": [[float(v) for v in r] for r in self.x2_given_t],
            "quantizer": [[float(v) for v in r] for r in self.quantizer],
            "x3_dist": [float(v) for v in self.x3_dist],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CfParams":
        return cls(t_dist=tuple(d["t_dist"]),
                   x1_given_t=tuple(tuple(r) for r in d["x1_given_t"]),
                   x2_given_t=tuple(tuple(r) for r in d["x2_given_t"]),
                   quantizer=tuple(tuple(r) for r in d["quantizer"]),
                   x3_dist=tuple(d["x3_dist"]))


def _H(a) -> float:
    """Entropy of a joint array of any shape, in bits."""
    return float(-xlogy(a, a).sum() / _LN2)


def cf_measures(spec: TwrcSpec, t_dist, x1_t, x2_t, quant):
    """(I(X1;Yh|X2,T), I(X2;Yh|X1,T), I(Y3;Yh|X1,T), I(Y3;Yh|X2,T))
    for the joint p(t)p(x1|t)p(x2|t)p(y3|x1,x2)p(yh|y3).

    Every conditional mutual information reduces to four joint
    entropies; the marginal entropies shared between the four measures
    are computed once (this sits in the innermost loop of the cf
    search).
    """
    up3 = spec.uplink3d()
    t_dist = np.asarray(t_dist, float)
    x1_t = np.asarray(x1_t, float)
    x2_t = np.asarray(x2_t, float)
    quant = np.asarray(quant, float)
    w = t_dist[:, None, None] * x1_t[:, :, None] * x2_t[:, None, :]
    uq = np.tensordot(up3, quant, axes=(2, 0))           # (x1, x2, yh)
    m = w[:, :, :, None] * uq[None]                      # (t, x1, x2, yh)
    a1 = (w[:, :, :, None] * up3[None]).sum(axis=2)      # (t, x1, y3)
    a2 = (w[:, :, :, None] * up3[None]).sum(axis=1)      # (t, x2, y3)
    jy1 = a1[..., None] * quant[None, None]              # (t, x1, y3, yh)
    jy2 = a2[..., None] * quant[None, None]              # (t, x2, y3, yh)
    h_w = _H(w)
    h_m = _H(m)
    h_m1 = _H(m.sum(axis=2))       # (t, x1, yh)
    h_m2 = _H(m.sum(axis=1))       # (t, x2, yh)
    h_w1 = _H(w.sum(axis=2))       # (t, x1)
    h_w2 = _H(w.sum(axis=1))       # (t, x2)
    i1 = _clip0(h_w + h_m2 - h_m - h_w2)
    i2 = _clip0(h_w + h_m1 - h_m - h_w1)
    c1 = _clip0(_H(a1) + h_m1 - _H(jy1) - h_w1)
    c2 = _clip0(_H(a2) + h_m2 - _H(jy2) - h_w2)
    return i1, i2, c1, c2


def cf_check_feasible(spec: TwrcSpec, params: CfParams,
                      margin: float = CF_MARGIN):
    """Re-verify a returned operating point from scratch.

    Returns (feasible, measures-dict); used by tests and by eval_cf's own
    post-check.
    """
    t = np.asarray(params.t_dist, float)
    x1_t = np.asarray(params.x1_given_t, float)
    x2_t = np.asarray(params.x2_given_t, float)
    quant = np.asarray(params.quantizer, float)
    p3 = np.asarray(params.x3_dist, float)
    i1, i2, c1, c2 = cf_measures(spec, t, x1_t, x2_t, quant)
    ch1, ch2 = spec.downlink_marginals()
    d1 = mutual_info(p3, ch1)
    d2 = mutual_info(p3, ch2)
    feasible = (c1 + margin <= d1) and (c2 + margin <= d2)
    return feasible, {"I_X1_Yh_given_X2T": i1, "I_X2_Yh_given_X1T": i2,
                      "I_Y3_Yh_given_X1T": c1, "I_Y3_Yh_given_X2T": c2,
                      "I_X3_Y1": d1, "I_X3_Y2": d2}


def _cf_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, restart]))


def eval_cf(spec: TwrcSpec, restarts: int = 500, seed: int = 0,
            margin: float = CF_MARGIN, tol: float = DEFAULT_TOL,
            downlink=None) -> StrategyResult:
    """Compress-forward via randomized-restart hill climbing.

    Each restart samples the auxiliary parameters from Dirichlet(1) on
    each simplex, repairs constraint violations by blending the
    quantizer toward a constant map, then hill-climbs one conditional
    row at a time with a geometric step schedule (0.5 down to 1e-4).
    Both compression constraints are enforced as strict inequalities
    with the given margin against the best of a small set of relay
    input distributions (maximin and the two per-link capacity
    achievers).  Always certified as a search lower bound: the objective
    is nonconvex, so the result is an inner point of the region, never a
    proof of its maximum.

    Raises NoFeasiblePointError when no restart yields any feasible
    point (e.g. zero-capacity downlink, where even a constant quantizer
    violates the strict inequality).
    """
    down_val, cands = _downlink_candidates(spec, tol, downlink)
    link_pairs = [(i1, i2) for i1, i2, _ in cands]
    p3s = [np.asarray(p, float) for _, _, p in cands]

    def support(c1, c2):
        """Best candidate p(x3) slack for constraint left sides c1, c2."""
        best_slack, best_idx = -np.inf, 0
        for idx, (i1, i2) in enumerate(link_pairs):
            slack = min(i1 - c1, i2 - c2)
            if slack > best_slack:
                best_slack, best_idx = slack, idx
        return best_slack, best_idx

    if support(0.0, 0.0)[0] < margin:
        raise NoFeasiblePointError(
            "compress-forward has no feasible point: the strict "
            "compression constraints cannot be met even by a constant "
            "quantizer (downlink supports no positive rate)")

    up3 = spec.uplink3d()
    ny = spec.y3.size
    n1, n2 = spec.x1.size, spec.x2.size
    nyh = ny + CF_QUANT_EXTRA
    const_quant = np.zeros((ny, nyh))
    const_quant[:, 0] = 1.0

    def measures(t, x1_t, x2_t, quant):
        return cf_measures(spec, t, x1_t, x2_t, quant)

    def repair(t, x1_t, x2_t, quant):
        """Blend the quantizer toward constant until feasible."""
        i1, i2, c1, c2 = measures(t, x1_t, x2_t, quant)
        if support(c1, c2)[0] >= margin:
            return quant, (i1, i2, c1, c2)
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            q = (1 - mid) * quant + mid * const_quant
            i1, i2, c1, c2 = measures(t, x1_t, x2_t, q)
            if support(c1, c2)[0] >= margin:
                hi = mid
            else:
                lo = mid
        q = (1 - hi) * quant + hi * const_quant
        return q, measures(t, x1_t, x2_t, q)

    best = None  # (objective, restart, params tuple, measures)
    for restart in range(restarts):
        rng = _cf_rng(seed, restart)
        t = rng.dirichlet(np.ones(CF_T_SIZE))
        x1_t = rng.dirichlet(np.ones(n1), size=CF_T_SIZE)
        x2_t = rng.dirichlet(np.ones(n2), size=CF_T_SIZE)
        quant = rng.dirichlet(np.ones(nyh), size=ny)
        quant, (i1, i2, c1, c2) = repair(t, x1_t, x2_t, quant)
        cur_obj = i1 + i2

        blocks = ([("t", None)]
                  + [("x1", r) for r in range(CF_T_SIZE)]
                  + [("x2", r) for r in range(CF_T_SIZE)]
                  + [("q", r) for r in range(ny)])
        sigma = 0.5
        passes_left = 3
        while sigma >= 1e-4:
            improved = False
            for kind, row in blocks:
                for _ in range(2):
                    d_t, d_x1, d_x2, d_q = t, x1_t, x2_t, quant
                    if kind == "t":
                        w = rng.dirichlet(np.ones(CF_T_SIZE))
                        d_t = (1 - sigma) * t + sigma * w
                    elif kind == "x1":
                        w = rng.dirichlet(np.ones(n1))
                        d_x1 = x1_t.copy()
                        d_x1[row] = (1 - sigma) * x1_t[row] + sigma * w
                    elif kind == "x2":
                        w = rng.dirichlet(np.ones(n2))
                        d_x2 = x2_t.copy()
                        d_x2[row] = (1 - sigma) * x2_t[row] + sigma * w
                    else:
                        w = rng.dirichlet(np.ones(nyh))
                        d_q = quant.copy()
                        d_q[row] = (1 - sigma) * quant[row] + sigma * w
                    m1, m2, mc1, mc2 = measures(d_t, d_x1, d_x2, d_q)
                    if support(mc1, mc2)[0] < margin:
                        continue
                    if m1 + m2 > cur_obj + 1e-12:
                        t, x1_t, x2_t, quant = d_t, d_x1, d_x2, d_q
                        i1, i2, c1, c2 = m1, m2, mc1, mc2
                        cur_obj = m1 + m2
                        improved = True
            if improved and passes_left > 0:
                passes_left -= 1
            else:
                sigma *= 0.5
                passes_left = 3

        if best is None or cur_obj > best[0] + 1e-15:
            _, idx = support(c1, c2)
            params = CfParams(
                t_dist=tuple(float(v) for v in t),
                x1_given_t=tuple(tuple(float(v) for v in r) for r in x1_t),
                x2_given_t=tuple(tuple(float(v) for v in r) for r in x2_t),
                quantizer=tuple(tuple(float(v) for v in r) for r in quant),
                x3_dist=tuple(float(v) for v in p3s[idx]))
            best = (cur_obj, restart, params, (i1, i2, c1, c2))

    if best is None:
        raise NoFeasiblePointError(
            "compress-forward search found no feasible point in any restart")

    obj, restart, params, (i1, i2, c1, c2) = best
    feasible, diag = cf_check_feasible(spec, params, margin)
    if not feasible:
        raise NoFeasiblePointError(
            "internal error: best compress-forward point failed "
            "re-verification")
    diag.update({"downlink_maximin": down_val, "best_restart": restart,
                 "restarts": restarts, "seed": seed})
    return _result("cf", i1, i2, diagnostics=diag,
                   params={"cf": params.to_dict()}, certified=CERT_LOWER)


# ---------------------------------------------------------------------------
# run everything
# ---------------------------------------------------------------------------

def compare_all(spec: TwrcSpec,
                config: CompareConfig | None = None) -> list[StrategyResult]:
    """Evaluate all four strategies, sharing the downlink maximin.

    Per-strategy failures (e.g. an infeasible compress-forward problem)
    are captured as zero-rate results with the error recorded, so the
    remaining strategies still report.  Deterministic for a given
    config.
    """
    cfg = config or CompareConfig()
    shared_down = maximin_downlink(spec, cfg.tol)
    jobs = [
        ("fdf-l", lambda: eval_fdf_l(spec, cfg.max_q, cfg.tol,
                                     downlink=shared_down)),
        ("fdf-s", lambda: eval_fdf_s(spec, cfg.max_q, cfg.grid, cfg.tol,
                                     downlink=shared_down)),
        ("cdf", lambda: eval_cdf(spec, cfg.grid, cfg.tol,
                                 downlink=shared_down)),
        ("cf", lambda: eval_cf(spec, cfg.restarts, cfg.seed,
                               tol=cfg.tol, downlink=shared_down)),
    ]
    results = []
    for name, job in jobs:
        try:
            results.append(job())
        except TwrcError as e:
            results.append(_result(name, 0.0, 0.0, diagnostics={},
                                   params={}, certified=CERT_FAILED,
                                   error=f"{type(e).__name__}: {e}"))
    return results
