"""Dithered random linear codes over finite fields: construction,
functional combination, maximum-likelihood decoding of the relay's
target at the relay, Monte Carlo block-error simulation, and the
statistical ensemble tests behind the code construction.

A code maps a message s of k field symbols to the length-n codeword
(s ⊙ G) ⊕ q, with every entry of the generator G and the dither q drawn
independently and uniformly over the field.  Two users share one G but
draw independent dithers, so the symbol-wise sum of their codewords is
again a codeword of the same form with message s1 ⊕ s2 and dither
q1 ⊕ q2 — which is exactly what the relay decodes.

Randomness is counter-based throughout: everything about trial t of a
run keyed by `seed` derives from Philox(key=[seed, t]), so parallel and
serial execution orders produce identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .channel import CondDist, Relabeling, TwrcSpec, induced_u_channel
from .errors import (CandidateCapError, DecodeImpossibleError,
                     InsufficientTrialsError)
from .gf import FieldVec, FiniteField, vec_add

CANDIDATE_CAP = 2 ** 20

# above this many codeword bins the lemma tests fall back to
# per-coordinate statistics
LEMMA_BIN_CAP = 64

CSV_HEADER = "field_order,k,n,rate_bits,trials,block_errors,error_rate,seed"


def _rng(seed: int, counter: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, counter]))


@dataclass(frozen=True)
class LinearCode:
    """A fixed dithered linear code: codeword(s) = (s ⊙ G) ⊕ dither."""

    field: FiniteField
    k: int
    n: int
    G: np.ndarray          # (k, n) field elements
    dither: np.ndarray     # (n,) field elements

    def encode_array(self, s: np.ndarray) -> np.ndarray:
        return _encode_raw(self.field, np.asarray(s), self.G, self.dither)


@dataclass(frozen=True)
class CodePair:
    """Two codes sharing one generator with independent dithers."""

    code1: LinearCode
    code2: LinearCode

    @property
    def field(self) -> FiniteField:
        return self.code1.field

    @property
    def k(self) -> int:
        return self.code1.k

    @property
    def n(self) -> int:
        return self.code1.n

    @property
    def G(self) -> np.ndarray:
        return self.code1.G

    def combined_dither(self) -> np.ndarray:
        f = self.field
        return f.add_table[self.code1.dither, self.code2.dither]


def _encode_raw(f: FiniteField, s: np.ndarray, G: np.ndarray,
                dither: np.ndarray) -> np.ndarray:
    """(s ⊙ G) ⊕ dither for one message or a batch of messages.

    s has shape (k,) or (batch, k); the mod-p shortcut applies to prime
    fields, extension fields go through the tables row by row.
    """
    s = np.atleast_2d(s)
    if s.shape[1] != G.shape[0]:
        raise ValueError(
            f"message length {s.shape[1]} != generator rows {G.shape[0]}")
    if f.z == 1:
        # float matmul goes through BLAS and is exact here:
        # entries are bounded by k(p-1)^2 <= 20*15^2, far below 2^53
        prod = s.astype(np.float64) @ G.astype(np.float64)
        out = (prod + dither[None, :]).astype(np.int64) % f.p
    else:
        out = np.broadcast_to(dither[None, :],
                              (s.shape[0], G.shape[1])).copy()
        for i in range(G.shape[0]):
            out = f.add_table[out, f.mul_table[s[:, i]][:, G[i]]]
    return out if out.shape[0] > 1 else out[0]


def gen_code_pair(field: FiniteField, k: int, n: int, seed: int) -> CodePair:
    """Draw a shared generator and two independent dithers, all entries
    i.i.d. uniform over the field, from the counter-based stream keyed
    by seed.  Rates above capacity are legitimate experiments, so k/n is
    not constrained."""
    if k < 0 or n < 1:
        raise ValueError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    rng = _rng(seed, 0)
    G = rng.integers(0, field.q, size=(k, n), dtype=np.int64)
    q1 = rng.integers(0, field.q, size=n, dtype=np.int64)
    q2 = rng.integers(0, field.q, size=n, dtype=np.int64)
    return CodePair(LinearCode(field, k, n, G, q1),
                    LinearCode(field, k, n, G, q2))


def encode(code: LinearCode, s: FieldVec) -> FieldVec:
    """Codeword of a message: (s ⊙ G) ⊕ dither."""
    if s.field is not code.field:
        raise ValueError("message field differs from the code's field")
    if len(s) != code.k:
        raise ValueError(f"message length {len(s)} != k={code.k}")
    return FieldVec(code.field, code.encode_array(s.symbols))


def functional_combine(pair: CodePair, s1: FieldVec,
                       s2: FieldVec) -> tuple[FieldVec, FieldVec]:
    """The relay's target: message s1 ⊕ s2 and its codeword under the
    combined code (shared G, dither q1 ⊕ q2).

    Verifies the linear-code identity
    encode1(s1) ⊕ encode2(s2) = ((s1 ⊕ s2) ⊙ G) ⊕ (q1 ⊕ q2);
    a violation signals a bug, not bad input.
    """
    f = pair.field
    u_msg = vec_add(s1, s2)
    x1 = encode(pair.code1, s1)
    x2 = encode(pair.code2, s2)
    u_cw = vec_add(x1, x2)
    expect = _encode_raw(f, u_msg.symbols, pair.G, pair.combined_dither())
    assert np.array_equal(u_cw.symbols, expect), \
        "functional-combination identity violated (internal bug)"
    return u_msg, u_cw


def all_messages(q: int, k: int) -> np.ndarray:
    """All q**k messages as a (q**k, k) array in lexicographic order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(q)] * k), indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, k).astype(np.int64)


def _log_channel(u_channel) -> np.ndarray:
    rows = np.asarray(u_channel, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(rows > 0, np.log(np.where(rows > 0, rows, 1.0)),
                        -np.inf)


def _score_candidates(logp: np.ndarray, u_cws: np.ndarray,
                      y3: np.ndarray) -> np.ndarray:
    """Per-candidate log-likelihood sum over positions."""
    if logp.shape[0] == 2 and np.isfinite(logp).all():
        # binary field, all transitions possible: one matvec
        w0 = logp[0, y3]
        w1 = logp[1, y3]
        return w0.sum() + u_cws @ (w1 - w0)
    return logp[u_cws, y3[None, :]].sum(axis=1)


def ml_decode_u(pair: CodePair, y3, u_channel) -> FieldVec:
    """Exhaustive maximum-likelihood decoding of the relay's target
    message from a received sequence, scoring every candidate under the
    per-symbol law p(y3|u) and treating positions as memoryless.

    Ties break to the lexicographically smallest message; zero-
    probability transitions eliminate a candidate, and a received
    sequence impossible under every candidate raises
    DecodeImpossibleError.
    """
    f = pair.field
    if f.q ** pair.k > CANDIDATE_CAP:
        raise CandidateCapError(
            f"q^k = {f.q ** pair.k} exceeds the exhaustive-decoding cap "
            f"{CANDIDATE_CAP}")
    y3 = np.asarray(y3, dtype=np.int64)
    if y3.size != pair.n:
        raise ValueError(f"received length {y3.size} != n={pair.n}")
    logp = _log_channel(u_channel)
    msgs = all_messages(f.q, pair.k)
    u_cws = np.atleast_2d(
        _encode_raw(f, msgs, pair.G, pair.combined_dither()))
    scores = _score_candidates(logp, u_cws, y3)
    best = int(np.argmax(scores))
    if not np.isfinite(scores[best]):
        raise DecodeImpossibleError(
            "received sequence has zero probability under every candidate")
    return FieldVec(f, msgs[best])


# ---------------------------------------------------------------------------
# Monte Carlo block-error simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimReport:
    field_order: int
    k: int
    n: int
    rate_bits: float
    trials: int
    block_errors: int
    error_rate: float
    seed: int

    def csv_row(self) -> str:
        return (f"{self.field_order},{self.k},{self.n},{self.rate_bits!r},"
                f"{self.trials},{self.block_errors},{self.error_rate!r},"
                f"{self.seed}")


def reports_to_csv(reports) -> str:
    lines = [CSV_HEADER]
    lines += [r.csv_row() for r in reports]
    return "\n".join(lines) + "\n"


def simulate_block_errors(spec: TwrcSpec, relabeling: Relabeling, k: int,
                          n: int, trials: int, seed: int,
                          workers: int = 1) -> SimReport:
    """Ensemble block-error rate of functional decoding at the relay.

    Each trial draws a fresh code pair and message pair, pushes the two
    codewords through the uplink position by position, and ML-decodes
    the relay's target from the received block.  A block error is a
    wrong decoded *codeword* (the payload the relay would broadcast);
    messages that collide on one codeword under a rank-deficient G are
    not errors the relay can see.

    Trial t draws everything from Philox(key=[seed, t]), so the result
    is independent of worker count and scheduling.
    """
    f = relabeling.field
    if f.q ** k > CANDIDATE_CAP:
        raise CandidateCapError(
            f"q^k = {f.q ** k} exceeds the exhaustive-decoding cap "
            f"{CANDIDATE_CAP}")
    up3 = spec.uplink3d()
    u_rows = np.asarray(induced_u_channel(spec, relabeling))
    logp = _log_channel(u_rows)
    x1_of = relabeling.x1_index_of_element()
    x2_of = relabeling.x2_index_of_element()
    up_cum = np.cumsum(up3, axis=2)
    msgs = all_messages(f.q, k)

    def run_trial(t: int) -> int:
        rng = _rng(seed, t)
        G = rng.integers(0, f.q, size=(k, n), dtype=np.int64)
        q1 = rng.integers(0, f.q, size=n, dtype=np.int64)
        q2 = rng.integers(0, f.q, size=n, dtype=np.int64)
        s1 = rng.integers(0, f.q, size=k, dtype=np.int64)
        s2 = rng.integers(0, f.q, size=k, dtype=np.int64)
        x1 = np.atleast_1d(_encode_raw(f, s1, G, q1))
        x2 = np.atleast_1d(_encode_raw(f, s2, G, q2))
        u_true = f.add_table[x1, x2]
        # channel acts on the actual input pair, not on u
        cum = up_cum[x1_of[x1], x2_of[x2], :]
        y3 = np.minimum((rng.random(n)[:, None] >= cum).sum(axis=1),
                        up3.shape[2] - 1)
        q3 = f.add_table[q1, q2]
        u_cws = np.atleast_2d(_encode_raw(f, msgs, G, q3))
        scores = _score_candidates(logp, u_cws, y3)
        best = int(np.argmax(scores))
        if not np.isfinite(scores[best]):
            return 1
        return int(not np.array_equal(u_cws[best], u_true))

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as ex:
            errors = sum(ex.map(run_trial, range(trials)))
    else:
        errors = sum(run_trial(t) for t in range(trials))
    rate = k * math.log2(f.q) / n
    return SimReport(field_order=f.q, k=k, n=n, rate_bits=rate,
                     trials=trials, block_errors=errors,
                     error_rate=errors / trials, seed=seed)


# ---------------------------------------------------------------------------
# statistical verification of the code-ensemble properties
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaTestResult:
    name: str
    statistic: float
    dof: int
    p_value: float
    passed: bool


@dataclass(frozen=True)
class LemmaReport:
    field_order: int
    k: int
    n: int
    trials: int
    significance: float
    dither_disabled: bool
    results: tuple

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "field_order": self.field_order, "k": self.k, "n": self.n,
            "trials": self.trials, "significance": self.significance,
            "dither_disabled": self.dither_disabled,
            "all_passed": self.all_passed,
            "results": [{"name": r.name, "statistic": r.statistic,
                         "dof": r.dof, "p_value": r.p_value,
                         "passed": r.passed} for r in self.results],
        }


def _chi2_uniform(counts: np.ndarray, name: str,
                  significance: float) -> LemmaTestResult:
    total = counts.sum()
    cells = counts.size
    expected = total / cells
    if expected < 5:
        raise InsufficientTrialsError(
            f"{name}: expected count per cell {expected:.2f} < 5; "
            f"increase trials (need >= {5 * cells})")
    stat = float(((counts - expected) ** 2 / expected).sum())
    dof = cells - 1
    p = float(chi2.sf(stat, dof))
    return LemmaTestResult(name, stat, dof, p, p >= significance)


def _chi2_independence(table: np.ndarray, name: str,
                       significance: float) -> LemmaTestResult:
    # condition on the observed support: all-zero rows/columns carry no
    # evidence either way (a constant is independent of anything)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    dof = (table.shape[0] - 1) * (table.shape[1] - 1)
    if dof == 0:
        return LemmaTestResult(name, 0.0, 0, 1.0, True)
    total = table.sum()
    row = table.sum(axis=1, keepdims=True)
    col = table.sum(axis=0, keepdims=True)
    expected = row * col / total
    if expected.min() < 5:
        raise InsufficientTrialsError(
            f"{name}: smallest expected cell {expected.min():.2f} < 5; "
            "increase trials")
    stat = float(((table - expected) ** 2 / expected).sum())
    p = float(chi2.sf(stat, dof))
    return LemmaTestResult(name, stat, dof, p, p >= significance)


def _bin_codewords(cw: np.ndarray, q: int) -> np.ndarray:
    """Integer-encode codeword rows base q."""
    weights = q ** np.arange(cw.shape[1] - 1, -1, -1, dtype=np.int64)
    return cw @ weights


def lemma_tests(field: FiniteField, k: int, n: int, trials: int, seed: int,
                significance: float = 1e-3,
                disable_dither: bool = False) -> LemmaReport:
    """Chi-squared checks of the three ensemble properties the code
    construction relies on, at the given significance:

    1. the codeword of a fixed message is uniform over the ensemble;
    2. the codewords of two distinct messages within one code are
       independent;
    3. codewords from the two codes of a pair (shared G, independent
       dithers) are independent.

    The properties are exact, so a sound implementation fails each test
    with probability equal to the significance level.  `disable_dither`
    zeroes both dithers; property 1 then collapses (message 0 always
    maps to the all-zero word), which is the diagnostic demonstrating
    that the dither is essential.

    Codewords are binned jointly when q**n is small enough, otherwise
    the tests pool per-coordinate statistics.
    """
    if k < 1:
        raise ValueError("lemma tests need k >= 1")
    q = field.q
    joint = q ** n <= LEMMA_BIN_CAP

    def draws(counter):
        rng = _rng(seed, counter)
        G = rng.integers(0, q, size=(trials, k, n), dtype=np.int64)
        if disable_dither:
            q1 = np.zeros((trials, n), dtype=np.int64)
            q2 = np.zeros((trials, n), dtype=np.int64)
        else:
            q1 = rng.integers(0, q, size=(trials, n), dtype=np.int64)
            q2 = rng.integers(0, q, size=(trials, n), dtype=np.int64)
        return G, q1, q2

    add = field.add_table
    results = []

    # property 1: fixed message (all-zeros) -> codeword is the dither
    _, q1, _ = draws(1)
    x = q1
    if joint:
        counts = np.bincount(_bin_codewords(x, q), minlength=q ** n)
        results.append(_chi2_uniform(counts, "codeword-uniformity",
                                     significance))
    else:
        counts = np.bincount(x.reshape(-1), minlength=q)
        results.append(_chi2_uniform(counts, "codeword-uniformity/marginal",
                                     significance))

    # property 2: messages 0 and e1 within one code
    G, q1, _ = draws(2)
    xa = q1
    xb = add[G[:, 0, :], q1]
    results.append(_pair_independence(xa, xb, q, joint,
                                      "same-code-independence",
                                      significance))

    # property 3: one codeword from each code of a pair, same message e1
    G, q1, q2 = draws(3)
    xa = add[G[:, 0, :], q1]
    xb = add[G[:, 0, :], q2]
    results.append(_pair_independence(xa, xb, q, joint,
                                      "cross-code-independence",
                                      significance))

    return LemmaReport(field_order=q, k=k, n=n, trials=trials,
                       significance=significance,
                       dither_disabled=disable_dither,
                       results=tuple(results))


def _pair_independence(xa, xb, q, joint, name, significance):
    if joint:
        cells = q ** xa.shape[1]
        ia = _bin_codewords(xa, q)
        ib = _bin_codewords(xb, q)
        table = np.bincount(ia * cells + ib,
                            minlength=cells * cells).reshape(cells, cells)
        return _chi2_independence(table, name, significance)
    ia = xa.reshape(-1)
    ib = xb.reshape(-1)
    table = np.bincount(ia * q + ib, minlength=q * q).reshape(q, q)
    return _chi2_independence(table, f"{name}/marginal", significance)
