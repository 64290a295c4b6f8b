"""Data model, validation and file format for discrete memoryless
two-way relay channels (TWRCs).

A TWRC is two users exchanging messages through a relay with no direct
link: an uplink p(y3|x1,x2) into the relay and a broadcast downlink
p(y1,y2|x3) back out.  The downlink is stored as the joint over
(y1,y2); per-user marginal channels are derived on demand.

The file format is JSON:

    {
      "name": "...",
      "alphabets": {"x1": [...], "x2": [...], "x3": [...],
                    "y1": [...], "y2": [...], "y3": [...]},
      "uplink":   [[...], ...],   # |X1|*|X2| rows over Y3, row-major
                                  # in (x1, x2) with x2 varying fastest
      "downlink": [[...], ...]    # |X3| rows over (y1, y2) pairs,
                                  # y2 varying fastest
    }

Row sums are checked to PROB_TOL and then renormalized exactly;
anything further off is rejected (silent renormalization hides
authoring errors).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import (EnumerationRefusedError, SpecParseError,
                     SpecValidationError)
from .gf import FIELD_ORDER_CAP, FiniteField, field_for_order, is_prime_power

PROB_TOL = 1e-9

# Exhaustive restriction enumeration is refused above this alphabet size
# rather than silently switching to a heuristic.
ENUM_ALPHABET_CAP = 6


@dataclass(frozen=True)
class Alphabet:
    """An ordered list of distinct symbol names."""

    labels: tuple

    def __post_init__(self):
        if len(self.labels) < 1:
            raise SpecValidationError("alphabet must have at least 1 symbol")
        if len(set(map(str, self.labels))) != len(self.labels):
            raise SpecValidationError(
                f"alphabet labels must be distinct, got {list(self.labels)}")

    @property
    def size(self) -> int:
        return len(self.labels)


class ProbVec:
    """A validated probability vector (entries >= 0, sum within PROB_TOL
    of 1, renormalized exactly after the check)."""

    __slots__ = ("probs",)

    def __init__(self, probs, where: str = "probability vector"):
        arr = np.asarray(probs, dtype=float).reshape(-1)
        if arr.size == 0:
            raise SpecValidationError(f"{where}: empty")
        if np.any(arr < 0):
            raise SpecValidationError(
                f"{where}: negative probability {arr.min():g}")
        s = float(arr.sum())
        if abs(s - 1.0) > PROB_TOL:
            raise SpecValidationError(f"{where}: probabilities sum to {s!r}")
        arr = arr / s
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __len__(self):
        return int(self.probs.size)

    def __repr__(self):
        return f"ProbVec({self.probs.tolist()})"


class CondDist:
    """A row-stochastic matrix: one ProbVec per input symbol."""

    __slots__ = ("rows",)

    def __init__(self, rows, where: str = "conditional distribution",
                 row_name=None):
        arr = np.asarray(rows, dtype=float)
        if arr.ndim != 2:
            raise SpecValidationError(f"{where}: expected a matrix of rows")
        out = np.empty_like(arr)
        for i in range(arr.shape[0]):
            label = row_name(i) if row_name else f"row {i}"
            out[i] = ProbVec(arr[i], where=f"{where} {label}").probs
        out.setflags(write=False)
        object.__setattr__(self, "rows", out)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.rows, dtype=dtype)

    @property
    def shape(self):
        return self.rows.shape

    def __repr__(self):
        return f"CondDist({self.rows.shape[0]}x{self.rows.shape[1]})"


@dataclass(frozen=True)
class TwrcSpec:
    """A validated two-way relay channel."""

    name: str
    x1: Alphabet
    x2: Alphabet
    x3: Alphabet
    y1: Alphabet
    y2: Alphabet
    y3: Alphabet
    uplink: CondDist      # |X1|*|X2| rows (x2 fastest) over Y3
    downlink: CondDist    # |X3| rows over (y1, y2) pairs (y2 fastest)

    def __post_init__(self):
        want_up = (self.x1.size * self.x2.size, self.y3.size)
        if self.uplink.shape != want_up:
            raise SpecValidationError(
                f"uplink shape {self.uplink.shape} != {want_up} implied by "
                "alphabets")
        want_down = (self.x3.size, self.y1.size * self.y2.size)
        if self.downlink.shape != want_down:
            raise SpecValidationError(
                f"downlink shape {self.downlink.shape} != {want_down} "
                "implied by alphabets")

    # -- derived views ------------------------------------------------------

    def uplink3d(self) -> np.ndarray:
        """Uplink as an array indexed [x1, x2, y3]."""
        return np.asarray(self.uplink).reshape(
            self.x1.size, self.x2.size, self.y3.size)

    def downlink3d(self) -> np.ndarray:
        """Downlink as an array indexed [x3, y1, y2]."""
        return np.asarray(self.downlink).reshape(
            self.x3.size, self.y1.size, self.y2.size)

    def downlink_marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-user marginal channels (p(y1|x3), p(y2|x3))."""
        j = self.downlink3d()
        return j.sum(axis=2), j.sum(axis=1)


def spec_from_dict(doc: dict, where: str = "channel document") -> TwrcSpec:
    if not isinstance(doc, dict):
        raise SpecParseError(f"{where}: top level must be an object")
    try:
        alph = doc["alphabets"]
        uplink = doc["uplink"]
        downlink = doc["downlink"]
    except (KeyError, TypeError) as e:
        raise SpecParseError(f"{where}: missing field {e}") from None
    name = str(doc.get("name", "unnamed"))
    try:
        alphabets = {k: Alphabet(tuple(alph[k]))
                     for k in ("x1", "x2", "x3", "y1", "y2", "y3")}
    except KeyError as e:
        raise SpecParseError(f"{where}: missing alphabet {e}") from None
    n2 = alphabets["x2"].size

    def up_row(i):
        return f"row {i} (x1={alphabets['x1'].labels[i // n2]}, " \
               f"x2={alphabets['x2'].labels[i % n2]})"

    def down_row(i):
        return f"row {i} (x3={alphabets['x3'].labels[i]})"

    def as_matrix(rows, label):
        try:
            return [[float(v) for v in row] for row in rows]
        except (TypeError, ValueError) as e:
            raise SpecParseError(
                f"{where}: {label} contains a non-numeric entry ({e})"
            ) from None

    up = CondDist(as_matrix(uplink, "uplink"), where=f"{where}: uplink",
                  row_name=up_row)
    down = CondDist(as_matrix(downlink, "downlink"),
                    where=f"{where}: downlink", row_name=down_row)
    return TwrcSpec(name=name, uplink=up, downlink=down, **alphabets)


def parse_spec(text: str) -> TwrcSpec:
    """Parse and validate a channel document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(f"malformed channel document: {e}") from None
    return spec_from_dict(doc)


def load_spec(path) -> TwrcSpec:
    """Read and validate a channel document from a file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(f"{path}: malformed channel document: {e}") \
            from None
    return spec_from_dict(doc, where=str(path))


# ---------------------------------------------------------------------------
# relabelings: mapping user alphabets (or subsets) onto field elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Relabeling:
    """A choice of equal-size subsets of the two user alphabets and
    bijections from those subsets onto the elements of a finite field.

    subset1/subset2 hold alphabet indices (sorted); pi1[j] is the field
    element assigned to subset1[j], likewise pi2.
    """

    field: FiniteField
    subset1: tuple
    subset2: tuple
    pi1: tuple
    pi2: tuple

    def __post_init__(self):
        q = self.field.q
        if not (len(self.subset1) == len(self.subset2) == q):
            raise SpecValidationError(
                f"subsets must have exactly {q} symbols")
        for pi in (self.pi1, self.pi2):
            if sorted(pi) != list(range(q)):
                raise SpecValidationError(
                    "pi maps must be bijections onto the field elements")

    def x1_index_of_element(self) -> np.ndarray:
        """Array mapping field element -> x1 alphabet index."""
        out = np.empty(self.field.q, dtype=np.int64)
        for j, e in enumerate(self.pi1):
            out[e] = self.subset1[j]
        return out

    def x2_index_of_element(self) -> np.ndarray:
        out = np.empty(self.field.q, dtype=np.int64)
        for j, e in enumerate(self.pi2):
            out[e] = self.subset2[j]
        return out

    def describe(self) -> dict:
        """JSON-friendly description (used in result reports)."""
        return {
            "field_order": self.field.q,
            "subset1": list(self.subset1),
            "subset2": list(self.subset2),
            "pi1": list(self.pi1),
            "pi2": list(self.pi2),
        }


def identity_relabeling(spec: TwrcSpec, q: int | None = None) -> Relabeling:
    """The identity relabeling on the first q symbols of each alphabet."""
    if q is None:
        q = min(spec.x1.size, spec.x2.size)
    f = field_for_order(q)
    ids = tuple(range(q))
    return Relabeling(f, ids, ids, ids, ids)


def induced_u_channel(spec: TwrcSpec, r: Relabeling) -> CondDist:
    """The conditional law p(y3|u) of the relay's target U = X1 ⊕ X2
    under uniform, independent inputs on the relabeled subsets.

    Row u is the average over the q input pairs (x1, x2) whose field
    images sum to u, i.e. q times the joint p(u, y3); U itself is
    uniform because for each u and each x1 exactly one x2 matches.
    """
    q = r.field.q
    if max(r.subset1) >= spec.x1.size or max(r.subset2) >= spec.x2.size:
        raise SpecValidationError(
            "relabeling subsets exceed the channel alphabets")
    up = spec.uplink3d()
    x1_of = r.x1_index_of_element()
    x2_of = r.x2_index_of_element()
    sub = r.field.add_table[:, r.field.neg_table]  # sub[a, b] = a - b
    rows = np.zeros((q, spec.y3.size))
    for e1 in range(q):
        e2 = sub[np.arange(q), e1]  # u - e1 for each u
        rows += up[x1_of[e1], x2_of[e2], :]
    return CondDist(rows / q, where="induced U-channel")


def canonical_map_pair(field: FiniteField, pi1: tuple, pi2: tuple) -> tuple:
    """Canonical representative of (pi1, pi2) under the affine group that
    leaves I(U;Y3) invariant.

    Composing pi1 with x ↦ (a⊙x)⊕b1 and pi2 with x ↦ (a⊙x)⊕b2 (same
    nonzero a, independent offsets) turns U into (a⊙U)⊕(b1⊕b2), a
    bijective relabeling of U, so all information measures of the
    induced channel are unchanged.  The canonical form has pi1[0]=0,
    pi1[1]=1 and pi2[0]=0.
    """
    f = field
    a = f.inv(f.sub(pi1[1], pi1[0]))
    b1 = f.neg(f.mul(a, pi1[0]))
    b2 = f.neg(f.mul(a, pi2[0]))
    c1 = tuple(f.add(f.mul(a, e), b1) for e in pi1)
    c2 = tuple(f.add(f.mul(a, e), b2) for e in pi2)
    return c1, c2


def _map_pairs(q: int, field: FiniteField, dedup: bool):
    """Bijection pairs (pi1, pi2) onto GF(q), one per affine class when
    dedup is set."""
    if not dedup:
        for pi1 in itertools.permutations(range(q)):
            for pi2 in itertools.permutations(range(q)):
                yield pi1, pi2
        return
    rest1 = list(range(2, q))
    rest2 = list(range(1, q))
    for tail1 in itertools.permutations(rest1):
        pi1 = (0, 1) + tail1 if q >= 2 else (0,)
        for tail2 in itertools.permutations(rest2):
            pi2 = (0,) + tail2
            yield pi1, pi2


def enumerate_restrictions(spec: TwrcSpec, max_q: int = FIELD_ORDER_CAP,
                           dedup: bool = True) -> list[Relabeling]:
    """All ways of restricting the user alphabets to equal prime-power
    size q <= max_q and mapping them onto GF(q).

    With dedup (the default) relabelings that provably induce the same
    I(U;Y3) — related by the affine group of canonical_map_pair — appear
    once.  Enumeration is exhaustive and is refused for alphabets larger
    than ENUM_ALPHABET_CAP.
    """
    n1, n2 = spec.x1.size, spec.x2.size
    if max(n1, n2) > ENUM_ALPHABET_CAP:
        raise EnumerationRefusedError(
            f"restriction enumeration is exhaustive only for alphabets of "
            f"size <= {ENUM_ALPHABET_CAP}; got |X1|={n1}, |X2|={n2}")
    out: list[Relabeling] = []
    top = min(n1, n2, max_q, FIELD_ORDER_CAP)
    for q in range(2, top + 1):
        if not is_prime_power(q):
            continue
        f = field_for_order(q)
        for subset1 in itertools.combinations(range(n1), q):
            for subset2 in itertools.combinations(range(n2), q):
                for pi1, pi2 in _map_pairs(q, f, dedup):
                    out.append(Relabeling(f, subset1, subset2, pi1, pi2))
    return out
