"""Latin squares of order 2^d, parastrophes, e/d string transformations,
multivariate-quadratic classification, and the randomized MQQ(d, k) search.

Element bits follow the big-endian convention: element a of order 2^d is the
string x1..xd with x1 its most significant bit.  A quasigroup's vector-valued
Boolean function therefore has 2d variables, x1..xd from the left operand and
x(d+1)..x(2d) from the right.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import anf
from .gf2 import BitMatrix, rank, seed_int

_D = 5  # quasigroup order 2^5 used by the cipher


def _bitrev(v: int, width: int) -> int:
    out = 0
    for i in range(width):
        out |= ((v >> i) & 1) << (width - 1 - i)
    return out


_REV5 = tuple(_bitrev(a, 5) for a in range(32))

# Affine-form masks over d local variables: bits 0..d-1 are coefficients of
# x1..xd, bit d is the constant term.  A form's evaluation word has bit t set
# when the form is 1 at the assignment with variable i equal to bit i-1 of t.


def _form_words(nvars: int):
    na = 1 << nvars
    allw = (1 << na) - 1
    var_words = [sum(((t >> i) & 1) << t for t in range(na)) for i in range(nvars)]
    words = []
    for mask in range(1 << (nvars + 1)):
        w = allw if mask >> nvars & 1 else 0
        rest = mask & ((1 << nvars) - 1)
        while rest:
            i = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            w ^= var_words[i]
        words.append(w)
    return words, allw


_FORM_WORDS5, _ALL32 = _form_words(5)
_FORM_WORDS5_NP = np.array(_FORM_WORDS5, dtype=np.uint64)
_SUBSETS5 = sorted(range(1, 32), key=lambda s: (bin(s).count("1"), s))
_SU_ROW_MASK = np.array([0b11110, 0b11100, 0b11000, 0b10000, 0], dtype=np.uint8)


def validate_latin(table: Sequence[Sequence[int]]) -> bool:
    """True when every row and every column is a permutation of 0..n-1."""
    n = len(table)
    full = frozenset(range(n))
    for row in table:
        if len(row) != n or set(row) != full:
            return False
    for j in range(n):
        if {row[j] for row in table} != full:
            return False
    return True


def left_parastrophe(table: Sequence[Sequence[int]]) -> tuple:
    """lpar[a][b] is the unique x with a * x = b."""
    n = len(table)
    out = [[0] * n for _ in range(n)]
    for a in range(n):
        row = table[a]
        dst = out[a]
        for x in range(n):
            dst[row[x]] = x
    return tuple(map(tuple, out))


class Quasigroup:
    """Order-2^d Latin square with its left parastrophe and coordinate ANFs."""

    def __init__(self, table: Sequence[Sequence[int]], validate: bool = True):
        n = len(table)
        d = n.bit_length() - 1
        if n != 1 << d or d < 1:
            raise ValueError("order must be a power of two")
        if validate and not validate_latin(table):
            raise ValueError("table is not a Latin square")
        self.d = d
        self.order = n
        self.table = tuple(map(tuple, table))
        self._lpar = None
        self._vvbf = None
        self._mqq_class = None

    @property
    def lpar(self) -> tuple:
        if self._lpar is None:
            self._lpar = left_parastrophe(self.table)
        return self._lpar

    @property
    def vvbf(self) -> tuple:
        if self._vvbf is None:
            self._vvbf = to_vvbf(self)
        return self._vvbf

    @property
    def mqq_class(self) -> "MqqClass":
        if self._mqq_class is None:
            self._mqq_class = classify(self)
        return self._mqq_class

    def apply(self, a: int, b: int) -> int:
        return self.table[a][b]

    def to_bytes(self) -> bytes:
        """Cayley table then parastrophe table, one entry per byte (order 32)."""
        if self.d != _D:
            raise ValueError("byte export is defined for order 32")
        flat = bytearray()
        for row in self.table:
            flat.extend(row)
        for row in self.lpar:
            flat.extend(row)
        return bytes(flat)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Quasigroup":
        if len(data) != 2048:
            raise ValueError("expected 2048 bytes")
        if any(b >= 32 for b in data):
            raise ValueError("entry out of range")
        table = [list(data[32 * a : 32 * a + 32]) for a in range(32)]
        lpar = [list(data[1024 + 32 * a : 1024 + 32 * a + 32]) for a in range(32)]
        q = cls(table)
        if q.lpar != tuple(map(tuple, lpar)):
            raise ValueError("parastrophe table inconsistent with Cayley table")
        return q

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Quasigroup) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"Quasigroup(order={self.order})"


def to_vvbf(q: Quasigroup) -> tuple:
    """The d coordinate ANFs of * as Boolean functions of 2d variables."""
    d = q.d
    rev = np.array([_bitrev(v, d) for v in range(1 << d)])
    t = np.arange(1 << (2 * d))
    a = rev[t & ((1 << d) - 1)]
    b = rev[t >> d]
    vals = np.asarray(q.table, dtype=np.uint8)[a, b]
    polys = []
    for i in range(1, d + 1):
        tt = anf.TruthTable(2 * d, (vals >> (d - i)) & 1)
        polys.append(anf.moebius(tt))
    return tuple(polys)


@dataclass(frozen=True)
class MqqClass:
    n_quad: int
    n_lin: int
    is_mqq: bool
    type_k: Optional[int]

    def __str__(self) -> str:
        if self.is_mqq:
            return f"Quad{self.n_quad}Lin{self.type_k}"
        return f"not MQQ ({self.n_quad} quadratic, {self.n_lin} linear)"


def classify(q: Quasigroup) -> MqqClass:
    degs = [p.degree() for p in q.vvbf]
    n_quad = sum(1 for g in degs if g == 2)
    n_lin = sum(1 for g in degs if g <= 1)
    is_mqq = max(degs) <= 2 and n_quad >= 1
    return MqqClass(n_quad, n_lin, is_mqq, n_lin if is_mqq else None)


def e_transform(leader: int, table: Sequence[Sequence[int]], message: Sequence[int]):
    """Chained products where each output feeds the next step."""
    out = []
    prev = leader
    for a in message:
        prev = table[prev][a]
        out.append(prev)
    return tuple(out)


def d_transform(leader: int, table: Sequence[Sequence[int]], message: Sequence[int]):
    """Chained products of consecutive input letters, leader first."""
    out = []
    prev = leader
    for a in message:
        out.append(table[prev][a])
        prev = a
    return tuple(out)


def symbolic_det_is_one(entries: Sequence[Sequence[int]], nvars: int) -> bool:
    """Whether the determinant of a matrix of affine-form masks is the
    constant function 1, decided by evaluating at all 2^nvars assignments."""
    d = len(entries)
    if nvars > 6:
        raise ValueError("supported up to 6 variables")
    words, allw = _form_words(nvars) if nvars != 5 else (_FORM_WORDS5, _ALL32)
    g = [0] * (1 << d)
    g[0] = allw
    for s in sorted(range(1, 1 << d), key=lambda v: (bin(v).count("1"), v)):
        r = bin(s).count("1") - 1
        acc = 0
        rest = s
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            acc ^= g[s ^ (1 << j)] & words[entries[r][j]]
        g[s] = acc
    return g[(1 << d) - 1] == allw


@dataclass(frozen=True)
class MqqWitness:
    """Affine-matrix decomposition certifying the quadratic quasigroup:
    coordinates equal a1(x).y + b1(x) and equivalently a2(y).x + b2(y)."""

    d: int
    a1: tuple
    b1: tuple
    a2: tuple
    b2: tuple

    def det_conditions_hold(self) -> bool:
        return symbolic_det_is_one(self.a1, self.d) and symbolic_det_is_one(
            self.a2, self.d
        )

    def _coordinate(self, i: int, x: int, y: int) -> int:
        d = self.d
        words = _FORM_WORDS5 if d == 5 else _form_words(d)[0]
        acc = (words[self.b1[i]] >> x) & 1
        for j in range(d):
            acc ^= ((words[self.a1[i][j]] >> x) & 1) & ((y >> j) & 1)
        return acc

    def _coordinate_rhs(self, i: int, x: int, y: int) -> int:
        d = self.d
        words = _FORM_WORDS5 if d == 5 else _form_words(d)[0]
        acc = (words[self.b2[i]] >> y) & 1
        for j in range(d):
            acc ^= ((words[self.a2[i][j]] >> y) & 1) & ((x >> j) & 1)
        return acc

    def sides_agree(self) -> bool:
        """Both affine decompositions define the same vector-valued function."""
        d = self.d
        for x in range(1 << d):
            for y in range(1 << d):
                for i in range(d):
                    if self._coordinate(i, x, y) != self._coordinate_rhs(i, x, y):
                        return False
        return True

    def table(self) -> tuple:
        """Cayley table defined by the witness (big-endian element bits)."""
        d = self.d
        out = [[0] * (1 << d) for _ in range(1 << d)]
        for a in range(1 << d):
            x = _bitrev(a, d)
            for b in range(1 << d):
                y = _bitrev(b, d)
                v = 0
                for i in range(d):
                    v |= self._coordinate(i, x, y) << (d - 1 - i)
                out[a][b] = v
        return tuple(map(tuple, out))


@dataclass(frozen=True)
class MqqSearchResult:
    quasigroup: Quasigroup
    witness: MqqWitness
    attempts: int


def min_quad_rank(q: Quasigroup) -> int:
    """Minimum over quadratic coordinates of rank(U + U^T) for the strictly
    upper quadratic coefficient matrix U of that coordinate."""
    if not q.mqq_class.is_mqq:
        raise ValueError("quasigroup is not multivariate quadratic")
    n = 2 * q.d
    best = None
    for p in q.vvbf:
        form = anf.QuadForm.from_anf(p)
        if form.degree() < 2:
            continue
        sym = list(form.rows)
        for i in range(n):
            rest = form.rows[i]
            while rest:
                j = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                sym[j] |= 1 << i
        r = rank(BitMatrix(n, n, sym))
        best = r if best is None else min(best, r)
    return best


def permute_first_linear(q: Quasigroup) -> Quasigroup:
    """Permute output coordinates so coordinate 1 has degree <= 1."""
    cls = classify(q)
    if not cls.is_mqq or cls.n_lin == 0:
        raise ValueError("expected an MQQ with a linear coordinate")
    degs = [p.degree() for p in q.vvbf]
    if degs[0] <= 1:
        return q
    d = q.d
    i0 = next(i for i, g in enumerate(degs) if g <= 1)
    hi = d - 1  # bit of coordinate 1
    lo = d - 1 - i0  # bit of the linear coordinate
    def swap(v: int) -> int:
        b1 = (v >> hi) & 1
        b2 = (v >> lo) & 1
        if b1 != b2:
            v ^= (1 << hi) | (1 << lo)
        return v
    table = [[swap(v) for v in row] for row in q.table]
    return Quasigroup(table, validate=False)


def _det_words_batch(w: np.ndarray) -> np.ndarray:
    """Determinant evaluation words for a batch of 5x5 affine matrices."""
    b = w.shape[0]
    g = [None] * 32
    g[0] = np.full(b, _ALL32, dtype=np.uint64)
    for s in _SUBSETS5:
        r = bin(s).count("1") - 1
        acc = np.zeros(b, dtype=np.uint64)
        rest = s
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            acc ^= g[s ^ (1 << j)] & w[:, r, j]
        g[s] = acc
    return g[31]


def _det5_const(rows: np.ndarray) -> np.ndarray:
    """Batched determinant of constant 5x5 bit matrices given as row masks."""
    b = rows.shape[0]
    g = [None] * 32
    g[0] = np.ones(b, dtype=np.uint8)
    for s in _SUBSETS5:
        r = bin(s).count("1") - 1
        acc = np.zeros(b, dtype=np.uint8)
        rest = s
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            acc ^= g[s ^ (1 << j)] & ((rows[:, r] >> j) & 1)
        g[s] = acc
    return g[31]


def _bmatmul(a: np.ndarray, bm: np.ndarray) -> np.ndarray:
    """Row-mask product of batches of 5x5 GF(2) matrices."""
    out = np.zeros_like(a)
    for j in range(5):
        out ^= ((a >> j) & 1) * bm[:, j : j + 1]
    return out


def _sample_gl5(rng, count: int, istar: Optional[np.ndarray]) -> np.ndarray:
    """Nonsingular row masks; quadratic rows carry x1 so every coordinate can
    reach the maximal quadratic rank.  Row istar, when given, is the unit
    vector that keeps that output coordinate linear."""
    def draw(c: int, stars) -> np.ndarray:
        rows = (rng.integers(0, 16, size=(c, 5), dtype=np.uint8) << 1) | 1
        if stars is not None:
            rows[np.arange(c), stars] = 16
        return rows

    m = draw(count, istar)
    bad = _det5_const(m) == 0
    while bad.any():
        idx = np.nonzero(bad)[0]
        m[idx] = draw(idx.size, istar[idx] if istar is not None else None)
        bad[idx] = _det5_const(m[idx]) == 0
    return m


def _sample_gl5_plain(rng, count: int) -> np.ndarray:
    m = rng.integers(0, 32, size=(count, 5), dtype=np.uint8)
    bad = _det5_const(m) == 0
    while bad.any():
        idx = np.nonzero(bad)[0]
        m[idx] = rng.integers(0, 32, size=(idx.size, 5), dtype=np.uint8)
        bad[idx] = _det5_const(m[idx]) == 0
    return m


def _table_from_masks(a1, b1) -> list:
    words = _FORM_WORDS5
    tab = [[0] * 32 for _ in range(32)]
    for a in range(32):
        x = _REV5[a]
        rows = [
            sum(((words[a1[i][j]] >> x) & 1) << j for j in range(5)) for i in range(5)
        ]
        cs = [(words[b1[i]] >> x) & 1 for i in range(5)]
        for b in range(32):
            y = _REV5[b]
            v = 0
            for i in range(5):
                z = cs[i] ^ ((rows[i] & y).bit_count() & 1)
                v |= z << (4 - i)
            tab[a][b] = v
    return tab


def mqq_search(d: int, k: int, seed, batch: int = 8192) -> MqqSearchResult:
    """Randomized search for an order-2^d quasigroup of type Quad(d-k)Lin(k).

    Candidates take the shape a1(x) = C (I + S(x)) P with S(x) strictly upper
    triangular in a hidden basis, which makes Det(a1) identically 1; the
    rejection loop then demands Det(a2) identically 1, the constant-entry
    window k*d <= #const < (k+1)*d, and the exact coordinate degree profile.
    Deterministic per seed; the returned attempt count is the number of
    sampled candidates.
    """
    if d != _D:
        raise ValueError("search is implemented for order 32 (d = 5)")
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    rng = np.random.Generator(np.random.PCG64(seed_int(seed, "mqq-search", f"k{k}")))
    attempts = 0
    while True:
        istar = rng.integers(0, 5, size=batch) if k else None
        c = _sample_gl5(rng, batch, istar)
        p = _sample_gl5_plain(rng, batch)
        s = rng.integers(0, 32, size=(batch, 5, 5), dtype=np.uint8) & _SU_ROW_MASK
        c0 = _bmatmul(c, p)
        ns = [_bmatmul(_bmatmul(c, s[:, t, :]), p) for t in range(5)]
        a1m = np.zeros((batch, 5, 5), dtype=np.uint8)
        for j in range(5):
            col = ((c0 >> j) & 1) << 5
            for t in range(5):
                col |= ((ns[t] >> j) & 1) << t
            a1m[:, :, j] = col
        nconst = ((a1m & 31) == 0).sum(axis=(1, 2))
        window = (nconst >= k * _D) & (nconst < (k + 1) * _D)
        b1m = rng.integers(0, 64, size=(batch, 5), dtype=np.uint8)
        a2m = np.zeros((batch, 5, 5), dtype=np.uint8)
        for t in range(5):
            acc = ((b1m >> t) & 1) << 5
            for j in range(5):
                acc |= ((a1m[:, :, j] >> t) & 1) << j
            a2m[:, :, t] = acc
        det2 = _det_words_batch(_FORM_WORDS5_NP[a2m]) == np.uint64(_ALL32)
        good = window & det2
        for bi in np.nonzero(good)[0]:
            a1 = tuple(tuple(int(a1m[bi, i, j]) for j in range(5)) for i in range(5))
            b1 = tuple(int(x) for x in b1m[bi])
            q = Quasigroup(_table_from_masks(a1, b1), validate=False)
            cls = classify(q)
            if not (cls.is_mqq and cls.type_k == k and cls.n_quad == _D - k):
                continue  # quadratic cancellation; reject and keep looking
            if not validate_latin(q.table):
                continue
            a2 = tuple(tuple(int(a2m[bi, i, j]) for j in range(5)) for i in range(5))
            b2 = tuple(
                sum(((a1[i][j] >> 5) & 1) << j for j in range(5))
                | (((b1[i] >> 5) & 1) << 5)
                for i in range(5)
            )
            witness = MqqWitness(_D, a1, b1, a2, b2)
            return MqqSearchResult(q, witness, attempts + int(bi) + 1)
        attempts += batch


def random_quasigroup(d: int, seed) -> Quasigroup:
    """Random Latin square of order 2^d: an isotopy of the cyclic table.
    Valid by construction, not uniform over all Latin squares."""
    n = 1 << d
    rng = random.Random(seed_int(seed, "latin"))
    rows = list(range(n))
    cols = list(range(n))
    syms = list(range(n))
    rng.shuffle(rows)
    rng.shuffle(cols)
    rng.shuffle(syms)
    table = [[syms[(rows[a] + cols[b]) % n] for b in range(n)] for a in range(n)]
    return Quasigroup(table, validate=False)
