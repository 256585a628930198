"""Bit-packed vectors and matrices over GF(2).

Bit 1 of a vector (the variable x1) lives at bit position 0 of the backing
integer, so exporting little-endian puts bit i at byte (i-1)//8, position
(i-1) % 8.  All values are immutable after construction and safe to share.
"""
from __future__ import annotations

import hashlib
import random
from typing import Iterable, Sequence


class SingularMatrixError(ValueError):
    """Raised when inverting a matrix of deficient rank."""


def _check_bits(bits: int, n: int) -> int:
    if bits < 0 or bits >> n:
        raise ValueError(f"value does not fit in {n} bits")
    return bits


class BitVector:
    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValueError("negative length")
        self.n = n
        self.bits = _check_bits(bits, n)

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "BitVector":
        bits = 0
        n = 0
        for v in values:
            bits |= (v & 1) << n
            n += 1
        return cls(n, bits)

    @classmethod
    def from_bytes(cls, n: int, data: bytes) -> "BitVector":
        if len(data) != (n + 7) // 8:
            raise ValueError(f"expected {(n + 7) // 8} bytes for {n} bits")
        return cls(n, _check_bits(int.from_bytes(data, "little"), n))

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.n + 7) // 8, "little")

    def weight(self) -> int:
        return self.bits.bit_count()

    def parity(self) -> int:
        return self.bits.bit_count() & 1

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVector(self.n, self.bits ^ other.bits)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"BitVector({self.n}, 0b{self.bits:0{max(self.n, 1)}b})"


class BitMatrix:
    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int]):
        if len(rows) != nrows:
            raise ValueError("row count mismatch")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(_check_bits(r, ncols) for r in rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, [0] * nrows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def __getitem__(self, ij: tuple) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


def mat_vec_mul(m: BitMatrix, v: BitVector) -> BitVector:
    """y = M v over GF(2); y[i] is the parity of row i AND v."""
    if m.ncols != v.n:
        raise ValueError(f"dimension mismatch: {m.ncols} cols vs {v.n} bits")
    bits = 0
    x = v.bits
    for i, row in enumerate(m.rows):
        bits |= ((row & x).bit_count() & 1) << i
    return BitVector(m.nrows, bits)


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise ValueError("dimension mismatch")
    out = []
    for arow in a.rows:
        acc = 0
        rest = arow
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            acc ^= b.rows[j]
        out.append(acc)
    return BitMatrix(a.nrows, b.ncols, out)


def transpose(m: BitMatrix) -> BitMatrix:
    out = [0] * m.ncols
    for i, row in enumerate(m.rows):
        rest = row
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            out[j] |= 1 << i
    return BitMatrix(m.ncols, m.nrows, out)


def rank(m: BitMatrix) -> int:
    rows = list(m.rows)
    r = 0
    for c in range(m.ncols):
        pivot = next((i for i in range(r, m.nrows) if rows[i] >> c & 1), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(m.nrows):
            if i != r and rows[i] >> c & 1:
                rows[i] ^= rows[r]
        r += 1
        if r == m.nrows:
            break
    return r


def mat_inverse(m: BitMatrix) -> BitMatrix:
    """Gauss-Jordan inverse; raises SingularMatrixError below full rank."""
    if m.nrows != m.ncols:
        raise ValueError("matrix not square")
    n = m.nrows
    left = list(m.rows)
    right = [1 << i for i in range(n)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if left[i] >> c & 1), None)
        if pivot is None:
            raise SingularMatrixError(f"rank < {n}")
        left[c], left[pivot] = left[pivot], left[c]
        right[c], right[pivot] = right[pivot], right[c]
        for i in range(n):
            if i != c and left[i] >> c & 1:
                left[i] ^= left[c]
                right[i] ^= right[c]
    return BitMatrix(n, n, right)


def seed_int(seed, *labels: str) -> int:
    """Derive a stable 128-bit integer from a seed and context labels."""
    h = hashlib.sha256()
    if isinstance(seed, int):
        h.update(seed.to_bytes((seed.bit_length() + 8) // 8, "little", signed=True))
    elif isinstance(seed, str):
        h.update(seed.encode())
    elif isinstance(seed, (bytes, bytearray)):
        h.update(bytes(seed))
    else:
        raise TypeError(f"unsupported seed type {type(seed).__name__}")
    for label in labels:
        h.update(b"\x00" + label.encode())
    return int.from_bytes(h.digest()[:16], "little")


def random_vector(n: int, rng: random.Random) -> BitVector:
    return BitVector(n, rng.getrandbits(n))


def random_nonsingular(n: int, seed) -> BitMatrix:
    """Uniform nonsingular n x n matrix by rejection; deterministic per seed."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed_int(seed, "nonsingular"))
    while True:
        m = BitMatrix(n, n, [rng.getrandbits(n) for _ in range(n)])
        if rank(m) == n:
            return m
