"""Boolean-function machinery: truth tables, the Moebius transform to
algebraic normal form, and the quadratic-form algebra used to assemble
public polynomials.

Variable numbering is 1-based in polynomial strings ("x1") and 0-based in
code; variable i (0-based) occupies bit i of assignment integers and of
truth-table indices.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .gf2 import BitMatrix, BitVector

MAX_TT_VARS = 13  # largest table the pipeline needs (8192 entries)

_TERM_RE = re.compile(r"x(\d+)")


class TruthTable:
    __slots__ = ("nvars", "values")

    def __init__(self, nvars: int, values):
        if not 0 <= nvars <= MAX_TT_VARS:
            raise ValueError(f"nvars must be in 0..{MAX_TT_VARS}")
        vals = np.asarray(values, dtype=np.uint8) & 1
        if vals.shape != (1 << nvars,):
            raise ValueError(f"expected {1 << nvars} values")
        self.nvars = nvars
        self.values = vals
        self.values.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruthTable)
            and self.nvars == other.nvars
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self) -> int:
        return hash((self.nvars, self.values.tobytes()))


def _mobius(values: np.ndarray) -> np.ndarray:
    """Self-inverse zeta transform over GF(2), in place on a copy."""
    v = values.copy()
    h = 1
    n = v.size
    while h < n:
        v = v.reshape(-1, 2 * h)
        v[:, h:] ^= v[:, :h]
        v = v.reshape(-1)
        h <<= 1
    return v


@dataclass(frozen=True)
class AnfPoly:
    """XOR of AND-monomials; each monomial is a variable bitmask (0 = constant 1)."""

    nvars: int
    monomials: frozenset

    def degree(self) -> int:
        return max((m.bit_count() for m in self.monomials), default=0)

    def evaluate(self, assignment: int) -> int:
        acc = 0
        for m in self.monomials:
            acc ^= (assignment & m) == m
        return acc & 1

    @classmethod
    def from_string(cls, text: str, nvars: int) -> "AnfPoly":
        """Parse "1 + x1 + x2x5" style polynomials (1-based variables)."""
        mons = set()
        for term in text.split("+"):
            term = term.strip()
            if not term or term == "0":
                continue
            if term == "1":
                mask = 0
            else:
                idx = [int(t) - 1 for t in _TERM_RE.findall(term)]
                if not idx or any(i < 0 or i >= nvars for i in idx):
                    raise ValueError(f"bad term {term!r}")
                mask = 0
                for i in idx:
                    mask |= 1 << i
            mons.symmetric_difference_update({mask})
        return cls(nvars, frozenset(mons))

    def __str__(self) -> str:
        def key(m):
            return (m.bit_count(), m)

        parts = []
        for m in sorted(self.monomials, key=key):
            if m == 0:
                parts.append("1")
            else:
                parts.append("".join(f"x{i + 1}" for i in range(self.nvars) if m >> i & 1))
        return " + ".join(parts) if parts else "0"


def moebius(tt: TruthTable) -> AnfPoly:
    """ANF coefficients of a truth table; evaluating the result reproduces it."""
    coeff = _mobius(tt.values)
    mons = frozenset(int(m) for m in np.nonzero(coeff)[0])
    return AnfPoly(tt.nvars, mons)


def anf_to_truthtable(p: AnfPoly) -> TruthTable:
    coeff = np.zeros(1 << p.nvars, dtype=np.uint8)
    for m in p.monomials:
        coeff[m] = 1
    return TruthTable(p.nvars, _mobius(coeff))


def degree(p: AnfPoly) -> int:
    return p.degree()


class QuadForm:
    """Polynomial of degree <= 2: constant bit, linear mask, and strictly
    upper-triangular quadratic rows (row i holds coefficients of xi*xj, j > i)."""

    __slots__ = ("nvars", "c", "l", "rows")

    def __init__(self, nvars: int, c: int = 0, l: int = 0, rows: Sequence[int] = ()):
        self.nvars = nvars
        self.c = c & 1
        if l >> nvars:
            raise ValueError("linear part out of range")
        self.l = l
        rows = tuple(rows) if rows else (0,) * nvars
        if len(rows) != nvars:
            raise ValueError("expected one quadratic row per variable")
        for i, r in enumerate(rows):
            if r >> nvars or r & ((2 << i) - 1):
                raise ValueError(f"row {i} not strictly upper")
        self.rows = rows

    @property
    def linear(self) -> BitVector:
        return BitVector(self.nvars, self.l)

    @property
    def quad(self) -> BitMatrix:
        return BitMatrix(self.nvars, self.nvars, self.rows)

    def is_affine(self) -> bool:
        return not any(self.rows)

    def degree(self) -> int:
        if any(self.rows):
            return 2
        if self.l:
            return 1
        return 0

    def evaluate(self, x: int) -> int:
        acc = self.c ^ ((self.l & x).bit_count() & 1)
        rest = x
        while rest:
            i = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            acc ^= (self.rows[i] & x).bit_count() & 1
        return acc

    @classmethod
    def from_anf(cls, p: AnfPoly) -> "QuadForm":
        if p.degree() > 2:
            raise ValueError("degree exceeds 2")
        c = 0
        l = 0
        rows = [0] * p.nvars
        for m in p.monomials:
            w = m.bit_count()
            if w == 0:
                c ^= 1
            elif w == 1:
                l ^= m
            else:
                i = (m & -m).bit_length() - 1
                rows[i] ^= m & (m - 1)
        return cls(p.nvars, c, l, rows)

    def to_anf(self) -> AnfPoly:
        mons = set()
        if self.c:
            mons.add(0)
        rest = self.l
        while rest:
            b = rest & -rest
            rest ^= b
            mons.add(b)
        for i, row in enumerate(self.rows):
            r = row
            while r:
                b = r & -r
                r ^= b
                mons.add(b | (1 << i))
        return AnfPoly(self.nvars, frozenset(mons))

    def __xor__(self, other: "QuadForm") -> "QuadForm":
        if self.nvars != other.nvars:
            raise ValueError("dimension mismatch")
        return QuadForm(
            self.nvars,
            self.c ^ other.c,
            self.l ^ other.l,
            tuple(a ^ b for a, b in zip(self.rows, other.rows)),
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QuadForm)
            and self.nvars == other.nvars
            and self.c == other.c
            and self.l == other.l
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.nvars, self.c, self.l, self.rows))

    def __str__(self) -> str:
        return str(self.to_anf())


def quad_eval(p: QuadForm, x: BitVector) -> int:
    if p.nvars != x.n:
        raise ValueError("dimension mismatch")
    return p.evaluate(x.bits)


def _upper_mask(i: int, n: int) -> int:
    return ((1 << n) - 1) & ~((2 << i) - 1)


def affine_product(a: QuadForm, b: QuadForm) -> QuadForm:
    """GF(2) product of two affine forms, folding xi^2 = xi into the linear part."""
    if a.nvars != b.nvars:
        raise ValueError("dimension mismatch")
    if not (a.is_affine() and b.is_affine()):
        raise ValueError("operands must be affine")
    n = a.nvars
    c = a.c & b.c
    l = (b.l if a.c else 0) ^ (a.l if b.c else 0) ^ (a.l & b.l)
    rows = [0] * n
    _acc_cross(rows, a.l, b.l, n)
    return QuadForm(n, c, l, rows)


def _acc_cross(rows: list, la: int, lb: int, n: int) -> None:
    # rows[i] ^= coefficients of the symmetric cross product la (x) lb, i < j
    rest = la
    while rest:
        i = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        rows[i] ^= lb & _upper_mask(i, n)
    rest = lb
    while rest:
        i = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        rows[i] ^= la & _upper_mask(i, n)


def compose_with_linear(
    p: Union[AnfPoly, QuadForm], forms: Sequence[QuadForm]
) -> QuadForm:
    """Substitute affine forms for the variables of a degree <= 2 polynomial.

    The result evaluates identically to p(forms(x)) and stays degree <= 2.
    """
    if isinstance(p, AnfPoly):
        p = QuadForm.from_anf(p)  # raises for degree > 2
    if len(forms) != p.nvars:
        raise ValueError(f"expected {p.nvars} forms")
    n = forms[0].nvars if forms else 0
    for f in forms:
        if f.nvars != n:
            raise ValueError("forms must share one variable space")
        if not f.is_affine():
            raise ValueError("forms must be affine")
    c = p.c
    l = 0
    rows = [0] * n
    rest = p.l
    while rest:
        i = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        c ^= forms[i].c
        l ^= forms[i].l
    for i, prow in enumerate(p.rows):
        if not prow:
            continue
        # group xi * (xor of partner forms): one cross product per variable
        gc = 0
        gl = 0
        r = prow
        while r:
            j = (r & -r).bit_length() - 1
            r &= r - 1
            gc ^= forms[j].c
            gl ^= forms[j].l
        fa = forms[i]
        c ^= fa.c & gc
        l ^= (gl if fa.c else 0) ^ (fa.l if gc else 0) ^ (fa.l & gl)
        _acc_cross(rows, fa.l, gl, n)
    return QuadForm(n, c, l, rows)
