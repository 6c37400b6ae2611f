"""Bit vectors and bit matrices over GF(2).

Vectors are packed into a Python int. Position 1 is the leftmost character
of the textual form, which is the most significant bit of the word, so
``BitVector.parse("100000").word == 0b100000``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_N = 64


class LengthError(ValueError):
    """Operands of different length, or a length outside the supported range."""


class ArityError(ValueError):
    """An operation received the wrong number of operands."""


def _popcount(w: int) -> int:
    return w.bit_count()


@dataclass(frozen=True, order=True)
class BitVector:
    n: int
    word: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise LengthError(f"length {self.n} outside 1..{MAX_N}")
        if self.word < 0 or self.word >> self.n:
            raise ValueError(f"word {self.word} does not fit in {self.n} bits")

    @classmethod
    def parse(cls, text: str) -> "BitVector":
        s = text.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {text!r}")
        return cls(len(s), int(s, 2))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVector":
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        return cls.parse("".join(str(b) for b in bits))

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(n, (1 << n) - 1)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVector":
        """e_i with 1-based position i counted from the left."""
        if not 1 <= i <= n:
            raise IndexError(f"position {i} outside 1..{n}")
        return cls(n, 1 << (n - i))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.word >> (self.n - 1 - k)) & 1 for k in range(self.n))

    def bit(self, i: int) -> int:
        return (self.word >> (self.n - i)) & 1

    def weight(self) -> int:
        return _popcount(self.word)

    def __str__(self) -> str:
        return format(self.word, f"0{self.n}b")

    def __repr__(self) -> str:
        return f"BitVector('{self}')"

    def __xor__(self, other: "BitVector") -> "BitVector":
        _same_length(self, other)
        return BitVector(self.n, self.word ^ other.word)


def _same_length(a: BitVector, b: BitVector) -> None:
    if a.n != b.n:
        raise LengthError(f"length mismatch: {a.n} vs {b.n}")


def bv(text: str) -> BitVector:
    """Shorthand for ``BitVector.parse``."""
    return BitVector.parse(text)


def inner_product(x: BitVector, y: BitVector) -> int:
    _same_length(x, y)
    return _popcount(x.word & y.word) & 1


def xor_sum(vs: Iterable[BitVector]) -> BitVector:
    vs = list(vs)
    if not vs:
        raise ArityError("xor_sum needs at least one vector")
    acc = vs[0]
    for v in vs[1:]:
        acc = acc ^ v
    return acc


def parity(v: BitVector) -> int:
    return _popcount(v.word) & 1


def reverse(x: BitVector) -> BitVector:
    """The opposite direction 1 ⊕ x."""
    return BitVector(x.n, x.word ^ ((1 << x.n) - 1))


@dataclass(frozen=True, order=True)
class BitMatrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise LengthError(f"size {self.n} outside 1..{MAX_N}")
        if len(self.rows) != self.n:
            raise LengthError(f"expected {self.n} rows, got {len(self.rows)}")
        for r in self.rows:
            if r < 0 or r >> self.n:
                raise ValueError(f"row {r} does not fit in {self.n} bits")

    @classmethod
    def parse(cls, rows: Sequence[str]) -> "BitMatrix":
        vs = [BitVector.parse(r) for r in rows]
        n = len(vs)
        if any(v.n != n for v in vs):
            raise LengthError("matrix must be square")
        return cls(n, tuple(v.word for v in vs))

    @classmethod
    def from_vectors(cls, rows: Sequence[BitVector]) -> "BitMatrix":
        n = len(rows)
        if any(r.n != n for r in rows):
            raise LengthError("matrix must be square")
        return cls(n, tuple(r.word for r in rows))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, tuple(1 << (n - 1 - i) for i in range(n)))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "BitMatrix":
        """Matrix sending e_j to e_perm[j-1] (1-based positions)."""
        n = len(perm)
        rows = [0] * n
        for j, i in enumerate(perm, start=1):
            rows[i - 1] |= 1 << (n - j)
        return cls(n, tuple(rows))

    def row(self, i: int) -> BitVector:
        return BitVector(self.n, self.rows[i - 1])

    def row_vectors(self) -> list[BitVector]:
        return [BitVector(self.n, r) for r in self.rows]

    def column_vectors(self) -> list[BitVector]:
        return mat_transpose(self).row_vectors()

    def lines(self) -> list[str]:
        return [format(r, f"0{self.n}b") for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise LengthError(f"dimension mismatch: {a} vs {b}")


def mat_apply(M: BitMatrix, x: BitVector) -> BitVector:
    _check_dims(M.n, x.n)
    w = 0
    for r in M.rows:
        w = (w << 1) | (_popcount(r & x.word) & 1)
    return BitVector(M.n, w)


def mat_transpose(M: BitMatrix) -> BitMatrix:
    n = M.n
    cols = []
    for j in range(n):
        shift = n - 1 - j
        w = 0
        for r in M.rows:
            w = (w << 1) | ((r >> shift) & 1)
        cols.append(w)
    return BitMatrix(n, tuple(cols))


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    _check_dims(A.n, B.n)
    n = A.n
    # row i of AB is the XOR of the rows of B selected by row i of A
    out = []
    for a in A.rows:
        w = 0
        for k in range(n):
            if (a >> (n - 1 - k)) & 1:
                w ^= B.rows[k]
        out.append(w)
    return BitMatrix(n, tuple(out))


def is_orthogonal(R: BitMatrix) -> bool:
    """RᵗR = I over GF(2).

    For a square matrix RᵗR = I forces R to be invertible with Rᵗ = R⁻¹,
    so RRᵗ = I as well: rows are pairwise orthogonal with odd self-parity.
    """
    return mat_mul(mat_transpose(R), R) == BitMatrix.identity(R.n)
