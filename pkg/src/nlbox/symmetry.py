"""The affine symmetry group F(x) = Rx ⊕ T and the partition it induces.

Group elements pair an orthogonal matrix R (RᵗR = I, rows of odd parity)
with an even-parity translation T. The partition cells H_m come from
self-orthogonal XOR-closed translation sets that all contain 0…0 and 1…1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    LengthError,
    inner_product,
    is_orthogonal,
    mat_apply,
    mat_mul,
    mat_transpose,
    parity,
)
from .spaces import ParityConstraintError, enumerate_inputs

ANF_MAX_N = 16
EXHAUSTIVE_ORTHOGONAL_MAX_N = 8


class SymmetryError(ValueError):
    pass


class FeasibilityError(ValueError):
    pass


class PartitionError(RuntimeError):
    pass


@dataclass(frozen=True)
class SymmetryElement:
    R: BitMatrix
    T: BitVector

    def __post_init__(self):
        if self.R.n != self.T.n:
            raise LengthError(f"R is {self.R.n}x{self.R.n} but T has length {self.T.n}")
        if not is_orthogonal(self.R):
            raise SymmetryError("R is not orthogonal")
        if parity(self.T) != 0:
            raise SymmetryError(f"T={self.T} must have even parity")

    @property
    def n(self) -> int:
        return self.T.n


def identity_element(n: int) -> SymmetryElement:
    return SymmetryElement(BitMatrix.identity(n), BitVector.zeros(n))


def apply_symmetry(F: SymmetryElement, x: BitVector) -> BitVector:
    return mat_apply(F.R, x) ^ F.T


def compose(outer: SymmetryElement, inner: SymmetryElement) -> SymmetryElement:
    """outer ∘ inner: (R₂, T₂)∘(R₁, T₁) = (R₂R₁, R₂T₁ ⊕ T₂)."""
    if outer.n != inner.n:
        raise LengthError("dimension mismatch")
    return SymmetryElement(mat_mul(outer.R, inner.R), mat_apply(outer.R, inner.T) ^ outer.T)


def invert(F: SymmetryElement) -> SymmetryElement:
    Rt = mat_transpose(F.R)
    return SymmetryElement(Rt, mat_apply(Rt, F.T))


def symmetry_defect(F: SymmetryElement, x: BitVector, y: BitVector) -> int:
    """T·[R(x⊕y) ⊕ T]; zero means F(x)·F(y) = x·y."""
    return inner_product(F.T, mat_apply(F.R, x ^ y) ^ F.T)


# ---------------------------------------------------------------- ANF


def moebius_transform(table: np.ndarray) -> np.ndarray:
    """ANF coefficients of a truth table of length 2^n.

    Index k of the table is the input word; index k of the result is the
    monomial whose variables are the set bits of k (same bit convention
    as ``BitVector``, so x_1 is the most significant bit).
    """
    a = np.array(table, dtype=np.uint8) & 1
    size = a.size
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError("table length must be a power of two")
    for i in range(n):
        step = 1 << i
        v = a.reshape(-1, 2, step)
        v[:, 1, :] ^= v[:, 0, :]
    return a


def anf_degree(coeffs: np.ndarray) -> int:
    idx = np.nonzero(coeffs)[0]
    if idx.size == 0:
        return -1
    return int(max(int(k).bit_count() for k in idx))


def component_truth_table(F: SymmetryElement, component: int) -> np.ndarray:
    n = F.n
    if not 1 <= component <= n:
        raise IndexError(f"component {component} outside 1..{n}")
    if n > ANF_MAX_N:
        raise FeasibilityError(f"truth table of size 2^{n} is too large")
    xs = np.arange(1 << n, dtype=np.uint32)
    row = F.R.rows[component - 1]
    return ((np.bitwise_count(xs & np.uint32(row)) & 1) ^ F.T.bit(component)).astype(np.uint8)


def component_anf(F: SymmetryElement, component: int) -> np.ndarray:
    return moebius_transform(component_truth_table(F, component))


# ---------------------------------------------------------------- orthogonal group


@dataclass(frozen=True)
class OrthogonalEnumeration:
    matrices: tuple[BitMatrix, ...]
    truncated: bool

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __contains__(self, M):
        return M in set(self.matrices)


def iter_orthogonal(n: int) -> Iterator[BitMatrix]:
    """All R with RᵗR = I, in lexicographic order of their row lists."""
    odd = [w for w in range(1 << n) if w.bit_count() & 1]
    rows: list[int] = []

    def rec():
        if len(rows) == n:
            yield BitMatrix(n, tuple(rows))
            return
        for w in odd:
            if all((w & r).bit_count() & 1 == 0 for r in rows):
                rows.append(w)
                yield from rec()
                rows.pop()

    yield from rec()


def enumerate_orthogonal(n: int, limit: Optional[int] = None) -> OrthogonalEnumeration:
    if n % 2:
        raise ParityConstraintError(f"n must be even, got {n}")
    if n > EXHAUSTIVE_ORTHOGONAL_MAX_N and limit is None:
        raise FeasibilityError(f"exhaustive enumeration needs n <= {EXHAUSTIVE_ORTHOGONAL_MAX_N}; pass a limit")
    out = []
    for M in iter_orthogonal(n):
        if limit is not None and len(out) >= limit:
            return OrthogonalEnumeration(tuple(out), True)
        out.append(M)
    return OrthogonalEnumeration(tuple(out), False)


# ---------------------------------------------------------------- partition


@dataclass
class SymmetrySubset:
    m: int
    T: tuple[BitVector, ...]
    X: tuple[BitVector, ...]
    Y: tuple[BitVector, ...]
    construction: str = "search"
    _R: Optional[tuple[BitMatrix, ...]] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.T[0].n

    def rotations(self, limit: Optional[int] = None) -> tuple[BitMatrix, ...]:
        """Orthogonal matrices stabilizing T_m, computed on first use."""
        if self._R is not None and (limit is None or len(self._R) >= limit):
            return self._R[:limit] if limit is not None else self._R
        found = []
        for M in iter_orthogonal(self.n):
            if subset_stabilizer_check(M, self):
                found.append(M)
                if limit is not None and len(found) >= limit:
                    return tuple(found)
        self._R = tuple(found)
        return self._R


def subset_stabilizer_check(R: BitMatrix, subset: SymmetrySubset) -> bool:
    members = set(subset.T)
    return all(mat_apply(R, t) in members for t in subset.T)


def _span(basis: Sequence[int]) -> list[int]:
    s = [0]
    for b in basis:
        s += [v ^ b for v in s]
    return s


def _lagrangian_spread(n: int, node_budget: int) -> list[list[int]]:
    """Exact cover of the nonzero classes of even words mod 1…1 by maximal
    self-orthogonal subspaces (dimension (n-2)/2 in the quotient).

    Classes are represented by the smaller of w and w ⊕ 1…1. Depth-first,
    always covering the least uncovered class first, trying extensions in
    increasing order.
    """
    ones = (1 << n) - 1
    reps = sorted({min(w, w ^ ones) for w in range(1, ones) if w.bit_count() % 2 == 0} - {0})
    k = (n - 2) // 2
    covered: set[int] = set()
    chosen: list[list[int]] = []
    nodes = 0

    def canon(w):
        return min(w, w ^ ones)

    def orth(a, b):
        return (a & b).bit_count() & 1 == 0

    def subspaces(basis, span_set, start):
        # extend a self-orthogonal basis to dimension k avoiding covered classes
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise PartitionError(f"node budget {node_budget} exhausted at depth {len(chosen)}")
        if len(basis) == k:
            yield basis
            return
        for w in reps:
            if w < start or w in span_set:
                continue
            if w in covered or not all(orth(w, b) for b in basis):
                continue
            new = {canon(s ^ w) for s in span_set}
            if new & covered:
                continue
            yield from subspaces(basis + [w], span_set | new, w + 1)

    def rec():
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise PartitionError(f"node budget {node_budget} exhausted at depth {len(chosen)}")
        free = [r for r in reps if r not in covered]
        if not free:
            return True
        v = free[0]
        seen = set()
        for basis in subspaces([v], {0, v}, v + 1):
            cls = frozenset(canon(s) for s in _span(basis)) - {0}
            if cls in seen:
                continue
            seen.add(cls)
            covered.update(cls)
            chosen.append(sorted(cls))
            if rec():
                return True
            chosen.pop()
            covered.difference_update(cls)
        return False

    if not rec():
        raise PartitionError(f"no cover found for n={n}")
    return chosen


# irreducible polynomials for GF(2^k), k = 2..5
_IRREDUCIBLE = {2: 0b111, 3: 0b1011, 4: 0b10011, 5: 0b100101}


def _gf_mul(a: int, b: int, k: int) -> int:
    poly = _IRREDUCIBLE[k]
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> k:
            a ^= poly
    return r


def _gf_trace(a: int, k: int) -> int:
    t, x = 0, a
    for _ in range(k):
        t ^= x
        x = _gf_mul(x, x, k)
    return t & 1


def _gf2_inverse(M: list[list[int]]) -> list[list[int]]:
    k = len(M)
    A = [row[:] + [int(i == j) for j in range(k)] for i, row in enumerate(M)]
    for c in range(k):
        piv = next(r for r in range(c, k) if A[r][c])
        A[c], A[piv] = A[piv], A[c]
        for r in range(k):
            if r != c and A[r][c]:
                A[r] = [u ^ v for u, v in zip(A[r], A[c])]
    return [row[k:] for row in A]


def _symplectic_basis(vectors: list[int]) -> list[tuple[int, int]]:
    def form(a, b):
        return (a & b).bit_count() & 1

    rem = list(vectors)
    pairs = []
    while rem:
        e = rem.pop(0)
        j = next(i for i, v in enumerate(rem) if form(e, v))
        f = rem.pop(j)
        rem = [v ^ (e if form(v, f) else 0) ^ (f if form(v, e) else 0) for v in rem]
        pairs.append((e, f))
    return pairs


def _desarguesian_spread(n: int) -> list[list[int]]:
    """Regular spread {(x, mx)} ∪ {(0, y)} of GF(2^k)², carried into the
    quotient by a symplectic isometry. Tr(xy′ + x′y) vanishes on each line,
    so every line is self-orthogonal."""
    ones = (1 << n) - 1
    k = (n - 2) // 2
    # even words e_i ⊕ e_n, i = 1..n-2, are a basis modulo 1…1
    basis = [(1 << (n - i)) | 1 for i in range(1, n - 1)]
    sp = _symplectic_basis(basis)
    u = [1 << i for i in range(k)]
    gram = [[_gf_trace(_gf_mul(a, b, k), k) for b in u] for a in u]
    ginv = _gf2_inverse(gram)
    dual = []
    for j in range(k):
        w = 0
        for i in range(k):
            if ginv[i][j]:
                w ^= u[i]
        dual.append(w)

    def phi(a, b):
        w = 0
        for i, (e, f) in enumerate(sp):
            if _gf_trace(_gf_mul(a, dual[i], k), k):
                w ^= e
            if _gf_trace(_gf_mul(b, u[i], k), k):
                w ^= f
        return w

    lines = [[phi(0, y) for y in u]]
    lines += [[phi(x, _gf_mul(m, x, k)) for x in u] for m in range(1 << k)]
    out = []
    for gens in lines:
        out.append(sorted({min(w, w ^ ones) for w in _span(gens)} - {0}))
    return sorted(out)


def lexicographic_least_input(n: int) -> BitVector:
    return enumerate_inputs(n).points[0]


def partition_by_symmetry(n: int, node_budget: int = 20_000) -> list[SymmetrySubset]:
    """Cells H_m for even 6 <= n <= 12.

    The depth-first exact cover runs first. If it exhausts ``node_budget``
    the cover is taken from the field construction instead; the
    ``construction`` attribute of every cell records which one was used.
    """
    if n % 2:
        raise ParityConstraintError(f"n must be even, got {n}")
    if not 6 <= n <= 12:
        raise FeasibilityError(f"partition supported for 6 <= n <= 12, got {n}")
    ones = (1 << n) - 1
    try:
        spread, how = _lagrangian_spread(n, node_budget), "search"
    except PartitionError:
        spread, how = _desarguesian_spread(n), "field"
    _check_spread(n, spread)
    x_ref = lexicographic_least_input(n)
    out = []
    for m, classes in enumerate(spread, start=1):
        words = sorted({0, ones} | set(classes) | {c ^ ones for c in classes})
        T = tuple(BitVector(n, w) for w in words)
        X = tuple(sorted(x_ref ^ t for t in T))
        out.append(SymmetrySubset(m, T, X, X, construction=how))
    return out


def _check_spread(n: int, spread: list[list[int]]) -> None:
    k = (n - 2) // 2
    seen: set[int] = set()
    for cls in spread:
        if len(cls) != (1 << k) - 1:
            raise PartitionError(f"cell of {len(cls)} classes, expected {(1 << k) - 1}")
        if any((a & b).bit_count() & 1 for a in cls for b in cls):
            raise PartitionError("cell is not self-orthogonal")
        if seen & set(cls):
            raise PartitionError("cells overlap outside {0…0, 1…1}")
        seen.update(cls)
    if len(seen) != (1 << (n - 2)) - 1:
        raise PartitionError("cells do not cover the translation space")


def symmetry_parameter_W(x1: BitVector, x2: BitVector, y1: BitVector, y2: BitVector) -> int:
    """(1/4)[1 − (−1)^(x₁·(y₁⊕y₂))][1 + (−1)^(x₂·(y₁⊕y₂))]."""
    if not x1.n == x2.n == y1.n == y2.n:
        raise LengthError("settings must share one length")
    d = y1 ^ y2
    s1 = -1 if inner_product(x1, d) else 1
    s2 = -1 if inner_product(x2, d) else 1
    return (1 - s1) * (1 + s2) // 4


def partition_dump(subsets: Sequence[SymmetrySubset], with_rotations: int = 0) -> str:
    """``[subset m]`` blocks with ``T:``, ``X:`` and ``R:`` sections."""
    lines = []
    for s in subsets:
        lines.append(f"[subset {s.m}]")
        lines.append("T:")
        lines += [str(t) for t in s.T]
        lines.append("X:")
        lines += [str(x) for x in s.X]
        lines.append("R:")
        if with_rotations:
            for i, M in enumerate(s.rotations(limit=with_rotations)):
                if i:
                    lines.append("")
                lines += M.lines()
        lines.append("")
    return "\n".join(lines)
