"""Admissible measurement inputs and translations.

Inputs are the odd-parity words of even length n, translations the
even-parity ones. Together they split the n-cube in half.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable

from .gf2 import BitVector, LengthError, inner_product, parity, reverse

MAX_ENUM_N = 16
REFERENCE_REGIME_MIN_N = 6


class ParityConstraintError(ValueError):
    pass


class FeasibilityError(ValueError):
    pass


def _check_n(n: int) -> None:
    if n % 2:
        raise ParityConstraintError(f"n must be even, got {n}")
    if not 2 <= n <= MAX_ENUM_N:
        raise FeasibilityError(f"n={n} outside the enumerable range 2..{MAX_ENUM_N}")


def below_reference_regime(n: int) -> bool:
    """The relations hold for every even n, but the claims are stated for n ≥ 6."""
    return n < REFERENCE_REGIME_MIN_N


@dataclass(frozen=True)
class InputSpace:
    n: int
    points: tuple[BitVector, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, v):
        return v in set(self.points)

    def dump(self) -> str:
        return "".join(f"{p}\n" for p in self.points)


def _by_parity(n: int, want: int) -> tuple[BitVector, ...]:
    # increasing word order is lexicographic order on the bitstrings
    return tuple(BitVector(n, w) for w in range(1 << n) if w.bit_count() & 1 == want)


def enumerate_inputs(n: int) -> InputSpace:
    _check_n(n)
    return InputSpace(n, _by_parity(n, 1))


def enumerate_translations(n: int) -> tuple[BitVector, ...]:
    _check_n(n)
    return _by_parity(n, 0)


def is_input_point(v: BitVector) -> bool:
    return v.n % 2 == 0 and parity(v) == 1


def is_translation_point(v: BitVector) -> bool:
    return v.n % 2 == 0 and parity(v) == 0


def check_admissibility(x: BitVector, y: BitVector) -> bool:
    if x.n != y.n:
        raise LengthError(f"length mismatch: {x.n} vs {y.n}")
    if x.n % 2:
        raise ParityConstraintError(f"n must be even, got {x.n}")
    xb, yb = reverse(x), reverse(y)
    return (
        inner_product(x, y ^ yb) == 1
        and inner_product(x ^ xb, y) == 1
        and inner_product(xb, y) == inner_product(x, yb)
        and inner_product(x, y) == inner_product(xb, yb)
    )


def odd_sum_closure_check(
    space: Iterable[BitVector], trials: int = 2000, seed: int = 0, exhaustive_limit: int = 64
) -> bool:
    """XOR of odd-size tuples stays inside the set.

    Triples are checked exhaustively when the set has at most
    ``exhaustive_limit`` members (that covers n ≤ 6); otherwise ``trials``
    random tuples of sizes 3 and 5 are drawn. For a set that is closed under
    triple sums, closure under every larger odd sum follows by induction.
    """
    pts = list(space)
    if not pts:
        raise ValueError("space must be non-empty")
    members = set(pts)

    def xs(tup):
        w = 0
        for v in tup:
            w ^= v.word
        return BitVector(pts[0].n, w)

    if len(pts) <= exhaustive_limit:
        return all(xs(t) in members for t in itertools.combinations_with_replacement(pts, 3))
    rng = random.Random(seed)
    for _ in range(trials):
        k = rng.choice((3, 5))
        if xs(rng.choices(pts, k=k)) not in members:
            return False
    return True
