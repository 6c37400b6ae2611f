"""Perfect, imperfect and tripartite nonlocal boxes.

Probabilities are exact ``Fraction`` values. Floats appear only in the
sampler and its reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .gf2 import BitVector, LengthError, inner_product, parity
from .spaces import check_admissibility

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"
OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))
HALF = Fraction(1, 2)


class AdmissibilityError(ValueError):
    pass


class SettingsError(ValueError):
    pass


def _require_admissible(x: BitVector, y: BitVector) -> None:
    if not check_admissibility(x, y):
        raise AdmissibilityError(f"inadmissible inputs {x}, {y}: both must have odd parity")


def _as_fraction(p) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p)


@dataclass(frozen=True)
class NoiseParameter:
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", _as_fraction(self.p))
        if not 0 <= self.p <= 1:
            raise ValueError(f"p={self.p} outside [0, 1]")

    @property
    def E(self) -> Fraction:
        return 2 * self.p - 1


@dataclass(frozen=True)
class BoxDistribution:
    probs: Mapping[tuple[int, int], Fraction] = field(hash=False)

    def __post_init__(self):
        full = {ab: _as_fraction(self.probs.get(ab, 0)) for ab in OUTCOMES}
        if set(self.probs) - set(OUTCOMES):
            raise ValueError("outcomes must be pairs of bits")
        if any(v < 0 for v in full.values()):
            raise ValueError("negative probability")
        if sum(full.values()) != 1:
            raise ValueError(f"probabilities sum to {sum(full.values())}, not 1")
        object.__setattr__(self, "probs", full)

    def __getitem__(self, ab):
        return self.probs[ab]

    def marginal_alpha(self) -> tuple[Fraction, Fraction]:
        return tuple(self.probs[(a, 0)] + self.probs[(a, 1)] for a in (0, 1))

    def marginal_beta(self) -> tuple[Fraction, Fraction]:
        return tuple(self.probs[(0, b)] + self.probs[(1, b)] for b in (0, 1))


@dataclass(frozen=True)
class TripartiteConfig:
    c: BitVector

    def __post_init__(self):
        if parity(self.c) != 1:
            raise SettingsError(f"c={self.c} must have odd parity")


def imperfect_box(x: BitVector, y: BitVector, noise: NoiseParameter) -> BoxDistribution:
    _require_admissible(x, y)
    f = inner_product(x, y)
    p = noise.p
    return BoxDistribution({(a, b): (p if a ^ b == f else 1 - p) / 2 for a, b in OUTCOMES})


def perfect_box(x: BitVector, y: BitVector) -> BoxDistribution:
    return imperfect_box(x, y, NoiseParameter(Fraction(1)))


def correlation_of(dist: BoxDistribution) -> Fraction:
    return sum((v if a == b else -v) for (a, b), v in dist.probs.items())


def no_signaling_check(dist: BoxDistribution) -> bool:
    return dist.marginal_alpha() == (HALF, HALF) and dist.marginal_beta() == (HALF, HALF)


def sample_outcomes(x: BitVector, y: BitVector, noise: NoiseParameter, seed: int, trials: int) -> np.ndarray:
    """Draw ``trials`` outcome pairs; returns an int8 array of shape (trials, 2).

    alpha is a fair coin; beta = alpha ⊕ x·y with probability p, else flipped.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _require_admissible(x, y)
    rng = np.random.default_rng(seed)
    alpha = rng.integers(0, 2, size=trials, dtype=np.int8)
    wrong = rng.random(trials) >= float(noise.p)
    beta = alpha ^ np.int8(inner_product(x, y)) ^ wrong.astype(np.int8)
    return np.stack([alpha, beta], axis=1)


def sampler_report(x: BitVector, y: BitVector, noise: NoiseParameter, seed: int, trials: int) -> dict:
    out = sample_outcomes(x, y, noise, seed, trials)
    agree = np.count_nonzero(out[:, 0] == out[:, 1])
    return {
        "n": x.n,
        "x": str(x),
        "y": str(y),
        "p": float(noise.p),
        "trials": trials,
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "empirical_E": (2 * agree - trials) / trials,
        "exact_E": float(correlation_of(imperfect_box(x, y, noise))),
    }


def tripartite_parity(x: BitVector, y: BitVector, z: BitVector, cfg: TripartiteConfig) -> int:
    if not x.n == y.n == z.n == cfg.c.n:
        raise LengthError("tripartite inputs must share one length")
    for v in (x, y, z):
        if parity(v) != 1:
            raise SettingsError(f"{v} must have odd parity")
    c = cfg.c
    return (
        inner_product(x, y) ^ inner_product(x, z) ^ inner_product(y, z)
        ^ inner_product(x, c) ^ inner_product(y, c) ^ inner_product(z, c)
    )


def tripartite_box(x: BitVector, y: BitVector, z: BitVector, cfg: TripartiteConfig) -> dict:
    """Uniform over output triples whose XOR equals the parity bit."""
    f = tripartite_parity(x, y, z, cfg)
    q = Fraction(1, 4)
    return {(a, b, g): (q if a ^ b ^ g == f else Fraction(0)) for a in (0, 1) for b in (0, 1) for g in (0, 1)}
