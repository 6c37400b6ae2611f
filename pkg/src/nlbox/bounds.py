"""CHSH machinery, the nonlocality/symmetry trade-off, and enumeration bounds.

Averages over translations T′ are exact rationals. The irrational bounds
(2√2, 4√2) only appear as square roots of those rationals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .boxes import NoiseParameter, SettingsError, TripartiteConfig, tripartite_parity
from .gf2 import BitVector, LengthError, inner_product, parity
from .spaces import check_admissibility, enumerate_inputs, enumerate_translations
from .symmetry import symmetry_parameter_W

Real = Union[Fraction, float, int]

MEAN_SQUARE_MAX_N = 16


class RangeError(ValueError):
    pass


def _check_corr(*es: Real) -> None:
    for e in es:
        if not -1 <= e <= 1:
            raise RangeError(f"correlation {e} outside [-1, 1]")


def _sign(bit: int) -> int:
    return -1 if bit else 1


# ---------------------------------------------------------------- settings


@dataclass(frozen=True)
class SettingsQuad:
    x1: BitVector
    x2: BitVector
    y1: BitVector
    y2: BitVector

    def __post_init__(self):
        vs = (self.x1, self.x2, self.y1, self.y2)
        if len({v.n for v in vs}) != 1:
            raise LengthError("settings must share one length")
        if self.x1.n % 2 or any(parity(v) != 1 for v in vs):
            raise SettingsError("settings must be odd-parity words of even length")

    @property
    def n(self) -> int:
        return self.x1.n

    @property
    def degenerate(self) -> bool:
        """Repeated settings are evaluated literally but flagged."""
        return self.x1 == self.x2 or self.y1 == self.y2

    @classmethod
    def parse(cls, x1: str, x2: str, y1: str, y2: str) -> "SettingsQuad":
        return cls(*(BitVector.parse(s) for s in (x1, x2, y1, y2)))

    def as_dict(self) -> dict:
        return {"x1": str(self.x1), "x2": str(self.x2), "y1": str(self.y1), "y2": str(self.y2)}


# The maximal-violation example with x1 and x2 interchanged relative to the
# printed labels; only this labeling reproduces the stated correlations.
CORRECTED_QUAD = SettingsQuad.parse("010000", "100000", "011100", "000100")
PRINTED_QUAD = SettingsQuad.parse("100000", "010000", "011100", "000100")


@dataclass(frozen=True)
class TripartiteSettings:
    x0: BitVector
    x1: BitVector
    y0: BitVector
    y1: BitVector
    z0: BitVector
    z1: BitVector
    c: BitVector

    def __post_init__(self):
        vs = self.vectors()
        if len({v.n for v in vs}) != 1:
            raise LengthError("settings must share one length")
        if any(parity(v) != 1 for v in vs):
            raise SettingsError("tripartite settings must have odd parity")

    def vectors(self) -> tuple[BitVector, ...]:
        return (self.x0, self.x1, self.y0, self.y1, self.z0, self.z1, self.c)

    @property
    def n(self) -> int:
        return self.c.n

    def as_dict(self) -> dict:
        names = ("x0", "x1", "y0", "y1", "z0", "z1", "c")
        return {k: str(v) for k, v in zip(names, self.vectors())}


def _e(n: int, i: int) -> BitVector:
    return BitVector.unit(n, i)


REFERENCE_TRIPARTITE = TripartiteSettings(
    x0=_e(8, 1), x1=BitVector.parse("10011000"),
    y0=_e(8, 2), y1=_e(8, 5),
    z0=_e(8, 3), z1=_e(8, 6),
    c=_e(8, 7),
)


# ---------------------------------------------------------------- CHSH


def chsh_value(E11: Real, E12: Real, E21: Real, E22: Real) -> Real:
    _check_corr(E11, E12, E21, E22)
    return abs(E11 - E12) + abs(E21 + E22)


def quad_correlations(q: SettingsQuad, noise: Optional[NoiseParameter] = None) -> tuple[Fraction, ...]:
    E = Fraction(1) if noise is None else noise.E
    return tuple(
        E * _sign(inner_product(x, y))
        for x, y in ((q.x1, q.y1), (q.x1, q.y2), (q.x2, q.y1), (q.x2, q.y2))
    )


def chsh_of_settings(q: SettingsQuad, noise: Optional[NoiseParameter] = None) -> Fraction:
    for x in (q.x1, q.x2):
        for y in (q.y1, q.y2):
            if not check_admissibility(x, y):
                raise SettingsError(f"inadmissible pair {x}, {y}")
    return chsh_value(*quad_correlations(q, noise))


# ---------------------------------------------------------------- trade-off


def _check_E(E: Real) -> None:
    if not -1 <= E <= 1:
        raise RangeError(f"E={E} outside [-1, 1]")


def q_w0(E: Real) -> Real:
    _check_E(E)
    return (1 + 3 * E**4) / 4


def p_w1(E: Real) -> Real:
    _check_E(E)
    return (1 + E**2) ** 2 / 4


def q_w0_from_p(p: Fraction) -> Fraction:
    """Sum over outcomes where the three pairs are all respected or all violated."""
    r = p**2 + (1 - p) ** 2
    return r**3 + (1 - r) ** 3


def p_w1_from_p(p: Fraction) -> Fraction:
    """Sum over the four sign patterns that give S = 4."""
    return p**4 + (1 - p) ** 4 + 2 * p**2 * (1 - p) ** 2


def _exact_sqrt(q: Fraction) -> Optional[Fraction]:
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def threshold_square() -> Fraction:
    """E² at the edge of consistency, from q_w0 + p_w1 = 1.

    (1 + 3u²)/4 + (1 + u)²/4 = 1 reduces to 2u² + u − 1 = 0 with u = E².
    The positive root is taken with an exact discriminant.
    """
    a, b, c = Fraction(2), Fraction(1), Fraction(-1)
    disc = _exact_sqrt(b * b - 4 * a * c)
    assert disc is not None
    return (-b + disc) / (2 * a)


def consistency_threshold() -> float:
    u = threshold_square()
    root = _exact_sqrt(u)
    if root is not None:
        return float(root)
    # u = 1/2 converts to float exactly, so the result is correctly rounded
    return math.sqrt(u)


@dataclass(frozen=True)
class TradeoffPoint:
    E: Fraction
    q_w0: Fraction
    p_w1: Fraction

    @property
    def sum(self) -> Fraction:
        return self.q_w0 + self.p_w1


def tradeoff_curve(steps: int) -> list[TradeoffPoint]:
    if steps < 2:
        raise ValueError("steps must be >= 2")
    pts = []
    for i in range(steps):
        E = Fraction(-1) + Fraction(2 * i, steps - 1)
        pts.append(TradeoffPoint(E, q_w0(E), p_w1(E)))
    return pts


def _fmt12(v: Real) -> str:
    return format(float(v), ".12g")


def tradeoff_csv(points: Sequence[TradeoffPoint]) -> str:
    rows = ["E,Q_W0,P_W1,sum"]
    rows += [",".join(_fmt12(v) for v in (p.E, p.q_w0, p.p_w1, p.sum)) for p in points]
    return "\n".join(rows) + "\n"


def monte_carlo_tradeoff(p: Real, trials: int, seed: int) -> tuple[float, float]:
    """Empirical Q(W=0) and P(W=1).

    The two estimates use independent child streams of
    ``SeedSequence(seed)``: child 0 for Q, child 1 for P.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pf = float(p)
    if not 0 <= pf <= 1:
        raise RangeError(f"p={p} outside [0, 1]")
    sq, sp = np.random.SeedSequence(seed).spawn(2)
    rq, rp = np.random.default_rng(sq), np.random.default_rng(sp)
    # one correctness indicator per correlation; a pair is respected when both agree
    k = rq.random((trials, 3, 2)) < pf
    respected = k[:, :, 0] == k[:, :, 1]
    w0 = respected.all(axis=1) | (~respected).all(axis=1)
    m = rp.random((trials, 4)) < pf
    s4 = (m[:, 0] == m[:, 1]) & (m[:, 2] == m[:, 3])
    return float(w0.mean()), float(s4.mean())


# ---------------------------------------------------------------- enumeration bounds


def _translations(n: int) -> tuple[BitVector, ...]:
    if n > MEAN_SQUARE_MAX_N:
        raise ValueError(f"n={n} too large for translation enumeration")
    return enumerate_translations(n)


def _phase_corr(x: BitVector, y: BitVector, t: BitVector) -> int:
    return _sign(inner_product(x, y) ^ inner_product(x ^ y, t))


@dataclass(frozen=True)
class MeanSquareResult:
    mean_square: Fraction
    values: tuple[int, ...]

    @property
    def bound(self) -> float:
        return math.sqrt(self.mean_square)

    def histogram(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v in self.values:
            out[v] = out.get(v, 0) + 1
        return dict(sorted(out.items()))


def chsh_over_translations(q: SettingsQuad) -> tuple[int, ...]:
    out = []
    for t in _translations(q.n):
        e = [_phase_corr(x, y, t) for x, y in ((q.x1, q.y1), (q.x1, q.y2), (q.x2, q.y1), (q.x2, q.y2))]
        out.append(chsh_value(*e))
    return tuple(out)


def mean_square_chsh(q: SettingsQuad) -> MeanSquareResult:
    """Uniform average of S(T′)² over all even-parity T′."""
    vals = chsh_over_translations(q)
    return MeanSquareResult(Fraction(sum(v * v for v in vals), len(vals)), tuple(v * v for v in vals))


@dataclass(frozen=True)
class ZetaResult:
    mean_square: Fraction
    zeta: float


def fine_grained_zeta(x: BitVector, y1: BitVector, y2: BitVector) -> ZetaResult:
    if not x.n == y1.n == y2.n:
        raise LengthError("settings must share one length")
    if inner_product(x, y1) != inner_product(x, y2):
        raise SettingsError("the maximizing choice requires x·y1 = x·y2")
    total = 0
    ts = _translations(x.n)
    for t in ts:
        g = _phase_corr(x, y1, t) + _phase_corr(x, y2, t)
        total += g * g
    g2 = Fraction(total, len(ts))
    return ZetaResult(g2, 0.5 + math.sqrt(g2) / 4)


# ---------------------------------------------------------------- tripartite


def _tri_corr(s: TripartiteSettings, x, y, z, t: Optional[BitVector] = None) -> int:
    f = tripartite_parity(x, y, z, TripartiteConfig(s.c))
    if t is not None:
        f ^= inner_product(x ^ y ^ z ^ s.c, t)
    return _sign(f)


def tripartite_correlations(s: TripartiteSettings, t: Optional[BitVector] = None) -> tuple[int, int, int, int]:
    """E(x₀,y₀,z₀), E(x₀,y₁,z₁), E(x₁,y₀,z₀), E(x₁,y₁,z₁)."""
    return (
        _tri_corr(s, s.x0, s.y0, s.z0, t),
        _tri_corr(s, s.x0, s.y1, s.z1, t),
        _tri_corr(s, s.x1, s.y0, s.z0, t),
        _tri_corr(s, s.x1, s.y1, s.z1, t),
    )


def tripartite_bell_I(s: TripartiteSettings) -> int:
    a, b, c, d = tripartite_correlations(s)
    return a + b + c - d


@dataclass(frozen=True)
class TripartiteMeanSquare:
    mean_square: Fraction
    mean_square_signed: Fraction
    symmetry_reduced: bool

    @property
    def bound(self) -> float:
        return math.sqrt(self.mean_square)


def mean_square_tripartite_I(s: TripartiteSettings) -> TripartiteMeanSquare:
    """⟨I²⟩ over T′ with the terms grouped as |E₀₀₀ + E₀₁₁| + |E₁₀₀ − E₁₁₁|.

    The grouping mirrors the CHSH form. The plain signed sum is returned
    alongside. When y₀⊕z₀⊕y₁⊕z₁ is 0…0 or 1…1 the relative phase inside
    each group is constant and the average is not reduced.
    """
    ts = _translations(s.n)
    grouped = signed = 0
    for t in ts:
        a, b, c, d = tripartite_correlations(s, t)
        g = abs(a + b) + abs(c - d)
        grouped += g * g
        signed += (a + b + c - d) ** 2
    d = s.y0 ^ s.y1 ^ s.z0 ^ s.z1
    reduced = d.word not in (0, (1 << s.n) - 1)
    return TripartiteMeanSquare(Fraction(grouped, len(ts)), Fraction(signed, len(ts)), reduced)


SVETLICHNY_SIGNS = {
    (i, j, k): _sign((i & j) ^ (i & k) ^ (j & k)) for i in (0, 1) for j in (0, 1) for k in (0, 1)
}


def svetlichny_J(s: TripartiteSettings, t: Optional[BitVector] = None) -> int:
    xs, ys, zs = (s.x0, s.x1), (s.y0, s.y1), (s.z0, s.z1)
    return sum(sig * _tri_corr(s, xs[i], ys[j], zs[k], t) for (i, j, k), sig in SVETLICHNY_SIGNS.items())


def svetlichny_J_grouped(s: TripartiteSettings, t: Optional[BitVector] = None) -> int:
    xs, ys, zs = (s.x0, s.x1), (s.y0, s.y1), (s.z0, s.z1)
    total = 0
    for i in (0, 1):
        for j in (0, 1):
            pair = sum(SVETLICHNY_SIGNS[i, j, k] * _tri_corr(s, xs[i], ys[j], zs[k], t) for k in (0, 1))
            total += abs(pair)
    return total


def mean_square_J(s: TripartiteSettings) -> Fraction:
    ts = _translations(s.n)
    return Fraction(sum(svetlichny_J_grouped(s, t) ** 2 for t in ts), len(ts))


def local_J_max() -> int:
    """Largest J over deterministic ±1 assignments a_i b_j c_k."""
    best = -99
    for a0, a1, b0, b1, c0, c1 in itertools.product((1, -1), repeat=6):
        a, b, c = (a0, a1), (b0, b1), (c0, c1)
        best = max(best, sum(sig * a[i] * b[j] * c[k] for (i, j, k), sig in SVETLICHNY_SIGNS.items()))
    return best


@dataclass(frozen=True)
class JSearchResult:
    max_mean_square: Fraction
    witness: Optional[TripartiteSettings]
    signed_max: int
    evaluated: int
    partial: bool

    @property
    def bound(self) -> float:
        return math.sqrt(self.max_mean_square)


def _odd_words(n: int, weights: Sequence[int]) -> list[int]:
    return [w for w in range(1 << n) if w.bit_count() in weights]


def tripartite_bell_J_bound(n: int = 8, budget: Optional[int] = None) -> JSearchResult:
    """Search settings for the largest ⟨J²⟩.

    x₀ = e₁, y₀ = e₂, z₀ = e₃ and c = e₇ are fixed; x₁, y₁, z₁ range over
    all words of weight 1 or 3. ⟨J²⟩ uses the pairing of terms that differ
    only in the third party's setting. ``budget`` caps the number of
    settings evaluated; hitting it sets ``partial``.
    """
    if n < 8 or n % 2:
        raise SettingsError("the J search needs an even n >= 8")
    cand = np.array(_odd_words(n, (1, 3)), dtype=np.int64)
    ts = np.array([t.word for t in enumerate_translations(n)], dtype=np.int64)
    e = [1 << (n - i) for i in (1, 2, 3, 7)]
    x0, y0, z0, c = e

    def dot(a, b):
        return (np.bitwise_count(np.bitwise_and(a, b)) & 1).astype(np.int8)

    # grid over (y1, z1); one x1 per outer step
    Y1, Z1 = np.meshgrid(cand, cand, indexing="ij")
    Y1, Z1 = Y1.ravel(), Z1.ravel()
    m = Y1.size
    best = Fraction(-1)
    witness = None
    signed_best = -99
    evaluated = 0
    partial = False
    for x1 in cand:
        if budget is not None and evaluated + m > budget:
            partial = True
            break
        xs = (np.full(m, x0), np.full(m, x1))
        ys = (np.full(m, y0), Y1)
        zs = (np.full(m, z0), Z1)
        cc = np.full(m, c)
        J0 = np.zeros(m, dtype=np.int64)
        pair_sum = {}
        for (i, j, k), sig in SVETLICHNY_SIGNS.items():
            x, y, z = xs[i], ys[j], zs[k]
            f = dot(x, y) ^ dot(x, z) ^ dot(y, z) ^ dot(x, cc) ^ dot(y, cc) ^ dot(z, cc)
            v = x ^ y ^ z ^ cc
            ph = dot(v[:, None], ts[None, :]) ^ f[:, None]
            corr = sig * (1 - 2 * ph.astype(np.int64))
            J0 += sig * (1 - 2 * f.astype(np.int64))
            pair_sum[i, j] = pair_sum.get((i, j), 0) + corr
        grouped = sum(np.abs(pair_sum[i, j]) for i in (0, 1) for j in (0, 1))
        ms = (grouped * grouped).sum(axis=1)
        k = int(np.argmax(ms))
        evaluated += m
        signed_best = max(signed_best, int(J0.max()))
        cand_best = Fraction(int(ms[k]), len(ts))
        if cand_best > best:
            best = cand_best
            witness = TripartiteSettings(
                BitVector(n, x0), BitVector(n, int(x1)),
                BitVector(n, y0), BitVector(n, int(Y1[k])),
                BitVector(n, z0), BitVector(n, int(Z1[k])),
                BitVector(n, c),
            )
    return JSearchResult(best, witness, signed_best, evaluated, partial)


def bound_report(parameter: str, n: int, settings: dict, mean_square: Fraction, exact: bool = True) -> dict:
    return {
        "parameter": parameter,
        "n": n,
        "settings": settings,
        "mean_square": f"{mean_square.numerator}/{mean_square.denominator}",
        "bound": float(format(math.sqrt(mean_square), ".12g")),
        "exact": exact,
    }


def fine_grained_scan(n: int) -> dict[Fraction, int]:
    """⟨G²⟩ for every triple with x·y₁ = x·y₂ and y₁ ≠ y₂, tallied by value."""
    ins = np.array([v.word for v in enumerate_inputs(n)], dtype=np.int64)
    ts = np.array([t.word for t in _translations(n)], dtype=np.int64)

    def dot(a, b):
        return (np.bitwise_count(np.bitwise_and(a, b)) & 1).astype(np.int64)

    tally: dict[Fraction, int] = {}
    eye = np.eye(ins.size, dtype=bool)
    for x in ins:
        f = dot(x, ins)
        sgn = 1 - 2 * (dot((x ^ ins)[:, None], ts[None, :]) ^ f[:, None])  # [y, t]
        g = sgn[:, None, :] + sgn[None, :, :]
        tot = (g * g).sum(axis=2)
        mask = (f[:, None] == f[None, :]) & ~eye
        vals, counts = np.unique(tot[mask], return_counts=True)
        for v, c in zip(vals, counts):
            key = Fraction(int(v), ts.size)
            tally[key] = tally.get(key, 0) + int(c)
    return tally


def symmetry_W(q: SettingsQuad) -> int:
    return symmetry_parameter_W(q.x1, q.x2, q.y1, q.y2)
