"""The symmetry-averaged box mixture and its −cos correlation.

A perfect box and its reversed partner are mixed with weights
sin²(Θ/2) and cos²(Θ/2). With the phase Θ = (x·y)π + θx − θy the mixture
collapses to −cos(θx − θy), which reaches 2√2 in the CHSH combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .bounds import chsh_value
from .gf2 import BitVector, inner_product, reverse
from .spaces import enumerate_inputs

TWO_PI = 2 * math.pi


def invariant_E(theta_x: float, theta_y: float) -> float:
    return -math.cos(theta_x - theta_y)


def mixture_weights(Theta: float) -> tuple[float, float]:
    """Weights of the x·y box and of the reversed box."""
    return math.sin(Theta / 2) ** 2, math.cos(Theta / 2) ** 2


def coefficient_form_E(x: BitVector, y: BitVector, Theta: float) -> float:
    w, wbar = mixture_weights(Theta)
    s = -1 if inner_product(x, y) else 1
    sbar = -1 if inner_product(x, reverse(y)) else 1
    return w * s + wbar * sbar


def phase(x: BitVector, y: BitVector, theta_x: float, theta_y: float) -> float:
    """Θ = (x·y)π + θx − θy, the choice that removes the x·y dependence."""
    return inner_product(x, y) * math.pi + theta_x - theta_y


@dataclass(frozen=True)
class AngleAssignment:
    """Angles on an input space with θ(x̄) = θ(x) + π.

    Only one member of each pair {x, x̄} is free; the lexicographically
    least input is pinned to angle 0.
    """

    n: int
    angles: Mapping[BitVector, float]

    @classmethod
    def build(cls, n: int, free: Callable[[BitVector], float]) -> "AngleAssignment":
        pts = enumerate_inputs(n).points
        ref = pts[0]
        out: dict[BitVector, float] = {}
        for x in pts:
            if x in out:
                continue
            th = 0.0 if x == ref else free(x) % TWO_PI
            out[x] = th
            out[reverse(x)] = (th + math.pi) % TWO_PI
        return cls(n, out)

    def __getitem__(self, x: BitVector) -> float:
        return self.angles[x]

    def reversal_consistent(self, tol: float = 1e-12) -> bool:
        for x, th in self.angles.items():
            d = (self.angles[reverse(x)] - th - math.pi) % TWO_PI
            if min(d, TWO_PI - d) > tol:
                return False
        return True


def averaged_E(theta_x: float, theta_y: float, offsets: Iterable[float], weights: Sequence[float] | None = None) -> float:
    """Σ_F P(F) E(θx + δ_F, θy + δ_F) with one constant offset per element.

    Under this offset rule every term equals −cos(θx − θy), so the
    average does too whatever the weights.
    """
    offs = list(offsets)
    ws = [1 / len(offs)] * len(offs) if weights is None else list(weights)
    return sum(w * invariant_E(theta_x + d, theta_y + d) for w, d in zip(ws, offs))


def grid_angles(grid: int) -> list[Fraction]:
    """Angles as multiples of π: k·2/grid for k < grid, plus every multiple of 1/4."""
    if grid < 8:
        raise ValueError("grid must be >= 8")
    pts = {Fraction(2 * k, grid) for k in range(grid)} | {Fraction(j, 4) for j in range(8)}
    return sorted(pts)


@dataclass(frozen=True)
class AngleScan:
    S_max: float
    argmax: tuple[float, float, float, float]
    angles: tuple[float, ...]


def chsh_max_over_angles(grid: int, tol: float = 1e-12) -> AngleScan:
    """Largest S over all quadruples of grid angles for E = −cos(θx − θy).

    Ties within ``tol`` go to the lexicographically smallest
    (θx₁, θx₂, θy₁, θy₂).
    """
    th = np.array([float(a) * math.pi for a in grid_angles(grid)])
    G = th.size
    E = -np.cos(th[:, None] - th[None, :])  # E[x, y]
    # D[x1, y1, y2] = |E11 − E12|, P[x2, y1, y2] = |E21 + E22|
    D = np.abs(E[:, :, None] - E[:, None, :])
    P = np.abs(E[:, :, None] + E[:, None, :])
    best = max(float((D.max(axis=0) + P.max(axis=0)).max()), 0.0)
    arg = None
    for i in range(G):
        S = D[i][None, :, :] + P  # indexed [x2, y1, y2]
        hits = np.argwhere(S >= best - tol)
        if hits.size:
            j, k, l = hits[0]
            arg = (float(th[i]), float(th[j]), float(th[k]), float(th[l]))
            break
    return AngleScan(best, arg, tuple(th))


def angle_scan_csv(grid: int) -> str:
    th = [float(a) * math.pi for a in grid_angles(grid)]
    rows = ["theta_x1,theta_x2,theta_y1,theta_y2,S"]
    for a in th:
        for b in th:
            for c in th:
                for d in th:
                    S = chsh_value(invariant_E(a, c), invariant_E(a, d), invariant_E(b, c), invariant_E(b, d))
                    rows.append(",".join(format(v, ".12g") for v in (a, b, c, d, S)))
    return "\n".join(rows) + "\n"
