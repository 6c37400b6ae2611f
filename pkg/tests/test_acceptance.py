"""The ten acceptance criteria, each with its own tolerance and time limit.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists
one PASS/FAIL line per criterion. The same lines are printed by each test
(visible with ``-s``).
"""

import itertools
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from nlbox.bounds import (
    CORRECTED_QUAD,
    REFERENCE_TRIPARTITE,
    PRINTED_QUAD,
    SettingsQuad,
    chsh_of_settings,
    consistency_threshold,
    fine_grained_scan,
    fine_grained_zeta,
    mean_square_chsh,
    mean_square_tripartite_I,
    monte_carlo_tradeoff,
    p_w1,
    p_w1_from_p,
    q_w0,
    q_w0_from_p,
    threshold_square,
    tripartite_bell_I,
    tripartite_bell_J_bound,
    tripartite_correlations,
)
from nlbox.boxes import NoiseParameter, imperfect_box, no_signaling_check
from nlbox.fixtures import load_appendix_v, verify_appendix_v
from nlbox.gf2 import BitMatrix, bv
from nlbox.invariant import chsh_max_over_angles, invariant_E
from nlbox.spaces import enumerate_inputs
from nlbox.symmetry import (
    SymmetryElement,
    anf_degree,
    apply_symmetry,
    component_anf,
    compose,
    enumerate_orthogonal,
    identity_element,
    invert,
    partition_by_symmetry,
    symmetry_parameter_W,
)

SQRT2 = math.sqrt(2)


@contextmanager
def within(k: int, limit: float):
    t0 = time.perf_counter()
    yield
    dt = time.perf_counter() - t0
    print(f"criterion {k}: {dt:.2f} s (limit {limit} s)")
    assert dt < limit, f"criterion {k} took {dt:.2f} s, limit {limit} s"


@pytest.mark.criterion(1, "trade-off identity at the consistency threshold")
def test_criterion_1_tradeoff_identity():
    with within(1, 1.0):
        u = threshold_square()
        assert u == Fraction(1, 2)
        q, p = (1 + 3 * u * u) / 4, (1 + u) ** 2 / 4
        assert (q, p) == (Fraction(7, 16), Fraction(9, 16))
        assert q + p == 1
        E = consistency_threshold()
        assert abs(E - SQRT2 / 2) <= 1e-15
        for e in (E, -E):
            assert abs(q_w0(e) + p_w1(e) - 1) <= 1e-15
        assert q_w0(Fraction(7, 10)) + p_w1(Fraction(7, 10)) < 1 < q_w0(Fraction(3, 4)) + p_w1(Fraction(3, 4))


@pytest.mark.criterion(2, "closed forms Q(W=0) and P(W=1) on 101 rational p")
def test_criterion_2_closed_forms():
    with within(2, 1.0):
        for i in range(101):
            p = Fraction(i, 100)
            E = 2 * p - 1
            r = p**2 + (1 - p) ** 2
            assert r**3 + (1 - r) ** 3 == (1 + 3 * E**4) / 4
            assert r**2 == (1 + E**2) ** 2 / 4
            assert q_w0_from_p(p) == q_w0(E) == (1 + 3 * E**4) / 4
            assert p_w1_from_p(p) == p_w1(E) == r**2


@pytest.mark.criterion(3, "<S^2> = 8 on the corrected quadruple at n = 6")
def test_criterion_3_variance_bound():
    with within(3, 1.0):
        r = mean_square_chsh(CORRECTED_QUAD)
        assert r.mean_square == 8
        assert len(r.values) == 32
        assert r.histogram() == {0: 16, 16: 16}
        assert abs(r.bound - 2 * SQRT2) <= 1e-12


@pytest.mark.criterion(4, "fine-grained bound <G^2> = 2, zeta = 1/2 + 1/(2 sqrt 2)")
def test_criterion_4_fine_grained():
    with within(4, 5.0):
        tally = fine_grained_scan(6)
        assert set(tally) == {Fraction(2)}
        # every (x, y1, y2) with y1 != y2 and x.y1 = x.y2 over the 32 odd inputs
        xs = enumerate_inputs(6).points
        expected = sum(1 for x in xs for a in xs for b in xs if a != b and (bin(x.word & a.word).count("1") - bin(x.word & b.word).count("1")) % 2 == 0)
        assert sum(tally.values()) == expected
        z = fine_grained_zeta(bv("100000"), bv("010000"), bv("001000"))
        assert z.mean_square == 2
        assert abs(z.zeta - 0.853553390593274) <= 1e-12
        assert abs(z.zeta - (0.5 + 1 / (2 * SQRT2))) <= 1e-12


@pytest.mark.criterion(5, "partition at n = 6 and full fixture verification")
def test_criterion_5_partition():
    with within(5, 5.0):
        subs = partition_by_symmetry(6)
        assert len(subs) == 5
        Ts = [set(s.T) for s in subs]
        assert all(len(T) == 8 for T in Ts)
        ends = {bv("000000"), bv("111111")}
        for A, B in itertools.combinations(Ts, 2):
            assert A & B == ends
        assert len(set().union(*Ts)) == 32
        rep = verify_appendix_v(load_appendix_v())
        assert rep.passed, rep.lines()
        assert [c.name[0] for c in rep.checks] == list("abcdefg")
        assert "20480" in rep["g"].detail


def _within_subset_quads(X):
    for x1, x2, y1, y2 in itertools.product(X, repeat=4):
        yield SettingsQuad(x1, x2, y1, y2)


@pytest.mark.criterion(6, "S = 4 only across subsets; printed labeling gives S = 0")
def test_criterion_6_violation_vs_symmetry():
    with within(6, 5.0):
        fx = load_appendix_v()
        count = 0
        for s in fx.subsets:
            for q in _within_subset_quads(s.X):
                assert chsh_of_settings(q) < 4
                assert symmetry_parameter_W(q.x1, q.x2, q.y1, q.y2) == 0
                count += 1
        assert count == 5 * 8**4
        q = CORRECTED_QUAD
        assert chsh_of_settings(q) == 4
        assert symmetry_parameter_W(q.x1, q.x2, q.y1, q.y2) == 1
        q = PRINTED_QUAD
        assert chsh_of_settings(q) == 0
        assert symmetry_parameter_W(q.x1, q.x2, q.y1, q.y2) == 0


@pytest.mark.criterion(7, "tripartite I and J at n = 8")
def test_criterion_7_tripartite():
    with within(7, 30.0):
        s = REFERENCE_TRIPARTITE
        assert tripartite_correlations(s) == (1, 1, 1, -1)
        assert tripartite_bell_I(s) == 4
        ms = mean_square_tripartite_I(s)
        assert ms.mean_square == 8
        assert abs(ms.bound - 2 * SQRT2) <= 1e-12
        r = tripartite_bell_J_bound(8)
        assert not r.partial
        assert abs(r.bound - 4 * SQRT2) <= 1e-9
        assert abs(r.bound - 5.656854249) <= 1e-9


MC_P = [0.6, 0.75, (1 + SQRT2 / 2) / 2, 0.9]


@pytest.mark.criterion(8, "Monte Carlo Q(W=0), P(W=1) within 3 sigma")
def test_criterion_8_monte_carlo():
    trials = 100_000
    with within(8, 10.0):
        for i, p in enumerate(MC_P):
            E = 2 * p - 1
            q, pp = q_w0(E), p_w1(E)
            qh, ph = monte_carlo_tradeoff(p, trials, seed=1000 + i)
            assert abs(qh - q) <= 3 * math.sqrt(q * (1 - q) / trials), (p, qh, q)
            assert abs(ph - pp) <= 3 * math.sqrt(pp * (1 - pp) / trials), (p, ph, pp)
            assert monte_carlo_tradeoff(p, trials, seed=1000 + i) == (qh, ph)


def _elements():
    fx = load_appendix_v()
    return [SymmetryElement(R, T) for s in fx.subsets for R in s.R for T in s.T]


def _brute_orthogonal_4():
    w = np.arange(1 << 16, dtype=np.uint32)
    M = np.stack([(w >> (15 - k)) & 1 for k in range(16)], axis=1).reshape(-1, 4, 4)
    G = np.einsum("kij,klj->kil", M, M) % 2
    ok = (G == np.eye(4, dtype=G.dtype)).all(axis=(1, 2))
    out = set()
    for m in M[ok]:
        out.add(tuple(int("".join(map(str, row)), 2) for row in m))
    return out


@pytest.mark.criterion(9, "group axioms, ANF, orthogonal enumeration, no-signaling")
def test_criterion_9_structure():
    with within(9, 60.0):
        els = _elements()
        n = 6
        e = identity_element(n)
        for F in els:
            assert compose(F, e) == F == compose(e, F)
            assert compose(F, invert(F)) == e == compose(invert(F), F)
            for c in range(1, n + 1):
                a = component_anf(F, c)
                assert anf_degree(a) <= 1
                assert a[0] == F.T.bit(c)
                for j in range(1, n + 1):
                    assert a[1 << (n - j)] == F.R.row(c).bit(j)
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            i, j, k = rng.integers(len(els), size=3)
            A, B, C = els[i], els[j], els[k]
            AB = compose(A, B)  # closure: the constructor re-validates R and T
            assert compose(AB, C) == compose(A, compose(B, C))
            for x in enumerate_inputs(n).points[:4]:
                assert apply_symmetry(AB, x) == apply_symmetry(A, apply_symmetry(B, x))
        got = {M.rows for M in enumerate_orthogonal(4)}
        assert got == _brute_orthogonal_4()
        assert len(got) == 48
        pts = enumerate_inputs(n).points
        grid = [Fraction(i, 10) for i in range(11)]
        for x in pts:
            for y in pts:
                for p in grid:
                    assert no_signaling_check(imperfect_box(x, y, NoiseParameter(p)))


@pytest.mark.criterion(10, "invariant correlation reaches 2 sqrt 2 and no more")
def test_criterion_10_invariant():
    with within(10, 5.0):
        for grid in (8, 16, 24):
            r = chsh_max_over_angles(grid)
            assert abs(r.S_max - 2 * SQRT2) <= 1e-12
            assert r.S_max <= 2 * SQRT2 + 1e-12
        for th in (0.0, 0.25, 1.0, math.pi / 3, 2.5, -4.0):
            assert invariant_E(th, th) == -1
            assert invariant_E(th, th + math.pi) == 1
