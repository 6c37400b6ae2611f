import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nlbox import bounds as B
from nlbox.boxes import NoiseParameter, SettingsError
from nlbox.gf2 import BitVector, bv, inner_product, mat_apply
from nlbox.spaces import enumerate_inputs, enumerate_translations
from nlbox.symmetry import SymmetryElement, apply_symmetry, partition_by_symmetry, symmetry_defect
from nlbox.fixtures import load_appendix_v

R2 = math.sqrt(2)


def test_chsh_value_examples():
    assert B.chsh_value(1, -1, 1, 1) == 4
    assert B.chsh_value(1, 1, 1, 1) == 2
    h = R2 / 2
    assert B.chsh_value(h, -h, h, h) == pytest.approx(2 * R2, abs=1e-15)
    with pytest.raises(B.RangeError):
        B.chsh_value(1.5, 0, 0, 0)


def test_chsh_of_settings_quads():
    assert B.chsh_of_settings(B.CORRECTED_QUAD) == 4
    assert B.chsh_of_settings(B.PRINTED_QUAD) == 0
    assert B.chsh_of_settings(B.CORRECTED_QUAD, NoiseParameter(Fraction(3, 4))) == 2
    assert B.symmetry_W(B.CORRECTED_QUAD) == 1 and B.symmetry_W(B.PRINTED_QUAD) == 0


def _products(q):
    return [inner_product(q.x1, q.y1), inner_product(q.x1, q.y2), inner_product(q.x2, q.y1), inner_product(q.x2, q.y2)]


def test_stated_product_pattern():
    # the stated list 0, 1, 0, 0 needs both label pairs interchanged;
    # swapping x1 and x2 alone gives 1, 0, 0, 0, which has the same S and W
    assert _products(B.PRINTED_QUAD) == [0, 0, 1, 0]
    assert _products(B.CORRECTED_QUAD) == [1, 0, 0, 0]
    both = B.SettingsQuad(B.PRINTED_QUAD.x2, B.PRINTED_QUAD.x1, B.PRINTED_QUAD.y2, B.PRINTED_QUAD.y1)
    assert _products(both) == [0, 1, 0, 0]
    assert B.chsh_of_settings(both) == 4 and B.symmetry_W(both) == 1
    assert B.mean_square_chsh(both).mean_square == 8


def test_within_subset_quads_never_reach_four():
    for s in partition_by_symmetry(6):
        for x1, x2, y1, y2 in itertools.product(s.X, s.X, s.Y, s.Y):
            assert B.chsh_of_settings(B.SettingsQuad(x1, x2, y1, y2)) <= 2


def test_tradeoff_examples():
    assert B.q_w0(1) == 1 and B.p_w1(1) == 1
    assert B.q_w0(Fraction(0)) == Fraction(1, 4) == B.p_w1(Fraction(0))
    assert B.q_w0(Fraction(1, 2)) == Fraction(19, 64)
    with pytest.raises(B.RangeError):
        B.q_w0(2)
    u = B.threshold_square()
    assert u == Fraction(1, 2)
    assert (1 + 3 * u * u) / 4 == Fraction(7, 16)
    assert (1 + u) ** 2 / 4 == Fraction(9, 16)
    assert B.consistency_threshold() == pytest.approx(0.7071067811865476, abs=1e-15)


@given(st.fractions(min_value=0, max_value=1))
def test_closed_forms_match_table_sums(p):
    E = 2 * p - 1
    assert B.q_w0_from_p(p) == B.q_w0(E)
    assert B.p_w1_from_p(p) == B.p_w1(E)
    assert (p**2 + (1 - p) ** 2) ** 2 == B.p_w1(E)


@given(st.fractions(min_value=-1, max_value=1))
def test_consistency_sign_analysis(E):
    lhs = B.q_w0(E) + B.p_w1(E) <= 1
    assert lhs == (E * E <= Fraction(1, 2))
    assert 2 * E**4 + E**2 - 1 == (2 * E**2 - 1) * (E**2 + 1)


def test_tradeoff_curve():
    pts = B.tradeoff_curve(5)
    assert (pts[0].E, pts[0].q_w0, pts[0].p_w1, pts[0].sum) == (-1, 1, 1, 2)
    mid = pts[2]
    assert (mid.E, mid.q_w0, mid.p_w1, mid.sum) == (0, Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))
    assert all(a.sum == b.sum for a, b in zip(pts, reversed(pts)))
    csv = B.tradeoff_csv(pts)
    assert csv.splitlines()[0] == "E,Q_W0,P_W1,sum"
    assert "\r" not in csv and csv.endswith("\n")
    with pytest.raises(ValueError):
        B.tradeoff_curve(1)


def test_monte_carlo_degenerate_and_reproducible():
    assert B.monte_carlo_tradeoff(1, 1000, 0) == (1.0, 1.0)
    assert B.monte_carlo_tradeoff(0.6, 5000, 3) == B.monte_carlo_tradeoff(0.6, 5000, 3)
    q, p = B.monte_carlo_tradeoff(0.5, 100_000, 1)
    s = math.sqrt(0.25 * 0.75 / 100_000)
    assert abs(q - 0.25) <= 3 * s and abs(p - 0.25) <= 3 * s


def test_mean_square_examples():
    r = B.mean_square_chsh(B.CORRECTED_QUAD)
    assert r.mean_square == 8
    assert r.histogram() == {0: 16, 16: 16}
    assert r.bound == pytest.approx(2 * R2)


def test_mean_square_within_subset():
    s = partition_by_symmetry(6)[1]
    for x1, x2, y1, y2 in itertools.islice(itertools.product(s.X, s.X, s.Y, s.Y), 0, 4096, 37):
        r = B.mean_square_chsh(B.SettingsQuad(x1, x2, y1, y2))
        assert max(r.values) <= 4 and r.mean_square <= 4


def test_mean_square_invariances():
    q = B.CORRECTED_QUAD
    swapped = B.SettingsQuad(q.y1, q.y2, q.x1, q.x2)
    assert B.mean_square_chsh(swapped).mean_square == B.mean_square_chsh(q).mean_square
    fx = load_appendix_v()
    for R in [R for s in fx.subsets for R in s.R][:8]:
        for T in list(enumerate_translations(6))[::3]:
            F = SymmetryElement(R, T)
            vs = (q.x1, q.x2, q.y1, q.y2)
            if any(symmetry_defect(F, a, b) for a in vs for b in vs):
                continue
            moved = B.SettingsQuad(*(apply_symmetry(F, v) for v in vs))
            assert B.mean_square_chsh(moved).mean_square == 8


def test_mean_square_scan_n6():
    # every quad hitting S = 4 at T′ = 0 averages to exactly 8
    ins = list(enumerate_inputs(6))
    hits = 0
    for x1, x2 in itertools.product(ins[:3], repeat=2):
        for y1, y2 in itertools.product(ins[::2], repeat=2):
            q = B.SettingsQuad(x1, x2, y1, y2)
            r = B.mean_square_chsh(q)
            assert r.mean_square <= 16
            if B.chsh_of_settings(q) == 4:
                hits += 1
                assert r.mean_square == 8
    assert hits > 0


def test_fine_grained_examples():
    r = B.fine_grained_zeta(bv("100000"), bv("010000"), bv("001000"))
    assert r.mean_square == 2
    assert r.zeta == pytest.approx(0.5 + 1 / (2 * R2), abs=1e-12)
    d = B.fine_grained_zeta(bv("100000"), bv("010000"), bv("010000"))
    assert d.mean_square == 4 and d.zeta == 1
    with pytest.raises(SettingsError, match="x·y1 = x·y2"):
        B.fine_grained_zeta(bv("100000"), bv("100000"), bv("010000"))


def test_fine_grained_scan_agrees_with_direct():
    tally = B.fine_grained_scan(6)
    assert tally == {Fraction(2): 15360}
    ins = list(enumerate_inputs(6))
    for x in ins[::7]:
        for y1 in ins[::5]:
            for y2 in ins[::3]:
                if y1 != y2 and inner_product(x, y1) == inner_product(x, y2):
                    assert B.fine_grained_zeta(x, y1, y2).mean_square == 2


def test_tripartite_I():
    s = B.REFERENCE_TRIPARTITE
    assert B.tripartite_correlations(s) == (1, 1, 1, -1)
    assert B.tripartite_bell_I(s) == 4
    m = B.mean_square_tripartite_I(s)
    assert m.mean_square == 8 and m.symmetry_reduced
    assert m.mean_square_signed == 4


def test_tripartite_I_unreduced():
    e = lambda i: BitVector.unit(8, i)
    s = B.TripartiteSettings(e(1), bv("10011000"), e(2), e(5), e(3), e(2) ^ e(3) ^ e(5), e(7))
    assert (s.y0 ^ s.z0 ^ s.y1 ^ s.z1).word == 0
    m = B.mean_square_tripartite_I(s)
    assert not m.symmetry_reduced
    # constant relative phase inside each group: the grouped value never changes
    vals = {abs(a + b) + abs(c - d) for t in enumerate_translations(8) for a, b, c, d in [B.tripartite_correlations(s, t)]}
    assert len(vals) == 1
    assert m.mean_square == vals.pop() ** 2


def test_unreduced_settings_cap_at_two():
    # with y0⊕z0 = y1⊕z1 the x-dependence cancels, so E000·E011 = E100·E111
    # and neither form of I can exceed 2 in magnitude
    e = lambda i: BitVector.unit(8, i)
    ins = list(enumerate_inputs(8))
    best = 0
    for x1 in ins[::7]:
        for y1 in ins[::11]:
            z1 = e(2) ^ e(3) ^ y1
            if z1.weight() % 2 == 0:
                continue
            s = B.TripartiteSettings(e(1), x1, e(2), y1, e(3), z1, e(7))
            a, b, c, d = B.tripartite_correlations(s)
            assert a * b == c * d
            m = B.mean_square_tripartite_I(s)
            assert not m.symmetry_reduced
            best = max(best, m.mean_square, m.mean_square_signed)
    assert best == 4


def test_local_J():
    assert B.local_J_max() == 4


def test_J_search_small_budget_is_partial():
    r = B.tripartite_bell_J_bound(8, budget=5000)
    assert r.partial and r.evaluated < 5000


def test_bound_report_shape():
    rep = B.bound_report("S", 6, B.CORRECTED_QUAD.as_dict(), Fraction(8))
    assert set(rep) == {"parameter", "n", "settings", "mean_square", "bound", "exact"}
    assert rep["mean_square"] == "8/1" and rep["bound"] == 2.82842712475
