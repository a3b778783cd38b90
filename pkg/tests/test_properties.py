from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gtm import diffraction as df
from gtm import substitution as sb
from gtm import topology as tp
from gtm.autocorrelation import autocorr_table, eta, growth_bound_q, wiener_sums

from oracles import charpoly_numpy

params = st.tuples(st.integers(1, 6), st.integers(1, 6))
small = st.tuples(st.integers(1, 4), st.integers(1, 4))


@given(params, st.integers(0, 3000))
def test_eta_scale_invariance(p, m):
    L = p[0] + p[1]
    assert eta(p, L * m) == eta(p, m)
    assert eta(p, -m) == eta(p, m)
    assert abs(eta(p, m)) <= 1


@given(params, st.integers(0, 500), st.integers(0, 5))
def test_eta_recursion(p, q, r):
    L = p[0] + p[1]
    r %= L
    t = autocorr_table(p)
    a = [L - s - 2 * min(p[0], p[1], s, L - s) for s in range(L)] + [0]
    assert t[L * q + r] == (a[r] * t[q] + a[L - r] * t[q + 1]) / L


@given(params)
@settings(max_examples=30)
def test_wiener_sum_growth(p):
    g = growth_bound_q(p)
    L = p[0] + p[1]
    sums, _ = wiener_sums(p, L * 200)
    for n in range(1, 201):
        assert g.q.denominator * sums[L * n] <= g.q.numerator * sums[n]


@given(st.lists(st.sampled_from("1-"), max_size=30), st.integers(0, 30))
def test_word_round_trip(chars, cut):
    text = "".join(chars)
    cut = min(cut, len(text))
    for s in (text, text[:cut] + "|" + text[cut:]):
        w = sb.Word.parse(s)
        assert sb.Word.parse(str(w)) == w
        assert w.reflected().reflected() == w


@given(small, st.integers(0, 10**6), st.integers(2, 12))
def test_semi_conjugacy_random_legal_words(p, start, n):
    L = p[0] + p[1]
    prefix = sb.gtm_fixed_point_prefix(p, L**6 + n).letters
    start %= prefix.size - n
    w = sb.Word(prefix[start : start + n])
    lhs = sb.block_map_phi(sb.substitute_gtm(p, w))
    rhs = sb.substitute_gpd(p, sb.block_map_phi(w))
    assert np.array_equal(lhs.letters[: len(rhs)], rhs.letters)
    assert sb.is_legal(p, w)


@given(params, st.integers(1, 60))
def test_two_sided_windows(p, radius):
    w = sb.gtm_two_sided_window(p, radius)
    assert w == w.reflected()
    f = sb.gtm_rho2_fixed_window(p, radius)
    assert sb.iterate_gtm(p, f, 2).window(-radius, radius) == f
    assert f.window(0, radius) == w.window(0, radius)


polys = st.lists(st.integers(-5, 5), min_size=1, max_size=4).filter(any)


@given(polys, polys, polys)
def test_rational_function_cancels_common_factors(a, b, c):
    r1 = tp.RationalFunction((tuple(a), tuple(c)), (tuple(b), tuple(c)))
    r2 = tp.RationalFunction.from_polys(a, b)
    assert r1 == r2
    num, den = r1.normalized()
    assert den[next(i for i, x in enumerate(den) if x)] > 0
    g = tp.poly_gcd(num, den)
    assert len(tp.poly_trim(g)) == 1


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=4, max_size=4))
def test_charpoly_matches_numpy(rows):
    a = tp.IntMatrix(tuple(tuple(r) for r in rows))
    ref = charpoly_numpy(rows)[::-1]
    assert np.allclose(tp.charpoly(a), ref, atol=1e-6 * max(1, np.abs(ref).max()))


@given(params, st.integers(1, 12))
def test_fixed_point_counts_from_traces(p, n):
    act = tp.action_matrices(p)
    for w in ("tm", "pd"):
        assert tp.fixed_point_counts_from_matrix(act, w, n) == tp.fixed_point_counts(p, w, n)
        assert tp.cycle_counts(p, w, n) >= 0


@given(st.fractions(0, 1), st.fractions(0, 1))
def test_cantor_monotone_and_symmetric(x, y):
    cx, cy = df.cantor_staircase(x), df.cantor_staircase(y)
    if x <= y:
        assert cx <= cy
    assert df.cantor_staircase(1 - x) == 1 - cx
    assert df.cantor_staircase(x / 3) == cx / 2


@given(params, st.floats(0, 1))
def test_kernel_bounds(p, x):
    v = float(df.kernel_eval(p, x))
    assert -1e-12 <= v <= float(df.kernel_sup_bound(p)) + 1e-12


@given(st.floats(-3, 3), st.integers(0, 4))
@settings(max_examples=50)
def test_extension_rules(x, shift):
    s = _curve()
    assert abs(df.distfn_extend(s, x + shift) - df.distfn_extend(s, x) - shift) <= 1e-12
    assert df.distfn_extend(s, -x) == -df.distfn_extend(s, x)


_CURVE = []


def _curve():
    if not _CURVE:
        _CURVE.append(df.f_volterra((2, 1), 6, 3**6 * 16))
    return _CURVE[0]


def test_fraction_strategy_sanity():
    assert df.cantor_staircase(Fraction(2, 9)) == Fraction(1, 4)
