import numpy as np
import pytest

from gtm.params import Params
from gtm.substitution import (
    GPD,
    Word,
    block_map_phi,
    certificate_depth,
    fixed_point_signs,
    gtm_fixed_point_prefix,
    gtm_rho2_fixed_window,
    gtm_two_sided_window,
    is_legal,
    iterate_gtm,
    legality_search,
    substitute_gpd,
    substitute_gtm,
)

from oracles import gpd_iterate, iterate_word

PARAMS = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3), (3, 2), (5, 1), (4, 4)]


def test_params_validation():
    assert Params(2, 3).L == 5
    assert str(Params(2, 3)) == "(2,3)"
    for bad in [(0, 1), (1, 0), (-1, 2), (1.5, 1), (True, 1)]:
        with pytest.raises((ValueError, TypeError)):
            Params(*bad)


def test_parse_and_print_round_trip():
    for text in ["1-1", "-|1", "", "ab", "ba|ab", "|11"]:
        w = Word.parse(text)
        assert Word.parse(str(w)) == w
    assert str(Word.parse("-1|1-")) == "-1|1-"
    with pytest.raises(ValueError):
        Word.parse("1x")
    with pytest.raises(ValueError):
        Word.parse("1|1|1")


def test_classic_images():
    assert str(substitute_gtm((1, 1), "1")) == "1-"
    assert str(substitute_gtm((1, 1), "-")) == "-1"
    assert str(iterate_gtm((1, 1), "1", 3)) == "1--1-11-"
    assert str(substitute_gtm((2, 1), "1")) == "11-"
    assert str(substitute_gtm((2, 1), "-")) == "--1"


def test_gpd_images():
    assert str(substitute_gpd((2, 1), "a")) == "bab"
    assert str(substitute_gpd((2, 1), "b")) == "baa"
    assert str(substitute_gpd((1, 1), "a")) == "ab"
    assert str(substitute_gpd((1, 1), "b")) == "aa"


@pytest.mark.parametrize("p", PARAMS)
def test_images_match_string_rewriting(p):
    for n in range(4):
        ref = iterate_word(*p, n)
        assert iterate_gtm(p, "1", n).letters.tolist() == ref
    assert str(Word(substitute_gpd(p, "ab").letters, GPD)) == gpd_iterate(*p, "ab", 1)


@pytest.mark.parametrize("p", PARAMS)
def test_digit_formula_agrees_with_iteration(p):
    L = p[0] + p[1]
    n = 5 if L <= 4 else 3
    assert gtm_fixed_point_prefix(p, L**n) == iterate_gtm(p, "1", n)
    with pytest.raises(ValueError):
        gtm_fixed_point_prefix(p, 0)


def test_substitution_keeps_origin():
    w = Word.parse("-|1")
    img = substitute_gtm((2, 1), w)
    assert img.origin_offset == -3
    assert str(img) == "--1|11-"


def test_two_sided_window_examples():
    w = gtm_two_sided_window((1, 1), 2)
    assert str(w) == "-1|1-"
    assert w.at(-1) == 1 and w.at(0) == 1
    assert w.positions == range(-2, 2)


@pytest.mark.parametrize("p", PARAMS)
@pytest.mark.parametrize("radius", [1, 3, 10, 37])
def test_two_sided_window_is_palindrome(p, radius):
    w = gtm_two_sided_window(p, radius)
    assert w == w.reflected()
    assert len(w) == 2 * radius


@pytest.mark.parametrize("p", PARAMS)
def test_rho2_fixed_window(p):
    for radius in [1, 7, 40]:
        w = gtm_rho2_fixed_window(p, radius)
        assert iterate_gtm(p, w, 2).window(-radius, radius) == w


@pytest.mark.parametrize("p", PARAMS)
def test_reflection_is_rho2_fixed_only_for_equal_parameters(p):
    radius = 30
    w = gtm_two_sided_window(p, radius)
    fixed = iterate_gtm(p, w, 2).window(-radius, radius) == w
    assert fixed == (p[0] == p[1])


def test_reflected_one_sided_point_has_illegal_words():
    # for k != l the language is not closed under reversal
    assert is_legal((2, 1), Word.parse("-11--"))
    assert not is_legal((2, 1), Word.parse("--11-"))
    assert is_legal((3, 3), Word.parse("-111--"[::-1]))


def test_window_and_at_bounds():
    w = gtm_two_sided_window((2, 1), 4)
    with pytest.raises(IndexError):
        w.at(4)
    with pytest.raises(IndexError):
        w.window(-5, 0)
    assert w.window(-1, 1).letters.tolist() == [1, 1]


def test_complement_and_alphabet_errors():
    assert str(Word.parse("1-").complement()) == "-1"
    with pytest.raises(ValueError):
        Word.parse("ab").complement()
    with pytest.raises(ValueError):
        substitute_gtm((1, 1), Word.parse("ab"))
    with pytest.raises(ValueError):
        Word([2])


def test_block_map_examples():
    assert str(block_map_phi("1-")) == "a"
    assert str(block_map_phi("11")) == "b"
    assert str(block_map_phi(substitute_gtm((2, 1), "1-"))) == "babba"
    with pytest.raises(ValueError):
        block_map_phi("1")


@pytest.mark.parametrize("p", PARAMS)
def test_semi_conjugacy_on_prefix_words(p):
    prefix = gtm_fixed_point_prefix(p, 400).letters
    for n in range(2, 9):
        for i in range(0, 400 - n, 17):
            w = Word(prefix[i : i + n])
            lhs = block_map_phi(substitute_gtm(p, w))
            rhs = substitute_gpd(p, block_map_phi(w))
            L = p[0] + p[1]
            assert (len(lhs), len(rhs)) == (L * n - 1, L * (n - 1))
            assert np.array_equal(lhs.letters[: len(rhs)], rhs.letters)


def test_legality_examples():
    assert is_legal((1, 1), Word.parse("11-"))
    assert not is_legal((1, 1), Word.parse("111"))
    assert is_legal((2, 1), Word.parse("11"))
    res = legality_search((1, 1), Word.parse("111"))
    assert res.conclusive and not res.legal


def test_legality_inconclusive_when_capped():
    w = gtm_fixed_point_prefix((1, 1), 40)
    res = legality_search((1, 1), Word(w.letters[3:40]), max_iterations=2)
    assert not res.conclusive
    assert legality_search((1, 1), Word(w.letters[3:40])).legal


def test_certificate_depth():
    assert certificate_depth((1, 1), 2) == 3
    assert certificate_depth((1, 1), 5) == 5
    assert certificate_depth((2, 1), 10) == 5


@pytest.mark.parametrize("p", [(1, 1), (2, 1), (3, 2)])
def test_legality_matches_bruteforce_language(p):
    L = p[0] + p[1]
    big = fixed_point_signs(p, np.arange(L ** (7 if L < 4 else 5)))
    n = 5
    seen = {tuple(big[i : i + n]) for i in range(big.size - n)}
    seen |= {tuple(-np.array(s)) for s in seen}
    for code in range(2**n):
        letters = [1 if (code >> b) & 1 else -1 for b in range(n)]
        assert is_legal(p, Word(letters)) == (tuple(letters) in seen)
