"""Words over the gTM alphabet {1, 1bar} and the gpd alphabet {a, b}.

gTM letters are stored as int8 signs (+1 for ``1``, -1 for ``1bar``); gpd
letters as uint8 codes (0 for ``a``, 1 for ``b``).  ASCII form uses ``1``
and ``-`` for gTM, ``a`` and ``b`` for gpd, and a ``|`` in front of the
letter at absolute position 0 of a two-sided window.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from gtm.params import Params, as_params

GTM = "gtm"
GPD = "gpd"

_GTM_CHARS = {"1": 1, "-": -1}
_GPD_CHARS = {"a": 0, "b": 1}
_DTYPES = {GTM: np.int8, GPD: np.uint8}


@dataclass(frozen=True, eq=False)
class Word:
    """A finite window of a sequence.

    ``letters[i]`` sits at absolute position ``i + origin_offset``.
    """

    letters: np.ndarray
    alphabet: str = GTM
    origin_offset: int = 0

    def __post_init__(self):
        if self.alphabet not in _DTYPES:
            raise ValueError(f"unknown alphabet {self.alphabet!r}")
        arr = np.array(self.letters, dtype=_DTYPES[self.alphabet]).reshape(-1)
        valid = (1, -1) if self.alphabet == GTM else (0, 1)
        if arr.size and not np.isin(arr, valid).all():
            raise ValueError(f"letters outside the {self.alphabet} alphabet")
        arr.setflags(write=False)
        object.__setattr__(self, "letters", arr)
        object.__setattr__(self, "origin_offset", int(self.origin_offset))

    @classmethod
    def parse(cls, text: str) -> Word:
        """Inverse of ``str``; the alphabet is inferred from the characters."""
        body = text.replace(" ", "")
        offset = 0
        if "|" in body:
            if body.count("|") > 1:
                raise ValueError("at most one origin marker allowed")
            offset = -body.index("|")
            body = body.replace("|", "")
        chars = set(body)
        if chars <= set(_GTM_CHARS):
            return cls([_GTM_CHARS[c] for c in body], GTM, offset)
        if chars <= set(_GPD_CHARS):
            return cls([_GPD_CHARS[c] for c in body], GPD, offset)
        raise ValueError(f"cannot parse word {text!r}")

    def __len__(self):
        return int(self.letters.size)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.origin_offset == other.origin_offset
            and np.array_equal(self.letters, other.letters)
        )

    def __hash__(self):
        return hash((self.alphabet, self.origin_offset, self.letters.tobytes()))

    def __str__(self):
        if self.alphabet == GTM:
            chars = ["1" if s > 0 else "-" for s in self.letters]
        else:
            chars = ["a" if c == 0 else "b" for c in self.letters]
        bar = -self.origin_offset
        if self.origin_offset < 0 and bar <= len(chars):
            chars.insert(bar, "|")
        return "".join(chars)

    def __repr__(self):
        return f"Word({str(self)!r}, origin_offset={self.origin_offset})"

    @property
    def positions(self) -> range:
        return range(self.origin_offset, self.origin_offset + len(self))

    def at(self, position: int) -> int:
        i = position - self.origin_offset
        if not 0 <= i < len(self):
            raise IndexError(f"position {position} outside {self.positions}")
        return int(self.letters[i])

    def window(self, start: int, stop: int) -> Word:
        """Restriction to absolute positions ``start <= i < stop``."""
        a, b = start - self.origin_offset, stop - self.origin_offset
        if a < 0 or b > len(self) or a > b:
            raise IndexError(f"[{start}, {stop}) not inside {self.positions}")
        return Word(self.letters[a:b], self.alphabet, start)

    def reflected(self) -> Word:
        """Mirror about the marker: position i goes to -i-1."""
        return Word(self.letters[::-1], self.alphabet, -(self.origin_offset + len(self)))

    def complement(self) -> Word:
        if self.alphabet != GTM:
            raise ValueError("complement is defined for gTM words only")
        return Word(-self.letters, GTM, self.origin_offset)


def _as_word(w, alphabet: str) -> Word:
    if isinstance(w, str):
        w = Word.parse(w)
    elif not isinstance(w, Word):
        w = Word(w, alphabet)
    if w.alphabet != alphabet:
        raise ValueError(f"expected a {alphabet} word, got {w.alphabet}")
    return w


@lru_cache(maxsize=None)
def _gtm_images(k: int, l: int) -> np.ndarray:
    # row 0 is the image of -1, row 1 the image of +1
    plus = np.array([1] * k + [-1] * l, dtype=np.int8)
    return np.stack([-plus, plus])


@lru_cache(maxsize=None)
def _gpd_images(k: int, l: int) -> np.ndarray:
    stem = [1] * (k - 1) + [0] + [1] * (l - 1)
    return np.array([stem + [1], stem + [0]], dtype=np.uint8)


def substitute_gtm(p, w) -> Word:
    """Apply ``1 -> 1^k 1bar^l``, ``1bar -> 1bar^k 1^l`` letterwise."""
    p = as_params(p)
    w = _as_word(w, GTM)
    images = _gtm_images(p.k, p.l)
    out = images[(w.letters > 0).astype(np.intp)].reshape(-1)
    return Word(out, GTM, p.L * w.origin_offset)


def substitute_gpd(p, w) -> Word:
    """Apply ``a -> b^(k-1) a b^(l-1) b``, ``b -> b^(k-1) a b^(l-1) a``."""
    p = as_params(p)
    w = _as_word(w, GPD)
    out = _gpd_images(p.k, p.l)[w.letters.astype(np.intp)].reshape(-1)
    return Word(out, GPD, p.L * w.origin_offset)


def iterate_gtm(p, w, times: int) -> Word:
    w = _as_word(w, GTM)
    for _ in range(times):
        w = substitute_gtm(p, w)
    return w


def fixed_point_signs(p, indices) -> np.ndarray:
    """Letters ``v_j`` of the one-sided fixed point, by base-L digits of j.

    Each digit ``r >= k`` of ``j`` flips the sign once.
    """
    p = as_params(p)
    n = np.array(indices, dtype=np.int64)
    if n.size and n.min() < 0:
        raise ValueError("indices must be non-negative")
    flips = np.zeros(n.shape, dtype=np.int64)
    while n.size and n.any():
        flips += (n % p.L) >= p.k
        n //= p.L
    return np.where(flips % 2 == 0, 1, -1).astype(np.int8)


def gtm_fixed_point_prefix(p, n: int) -> Word:
    """Return ``v_0 ... v_{n-1}`` of the fixed point with ``v_0 = 1``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return Word(fixed_point_signs(p, np.arange(n)), GTM)


def gtm_two_sided_window(p, radius: int) -> Word:
    """The palindromic two-sided fixed point on positions ``-radius .. radius-1``."""
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    v = fixed_point_signs(p, np.arange(radius))
    return Word(np.concatenate([v[::-1], v]), GTM, -radius)


def gtm_rho2_fixed_window(p, radius: int) -> Word:
    """Window of the two-sided fixed point of rho^2 grown from the seed ``1|1``.

    The left half is the tail of ``rho^(2n)(1)``.  It agrees with the
    reflected window exactly when k = l; otherwise the reflection of the
    one-sided fixed point contains words that are not legal.
    """
    p = as_params(p)
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    span = 1
    while span < radius:
        span *= p.L * p.L
    left = fixed_point_signs(p, np.arange(span - radius, span))
    right = fixed_point_signs(p, np.arange(radius))
    return Word(np.concatenate([left, right]), GTM, -radius)


def block_map_phi(w) -> Word:
    """Two-block factor map: unequal neighbours give ``a``, equal give ``b``."""
    w = _as_word(w, GTM)
    if len(w) < 2:
        raise ValueError("block map needs a word of length >= 2")
    equal = (w.letters[:-1] == w.letters[1:]).astype(np.uint8)
    return Word(equal, GPD, w.origin_offset)


class LegalitySearch(NamedTuple):
    legal: bool
    depth: int
    conclusive: bool


def certificate_depth(p, length: int) -> int:
    """Substitution depth after which a missing word is certainly illegal.

    A legal word of length m <= L^j + 1 sits inside rho^j(ab) for a legal
    two-letter word ab, and every legal two-letter word already occurs in
    rho^3(1) or rho^3(1bar).
    """
    p = as_params(p)
    j, span = 0, 1
    while span < length - 1:
        span *= p.L
        j += 1
    return j + 3


def legality_search(p, w, max_iterations: int = 32) -> LegalitySearch:
    """Bounded search for ``w`` inside ``rho^n(1)`` and ``rho^n(1bar)``."""
    p = as_params(p)
    w = _as_word(w, GTM)
    if len(w) < 1:
        raise ValueError("word must be non-empty")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if len(w) == 1:
        return LegalitySearch(True, 0, True)
    need = certificate_depth(p, len(w))
    depth = min(max_iterations, need)
    # rho^n(1bar) is the complement of rho^n(1)
    haystack = (fixed_point_signs(p, np.arange(p.L**depth)) > 0).tobytes()
    needle = (w.letters > 0).tobytes()
    flipped = (w.letters < 0).tobytes()
    found = needle in haystack or flipped in haystack
    return LegalitySearch(found, depth, found or depth >= need)


def is_legal(p, w, max_iterations: int = 32) -> bool:
    """True iff ``w`` is found; an inconclusive search also reports False."""
    return legality_search(p, w, max_iterations).legal
