"""Exact autocorrelation coefficients of the gTM family.

The coefficients obey

    eta(L m + r) = (alpha_r eta(m) + alpha_{L-r} eta(m+1)) / L,   eta(0) = 1,

with ``alpha_r = L - r - 2 min(k, l, r, L - r)``.  Every ``eta(n)`` with
``n <= L^J`` is an integer multiple of ``1 / ((L+1) L^J)``, so a table is
stored as integer numerators over one common denominator and extended a
whole base-L level at a time with numpy.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from gtm.params import Params, as_params
from gtm.substitution import fixed_point_signs

_INT64_SAFE = 1 << 60


def alpha(p, r: int) -> int:
    p = as_params(p)
    if not 0 <= r < p.L:
        raise ValueError(f"r must satisfy 0 <= r < {p.L}, got {r}")
    return p.L - r - 2 * min(p.k, p.l, r, p.L - r)


@lru_cache(maxsize=None)
def _alpha_ext(k: int, l: int) -> tuple[int, ...]:
    # alpha_0 .. alpha_L; the formula at r = L gives 0
    p = Params(k, l)
    return tuple(alpha(p, r) for r in range(p.L)) + (0,)


def alpha_vector(p) -> np.ndarray:
    """``alpha_r`` for ``r = 1 .. L-1``."""
    p = as_params(p)
    return np.array(_alpha_ext(p.k, p.l)[1 : p.L], dtype=np.int64)


def eta_one(p) -> Fraction:
    # the m=0, r=1 recursion is affine in eta(1): eta(1) (L - alpha_{L-1}) = alpha_1
    p = as_params(p)
    a = _alpha_ext(p.k, p.l)
    return Fraction(a[1], p.L - a[p.L - 1])


class AutocorrTable:
    """Memoised exact ``eta(m)`` for one parameter pair.

    Numerators live in ``_num`` over the common denominator ``_den``; both
    are swapped in together under a lock, so readers never see a half-built
    table.
    """

    def __init__(self, p):
        self.params = as_params(p)
        L = self.params.L
        self._lock = threading.Lock()
        self._levels = 0
        self._den = L + 1
        one = eta_one(self.params) * self._den
        assert one.denominator == 1
        self._num = np.array([self._den, int(one)], dtype=np.int64)

    @property
    def size(self) -> int:
        """Coefficients ``eta(0) .. eta(size-1)`` are stored."""
        return int(self._num.size)

    @property
    def denominator(self) -> int:
        return self._den

    def ensure(self, m_max: int) -> None:
        """Extend the table so that every ``|m| <= m_max`` is stored."""
        if m_max < self.size:
            return
        with self._lock:
            while self._num.size <= m_max:
                self._grow()

    def _grow(self) -> None:
        L = self.params.L
        a = np.array(_alpha_ext(self.params.k, self.params.l), dtype=object)
        j = self._levels
        den = self._den * L
        obj = den * L >= _INT64_SAFE
        old = self._num.astype(object) if obj else self._num
        # rescale to the finer denominator, then fill [L^j+1, L^{j+1}]
        prev = old * L
        if j == 0:
            lo, hi = 2, L
        else:
            lo, hi = L**j + 1, L ** (j + 1)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        m, r = n // L, n % L
        # at r = 0 the second coefficient vanishes; keep the index in range
        m1 = np.minimum(m + 1, prev.size - 1)
        if obj:
            coef_r = a[r]
            coef_s = a[L - r]
        else:
            a64 = a.astype(np.int64)
            coef_r, coef_s = a64[r], a64[L - r]
        acc = coef_r * prev[m] + coef_s * prev[m1]
        if obj:
            vals, rem = acc // L, acc % L
        else:
            vals, rem = np.divmod(acc, L)
        if np.any(rem != 0):
            raise ArithmeticError("inexact division in eta recursion")
        num = np.concatenate([prev, vals])
        if not obj:
            num = num.astype(np.int64)
        self._num, self._den, self._levels = num, den, j + 1

    def numerators(self, m_max: int) -> tuple[np.ndarray, int]:
        """Numerators of ``eta(0..m_max)`` and their common denominator."""
        self.ensure(m_max)
        num, den = self._num, self._den
        return num[: m_max + 1], den

    def __getitem__(self, m: int) -> Fraction:
        m = abs(int(m))
        self.ensure(m)
        num, den = self._num, self._den
        return Fraction(int(num[m]), den)

    def floats(self, m_max: int) -> np.ndarray:
        num, den = self.numerators(m_max)
        if num.dtype == object:
            return np.array([Fraction(int(x), den) for x in num], dtype=np.float64)
        return num.astype(np.float64) / den

    def squares_cumsum(self, n_max: int) -> tuple[np.ndarray, int]:
        """Exact ``Sigma(N)`` numerators for ``N = 0..n_max`` over ``den**2``."""
        num, den = self.numerators(n_max)
        sq = num.astype(object) ** 2
        sq[1:] *= 2
        return np.cumsum(sq), den * den


_tables: dict[Params, AutocorrTable] = {}
_tables_lock = threading.Lock()


def autocorr_table(p) -> AutocorrTable:
    p = as_params(p)
    with _tables_lock:
        table = _tables.get(p)
        if table is None:
            table = _tables[p] = AutocorrTable(p)
    return table


def eta(p, m: int) -> Fraction:
    """Exact ``eta(m)``; negative arguments use ``eta(-m) = eta(m)``."""
    return autocorr_table(p)[m]


def eta_values(p, m_max: int) -> list[Fraction]:
    table = autocorr_table(p)
    num, den = table.numerators(m_max)
    return [Fraction(int(x), den) for x in num]


def eta_bruteforce(p, m: int, N: int) -> float:
    """Finite average ``(1/N) sum_{n<N} v_n v_{n+m}`` over the fixed point."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    v = fixed_point_signs(p, np.arange(N + m)).astype(np.int64)
    return float(np.dot(v[:N], v[m : m + N])) / N


def eta_bruteforce_many(p, m_max: int, N: int) -> np.ndarray:
    """``eta_bruteforce`` for every ``m <= m_max`` from one shared prefix."""
    v = fixed_point_signs(p, np.arange(N + m_max)).astype(np.int64)
    head = v[:N]
    return np.array([np.dot(head, v[m : m + N]) for m in range(m_max + 1)]) / N


def wiener_sum(p, N: int) -> Fraction:
    """``Sigma(N) = sum_{|n| <= N} eta(n)^2``."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    sums, den = autocorr_table(p).squares_cumsum(N)
    return Fraction(int(sums[N]), den)


def wiener_sums(p, n_max: int) -> tuple[np.ndarray, int]:
    """Numerators of ``Sigma(0..n_max)`` over a common denominator."""
    return autocorr_table(p).squares_cumsum(n_max)


class GrowthBound(NamedTuple):
    q: Fraction
    classical: bool
    # classical: the bound compares Sigma(4N) with Sigma(2N)


def growth_bound_q(p) -> GrowthBound:
    """Constant q with ``Sigma(L N) <= q Sigma(N)``.

    For L > 2 this is ``(L^2 + sum_r (|alpha_r| + |alpha_{L-r}|)^2) / L^2``.
    For k = l = 1 the classical estimate ``Sigma(4N) <= 3/2 Sigma(2N)`` is
    returned with ``classical=True``.
    """
    p = as_params(p)
    L = p.L
    if L == 2:
        return GrowthBound(Fraction(3, 2), True)
    a = _alpha_ext(p.k, p.l)
    total = L * L + sum((abs(a[r]) + abs(a[L - r])) ** 2 for r in range(1, L))
    return GrowthBound(Fraction(total, L * L), False)


def psi_iterate(p, beta, steps: int, truncation: int) -> list[Fraction]:
    """Apply the sequence map Psi ``steps`` times on indices ``1..truncation-1``.

    ``beta[0]`` is ignored (the map fixes index 0 at 1); ``beta`` must hold
    at least ``truncation`` entries.
    """
    p = as_params(p)
    L = p.L
    t, power = truncation, 0
    while t > 1 and t % L == 0:
        t //= L
        power += 1
    if t != 1 or power < 1:
        raise ValueError(f"truncation must be a positive power of {L}, got {truncation}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    b = [Fraction(x) for x in beta][:truncation]
    if len(b) < truncation:
        raise ValueError(f"beta needs {truncation} entries, got {len(b)}")
    if any(abs(x) > 1 for x in b[1:]):
        raise ValueError("beta entries must lie in [-1, 1]")
    a = _alpha_ext(p.k, p.l)
    b[0] = Fraction(1)
    for _ in range(steps):
        ext = b
        new = [Fraction(1)] + [None] * (truncation - 1)
        for idx in range(1, truncation):
            n, r = divmod(idx, L)
            if r == 0:
                new[idx] = ext[n]
            else:
                new[idx] = (a[r] * ext[n] + a[L - r] * ext[n + 1]) / L
        b = new
    return b[1:]


def weighted_eta(p, h, m: int) -> complex:
    """Coefficient of ``delta_m`` for weights ``h = (h_plus, h_minus)``."""
    h_plus, h_minus = complex(h[0]), complex(h[1])
    e = float(eta(p, m))
    return complex(abs(h_plus + h_minus) ** 2 / 4 + abs(h_plus - h_minus) ** 2 / 4 * e)


def weighted_eta_exact(p, h, m: int) -> Fraction:
    """Exact variant for rational real weights."""
    h_plus, h_minus = Fraction(h[0]), Fraction(h[1])
    return (h_plus + h_minus) ** 2 / 4 + (h_plus - h_minus) ** 2 / 4 * eta(p, m)
