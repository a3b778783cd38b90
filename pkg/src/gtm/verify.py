"""Invariant suite for a single parameter pair, as driven by ``gtm verify``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from gtm import autocorrelation as ac
from gtm import diffraction as df
from gtm import substitution as sb
from gtm import topology as tp
from gtm.params import Params, as_params

SCALES = ("quick", "full")


@dataclass(frozen=True)
class Scale:
    eta_max: int
    oracle_levels: int
    wiener_n: int
    grid: int
    legal_words: int
    n_max: int
    terms: int


_SCALES = {
    "quick": Scale(eta_max=2000, oracle_levels=4, wiener_n=300, grid=1 << 17, legal_words=40, n_max=12, terms=10**4),
    "full": Scale(eta_max=10_000, oracle_levels=6, wiener_n=2000, grid=1 << 20, legal_words=200, n_max=12, terms=10**5),
}


class Check:
    def __init__(self, name: str, ok: bool, detail: str = ""):
        self.name, self.ok, self.detail = name, bool(ok), detail

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag} {self.name}" + (f" ({self.detail})" if self.detail else "")


def _substitution_checks(p: Params, s: Scale, rng: np.random.Generator) -> list[Check]:
    out = []
    w = sb.iterate_gtm(p, "1", 4)
    out.append(Check("fixed point digit formula", w == sb.gtm_fixed_point_prefix(p, p.L**4)))
    R = p.L**2 + 1
    two = sb.gtm_two_sided_window(p, R)
    out.append(Check("reflected window is a palindrome", two == two.reflected()))
    fixed = sb.gtm_rho2_fixed_window(p, R)
    out.append(Check("rho^2 fixes the seeded two-sided point", sb.iterate_gtm(p, fixed, 2).window(-R, R) == fixed))
    prefix = sb.gtm_fixed_point_prefix(p, 4 * p.L**4).letters
    ok = True
    for _ in range(s.legal_words):
        n = int(rng.integers(2, 3 * p.L + 2))
        i = int(rng.integers(0, prefix.size - n))
        word = sb.Word(prefix[i : i + n])
        lhs = sb.block_map_phi(sb.substitute_gtm(p, word))
        rhs = sb.substitute_gpd(p, sb.block_map_phi(word))
        ok &= np.array_equal(lhs.letters[: len(rhs)], rhs.letters)
    out.append(Check("block map semi-conjugacy", ok, f"{s.legal_words} legal words"))
    return out


def _autocorrelation_checks(p: Params, s: Scale) -> list[Check]:
    out = []
    L = p.L
    table = ac.autocorr_table(p)
    table.ensure(L * s.eta_max)
    out.append(Check("eta(0) = 1", table[0] == 1))
    out.append(Check("eta(1) = (L-3)/(L+1)", table[1] == Fraction(L - 3, L + 1)))
    num, den = table.numerators(L * s.eta_max)
    m = np.arange(s.eta_max + 1)
    out.append(Check("eta(L m) = eta(m)", bool(np.all(num[L * m] == num[m])), f"m <= {s.eta_max}"))
    out.append(Check("|eta| <= 1", bool(np.all(np.abs(num.astype(object)) <= den))))
    a = [Fraction(x) for x in ac._alpha_ext(p.k, p.l)]
    ok = all(
        table[L * q + r] == (a[r] * table[q] + a[L - r] * table[q + 1]) / L
        for q in range(200)
        for r in range(L)
    )
    out.append(Check("recursion holds exactly", ok, "m < 200"))
    errors = []
    N = L
    while N < 1024:
        N *= L
    for _ in range(s.oracle_levels):
        if N > 1 << 20:
            break
        bf = ac.eta_bruteforce_many(p, 16, N)
        errors.append(float(np.max(np.abs(bf - table.floats(16)))))
        N *= L
    out.append(Check("brute-force oracle agreement", errors[-1] <= 1e-2, f"final error {errors[-1]:.3g}"))
    g = ac.growth_bound_q(p)
    sums, _ = ac.wiener_sums(p, max(L, 4) * s.wiener_n)
    if g.classical:
        ok = all(2 * sums[4 * n] <= 3 * sums[2 * n] for n in range(1, s.wiener_n + 1))
    else:
        ok = all(g.q.denominator * sums[L * n] <= g.q.numerator * sums[n] for n in range(1, s.wiener_n + 1))
    out.append(Check("Wiener growth bound", ok, f"q = {g.q}"))
    return out


def _diffraction_checks(p: Params, s: Scale) -> list[Check]:
    out = []
    kern = df.Kernel.for_params(p)
    m1, m2 = df.kernel_moments(kern)
    out.append(Check("kernel moments", abs(m1 - 1) <= 1e-10 and abs(m2 - 0.5) <= 1e-10))
    y = df.kernel_grid(kern, s.grid)
    out.append(Check("kernel non-negative", float(y.min()) >= -1e-12))
    out.append(Check("kernel symmetric", float(np.max(np.abs(y - y[::-1]))) <= 1e-12))
    out.append(Check("kernel sup bound", df.kernel_within_sup_bound(kern, s.grid), f"bound {df.kernel_sup_bound(p)}"))
    n = df.max_iterations_for_grid(p, s.grid)
    vol = df.f_volterra(p, n, s.grid)
    four = df.fourier_samples(p, s.terms, s.grid)
    out.append(Check("Volterra curve non-decreasing", df.non_decreasing(vol)))
    out.append(Check("F(1/2) = 1/2", abs(vol.at_fraction(1, 2) - 0.5) <= 1e-6))
    res = df.functional_equation_residual(p, vol)
    if n >= 1:
        prev = df.functional_equation_residual(p, df.f_volterra(p, n - 1, s.grid))
        out.append(Check("functional equation residual shrinks", res < prev, f"{prev:.3g} -> {res:.3g}"))
    # the residual is sup |F_n - F_(n+1)|, a proxy for the truncation error of F_n
    gap = float(np.max(np.abs(vol.values - four.values)))
    tol = max(1e-2, 4 * res)
    out.append(Check("Fourier and Volterra agree", gap <= tol, f"sup gap {gap:.3g}, n={n}, tol {tol:.3g}"))
    return out


def _topology_checks(p: Params, s: Scale, act=None) -> list[Check]:
    report = tp.topology_report(p, s.n_max, act)
    return [Check(f"topology: {name}", ok) for name, ok in report["checks"].items()]


def run_invariants(p, scale: str = "quick", seed: int = 0, act=None) -> list[Check]:
    p = as_params(p)
    if scale not in _SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    s = _SCALES[scale]
    rng = np.random.default_rng(seed)
    groups: list[Callable[[], list[Check]]] = [
        lambda: _substitution_checks(p, s, rng),
        lambda: _autocorrelation_checks(p, s),
        lambda: _diffraction_checks(p, s),
        lambda: _topology_checks(p, s, act),
    ]
    out: list[Check] = []
    for g in groups:
        out.extend(g())
    return out
