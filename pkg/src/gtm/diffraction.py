"""Distribution function F of the gTM diffraction measure on [0, 1].

Two independent routes are provided:

* ``fourier``: partial sums of ``F(x) = x + sum_m eta(m) sin(2 pi m x) / (m pi)``;
* ``volterra``: the Riesz-product density ``f_n(z) = prod_j theta(L^j z)``
  integrated with the composite trapezoid rule.

All floating point work is binary64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from gtm import _parallel
from gtm.autocorrelation import alpha_vector, autocorr_table, growth_bound_q
from gtm.params import Params, as_params

POINTS_PER_PERIOD = 16
METHODS = ("fourier", "volterra", "cantor")


@dataclass(frozen=True)
class Kernel:
    params: Params
    alpha_coeffs: tuple[int, ...]

    @classmethod
    def for_params(cls, p) -> Kernel:
        p = as_params(p)
        return cls(p, tuple(int(a) for a in alpha_vector(p)))

    @property
    def weights(self) -> np.ndarray:
        """Cosine weights ``2 alpha_r / L`` for ``r = 1 .. L-1``."""
        return 2.0 * np.asarray(self.alpha_coeffs, dtype=np.float64) / self.params.L


def _kernel(kern_or_p) -> Kernel:
    return kern_or_p if isinstance(kern_or_p, Kernel) else Kernel.for_params(kern_or_p)


def _theta_turns(kern: Kernel, turns: np.ndarray) -> np.ndarray:
    # theta at points already reduced mod 1
    out = np.ones_like(turns, dtype=np.float64)
    angle = 2.0 * np.pi * turns
    for r, w in enumerate(kern.weights, start=1):
        if w:
            out += w * np.cos(r * angle)
    return out


def kernel_eval(kern, x):
    """``theta(x) = 1 + (2/L) sum_r alpha_r cos(2 pi r x)``; scalar or array."""
    kern = _kernel(kern)
    arr = np.asarray(x, dtype=np.float64)
    val = _theta_turns(kern, np.mod(arr, 1.0))
    return float(val) if val.ndim == 0 else val


def kernel_grid(kern, grid: int) -> np.ndarray:
    """``theta(j / grid)`` for ``j = 0 .. grid`` with exact argument reduction."""
    kern = _kernel(kern)
    j = np.arange(grid + 1, dtype=np.int64)
    return _theta_turns(kern, (j % grid) / grid)


def kernel_moments(kern, quadrature_points: int = 1 << 14) -> tuple[float, float]:
    """Trapezoid approximations of the integrals of theta over [0,1] and [0,1/2]."""
    if quadrature_points < 2:
        raise ValueError("quadrature_points must be >= 2")
    kern = _kernel(kern)
    M = quadrature_points + quadrature_points % 2
    y = kernel_grid(kern, M)
    h = 1.0 / M
    full = h * (y.sum() - 0.5 * (y[0] + y[-1]))
    half = y[: M // 2 + 1]
    return float(full), float(h * (half.sum() - 0.5 * (half[0] + half[-1])))


def kernel_sup_bound(p) -> Fraction:
    """Upper bound ``1 + (2/L) sum_r |alpha_r|`` for the sup norm of theta.

    From ``|alpha_r| + |alpha_{L-r}| <= L`` (and ``<= L-2`` at r=1 when
    L > 2) this is strictly below L unless k = l = 1, where it equals 2.
    It is never smaller than ``growth_bound_q``, so it is itself an
    admissible growth constant.
    """
    p = as_params(p)
    return 1 + Fraction(2, p.L) * sum(abs(int(a)) for a in alpha_vector(p))


def sup_norm_q(p) -> Fraction:
    """The Wiener growth constant q, or 2 when k = l = 1."""
    p = as_params(p)
    return Fraction(2) if p.L == 2 else growth_bound_q(p).q


def kernel_grid_max(kern, grid: int = 1 << 16) -> float:
    return float(kernel_grid(_kernel(kern), grid).max())


def kernel_sup_bound_check(kern, grid: int = 1 << 16) -> bool:
    """Grid maximum of theta against ``sup_norm_q``.

    This fails for most L > 2: for (2, 1), theta(1/4) = 5/3 > 11/9.
    ``kernel_within_sup_bound`` checks the coefficient-sum constant instead.
    """
    kern = _kernel(kern)
    return kernel_grid_max(kern, grid) <= float(sup_norm_q(kern.params)) + 1e-12


def kernel_within_sup_bound(kern, grid: int = 1 << 16) -> bool:
    kern = _kernel(kern)
    return kernel_grid_max(kern, grid) <= float(kernel_sup_bound(kern.params)) + 1e-12


@dataclass(frozen=True, eq=False)
class DistributionSamples:
    """``F(j / grid_size)`` for ``j = 0 .. grid_size``."""

    params: Params | None
    grid_size: int
    values: np.ndarray
    method_tag: str
    meta: dict = field(default_factory=dict)
    # quadrature mass of each cell [j/M, (j+1)/M]; kept because differences
    # of values near F = 1/2 or 1 lose cells lighter than one ulp
    cell_masses: np.ndarray | None = None

    def __post_init__(self):
        if self.method_tag not in METHODS:
            raise ValueError(f"unknown method {self.method_tag!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid_size + 1,):
            raise ValueError(f"expected {self.grid_size + 1} samples, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.cell_masses is not None:
            masses = np.asarray(self.cell_masses, dtype=np.float64)
            if masses.shape != (self.grid_size,):
                raise ValueError(f"expected {self.grid_size} cell masses, got {masses.shape}")
            masses.setflags(write=False)
            object.__setattr__(self, "cell_masses", masses)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid_size + 1) / self.grid_size

    def at_fraction(self, numerator: int, denominator: int) -> float:
        """Sample at the grid point ``numerator/denominator``."""
        j, rem = divmod(numerator * self.grid_size, denominator)
        if rem:
            raise ValueError(f"{numerator}/{denominator} is not a grid point")
        return float(self.values[j])


def _check_terms(terms: int) -> None:
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")


def fourier_coefficients(p, terms: int) -> np.ndarray:
    """``b_m = eta(m) / (m pi)`` for ``m = 1 .. terms``."""
    _check_terms(terms)
    eta = autocorr_table(p).floats(terms)[1:]
    return eta / (np.arange(1, terms + 1) * np.pi)


def f_fourier(p, x, terms: int):
    """Partial sum with ``terms`` sine terms by direct summation."""
    b = fourier_coefficients(p, terms)
    arr = np.asarray(x, dtype=np.float64)
    flat = arr.reshape(-1)
    m = np.arange(1, terms + 1, dtype=np.float64)
    # reduce x mod 1 but keep the sign, so the sum stays exactly odd
    frac = np.fmod(flat, 1.0)
    out = np.empty_like(flat)
    block = max(1, (1 << 22) // terms)

    def chunk(a, b_):
        s = np.sin(2.0 * np.pi * np.outer(frac[a:b_], m)) @ b
        return flat[a:b_] + s

    for a in range(0, flat.size, block):
        out[a : a + block] = chunk(a, min(a + block, flat.size))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def fourier_samples(p, terms: int, grid_size: int) -> DistributionSamples:
    """Same partial sum on the uniform grid, evaluated with one FFT.

    ``sin(2 pi m j / M)`` is M-periodic in m, so coefficients are folded mod
    M before an inverse FFT of length M.
    """
    p = as_params(p)
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    b = fourier_coefficients(p, terms)
    M = grid_size
    folded = np.zeros(M, dtype=np.float64)
    np.add.at(folded, np.arange(1, terms + 1) % M, b)
    s = np.fft.ifft(folded).imag * M
    j = np.arange(M + 1)
    values = j / M + np.append(s, s[0])
    values[0], values[-1] = 0.0, 1.0
    if M % 2 == 0:
        values[M // 2] = 0.5
    return DistributionSamples(p, M, values, "fourier", {"terms": terms})


def riesz_density(p, n: int, x):
    """``f_n(x) = prod_{j<n} theta(L^j x)``; ``f_0 = 1``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    p = as_params(p)
    kern = Kernel.for_params(p)
    arr = np.asarray(x, dtype=np.float64)
    out = np.ones_like(arr)
    turns = np.mod(arr, 1.0)
    for _ in range(n):
        out = out * _theta_turns(kern, turns)
        turns = np.mod(turns * p.L, 1.0)
    return float(out) if out.ndim == 0 else out


def riesz_density_grid(p, n: int, grid_size: int) -> np.ndarray:
    """``f_n(j / grid_size)`` for ``j = 0 .. grid_size`` with integer phase reduction."""
    p = as_params(p)
    kern = Kernel.for_params(p)
    M = grid_size
    out = np.empty(M + 1, dtype=np.float64)

    def chunk(a, b):
        j = np.arange(a, b, dtype=np.int64) % M
        acc = np.ones(b - a, dtype=np.float64)
        for _ in range(n):
            acc *= _theta_turns(kern, j / M)
            j = (j * p.L) % M
        return acc

    return _parallel.map_chunks(chunk, M + 1, out)


def resolution_floor(p, iterations: int) -> int:
    return POINTS_PER_PERIOD * as_params(p).L ** iterations


def max_iterations_for_grid(p, grid_size: int) -> int:
    n = 0
    while resolution_floor(p, n + 1) <= grid_size:
        n += 1
    return n


def f_volterra(p, iterations: int, grid_size: int) -> DistributionSamples:
    """Sampled ``F_n`` from ``F_0(x) = x`` through ``n`` Volterra steps."""
    p = as_params(p)
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    floor = resolution_floor(p, iterations)
    if grid_size < floor:
        raise ValueError(
            f"grid_size {grid_size} below resolution floor: need at least {floor} "
            f"points for {iterations} iterations with L={p.L}"
        )
    f = riesz_density_grid(p, iterations, grid_size)
    cells = 0.5 * (f[1:] + f[:-1])
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    total = cum[-1]
    values = cum / total
    values[0], values[-1] = 0.0, 1.0
    return DistributionSamples(
        p, grid_size, values, "volterra", {"iterations": iterations}, cells / total
    )


def distfn_extend(samples: DistributionSamples, x):
    """Evaluate F on the real line from samples on [0, 1].

    Uses ``F(x + 1) = 1 + F(x)`` on the half line, ``F(-x) = -F(x)`` for
    negative x, and linear interpolation between grid points.
    """
    arr = np.asarray(x, dtype=np.float64)
    mag = np.abs(arr)
    whole = np.floor(mag)
    val = whole + np.interp(mag - whole, samples.x, samples.values)
    val = np.where(arr < 0, -val, val)
    return float(val) if val.ndim == 0 else val


def _extend_windows(values: np.ndarray, periods: int) -> np.ndarray:
    # F on [0, periods] at spacing 1/M from samples on [0, 1]
    inc = np.diff(values)
    return np.concatenate([[0.0], np.cumsum(np.tile(inc, periods))])


def functional_equation_residual(p, samples: DistributionSamples) -> float:
    """Sup over grid points of ``|F(x) - (1/L) int_0^{Lx} theta(y/L) dF(y)|``.

    The Stieltjes integral uses midpoint values of theta against sample
    increments, with F extended periodically to [0, L].
    """
    p = as_params(p)
    L, M = p.L, samples.grid_size
    kern = Kernel.for_params(p)
    inc = np.tile(np.diff(samples.values), L)
    mid = (np.arange(L * M, dtype=np.float64) + 0.5) / (M * L)
    weighted = _theta_turns(kern, mid) * inc
    rhs_all = np.concatenate([[0.0], np.cumsum(weighted)]) / L
    rhs = rhs_all[:: L][: M + 1]
    return float(np.max(np.abs(samples.values - rhs)))


def cantor_staircase(x):
    """The Cantor function on [0, 1]: ternary digits to binary up to the first 1."""
    if isinstance(x, Fraction):
        return _cantor_exact(x)
    arr = np.asarray(x, dtype=np.float64)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("x must lie in [0, 1]")
    flat = arr.reshape(-1)
    out = np.array([float(_cantor_exact(Fraction(float(v)))) for v in flat])
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def _cantor_exact(x: Fraction) -> Fraction:
    # ternary digits of a rational are eventually periodic; once the
    # remainder repeats, the binary tail sums as a geometric series
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    if x == 1:
        return Fraction(1)
    bits: list[int] = []
    seen: dict[Fraction, int] = {}
    while x not in seen:
        seen[x] = len(bits)
        x *= 3
        digit = int(x)
        x -= digit
        if digit == 1:
            bits.append(1)
            return _binary_value(bits, [])
        bits.append(digit // 2)
    start = seen[x]
    return _binary_value(bits[:start], bits[start:])


def _binary_value(head: list[int], cycle: list[int]) -> Fraction:
    value = sum((Fraction(b, 2 ** (i + 1)) for i, b in enumerate(head)), Fraction(0))
    if cycle and any(cycle):
        block = sum(b << (len(cycle) - 1 - i) for i, b in enumerate(cycle))
        value += Fraction(block, (2 ** len(cycle) - 1) * 2 ** len(head))
    return value


def cantor_samples(grid_size: int) -> DistributionSamples:
    x = [Fraction(j, grid_size) for j in range(grid_size + 1)]
    values = np.array([float(_cantor_exact(v)) for v in x])
    return DistributionSamples(None, grid_size, values, "cantor", {})


def increments_at(samples: DistributionSamples, resolution: int) -> np.ndarray:
    """Masses of the cells ``[i/resolution, (i+1)/resolution]``."""
    M = samples.grid_size
    if resolution < 1 or M % resolution:
        raise ValueError(f"resolution {resolution} must divide the grid size {M}")
    if samples.cell_masses is not None:
        return samples.cell_masses.reshape(resolution, -1).sum(axis=1)
    return np.diff(samples.values[:: M // resolution])


def strictly_increasing_at(samples: DistributionSamples, resolution: int) -> bool:
    """Every cell of width ``1/resolution`` carries positive mass."""
    return bool(np.all(increments_at(samples, resolution) > 0))


def non_decreasing(samples: DistributionSamples) -> bool:
    return bool(np.all(np.diff(samples.values) >= 0))


def write_curve_csv(samples: DistributionSamples, fh, points: int | None = None) -> None:
    """Write ``# key=value`` header lines and ``x,F`` rows (17 significant digits).

    ``points`` thins the output to that many intervals; it must divide the grid.
    """
    M = samples.grid_size
    stride = 1
    if points is not None:
        if points < 1 or M % points:
            raise ValueError(f"points={points} must divide grid_size={M}")
        stride = M // points
    p = samples.params
    fh.write(f"# method={samples.method_tag}\n")
    if p is not None:
        fh.write(f"# k={p.k}\n# l={p.l}\n")
    fh.write(f"# grid={M}\n")
    for key in sorted(samples.meta):
        fh.write(f"# {key}={samples.meta[key]}\n")
    fh.write("x,F\n")
    for j in range(0, M + 1, stride):
        fh.write(f"{_fmt(j / M)},{_fmt(samples.values[j])}\n")


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    s = f"{v:.17g}"
    return s if not math.isnan(v) else "nan"
