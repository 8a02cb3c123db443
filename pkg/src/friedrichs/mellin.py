"""Mellin transform, the kernel symbol B(z) and coupling thresholds sigma.

Conventions:
    (Mu)(lam) = (2 pi)^{-1/2} int_0^inf x^{-1/2 - i lam} u(x) dx
    B(z)      = int_0^inf v(t) t^{-1/2 - z} dt
    beta_l(lam) = B(l + i lam),  p_l = sup |beta_l|,  sigma_l = 1 / p_l
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .errors import (BandError, ConvergenceError, DomainError, GridError,
                     PoleError, PoleProximityError, ResonanceError)
from .specfun import bessel_j, gamma_ratio_abs, log_gamma

RESONANCE_TOL = 1e-9
POLE_LINE_TOL = 1e-6
CLOSED_FORM_WINDOW = 200.0
QUADRATURE_WINDOW = 20.0
GRID_STEP = 0.05


# ------------------------------------------------------------------ kernels

@dataclass(frozen=True)
class KernelExpansion:
    """Small-t expansion v(t) = sum_k v_k t^{r_k} + O(t^{remainder_exponent})."""

    terms: tuple[tuple[float, float], ...]
    remainder_exponent: float

    def __post_init__(self):
        rs = [float(r) for r, _ in self.terms]
        chain = rs + [float(self.remainder_exponent)]
        if chain[0] <= -0.5:
            raise DomainError("expansion exponents must exceed -1/2", r=chain[0])
        if any(b <= a for a, b in zip(chain, chain[1:])):
            raise DomainError("expansion exponents must increase strictly", r=chain)
        if any(v == 0 for _, v in self.terms):
            raise DomainError("expansion coefficients must be nonzero")

    @property
    def exponents(self) -> np.ndarray:
        return np.array([r for r, _ in self.terms], dtype=float)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([v for _, v in self.terms], dtype=float)

    def partial_sum(self, t: np.ndarray, count: int | None = None) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for r, v in self.terms[:count]:
            out = out + v * t ** r
        return out


class KernelSpec:
    """Base class of dilation kernels v(t), t > 0."""

    def evaluate(self, t) -> np.ndarray:
        raise NotImplementedError

    def expansion_terms(self, upto: float) -> KernelExpansion:
        """All expansion terms with r_k < upto (plus a valid remainder exponent)."""
        raise NotImplementedError

    @property
    def band_limit(self) -> float:
        """Sup of Re z for which the continued symbol is available."""
        raise NotImplementedError

    def pole_lines(self, upto: float) -> np.ndarray:
        return self.expansion_terms(upto).exponents + 0.5


@dataclass(frozen=True)
class BesselPQ(KernelSpec):
    """v(t) = t^q J_p(t) with -1/2 - p < q <= 1 (and p >= -1/2)."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p + self.q > -0.5 and self.q <= 1.0):
            raise DomainError("need p + q > -1/2 and q <= 1", p=self.p, q=self.q)
        if self.p < -0.5:
            raise DomainError("order p must be >= -1/2", p=self.p)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        return t ** self.q * bessel_j(self.p, t)

    def coefficient(self, k: int) -> tuple[float, float]:
        r = self.p + self.q + 2 * k
        lg = math.lgamma(k + 1) + log_gamma(complex(k + self.p + 1)).real
        v = (-1) ** k * math.exp(-(2 * k + self.p) * math.log(2.0) - lg)
        return r, v

    def expansion_terms(self, upto: float) -> KernelExpansion:
        terms = []
        k = 0
        while self.p + self.q + 2 * k < upto:
            terms.append(self.coefficient(k))
            k += 1
        return KernelExpansion(tuple(terms), self.p + self.q + 2 * k)

    def expansion(self, n_terms: int) -> KernelExpansion:
        terms = tuple(self.coefficient(k) for k in range(n_terms))
        return KernelExpansion(terms, self.p + self.q + 2 * n_terms)

    def series_tail(self, t: np.ndarray, start: int) -> np.ndarray:
        """sum_{k >= start} v_k t^{r_k} for 0 < t <= 1, free of cancellation."""
        r, v = self.coefficient(start)
        term = v * t ** r
        total = term.copy()
        for k in range(start, start + 60):
            term = -term * t * t / (4.0 * (k + 1) * (k + 1 + self.p))
            total += term
            if np.all(np.abs(term) <= 1e-18 * np.abs(total) + 1e-300):
                break
        return total

    @property
    def band_limit(self) -> float:
        return math.inf

    @property
    def phase(self) -> float:
        return (2 * self.p + 1) * math.pi / 4


@dataclass(frozen=True)
class Tabulated(KernelSpec):
    """Sampled kernel: cubic spline in log t between samples.

    Below the first sample t_0 the kernel is the supplied expansion plus a
    remainder c t^{r_rem}, with c fixed by continuity at t_0; beyond the last
    sample the kernel is taken to vanish.
    """

    t: tuple[float, ...]
    v: tuple[float, ...]
    expansion: KernelExpansion
    _spline: Callable | None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 4:
            raise DomainError("need at least 4 matching samples")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise DomainError("sample abscissae must be positive and increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("sample values must be finite")
        object.__setattr__(self, "_spline", CubicSpline(np.log(t), v))

    @property
    def remainder_coefficient(self) -> float:
        t0 = self.t[0]
        gap = self.v[0] - float(self.expansion.partial_sum(np.array([t0]))[0])
        return gap / t0 ** self.expansion.remainder_exponent

    @classmethod
    def from_function(cls, func, expansion: KernelExpansion, t_min=1e-3,
                      t_max=60.0, per_unit=40):
        """Sample ``func`` on a grid that is dense in both log t and t."""
        lo = np.geomspace(t_min, 1.0, int(per_unit * math.log(1 / t_min)) + 2)
        hi = np.linspace(1.0, t_max, int(per_unit * (t_max - 1)) + 2)[1:]
        grid = np.concatenate([lo, hi])
        return cls(tuple(grid), tuple(np.asarray(func(grid), dtype=float)), expansion)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        lo = t < self.t[0]
        mid = (~lo) & (t <= self.t[-1])
        out[lo] = (self.expansion.partial_sum(t[lo])
                   + self.remainder_coefficient * t[lo] ** self.expansion.remainder_exponent)
        out[mid] = self._spline(np.log(t[mid]))
        return out

    def expansion_terms(self, upto: float) -> KernelExpansion:
        keep = tuple((r, v) for r, v in self.expansion.terms if r < upto)
        rem = (self.expansion.terms[len(keep)][0] if len(keep) < len(self.expansion.terms)
               else self.expansion.remainder_exponent)
        return KernelExpansion(keep, rem)

    @property
    def band_limit(self) -> float:
        return self.expansion.remainder_exponent + 0.5


def cosine_kernel() -> BesselPQ:
    """sqrt(2/pi) cos t."""
    return BesselPQ(-0.5, 0.5)


def sine_kernel() -> BesselPQ:
    """sqrt(2/pi) sin t."""
    return BesselPQ(0.5, 0.5)


# ---------------------------------------------------------- Mellin transform

def _check_uniform(t: np.ndarray) -> float:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 8:
        raise GridError("log grid needs at least 8 points")
    h = np.diff(t)
    if np.any(h <= 0) or np.max(np.abs(h - h.mean())) > 1e-9 * max(1.0, abs(h.mean())):
        raise GridError("log grid must be uniform and increasing")
    return float(h.mean())


def _check_decay(f: np.ndarray, what: str, tol=1e-12):
    scale = np.max(np.abs(f))
    if scale == 0:
        return
    if abs(f[0]) > tol * scale or abs(f[-1]) > tol * scale:
        raise GridError(f"{what} has not decayed at the grid ends")


def mellin_transform(t, u_samples, lam=None):
    """Mellin transform of samples u(e^{t_j}) on a uniform grid in t = ln x.

    With ``lam=None`` the whole FFT frequency grid is returned as a pair
    ``(lam_grid, values)``; otherwise the transform is summed directly at the
    requested frequencies, which must stay below the Nyquist limit.
    """
    t = np.asarray(t, dtype=float)
    u = np.asarray(u_samples)
    h = _check_uniform(t)
    if u.shape != t.shape:
        raise GridError("samples and grid differ in length")
    f = np.exp(t / 2) * u
    _check_decay(f, "e^{t/2} u(e^t)")
    if lam is None:
        n = t.size
        lam_grid = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, d=h))
        # e^{-i lam t_j} = e^{-i lam t_0} e^{-i lam j h}
        raw = np.fft.fftshift(np.fft.fft(f))
        vals = h / np.sqrt(2 * np.pi) * np.exp(-1j * lam_grid * t[0]) * raw
        return lam_grid, vals
    lam = np.asarray(lam, dtype=float)
    if np.max(np.abs(lam), initial=0.0) >= np.pi / h:
        raise GridError("requested frequencies exceed the grid's Nyquist limit")
    phase = np.exp(-1j * np.multiply.outer(lam, t))
    return h / np.sqrt(2 * np.pi) * (phase @ f)


def verify_convolution(b: Callable, u: Callable, t=None, lam_max=40.0,
                       lam_step=0.02, tau=None) -> float:
    """Residual of int int b(xy) u(y) conj(u(x)) = int beta (Mu)(-lam) conj(Mu(lam)).

    The left side is a 2-D trapezoid sum in (ln x, ln y); the right side uses
    a 1-D quadrature for beta(lam) = int b(s) s^{-1/2 - i lam} ds and the
    directly summed Mellin transform.
    """
    t = np.linspace(-12.0, 12.0, 961) if t is None else np.asarray(t, dtype=float)
    h = _check_uniform(t)
    f = np.exp(t / 2) * np.asarray(u(np.exp(t)), dtype=complex)
    _check_decay(f, "test function")
    if not np.any(f):
        return 0.0
    tau = np.linspace(-75.0, 8.0, 8301) if tau is None else np.asarray(tau, dtype=float)
    ht = _check_uniform(tau)
    g = np.exp(tau / 2) * np.asarray(b(np.exp(tau)), dtype=float)
    _check_decay(g, "weighted kernel", tol=1e-10)
    if not np.any(g):
        return 0.0

    s = t[:, None] + t[None, :]
    kern = np.exp(s / 2) * np.asarray(b(np.exp(s)), dtype=float)
    lhs = h * h * (np.conj(f) @ kern @ f)

    lam = np.arange(-lam_max, lam_max + lam_step / 2, lam_step)
    beta = ht * (np.exp(-1j * np.multiply.outer(lam, tau)) @ g)
    mu = mellin_transform(t, f * np.exp(-t / 2), lam)
    mu_neg = mu[::-1]
    rhs = lam_step * np.sum(beta * mu_neg * np.conj(mu))
    return float(abs(lhs - rhs))


# ------------------------------------------------------------ symbol B(z)

def mellin_symbol_bessel(p: float, q: float, z):
    """Closed form 2^{q-z-1/2} Gamma((p+q-z+1/2)/2) / Gamma((p-q+z+3/2)/2).

    A numerator pole raises PoleError; a denominator pole gives 0.
    """
    zz = np.asarray(z, dtype=complex)
    a = (p + q - zz + 0.5) / 2
    bb = (p - q + zz + 1.5) / 2
    lga = log_gamma(a)
    den_pole = _at_pole(bb)
    lgb = log_gamma(np.where(den_pole, bb + 0.5, bb))
    val = np.exp((q - zz - 0.5) * math.log(2.0) + lga - lgb)
    val = np.where(den_pole, 0.0, val)
    return complex(val) if zz.ndim == 0 else val


def _at_pole(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    k = np.round(w.real)
    return (k <= 0) & (np.abs(w.real - k) < 1e-12) & (np.abs(w.imag) < 1e-12)


def _panel_nodes(edges: np.ndarray, per_panel: np.ndarray):
    nodes, weights, owner = [], [], []
    for j, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        x, w = np.polynomial.legendre.leggauss(int(per_panel[j]))
        nodes.append((b - a) / 2 * x + (a + b) / 2)
        weights.append((b - a) / 2 * w)
        owner.append(np.full(x.size, j))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(owner)


@lru_cache(maxsize=64)
def _tail_layout(kernel: BesselPQ, im_bucket: int):
    """Half-period panels on (1, T) with kernel values at the nodes."""
    first = kernel.phase + math.pi / 2
    j0 = max(0, math.ceil((1.0 - first) / math.pi))
    t_max = max(120 * math.pi, 40.0 * im_bucket, 4.0 * kernel.p ** 2)
    zeros = first + math.pi * np.arange(j0, j0 + int(t_max / math.pi) + 1)
    zeros = zeros[zeros > 1.0 + 1e-9]
    edges = np.concatenate([[1.0], zeros])
    # phase of t^{-i Im z} moves by Im z * pi / t per panel
    per = 16 + np.ceil(2.0 * im_bucket * np.pi / edges[:-1]).astype(int)
    x, w, owner = _panel_nodes(edges, np.minimum(per, 400))
    return x, w * kernel.evaluate(x), owner, len(edges) - 1


def _iterated_average(partial: np.ndarray, rounds: int = 8) -> np.ndarray:
    """Repeated pairwise averaging of the last rounds+1 partial sums."""
    s = partial[..., -(rounds + 1):]
    for _ in range(rounds):
        s = 0.5 * (s[..., 1:] + s[..., :-1])
    return s[..., 0]


def _tail_integral(kernel: KernelSpec, z: np.ndarray) -> np.ndarray:
    """int_1^inf v(t) t^{-1/2-z} dt."""
    if isinstance(kernel, BesselPQ):
        bucket = int(math.ceil(np.max(np.abs(z.imag), initial=0.0) / 5.0) * 5)
        x, wv, owner, n_panels = _tail_layout(kernel, bucket)
        powers = np.exp(-np.multiply.outer(0.5 + z, np.log(x)))
        contrib = powers * wv
        panel_sums = np.add.reduceat(contrib, np.flatnonzero(np.diff(owner, prepend=-1)), axis=-1)
        partial = np.cumsum(panel_sums, axis=-1)
        return _iterated_average(partial)
    # tabulated: compact support on (0, t_last]
    tk = np.asarray(kernel.t)
    if tk[-1] <= 1.0:
        return np.zeros(z.shape, dtype=complex)
    inner = tk[(tk > 1.0)]
    edges = np.concatenate([[1.0], inner])
    im = np.max(np.abs(z.imag), initial=0.0)
    per = 8 + np.ceil(im * np.diff(np.log(edges))).astype(int)
    x, w, _ = _panel_nodes(edges, per)
    powers = np.exp(-np.multiply.outer(0.5 + z, np.log(x)))
    return powers @ (w * kernel.evaluate(x))


def _head_integral(kernel: KernelSpec, z: np.ndarray):
    """Continued int_0^1 v(t) t^{-1/2-z} dt.

    Returns the analytic pole part for the subtracted terms plus the
    quadrature of the remainder, computed in s = -ln t.
    """
    re_max = np.max(z.real, initial=0.0)
    im = np.max(np.abs(z.imag), initial=0.0)
    if isinstance(kernel, BesselPQ):
        # subtract enough terms that the remainder decays like e^{-3 s}
        upto = re_max + 2.5
        exp_ = kernel.expansion_terms(upto)
        m = len(exp_.terms)
        alpha = exp_.remainder_exponent + 0.5 - re_max
        s_max = 42.0 / alpha

        def remainder(tt):
            return kernel.series_tail(tt, m)
    else:
        exp_ = kernel.expansion
        m = len(exp_.terms)
        s_max = -math.log(kernel.t[0]) if kernel.t[0] < 1 else 0.0

        def remainder(tt):
            return kernel.evaluate(tt) - exp_.partial_sum(tt)

    poles = np.zeros(z.shape, dtype=complex)
    for r, v in exp_.terms:
        poles = poles - v / (z - r - 0.5)
    if isinstance(kernel, Tabulated):
        # remainder model on (0, t_0), integrated exactly
        a = exp_.remainder_exponent + 0.5 - z
        poles = poles + kernel.remainder_coefficient * kernel.t[0] ** a / a
    if s_max <= 0:
        return poles
    width = min(0.5, math.pi / max(im, 1e-12))
    n_panels = max(1, math.ceil(s_max / width))
    edges = np.linspace(0.0, s_max, n_panels + 1)
    x, w, _ = _panel_nodes(edges, np.full(n_panels, 16))
    tt = np.exp(-x)
    vals = w * remainder(tt)
    powers = np.exp(-np.multiply.outer(0.5 - z, x))
    return poles + powers @ vals


def _check_band(kernel: KernelSpec, z: np.ndarray):
    re = z.real
    if np.any(re <= 0) or np.any(re >= kernel.band_limit):
        raise BandError("Re z outside the continuation band",
                        band=(0.0, kernel.band_limit))
    lines = kernel.pole_lines(float(np.max(re)) + 1.0)
    if lines.size:
        gap = np.min(np.abs(np.subtract.outer(re, lines)))
        if gap < POLE_LINE_TOL:
            raise PoleProximityError("Re z too close to a pole line", gap=float(gap))


def mellin_symbol_quadrature(kernel: KernelSpec, z):
    """Continued symbol B(z) by quadrature, vectorised over z."""
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_band(kernel, zz)
    out = _head_integral(kernel, zz) + _tail_integral(kernel, zz)
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def residue_at_pole(kernel: KernelSpec, n: int, tol: float = 1e-4) -> float:
    """Residue of B at z0 = r_n + 1/2 by symmetric Richardson extrapolation.

    g(h) = h (B(z0 + h) - B(z0 - h)) / 2 equals the residue up to O(h^2).
    """
    if n < 0:
        raise DomainError("pole index must be >= 0", n=n)
    if isinstance(kernel, Tabulated) and n >= len(kernel.expansion.terms):
        raise DomainError("pole index beyond the supplied expansion", n=n)
    lines = kernel.pole_lines(kernel.band_limit if math.isfinite(kernel.band_limit)
                              else 2.0 * n + 50.0)
    z0 = float(lines[n])
    others = [abs(z0 - x) for x in lines if x != z0] + [z0, kernel.band_limit - z0]
    h0 = min(0.4, 0.5 * min(others))
    hs = h0 / 2.0 ** np.arange(4)
    zs = np.concatenate([z0 + hs, z0 - hs]).astype(complex)
    vals = mellin_symbol_quadrature(kernel, zs)
    g = (hs * (vals[:4] - vals[4:]) / 2).real
    table = [g]
    for level in range(1, 4):
        prev = table[-1]
        fac = 4.0 ** level
        table.append((fac * prev[1:] - prev[:-1]) / (fac - 1))
    best = table[-1][0]
    residual = abs(best - table[-2][-1])
    if residual > tol:
        raise ConvergenceError("residue extrapolation did not settle",
                               n=n, residual=residual)
    return float(best)


# --------------------------------------------------------- beta and sigma

def _resonance_index(kernel: KernelSpec, l: float):
    lines = kernel.pole_lines(l + 1.0)
    hit = np.flatnonzero(np.abs(lines - l) < RESONANCE_TOL)
    return int(hit[0]) if hit.size else None


def is_resonant(kernel: KernelSpec, l: float) -> bool:
    return _resonance_index(kernel, l) is not None


def _check_l(kernel: KernelSpec, l: float):
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    n = _resonance_index(kernel, l)
    if n is not None:
        raise ResonanceError("l sits on a pole line r_n + 1/2", l=l, n=n)
    if l >= kernel.band_limit:
        raise BandError("l beyond the continuation band", l=l, band=kernel.band_limit)


def beta_l(kernel: KernelSpec, l: float, lam):
    """beta_l(lam) = B(l + i lam): closed form for BesselPQ, quadrature otherwise."""
    _check_l(kernel, l)
    z = l + 1j * np.asarray(lam, dtype=float)
    if isinstance(kernel, BesselPQ):
        return mellin_symbol_bessel(kernel.p, kernel.q, z)
    return mellin_symbol_quadrature(kernel, z)


@dataclass(frozen=True)
class SymbolSamples:
    l: float
    lambda_grid: tuple[float, ...]
    beta_values: tuple[complex, ...]
    p_l: float
    q_l: float
    argmax: float


def _refine_extremum(f, grid, vals, idx, sign):
    # |beta| is even in lambda, so a grid extremum at 0 is already stationary
    if idx == 0 and grid[0] == 0.0:
        return grid[0], vals[0]
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, len(grid) - 1)]
    res = minimize_scalar(lambda s: -sign * f(s), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-9})
    x, fx = float(res.x), sign * -res.fun
    if sign * fx < sign * vals[idx]:
        return grid[idx], vals[idx]
    return x, fx


def symbol_samples(kernel: KernelSpec, l: float, window: float | None = None,
                   step: float = GRID_STEP) -> SymbolSamples:
    """Grid search of |beta_l| on [0, window] refined by golden section."""
    _check_l(kernel, l)
    closed = isinstance(kernel, BesselPQ)
    if window is None:
        window = CLOSED_FORM_WINDOW if closed else QUADRATURE_WINDOW
    grid = np.arange(0.0, window + step / 2, step)
    beta = beta_l(kernel, l, grid)
    mod = np.abs(beta)

    def f(s):
        return abs(beta_l(kernel, l, s))

    i_max = int(np.argmax(mod))
    x_max, p_l = _refine_extremum(f, grid, mod, i_max, +1)
    i_min = int(np.argmin(mod))
    if i_min == len(grid) - 1:
        # still decreasing at the window edge: the infimum is approached at infinity
        q_l = 0.0
    else:
        _, q_l = _refine_extremum(f, grid, mod, i_min, -1)
    growth = kernel.q - l - 0.5 if closed else -1.0
    if growth > 0:
        p_l = math.inf
    elif growth == 0:
        p_l = max(p_l, 1.0)
    # still climbing at the edge while not yet negligible against the candidate maximum
    rising = growth < 0 and mod[-1] > mod[-2] * (1 + 1e-9) and mod[-1] > 1e-2 * p_l
    if rising or (math.isfinite(p_l) and mod[-1] >= p_l):
        raise ConvergenceError("symbol not decayed at the search window edge",
                               l=l, window=window)
    return SymbolSamples(float(l), tuple(grid), tuple(beta.tolist()),
                         float(p_l), float(max(q_l, 0.0)), float(x_max))


def symbol_extrema(kernel: KernelSpec, l: float, window: float | None = None):
    """(p_l, q_l): sup and inf of |beta_l| over the real line."""
    s = symbol_samples(kernel, l, window)
    return s.p_l, s.q_l


def _resonant(on_resonance: str, exc: Exception) -> float:
    if on_resonance == "zero":
        return 0.0
    raise exc


def _sigma_bessel(p: float, q: float, l: float, window=CLOSED_FORM_WINDOW) -> float:
    """2^{-q+l+1/2} min |Gamma((p-q+l+3/2+i lam)/2) / Gamma((p+q-l+1/2-i lam)/2)|."""
    a = (p + q - l + 0.5) / 2
    b = (p - q + l + 1.5) / 2
    if q - l - 0.5 > 0:
        return 0.0
    # fine steps near the origin, where maxima live; coarser along the decaying tail
    fine = np.arange(0.0, 10.0, GRID_STEP / 2)
    mus = np.concatenate([fine, np.arange(10.0, window / 2 + 0.125, 0.25)])
    # maximise the reciprocal ratio, which stays finite where sigma's Gammas blow up
    ratio = gamma_ratio_abs(a, b, mus)
    i = int(np.argmax(ratio))
    _, best = _refine_extremum(lambda m: gamma_ratio_abs(a, b, m), mus, ratio, i, +1)
    if q - l - 0.5 == 0:
        best = max(best, 1.0)
    return float(2.0 ** (-q + l + 0.5) / best)


def sigma_l(kernel: KernelSpec, l: float, on_resonance: str = "raise") -> float:
    """Coupling threshold 1 / p_l (0 at resonant l when on_resonance='zero')."""
    try:
        _check_l(kernel, l)
    except ResonanceError as exc:
        return _resonant(on_resonance, exc)
    if isinstance(kernel, BesselPQ):
        return _sigma_bessel(kernel.p, kernel.q, l)
    p_l, _ = symbol_extrema(kernel, l)
    return 0.0 if math.isinf(p_l) else 1.0 / p_l


def channel_kernel(d: int, n: int) -> BesselPQ:
    """Radial kernel of the order-n spherical-harmonic channel in dimension d."""
    if d < 1 or n < 0:
        raise DomainError("need d >= 1 and n >= 0", d=d, n=n)
    return BesselPQ(n + (d - 2) / 2, 0.5)


def sigma_channel(d: int, l: float, n: int, on_resonance: str = "raise") -> float:
    """2^l min_lam |Gamma((n+d/2+l+i lam)/2) / Gamma((n+d/2-l-i lam)/2)|."""
    return sigma_l(channel_kernel(d, n), l, on_resonance)


def sigma_cs(d: int, l: float, kind: str, on_resonance: str = "raise") -> float:
    """Closed-form thresholds of the cosine (n = 0) and sine (n = 1) operators."""
    if d < 1:
        raise DomainError("d must be >= 1", d=d)
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    shift = {"cosine": 0.0, "sine": 1.0}[_kind(kind)]
    den = (d / 2 - l + shift) / 2
    if _at_pole(den):
        return _resonant(on_resonance, ResonanceError(
            "l is resonant for this operator", d=d, l=l, kind=kind))
    num = (d / 2 + l + shift) / 2
    return float(2.0 ** l * gamma_ratio_abs(num, den, 0.0))


def sigma_d1_reflection(l: float, kind: str) -> float:
    """One-dimensional thresholds via (pi/2)^{1/2} |trig(pi(1/2-l)/2) Gamma(1/2-l)|^{-1}."""
    kind = _kind(kind)
    x = 0.5 - l
    trig = math.cos(math.pi * x / 2) if kind == "cosine" else math.sin(math.pi * x / 2)
    if abs(x - round(x)) < 1e-12 and round(x) <= 0:
        raise PoleError("Gamma(1/2 - l) at a pole; use sigma_cs", l=l)
    g = math.exp(log_gamma(complex(x)).real)
    return math.sqrt(math.pi / 2) / abs(trig * g)


def _kind(kind: str) -> str:
    k = str(kind).lower()
    if k in ("c", "cos", "cosine"):
        return "cosine"
    if k in ("s", "sin", "sine"):
        return "sine"
    raise DomainError("kind must be cosine or sine", kind=kind)


def normalize_kind(kind: str) -> str:
    return _kind(kind)


def kernel_for_kind(kind: str) -> BesselPQ:
    return cosine_kernel() if _kind(kind) == "cosine" else sine_kernel()


__all__: Sequence[str] = [
    "KernelExpansion", "KernelSpec", "BesselPQ", "Tabulated", "SymbolSamples",
    "cosine_kernel", "sine_kernel", "channel_kernel", "kernel_for_kind",
    "mellin_transform", "verify_convolution", "mellin_symbol_quadrature",
    "mellin_symbol_bessel", "residue_at_pole", "beta_l", "symbol_samples",
    "symbol_extrema", "sigma_l", "sigma_channel", "sigma_cs",
    "sigma_d1_reflection", "is_resonant", "normalize_kind",
]
