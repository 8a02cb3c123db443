"""Complex log-Gamma, Gamma-ratio magnitudes and real-order Bessel J.

Everything here is vectorised over numpy arrays and free of global state.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, PoleError

POLE_TOL = 1e-12

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _near_nonpositive_integer(z: np.ndarray) -> np.ndarray:
    re = z.real
    k = np.round(re)
    return (k <= 0) & (np.abs(re - k) < POLE_TOL) & (np.abs(z.imag) < POLE_TOL)


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    # Valid for Re z >= 1/2.
    w = z - 1.0
    acc = np.full_like(w, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[k] / (w + k)
    t = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(z):
    """Principal-branch log Gamma(z), analytic off the non-positive real axis.

    Arguments with Re z < 1/2 are shifted up with the recurrence
    log G(z) = log G(z + m) - sum_j log(z + j); summing principal logs keeps
    the result continuous in each half plane, which is the same branch
    convention as ``scipy.special.loggamma``.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    zz = np.atleast_1d(arr).astype(complex)
    if not np.all(np.isfinite(zz)):
        raise DomainError("log_gamma needs finite arguments", z=z)
    if np.any(_near_nonpositive_integer(zz)):
        raise PoleError("Gamma pole at a non-positive integer", z=z)
    shift = np.maximum(0, np.ceil(0.5 - zz.real)).astype(int)
    out = np.empty_like(zz)
    plain = shift == 0
    out[plain] = _lanczos_log_gamma(zz[plain])
    if np.any(~plain):
        zs = zz[~plain]
        ms = shift[~plain]
        corr = np.zeros_like(zs)
        for j in range(int(ms.max())):
            active = j < ms
            corr[active] += np.log(zs[active] + j)
        out[~plain] = _lanczos_log_gamma(zs + ms) - corr
    return complex(out[0]) if scalar else out.reshape(arr.shape)


def gamma_real(x: float) -> float:
    """Gamma(x) for real x, with the correct sign for negative x."""
    x = float(x)
    lg = log_gamma(complex(x, 0.0)).real
    if lg > 709.0:
        raise OverflowError(f"Gamma({x}) exceeds double range")
    sign = 1.0
    if x < 0:
        sign = -1.0 if math.floor(-x) % 2 == 0 else 1.0
    return sign * math.exp(lg)


def gamma_ratio_abs(a: float, b: float, lam):
    """|Gamma(a + i lam) / Gamma(b + i lam)| through log differences.

    A pole of the numerator raises PoleError. When only the denominator sits
    on a pole the ratio is the value of an entire function there, namely 0.
    """
    lam_arr = np.asarray(lam, dtype=float)
    za = a + 1j * lam_arr
    zb = b + 1j * lam_arr
    if np.any(_near_nonpositive_integer(np.atleast_1d(za))):
        raise PoleError("numerator Gamma at a pole", a=a, b=b, lam=lam)
    den_pole = _near_nonpositive_integer(np.atleast_1d(zb)).reshape(lam_arr.shape)
    zb_safe = np.where(den_pole, zb + 0.5, zb)
    val = np.exp((log_gamma(za) - log_gamma(zb_safe)).real)
    val = np.where(den_pole, 0.0, val)
    return float(val) if lam_arr.ndim == 0 else val


# ---------------------------------------------------------------- Bessel J

BESSEL_CROSSOVER = 14.0


def _series(p: float, t: np.ndarray) -> np.ndarray:
    half = 0.5 * t
    lg0 = log_gamma(complex(p + 1.0)).real if p + 1.0 > 0 else None
    if lg0 is None:
        raise DomainError("series needs p > -1", p=p)
    term = np.exp(p * np.log(half) - lg0)
    total = term.copy()
    quarter = half * half
    kmax = int(np.max(t, initial=0.0)) + 40
    for k in range(kmax):
        term = -term * quarter / ((k + 1.0) * (k + 1.0 + p))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel(nu: float, t: np.ndarray) -> np.ndarray:
    """Large-argument expansion with optimal (smallest-term) truncation."""
    mu = 4.0 * nu * nu
    P = np.ones_like(t)
    Q = np.zeros_like(t)
    a = np.ones_like(t)
    live = np.ones(t.shape, dtype=bool)
    last = np.full(t.shape, np.inf)
    for k in range(1, 200):
        a_new = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        mag = np.abs(a_new)
        live &= mag < last
        if not np.any(live):
            break
        # a_k carries t^{-k}; even k feed P, odd k feed Q with alternating signs.
        contrib = np.where(live, a_new, 0.0)
        if k % 2 == 0:
            P += (-1) ** (k // 2) * contrib
        else:
            Q += (-1) ** ((k - 1) // 2) * contrib
        last = np.where(live, mag, last)
        a = a_new
        live &= mag > 1e-17
        if not np.any(live):
            break
    omega = t - (2.0 * nu + 1.0) * math.pi / 4.0
    return np.sqrt(2.0 / (math.pi * t)) * (P * np.cos(omega) - Q * np.sin(omega))


def _large_argument(p: float, t: np.ndarray) -> np.ndarray:
    # Low orders from the asymptotic expansion, then upward recurrence,
    # which is stable while the order stays below t.
    steps = int(math.floor(p + 0.5))
    nu0 = p - steps
    j_prev = _hankel(nu0, t)
    if steps == 0:
        return j_prev
    j_cur = _hankel(nu0 + 1.0, t)
    nu = nu0 + 1.0
    for _ in range(steps - 1):
        j_prev, j_cur = j_cur, (2.0 * nu / t) * j_cur - j_prev
        nu += 1.0
    return j_cur


def bessel_j(p: float, t):
    """Bessel function of the first kind J_p(t) for p >= -1/2 and t > 0.

    Power series for t <= max(14, p); above that the Hankel expansion of the
    orders nu0 in [-1/2, 1/2) and nu0 + 1 followed by forward recurrence.
    """
    p = float(p)
    if p < -0.5:
        raise DomainError("order must be >= -1/2", p=p)
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    tt = np.atleast_1d(arr)
    if tt.size and (not np.all(np.isfinite(tt)) or np.any(tt <= 0)):
        raise DomainError("argument must be finite and > 0", p=p)
    out = np.empty_like(tt)
    small = tt <= max(BESSEL_CROSSOVER, p)
    if np.any(small):
        out[small] = _series(p, tt[small])
    if np.any(~small):
        out[~small] = _large_argument(p, tt[~small])
    return float(out[0]) if scalar else out.reshape(arr.shape)


def bessel_j_series(p: float, t):
    """Series branch alone (exposed for overlap checks)."""
    return _series(float(p), np.atleast_1d(np.asarray(t, dtype=float)))


def bessel_j_asymptotic(p: float, t):
    """Asymptotic-plus-recurrence branch alone (exposed for overlap checks)."""
    return _large_argument(float(p), np.atleast_1d(np.asarray(t, dtype=float)))
