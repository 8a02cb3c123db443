"""Closed-form negative-eigenvalue counts and channel aggregation."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BandError, BoundaryError, DomainError, ParityError
from .mellin import (RESONANCE_TOL, BesselPQ, KernelExpansion, channel_kernel,
                     kernel_for_kind, normalize_kind, sigma_channel, sigma_cs,
                     sigma_l)

INT64_MAX = 2 ** 63 - 1


@dataclass(frozen=True)
class CountResult:
    """Finite(count) or Infinite; ``unperturbed`` marks the gamma = 0 shortcut."""

    count: int | None
    unperturbed: bool = False

    @property
    def infinite(self) -> bool:
        return self.count is None

    def to_json(self):
        return "infinite" if self.count is None else self.count

    def __str__(self):
        return "infinite" if self.count is None else str(self.count)


def Finite(n: int, unperturbed: bool = False) -> CountResult:
    if n < 0:
        raise DomainError("counts are nonnegative", n=n)
    return CountResult(int(n), unperturbed)


INFINITE = CountResult(None)

# closed-form and channel routes to sigma differ in the last bits
THRESHOLD_RTOL = 1e-12


def _above(gamma: float, sigma: float) -> bool:
    return abs(gamma) > sigma * (1 + THRESHOLD_RTOL)


def _near(x: float, y: float) -> bool:
    return abs(x - y) < RESONANCE_TOL


def _on_ladder(l: float, start: float) -> bool:
    """True when l = start + 2k for some integer k >= 0."""
    k = round((l - start) / 2)
    return k >= 0 and _near(l, start + 2 * k)


def _interval_index(l: float, start: float) -> int:
    """k with l in (start + 2k, start + 2k + 2); -1 below start."""
    if _on_ladder(l, start):
        raise BoundaryError("l sits on an interval endpoint", l=l, start=start)
    if l < start:
        return -1
    return int(math.floor((l - start) / 2))


def _check_gamma(gamma: float):
    if not math.isfinite(gamma):
        raise DomainError("gamma must be finite", gamma=gamma)


# ------------------------------------------------------------- general

def count_fr(expansion: KernelExpansion, l: float, gamma: float,
             sigma: float) -> CountResult:
    """Sign-restricted term count: #{k : r_k < l - 1/2, gamma v_k < 0}.

    Infinite when l is resonant or |gamma| exceeds sigma; |gamma| = sigma
    still counts as finite.
    """
    _check_gamma(gamma)
    if gamma == 0:
        return Finite(0, unperturbed=True)
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    if l - 0.5 >= expansion.remainder_exponent:
        raise BandError("expansion does not reach r_k < l - 1/2", l=l)
    if any(_near(l, r + 0.5) for r, _ in expansion.terms):
        return INFINITE
    if _above(gamma, sigma):
        return INFINITE
    return Finite(sum(1 for r, v in expansion.terms if r < l - 0.5 and gamma * v < 0))


def count_bes(p: float, q: float, l: float, gamma: float,
              sigma: float | None = None) -> CountResult:
    """Interval counts for t^q J_p(t): k + 1 eigenvalues per length-2 interval."""
    _check_gamma(gamma)
    kernel = BesselPQ(p, q)
    if gamma == 0:
        return Finite(0, unperturbed=True)
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    a = p + q + 0.5
    if _on_ladder(l, a):
        return INFINITE
    if sigma is None:
        sigma = sigma_l(kernel, l, on_resonance="zero")
    if _above(gamma, sigma):
        return INFINITE
    start = a if gamma < 0 else a + 2
    return Finite(_interval_index(l, start) + 1)


def count_d1(l: float, gamma: float, kind: str) -> CountResult:
    """One-dimensional cosine/sine operator counts.

    gamma > 0 gives [(k+1)/2] and gamma < 0 gives [k/2] + 1 on the k-th
    interval (1/2 + 2k, 5/2 + 2k) for cosine or (3/2 + 2k, 7/2 + 2k) for sine.
    """
    _check_gamma(gamma)
    kind = normalize_kind(kind)
    if gamma == 0:
        return Finite(0, unperturbed=True)
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    start = 0.5 if kind == "cosine" else 1.5
    if _on_ladder(l, start):
        return INFINITE
    if _above(gamma, sigma_cs(1, l, kind)):
        return INFINITE
    k = _interval_index(l, start)
    if k < 0:
        return Finite(0)
    return Finite((k + 1) // 2 if gamma > 0 else k // 2 + 1)


# ------------------------------------------------------------- channels

def tau(n: int) -> int:
    """Channel sign: (-1)^{n/2} for even n, (-1)^{(n+1)/2} for odd n."""
    return (-1) ** (n // 2) if n % 2 == 0 else (-1) ** ((n + 1) // 2)


def nu(d: int, n: int) -> int:
    """Dimension of the degree-n spherical harmonics on S^{d-1}."""
    if d < 2 or n < 0:
        raise DomainError("nu needs d >= 2 and n >= 0", d=d, n=n)
    if n == 0:
        return 1
    val = (2 * n + d - 2) * math.factorial(n + d - 3) // (
        math.factorial(d - 2) * math.factorial(n))
    if val > INT64_MAX:
        raise OverflowError(f"nu({d}, {n}) exceeds 64-bit range")
    return val


def _parity_ok(n: int, kind: str) -> bool:
    return (n % 2 == 0) == (kind == "cosine")


def count_channel(d: int, n: int, l: float, gamma: float, kind: str,
                  variant: str = "bes") -> CountResult:
    """Count for the order-n channel: kernel t^{1/2} J_{n+(d-2)/2}, coupling tau_n gamma."""
    kind = normalize_kind(kind)
    if d < 1 or n < 0:
        raise DomainError("need d >= 1 and n >= 0", d=d, n=n)
    if not _parity_ok(n, kind):
        raise ParityError("channel parity does not match the operator kind", n=n, kind=kind)
    g = tau(n) * gamma
    sigma = sigma_channel(d, l, n, on_resonance="zero")
    kernel = channel_kernel(d, n)
    if variant == "bes":
        return count_bes(kernel.p, kernel.q, l, g, sigma)
    if variant == "fr":
        return count_fr(kernel.expansion_terms(l), l, g, sigma)
    raise DomainError("variant must be 'bes' or 'fr'", variant=variant)


def count_total(d: int, l: float, gamma: float, kind: str,
                channel_variant: str = "bes") -> CountResult:
    """Total count of the d-dimensional operator, summed over channels with weights nu."""
    _check_gamma(gamma)
    kind = normalize_kind(kind)
    if d == 1:
        return count_d1(l, gamma, kind)
    if d < 1:
        raise DomainError("d must be >= 1", d=d)
    if gamma == 0:
        return Finite(0, unperturbed=True)
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    if _above(gamma, sigma_cs(d, l, kind, on_resonance="zero")):
        return INFINITE
    n_max = math.ceil(l - d / 2) + 2
    total = 0
    for n in range(0 if kind == "cosine" else 1, max(n_max, 0) + 1, 2):
        c = count_channel(d, n, l, gamma, kind, channel_variant)
        if c.infinite:
            return INFINITE
        total += nu(d, n) * c.count
    return Finite(total)


def count_total_closed(d: int, l: float, gamma_sign: int, kind: str) -> CountResult:
    """Closed-form totals for |gamma| within the threshold, by interval of l."""
    kind = normalize_kind(kind)
    if d < 2:
        raise DomainError("closed totals need d >= 2", d=d)
    if gamma_sign not in (-1, 1):
        raise DomainError("gamma_sign must be +1 or -1", gamma_sign=gamma_sign)
    if not l > 0:
        raise DomainError("l must be positive", l=l)
    h = d / 2
    base = h if kind == "cosine" else h + 1
    if _on_ladder(l, base):
        return INFINITE
    k = _interval_index(l, base)
    v = lambda m: nu(d, m)  # noqa: E731
    if kind == "cosine" and gamma_sign < 0:
        if k < 0:
            return Finite(0)
        return Finite(k + 1 + sum((k - 2 * p - 1) * (v(4 * p + 2) + v(4 * p + 4))
                                  for p in range((k - 1) // 2 + 1)))
    if kind == "cosine":
        if k < 1:
            return Finite(0)
        return Finite(sum((k - 2 * p) * (v(4 * p) + v(4 * p + 2))
                          for p in range(k // 2 + 1)))
    if gamma_sign > 0:
        if k < 0:
            return Finite(0)
        return Finite((k + 1) * v(1) + sum((k - 2 * p + 1) * (v(4 * p - 1) + v(4 * p + 1))
                                           for p in range(1, (k + 1) // 2 + 1)))
    if k < 1:
        return Finite(0)
    return Finite(sum((k - 2 * p) * (v(4 * p + 1) + v(4 * p + 3))
                      for p in range(k // 2 + 1)))


def count_for_kernel(kernel: BesselPQ, l: float, gamma: float) -> dict[str, CountResult]:
    """Both general-route predictions for a single Bessel kernel."""
    sigma = sigma_l(kernel, l, on_resonance="zero")
    exp_ = kernel.expansion_terms(max(l, 0.0) + 1.0)
    return {
        "fr": count_fr(exp_, l, gamma, sigma),
        "bes": count_bes(kernel.p, kernel.q, l, gamma, sigma),
    }


def d1_kernel(kind: str) -> BesselPQ:
    return kernel_for_kind(kind)
