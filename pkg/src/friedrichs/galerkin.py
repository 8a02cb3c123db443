"""Galerkin discretisation of x^{2l} + gamma V and negative-inertia counting.

Hats live on a geometric grid x_i = x_0 rho^i and vanish at both window
ends, so widening the window at fixed rho, or doubling the cell count, gives
nested trial spaces.  All matrices are stored after the diagonal congruence
D = diag(x_i^{-(l+1/2)}), which leaves inertia unchanged.  In these
coordinates the x^{2l} matrix is a constant tridiagonal Toeplitz matrix and
the kernel matrix is a Hankel matrix F(x_i x_j), so wide windows never
overflow.

Expansion terms v_k t^{r_k} with r_k < l - 1/2 make V unbounded relative to
x^{2l}.  They are split off as rank-one pieces and enter through a bordered
matrix; the Haynsworth inertia formula restores the count.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import eigh, eigvalsh, ldl
from scipy.special import sici

from .errors import FactorizationError, GridError, OscillationError, SpecError
from .mellin import BesselPQ, KernelSpec, Tabulated
from .predict import CountResult, Finite

SERIES_LIMIT = 4.0
MAX_NODES = 512
_C0 = math.sqrt(2.0 / math.pi)


# ----------------------------------------------------------------- grids

@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    cells: int

    def __post_init__(self):
        if not (self.x_min > 0 and math.isfinite(self.x_max) and self.x_max > self.x_min):
            raise SpecError("need 0 < x_min < x_max", x_min=self.x_min, x_max=self.x_max)
        if not (self.x_min < 1.0 < self.x_max):
            raise SpecError("window must straddle x = 1", x_min=self.x_min, x_max=self.x_max)
        if int(self.cells) != self.cells or self.cells < 8:
            raise SpecError("need at least 8 cells", cells=self.cells)

    @property
    def log_step(self) -> float:
        return (math.log(self.x_max) - math.log(self.x_min)) / self.cells

    @property
    def ratio(self) -> float:
        return math.exp(self.log_step)

    def log_nodes(self) -> np.ndarray:
        return math.log(self.x_min) + self.log_step * np.arange(self.cells + 1)

    @classmethod
    def symmetric(cls, half_width: float, log_step: float) -> "GridSpec":
        """Window [e^{-T}, e^{T}] with spacing log_step in ln x."""
        cells = 2 * int(round(half_width / log_step))
        t = cells * log_step / 2
        return cls(math.exp(-t), math.exp(t), cells)


def build_grid(spec: GridSpec) -> np.ndarray:
    """Geometric nodes x_min rho^i, i = 0..cells."""
    if not isinstance(spec, GridSpec):
        raise SpecError("expected a GridSpec")
    return np.exp(spec.log_nodes())


def is_nested(coarse: GridSpec, fine: GridSpec, tol: float = 1e-9) -> bool:
    """True when every node of ``coarse`` is a node of ``fine``."""
    ratio = coarse.log_step / fine.log_step
    if abs(ratio - round(ratio)) > tol * max(1.0, ratio) or round(ratio) < 1:
        return False
    offset = (math.log(coarse.x_min) - math.log(fine.x_min)) / fine.log_step
    if abs(offset - round(offset)) > 1e-6 or offset < -1e-9:
        return False
    return math.log(coarse.x_max) <= math.log(fine.x_max) + 1e-9


def window_ladder(half_widths: Sequence[float], log_step: float) -> list[GridSpec]:
    """Symmetric windows of growing width at a fixed log spacing."""
    return [GridSpec.symmetric(t, log_step) for t in half_widths]


def doubling_ladder(x_min: float, x_max: float, cells0: int, levels: int) -> list[GridSpec]:
    """Fixed window, cell count doubled at every level."""
    return [GridSpec(x_min, x_max, cells0 * 2 ** k) for k in range(levels)]


DEFAULT_LOG_STEP = 0.5
DEFAULT_HALF_WIDTHS = (64.0, 128.0, 192.0, 256.0, 384.0, 512.0)
DEFAULT_EPSILONS = (1e-6, 1e-8, 1e-10)


def default_ladder() -> list[GridSpec]:
    return window_ladder(DEFAULT_HALF_WIDTHS, DEFAULT_LOG_STEP)


# ------------------------------------------------- reference-hat integrals

_GL = {n: np.polynomial.legendre.leggauss(n) for n in (8, 16, 32)}


def _gl(a: float, b: float, n: int = 16):
    x, w = _GL[n] if n in _GL else np.polynomial.legendre.leggauss(n)
    return (b - a) / 2 * x + (a + b) / 2, (b - a) / 2 * w


def _hat(s: np.ndarray, rho: float) -> np.ndarray:
    """Reference hat on nodes (1/rho, 1, rho)."""
    up = (s - 1 / rho) / (1 - 1 / rho)
    down = (rho - s) / (rho - 1)
    return np.clip(np.where(s <= 1, up, down), 0.0, None)


def _hat_moment(r: float, rho: float) -> float:
    """int s^r Phi(s) ds."""
    total = 0.0
    for a, b in ((1 / rho, 1.0), (1.0, rho)):
        s, w = _gl(a, b, 16)
        total += float(np.sum(w * s ** r * _hat(s, rho)))
    return total


def _h0_entries(l: float, rho: float, n_gauss: int = 8) -> tuple[float, float]:
    """(c_0, c_1) with c_m = int s^{2l} Phi(s) Phi(s / rho^m) ds (8-point rule per cell)."""
    c0 = 0.0
    for a, b in ((1 / rho, 1.0), (1.0, rho)):
        s, w = _gl(a, b, n_gauss)
        c0 += float(np.sum(w * s ** (2 * l) * _hat(s, rho) ** 2))
    s, w = _gl(1.0, rho, n_gauss)
    c1 = float(np.sum(w * s ** (2 * l) * _hat(s, rho) * _hat(s / rho, rho)))
    return c0, c1


def _kappa(u: np.ndarray, rho: float) -> np.ndarray:
    """Multiplicative self-convolution int Phi(s) Phi(u/s) ds/s, support [rho^-2, rho^2]."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pieces = (
        (1 / rho, 1.0, -1 / (rho - 1), rho / (rho - 1)),
        (1.0, rho, rho / (rho - 1), -1 / (rho - 1)),
    )
    for s_lo, s_hi, a, b in pieces:
        for w_lo, w_hi, c, d in pieces:
            lo = np.maximum(s_lo, u / w_hi)
            hi = np.minimum(s_hi, u / w_lo)
            ok = hi > lo

            def prim(s):
                return (a * c + b * d * u) * np.log(s) - a * d * u / s + b * c * s

            out += np.where(ok, prim(np.where(ok, hi, 1.0)) - prim(np.where(ok, lo, 1.0)), 0.0)
    return out


# --------------------------------------------- antiderivatives for cos/sin

def _aux_series(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """c(t), s(t) with G_cos = c cos t + s sin t for large t, optimal truncation."""
    inv2 = np.exp(-2.0 * np.log(t))
    c = np.zeros_like(t)
    s = np.zeros_like(t)
    # c = sum_{j>=1} (-1)^{j+1} (2j-1)! (2j-1) / t^{2j}
    # s = sum_{k>=1} (-1)^{k+1} (2k)! 2k / t^{2k+1}
    fact = 1.0 / t  # (2j-1)! / t^{2j-1}
    last = np.full_like(t, np.inf)
    live = np.ones(t.shape, dtype=bool)
    for j in range(1, 60):
        tc = (2 * j - 1) * fact / t
        ts = 2 * j * (2 * j) * fact / t / t
        mag = np.abs(tc) + np.abs(ts)
        live &= mag < last
        sign = 1.0 if j % 2 == 1 else -1.0
        c += np.where(live, sign * tc, 0.0)
        s += np.where(live, sign * ts, 0.0)
        last = np.where(live, mag, last)
        fact = fact * (2 * j) * (2 * j + 1) * inv2
        if not np.any(live & (mag > 1e-18)):
            break
    return c, s


_ASYMPTOTIC_FROM = 40.0


def g_cos(t: np.ndarray) -> np.ndarray:
    """G with (t^2 G'')'' = cos t: Ci(t) + t (Si(t) - pi/2) + cos t."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    big = t >= _ASYMPTOTIC_FROM
    if np.any(big):
        tb = t[big]
        c, s = _aux_series(tb)
        out[big] = c * np.cos(tb) + s * np.sin(tb)
    ts = t[~big]
    si, ci = sici(ts)
    out[~big] = ci + ts * (si - math.pi / 2) + np.cos(ts)
    return out


def g_sin(t: np.ndarray) -> np.ndarray:
    """G with (t^2 G'')'' = sin t: Si(t) - pi/2 - t Ci(t) + sin t."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    big = t >= _ASYMPTOTIC_FROM
    if np.any(big):
        tb = t[big]
        c, s = _aux_series(tb)
        out[big] = c * np.sin(tb) - s * np.cos(tb)
    ts = t[~big]
    si, ci = sici(ts)
    out[~big] = si - math.pi / 2 - ts * ci + np.sin(ts)
    return out


def _closed_antiderivative(kernel: KernelSpec):
    if isinstance(kernel, BesselPQ) and kernel.q == 0.5:
        if kernel.p == -0.5:
            return g_cos
        if kernel.p == 0.5:
            return g_sin
    return None


# ----------------------------------------------------------- kernel matrix

def _psi_closed(G, log_t: np.ndarray, rho: float) -> np.ndarray:
    """Psi(T) = sqrt(2/pi) T^-2 sum_e w_e G(T rho^e) from a fourth mixed difference."""
    sm, sp = rho / (rho - 1), 1 / (rho - 1)
    s0 = -(sm + sp)
    sig = {-1: sm, 0: s0, 1: sp}
    w = {e: sum(sig[a] * sig[e - a] for a in (-1, 0, 1) if e - a in sig) for e in range(-2, 3)}
    h = math.log(rho)
    acc = np.zeros_like(log_t)
    for e, we in w.items():
        acc += we * G(np.exp(log_t + e * h))
    return _C0 * acc * np.exp(-2 * log_t)


def _psi_quadrature(kernel: KernelSpec, log_t: np.ndarray, rho: float) -> np.ndarray:
    """Psi(T) = int v(T u) kappa(u) du on [rho^-2, rho^2] with 4 smooth pieces."""
    h = math.log(rho)
    out = np.zeros_like(log_t)
    T = np.exp(log_t)
    period = 2 * math.pi
    for j in range(-2, 2):
        a, b = rho ** j, rho ** (j + 1)
        periods = np.minimum(T * (b - a) / period, 1e9)
        need = 16 + np.ceil(8 * periods).astype(np.int64)
        if np.any(need > MAX_NODES):
            raise OscillationError("kernel oscillates too fast across a cell; "
                                   "narrow the window or refine the grid",
                                   t_max=float(T.max()), nodes=int(need.max()))
        for n in np.unique(need):
            sel = need == n
            u, w = _gl(a, b, int(n))
            ku = w * _kappa(u, rho)
            vals = kernel.evaluate(np.multiply.outer(T[sel], u).ravel()).reshape(-1, u.size)
            out[sel] += vals @ ku
    return out


def _series_remainder(kernel: KernelSpec, log_t: np.ndarray, l: float, rho: float,
                      skip: int) -> np.ndarray:
    """t^{1/2-l} sum_{k>=skip} v_k m_k^2 t^{r_k} for small t, in log space."""
    out = np.zeros_like(log_t)
    if isinstance(kernel, BesselPQ):
        terms = [kernel.coefficient(k) for k in range(skip, skip + 40)]
    else:
        terms = list(kernel.expansion.terms[skip:])
        rem = kernel.expansion.remainder_exponent
        if kernel.remainder_coefficient != 0:
            terms.append((rem, kernel.remainder_coefficient))
    for r, v in terms:
        m = _hat_moment(r, rho)
        expo = (r + 0.5 - l) * log_t + math.log(abs(v) * m * m)
        out += math.copysign(1.0, v) * np.exp(np.minimum(expo, 700.0))
    return out


def _series_region(kernel: KernelSpec, rho: float) -> float:
    """log T below which the convergent small-t series is used."""
    if isinstance(kernel, BesselPQ):
        return math.log(SERIES_LIMIT) - 2 * math.log(rho)
    return math.log(kernel.t[0]) - 2 * math.log(rho)


def kernel_profile(kernel: KernelSpec, log_t: np.ndarray, l: float, rho: float,
                   n_split: int) -> np.ndarray:
    """F(t) = t^{1/2-l} (Psi(t) - sum_{k<n_split} v_k m_k^2 t^{r_k}) at t = exp(log_t)."""
    log_t = np.asarray(log_t, dtype=float)
    out = np.zeros_like(log_t)
    small = log_t <= _series_region(kernel, rho)
    if np.any(small):
        out[small] = _series_remainder(kernel, log_t[small], l, rho, n_split)
    big = ~small
    psi_zero = np.zeros_like(big)
    if isinstance(kernel, Tabulated):
        # compact support: Psi vanishes once T rho^-2 passes the last sample
        psi_zero = big & (log_t - 2 * math.log(rho) > math.log(kernel.t[-1]))
    # beyond t ~ e^700 the smoothed kernel is far below double resolution
    psi_zero |= big & (log_t > 700.0)
    live = big & ~psi_zero
    if np.any(live):
        lt = log_t[live]
        G = _closed_antiderivative(kernel)
        psi = _psi_closed(G, lt, rho) if G is not None else _psi_quadrature(kernel, lt, rho)
        out[live] = psi * np.exp(np.minimum((0.5 - l) * lt, 700.0))
    for r, v in _leading_terms(kernel, n_split):
        m = _hat_moment(r, rho)
        out[big] -= v * m * m * np.exp(np.minimum((r + 0.5 - l) * log_t[big], 700.0))
    return out


def _leading_terms(kernel: KernelSpec, n: int) -> list[tuple[float, float]]:
    if isinstance(kernel, BesselPQ):
        return [kernel.coefficient(k) for k in range(n)]
    return list(kernel.expansion.terms[:n])


# --------------------------------------------------------------- matrices

@dataclass
class FormMatrices:
    """Scaled form matrices D A D with D = diag(x_i^{-(l+1/2)}).

    ``v`` holds the kernel matrix with the split-off expansion terms removed;
    those live in ``border`` (normalised columns) with ``border_diag`` the
    matching scaled diagonal entries of the bordered block before division by
    gamma, i.e. the block is -border_diag / gamma.
    """

    spec: GridSpec
    l: float
    h0: np.ndarray
    v: np.ndarray
    gram: np.ndarray
    log_scale: np.ndarray
    border: np.ndarray
    border_diag: np.ndarray
    border_signs: np.ndarray
    h0_norm_log: float
    notes: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.h0.shape[0]

    def unscaled(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(h0, v_full, gram) in the original hat basis; only for modest windows."""
        inv = np.exp(-self.log_scale)
        if not np.all(np.isfinite(inv)) or inv.max() / inv.min() > 1e150:
            raise OverflowError("window too wide for unscaled matrices")
        outer = np.outer(inv, inv)
        v = self.v.copy()
        for k in range(self.border.shape[1]):
            u = self.border[:, k]
            v += self.border_signs[k] / self.border_diag[k] * np.outer(u, u)
        return self.h0 * outer, v * outer, self.gram * outer


def assemble_h0(spec: GridSpec, l: float) -> np.ndarray:
    """Scaled x^{2l} matrix: Toeplitz tridiagonal with entries c_0 and rho^{-(l+1/2)} c_1."""
    if not l >= 0:
        raise SpecError("l must be >= 0", l=l)
    rho = spec.ratio
    c0, c1 = _h0_entries(l, rho)
    n = spec.cells - 1
    off = rho ** (-(l + 0.5)) * c1
    return np.diag(np.full(n, c0)) + np.diag(np.full(n - 1, off), 1) + np.diag(np.full(n - 1, off), -1)


def assemble_gram(spec: GridSpec, l: float) -> np.ndarray:
    """Scaled mass matrix D G D."""
    rho = spec.ratio
    c0, c1 = _h0_entries(0.0, rho)
    lx = spec.log_nodes()[1:-1]
    # unscaled entries x_i c_m(0); the congruence adds x_i^{-(l+1/2)} x_j^{-(l+1/2)}
    # clipped: on very wide windows the mass matrix is only used for the gram shift,
    # which is meaningless there anyway
    w = np.exp(np.minimum(-2 * l * lx, 700.0))
    diag = w * c0
    off = w[:-1] * rho ** (-(l + 0.5)) * c1
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def split_count(kernel: KernelSpec, l: float) -> int:
    """Number of expansion terms with r_k < l - 1/2."""
    return len(kernel.expansion_terms(l - 0.5).terms)


def assemble_v(spec: GridSpec, kernel: KernelSpec, l: float = 0.5,
               n_split: int = 0) -> np.ndarray:
    """Scaled kernel matrix F(x_i x_j) (Hankel), minus the first n_split expansion terms."""
    rho = spec.ratio
    lx = spec.log_nodes()
    n = spec.cells - 1
    sums = 2 * lx[0] + spec.log_step * np.arange(2, 2 * spec.cells - 1)
    prof = kernel_profile(kernel, sums, l, rho, n_split)
    idx = np.add.outer(np.arange(n), np.arange(n))
    return prof[idx]


def assemble_forms(spec: GridSpec, kernel: KernelSpec, l: float) -> FormMatrices:
    if not l > 0:
        raise SpecError("l must be positive", l=l)
    rho = spec.ratio
    lx = spec.log_nodes()[1:-1]
    K = split_count(kernel, l)
    h0 = assemble_h0(spec, l)
    v = assemble_v(spec, kernel, l, K)
    gram = assemble_gram(spec, l)
    border = np.zeros((lx.size, K))
    bdiag = np.zeros(K)
    signs = np.zeros(K)
    terms = kernel.expansion_terms(l - 0.5).terms
    for k, (r, vk) in enumerate(terms):
        a = r + 0.5 - l  # < 0: largest at the smallest node
        border[:, k] = np.exp(a * (lx - lx[0]))
        m = _hat_moment(r, rho)
        # original column m x_i^{a}; normalised by s_k = 1 / (m x_1^{a})
        log_s2 = -2 * (math.log(m) + a * lx[0])
        bdiag[k] = math.exp(max(min(log_s2 - math.log(abs(vk)), 700.0), -745.0))
        signs[k] = math.copysign(1.0, vk)
    # sup-norm of the unscaled x^{2l} matrix, kept as a logarithm
    c0, c1 = _h0_entries(l, rho)
    h_log = (2 * l + 1) * spec.log_nodes()[-2] + math.log(c0 + 2 * c1)
    return FormMatrices(spec, l, h0, v, gram, -(l + 0.5) * lx, border, bdiag, signs, h_log,
                        {"split_terms": K})


# --------------------------------------------------------------- inertia

def _block_inertia_neg(d: np.ndarray) -> int:
    n = d.shape[0]
    neg = 0
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            a, b, c = d[i, i], d[i + 1, i], d[i + 1, i + 1]
            det = a * c - b * b
            if det < 0:
                neg += 1
            elif det > 0 and a + c < 0:
                neg += 2
            elif det == 0:
                raise FactorizationError("singular 2x2 pivot")
            i += 2
        else:
            if d[i, i] == 0.0:
                raise FactorizationError("zero pivot")
            neg += d[i, i] < 0
            i += 1
    return int(neg)


def inertia_negative(a: np.ndarray) -> int:
    """Number of negative eigenvalues via Bunch-Kaufman LDL^T and Sylvester's law."""
    if not np.all(np.isfinite(a)):
        raise FactorizationError("matrix has non-finite entries")
    try:
        _, d, _ = ldl(a, lower=True, check_finite=False)
        return _block_inertia_neg(d)
    except FactorizationError:
        # a symmetric reordering keeps the inertia but changes the pivot sequence
        rev = a[::-1, ::-1]
        _, d, _ = ldl(rev, lower=True, check_finite=False)
        return _block_inertia_neg(d)


def _shifted(forms: FormMatrices, gamma: float, epsilon: float, shift: str) -> np.ndarray:
    if shift == "relative":
        return (1.0 + epsilon) * forms.h0 + gamma * forms.v
    if shift == "gram":
        # epsilon is relative to the sup-norm of the unscaled x^{2l} matrix
        scale = epsilon * math.exp(min(forms.h0_norm_log, 700.0))
        return forms.h0 + gamma * forms.v + scale * forms.gram
    raise SpecError("shift must be 'relative' or 'gram'", shift=shift)


def _bordered(forms: FormMatrices, a: np.ndarray, gamma: float) -> tuple[np.ndarray, int]:
    K = forms.border.shape[1]
    if K == 0:
        return a, 0
    n = a.shape[0]
    b = np.zeros((n + K, n + K))
    b[:n, :n] = a
    b[:n, n:] = forms.border
    b[n:, :n] = forms.border.T
    # diagonal entries -1/(gamma v_k) after column normalisation
    b[n:, n:] = np.diag(-forms.border_diag * forms.border_signs / gamma)
    neg_c = int(np.sum(-forms.border_signs / gamma < 0))
    return b, neg_c


def negative_inertia_count(forms: FormMatrices, gamma: float, epsilon: float,
                           shift: str = "relative") -> int:
    """Negative eigenvalues of the pencil below -epsilon, counted by inertia.

    ``shift='relative'`` counts mu < -epsilon in (h0 + gamma v) u = mu h0 u,
    i.e. the negative inertia of (1 + epsilon) h0 + gamma v.  ``shift='gram'``
    uses h0 + gamma v + epsilon |h0|_inf gram instead.
    """
    if not epsilon > 0:
        raise SpecError("epsilon must be positive", epsilon=epsilon)
    if gamma == 0:
        return 0
    a = _shifted(forms, gamma, epsilon, shift)
    b, neg_c = _bordered(forms, a, gamma)
    return inertia_negative(b) - neg_c


def eigensolve_count(forms: FormMatrices, gamma: float, epsilon: float,
                     shift: str = "relative") -> int:
    """Independent count: Cholesky-reduced symmetric eigensolve."""
    if gamma == 0:
        return 0
    ref = forms.h0 if shift == "relative" else forms.gram
    if forms.border.shape[1] == 0:
        threshold = epsilon if shift == "relative" else (
            epsilon * math.exp(min(forms.h0_norm_log, 700.0)))
        mu = eigh(forms.h0 + gamma * forms.v, ref, eigvals_only=True)
        return int(np.sum(mu < -threshold))
    a = _shifted(forms, gamma, epsilon, shift)
    b, neg_c = _bordered(forms, a, gamma)
    n = a.shape[0]
    chol = np.linalg.cholesky(ref)
    lower_inv = np.linalg.solve(chol, np.eye(n))
    t = np.eye(b.shape[0])
    t[:n, :n] = lower_inv
    red = t @ b @ t.T
    return int(np.sum(eigvalsh((red + red.T) / 2) < 0)) - neg_c


# ------------------------------------------------------------------ sweep

@dataclass(frozen=True)
class SweepRow:
    cells: int
    x_min: float
    x_max: float
    epsilon: float
    count: int
    eigensolve_count: int | None = None


@dataclass
class GalerkinReport:
    rows: list[SweepRow]
    verdict: str
    count: int | None
    monotone: bool
    eigensolve_agrees: bool | None
    epsilons: tuple[float, ...]
    shift: str

    def as_result(self) -> CountResult | None:
        if self.verdict == "finite":
            return Finite(self.count)
        if self.verdict == "likely_infinite":
            return CountResult(None)
        return None

    def table(self) -> dict[float, list[int]]:
        out: dict[float, list[int]] = {}
        for r in self.rows:
            out.setdefault(r.epsilon, []).append(r.count)
        return out

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "count": self.count,
            "monotone": self.monotone,
            "eigensolve_agrees": self.eigensolve_agrees,
            "shift": self.shift,
            "epsilons": list(self.epsilons),
            "rows": [
                {"cells": r.cells, "x_min": r.x_min, "x_max": r.x_max,
                 "epsilon": r.epsilon, "count": r.count,
                 "eigensolve_count": r.eigensolve_count}
                for r in self.rows
            ],
        }


def classify(table: dict[float, list[int]]) -> tuple[str, int | None]:
    """Finite(n) when the last two levels agree on n at every epsilon;
    likely infinite when counts rise strictly at every step at the smallest
    epsilon; inconclusive otherwise."""
    eps = sorted(table)
    last = {table[e][-1] for e in eps}
    if all(len(table[e]) >= 2 and table[e][-1] == table[e][-2] for e in eps) and len(last) == 1:
        return "finite", last.pop()
    seq = table[eps[0]]
    if len(seq) >= 2 and all(b > a for a, b in zip(seq, seq[1:])):
        return "likely_infinite", None
    return "inconclusive", None


def refinement_verdict(specs: Sequence[GridSpec], kernel: KernelSpec, l: float,
                       gamma: float, epsilons: Iterable[float] = DEFAULT_EPSILONS,
                       shift: str = "relative", eig_check_max: int = 512) -> GalerkinReport:
    """Count negative eigenvalues over a nested ladder and classify the result."""
    specs = list(specs)
    epsilons = tuple(sorted(float(e) for e in epsilons))
    if len(specs) < 3:
        raise SpecError("need at least 3 nested refinements")
    if len(epsilons) < 2 or epsilons[-1] / epsilons[0] < 100 * (1 - 1e-12):
        raise SpecError("need at least 2 epsilons spanning two decades")
    for a, b in zip(specs, specs[1:]):
        if not is_nested(a, b):
            raise GridError("refinement ladder is not nested", coarse=a, fine=b)
    rows: list[SweepRow] = []
    agree: bool | None = None
    for spec in specs:
        forms = assemble_forms(spec, kernel, l)
        for e in epsilons:
            c = negative_inertia_count(forms, gamma, e, shift)
            ec = None
            if spec.cells <= eig_check_max:
                ec = eigensolve_count(forms, gamma, e, shift)
                agree = (ec == c) if agree is None else (agree and ec == c)
            rows.append(SweepRow(spec.cells, spec.x_min, spec.x_max, e, c, ec))
    table: dict[float, list[int]] = {}
    for r in rows:
        table.setdefault(r.epsilon, []).append(r.count)
    monotone = all(all(b >= a for a, b in zip(s, s[1:])) for s in table.values())
    monotone &= all(all(table[e1][i] >= table[e2][i] for i in range(len(specs)))
                    for e1, e2 in zip(epsilons, epsilons[1:]))
    verdict, count = classify(table)
    return GalerkinReport(rows, verdict, count, monotone, agree, epsilons, shift)


# ------------------------------------------------------------------ export

def dump_matrix(path, matrix: np.ndarray) -> None:
    """Two little-endian uint64 dimensions, then row-major float64 data."""
    m = np.ascontiguousarray(matrix, dtype="<f8")
    if m.ndim != 2:
        raise SpecError("only 2-D matrices can be dumped")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", *m.shape))
        fh.write(m.tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != rows * cols:
        raise SpecError("dump is truncated", expected=rows * cols, got=data.size)
    return data.reshape(rows, cols)
