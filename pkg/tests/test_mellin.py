import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from friedrichs.errors import (BandError, ConvergenceError, DomainError, GridError, PoleError,
                               PoleProximityError, ResonanceError)
from friedrichs.mellin import (BesselPQ, KernelExpansion, Tabulated, beta_l, channel_kernel,
                               cosine_kernel, is_resonant, mellin_symbol_bessel,
                               mellin_symbol_quadrature, mellin_transform, residue_at_pole,
                               sigma_channel, sigma_cs, sigma_d1_reflection, sigma_l, sine_kernel,
                               symbol_extrema, symbol_samples, verify_convolution)
from friedrichs.specfun import gamma_real

SQ2PI = math.sqrt(2 / math.pi)


def _gauss(x):
    return x ** -0.5 * np.exp(-np.log(x) ** 2 / 2)


def _exp_kernel(n_terms=4):
    terms = tuple((float(k), (-1) ** k / math.factorial(k)) for k in range(n_terms))
    return Tabulated.from_function(lambda t: np.exp(-t), KernelExpansion(terms, float(n_terms)))


class TestKernelTypes:
    @pytest.mark.parametrize("terms, rem", [
        (((0.5, 1.0), (0.2, 1.0)), 2.0),
        (((0.0, 0.0),), 1.0),
        (((-0.6, 1.0),), 1.0),
        (((0.0, 1.0),), 0.0),
    ])
    def test_expansion_invariants(self, terms, rem):
        with pytest.raises(DomainError):
            KernelExpansion(terms, rem)

    @pytest.mark.parametrize("p, q", [(-1.0, 0.4), (0.0, 1.5)])
    def test_bessel_invariants(self, p, q):
        with pytest.raises(DomainError):
            BesselPQ(p, q)

    def test_signs_alternate(self):
        coeffs = BesselPQ(0.7, 0.3).expansion(8).coefficients
        assert np.all(np.sign(coeffs[1:]) == -np.sign(coeffs[:-1]))

    def test_cosine_leading_term(self):
        r, v = cosine_kernel().coefficient(0)
        assert r == 0.0 and v == pytest.approx(SQ2PI, rel=1e-14)

    def test_evaluate_cosine(self):
        t = np.linspace(0.1, 40, 50)
        assert np.allclose(cosine_kernel().evaluate(t), SQ2PI * np.cos(t), atol=1e-12)

    def test_tabulated_matches_function(self):
        k = _exp_kernel()
        t = np.array([1e-5, 1e-3, 0.4, 3.0, 25.0])
        assert np.allclose(k.evaluate(t), np.exp(-t), atol=1e-8)


class TestMellinTransform:
    def test_gaussian_pair(self):
        t = np.linspace(-20, 20, 801)
        lam, vals = mellin_transform(t, _gauss(np.exp(t)))
        keep = np.abs(lam) < 8
        assert np.max(np.abs(vals[keep] - np.exp(-lam[keep] ** 2 / 2))) < 1e-10

    def test_direct_equals_fft(self):
        t = np.linspace(-20, 20, 801)
        u = _gauss(np.exp(t))
        lam, vals = mellin_transform(t, u)
        pick = np.abs(lam) < 3
        assert np.allclose(mellin_transform(t, u, lam[pick]), vals[pick], atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-2, 2), st.floats(0.4, 2), st.floats(-3, 3))
    def test_parseval(self, centre, width, freq):
        t = np.linspace(-30, 30, 2048, endpoint=False)
        f = np.exp(-((t - centre) / width) ** 2 / 2) * np.cos(freq * t)
        u = np.exp(-t / 2) * f
        lam, vals = mellin_transform(t, u)
        h = t[1] - t[0]
        norm_u = np.sum(np.abs(f) ** 2) * h  # int |u|^2 dx = int |f|^2 dt
        norm_m = np.sum(np.abs(vals) ** 2) * (lam[1] - lam[0])
        assert abs(norm_m - norm_u) <= 1e-8 * norm_u

    def test_zero(self):
        t = np.linspace(-5, 5, 64)
        _, vals = mellin_transform(t, np.zeros_like(t))
        assert np.all(vals == 0)

    def test_nonuniform(self):
        t = np.concatenate([np.linspace(-5, 0, 20), np.linspace(0.3, 5, 20)])
        with pytest.raises(GridError):
            mellin_transform(t, _gauss(np.exp(t)))

    def test_short(self):
        with pytest.raises(GridError):
            mellin_transform(np.linspace(-1, 1, 5), np.zeros(5))

    def test_not_decayed(self):
        t = np.linspace(-2, 2, 64)
        with pytest.raises(GridError):
            mellin_transform(t, _gauss(np.exp(t)))

    def test_nyquist(self):
        t = np.linspace(-20, 20, 201)
        with pytest.raises(GridError):
            mellin_transform(t, _gauss(np.exp(t)), [100.0])


class TestConvolution:
    def test_exponential_kernel(self):
        assert verify_convolution(lambda s: np.exp(-s), _gauss) <= 1e-6

    def test_zero_function(self):
        assert verify_convolution(lambda s: np.exp(-s), lambda x: 0 * x) == 0.0

    def test_zero_kernel(self):
        assert verify_convolution(lambda s: 0 * s, _gauss) == 0.0


class TestClosedSymbol:
    def test_cosine_at_one(self):
        assert mellin_symbol_bessel(-0.5, 0.5, 1.0) == pytest.approx(-2.0, abs=1e-12)

    def test_sine_quarter(self):
        expected = SQ2PI * math.gamma(0.25) * math.sin(math.pi / 8)
        assert mellin_symbol_bessel(0.5, 0.5, 0.25) == pytest.approx(expected, rel=1e-12)
        assert abs(expected - 1.1071) < 1e-3

    def test_pole(self):
        with pytest.raises(PoleError):
            mellin_symbol_bessel(-0.5, 0.5, 0.5)

    def test_decay(self):
        assert abs(mellin_symbol_bessel(-0.5, 0.5, 1 + 50j)) < abs(mellin_symbol_bessel(-0.5, 0.5, 1 + 5j))

    @pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
    def test_cosine_classical(self, s):
        # int cos(t) t^{s-1} dt = Gamma(s) cos(pi s / 2), with s = 1/2 - z
        z = 0.5 - s
        expected = SQ2PI * gamma_real(s) * math.cos(math.pi * s / 2)
        assert mellin_symbol_bessel(-0.5, 0.5, z) == pytest.approx(expected, rel=1e-12)


class TestQuadratureSymbol:
    def test_sine_quarter(self):
        val = mellin_symbol_quadrature(sine_kernel(), 0.25)
        assert abs(val - mellin_symbol_bessel(0.5, 0.5, 0.25)) < 1e-6

    @pytest.mark.parametrize("p, q", [(-0.5, 0.5), (0.5, 0.5), (1.5, 0.5)])
    def test_bands(self, p, q):
        k = BesselPQ(p, q)
        rng = np.random.default_rng(7)
        poles = k.pole_lines(p + q + 0.5 + 8.0)
        for lo, hi in zip(np.concatenate([[0.0], poles[:3]]), poles[:4]):
            z = rng.uniform(lo + 0.01, hi - 0.01, 20) + 1j * rng.uniform(-6, 6, 20)
            err = np.abs(mellin_symbol_quadrature(k, z) - mellin_symbol_bessel(p, q, z))
            assert np.max(err) < 1e-6

    def test_tabulated_gamma(self):
        k = _exp_kernel()
        z = np.array([0.25, 0.8 + 1j, 1.7 - 0.5j, 2.3])
        from scipy.special import gamma
        assert np.max(np.abs(mellin_symbol_quadrature(k, z) - gamma(0.5 - z))) < 1e-5

    def test_tabulated_zero(self):
        k = Tabulated(tuple(np.geomspace(1e-3, 10, 20)), (0.0,) * 20, KernelExpansion((), 1.0))
        assert abs(mellin_symbol_quadrature(k, 0.7 + 0.2j)) == 0.0

    @pytest.mark.parametrize("z", [-0.1, 0.0])
    def test_band_low(self, z):
        with pytest.raises(BandError):
            mellin_symbol_quadrature(cosine_kernel(), z)

    def test_band_high(self):
        with pytest.raises(BandError):
            mellin_symbol_quadrature(_exp_kernel(2), 2.6)

    def test_pole_proximity(self):
        with pytest.raises(PoleProximityError):
            mellin_symbol_quadrature(cosine_kernel(), 0.5 + 1e-7)


class TestResidues:
    @pytest.mark.parametrize("kernel", [cosine_kernel(), sine_kernel()], ids=["cos", "sin"])
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_bessel(self, kernel, n):
        assert residue_at_pole(kernel, n) == pytest.approx(-kernel.coefficient(n)[1], abs=1e-4)

    def test_cosine_value(self):
        assert residue_at_pole(cosine_kernel(), 0) == pytest.approx(-SQ2PI, abs=1e-6)

    def test_tabulated(self):
        k = Tabulated.from_function(lambda t: np.exp(-t),
                                    KernelExpansion(((0.0, 1.0), (1.0, -1.0)), 2.0))
        assert residue_at_pole(k, 0) == pytest.approx(-1.0, abs=1e-4)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            residue_at_pole(_exp_kernel(2), 5)


class TestBeta:
    def test_value(self):
        assert beta_l(cosine_kernel(), 1.0, 0.0) == pytest.approx(-2.0, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 6).filter(lambda l: abs((l - 0.5) / 2 - round((l - 0.5) / 2)) > 1e-3),
           st.floats(0, 80))
    def test_conjugate_symmetry(self, l, lam):
        k = cosine_kernel()
        assert abs(beta_l(k, l, -lam) - np.conj(beta_l(k, l, lam))) <= 1e-10 * max(
            1.0, abs(beta_l(k, l, lam)))

    def test_stirling_decay(self):
        k = cosine_kernel()
        assert abs(beta_l(k, 1.0, 50.0)) < 0.05 * abs(beta_l(k, 1.0, 0.0))

    def test_resonant(self):
        with pytest.raises(ResonanceError):
            beta_l(cosine_kernel(), 0.5, 1.0)

    def test_l_positive(self):
        with pytest.raises(DomainError):
            beta_l(cosine_kernel(), -1.0, 0.0)

    def test_samples_symmetric_grid(self):
        s = symbol_samples(cosine_kernel(), 1.3, window=10.0)
        lam = np.array(s.lambda_grid)
        b = np.array(s.beta_values)
        mirrored = beta_l(cosine_kernel(), 1.3, -lam)
        assert np.max(np.abs(mirrored - np.conj(b))) <= 1e-10
        assert s.p_l >= s.q_l >= 0


class TestExtrema:
    def test_cosine_l1(self):
        s = symbol_samples(cosine_kernel(), 1.0)
        assert s.p_l == pytest.approx(2.0, abs=1e-10)
        assert s.argmax == 0.0

    def test_sine_l1(self):
        s = symbol_samples(sine_kernel(), 1.0)
        assert s.argmax == 0.0
        assert s.p_l == pytest.approx(abs(beta_l(sine_kernel(), 1.0, 0.0)), rel=1e-12)

    @pytest.mark.parametrize("l", [0.8, 1.3, 2.2, 3.7])
    def test_bes5_agrees_with_extrema(self, l):
        p_l, q_l = symbol_extrema(cosine_kernel(), l)
        assert p_l >= q_l >= 0
        assert sigma_l(cosine_kernel(), l) == pytest.approx(1 / p_l, abs=1e-8)

    def test_quadrature_route(self):
        k = _exp_kernel()
        p_l, _ = symbol_extrema(k, 1.0, window=10.0)
        assert p_l == pytest.approx(2 * math.sqrt(math.pi), rel=1e-5)

    def test_safeguard(self):
        # symbol peaks near lambda = 5, outside a window of 2
        k = Tabulated.from_function(lambda t: t * np.exp(-t) * np.cos(5 * np.log(t)),
                                    KernelExpansion((), 1.0))
        with pytest.raises(ConvergenceError):
            symbol_samples(k, 1.0, window=2.0, step=0.1)
        assert symbol_samples(k, 1.0, window=8.0, step=0.1).argmax == pytest.approx(5.0, abs=0.1)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    @pytest.mark.parametrize("kind, n", [("cosine", 0), ("sine", 1)])
    def test_argmax_at_zero(self, d, kind, n):
        k = channel_kernel(d, n)
        for l in np.arange(0.3, 8.0, 0.7):
            if is_resonant(k, l):
                continue
            s = symbol_samples(k, float(l))
            assert s.argmax <= 0.05, (d, kind, l)


class TestSigma:
    def test_d1_cosine(self):
        assert sigma_l(cosine_kernel(), 1.0) == pytest.approx(0.5, abs=1e-12)
        assert sigma_cs(1, 1.0, "c") == pytest.approx(0.5, abs=1e-12)
        assert sigma_d1_reflection(1.0, "c") == pytest.approx(0.5, abs=1e-10)
        assert sigma_channel(1, 1.0, 0) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("l", [0.3, 1.2, 2.7, 4.1])
    @pytest.mark.parametrize("kind", ["cosine", "sine"])
    def test_reflection_form(self, l, kind):
        assert sigma_cs(1, l, kind) == pytest.approx(sigma_d1_reflection(l, kind), rel=1e-10)

    def test_vanishes_near_resonance(self):
        vals = [sigma_l(cosine_kernel(), 0.5 - h) for h in (1e-1, 1e-2, 1e-3)]
        assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-2

    def test_resonance_modes(self):
        with pytest.raises(ResonanceError):
            sigma_l(cosine_kernel(), 2.5)
        assert sigma_l(cosine_kernel(), 2.5, on_resonance="zero") == 0.0
        assert sigma_channel(3, 1 + 1.5, 1, on_resonance="zero") == 0.0

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    @pytest.mark.parametrize("l", [0.4, 1.3, 2.9, 5.2])
    def test_lemma_sigma(self, d, l):
        for kind, n in (("cosine", 0), ("sine", 1)):
            a = sigma_cs(d, l, kind, on_resonance="zero")
            b = sigma_channel(d, l, n, on_resonance="zero")
            assert a == pytest.approx(b, abs=1e-8)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 4), st.floats(0.1, 8), st.integers(1, 3))
    def test_lemma_rel(self, d, l, m):
        for base in (0, 1):
            lo = sigma_channel(d, l, base, on_resonance="zero")
            hi = sigma_channel(d, l, base + 2 * m, on_resonance="zero")
            assert hi >= lo * (1 - 1e-10)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            sigma_cs(2, 1.0, "tangent")
