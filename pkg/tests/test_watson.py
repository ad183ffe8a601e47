"""Watson densities, samplers, quadrature moments and EM fitting."""

from itertools import permutations

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from framestats.core import SampleSet
from framestats.exceptions import DomainError
from framestats.frames import harmonic_fntf_r2
from framestats.watson import (
    KAPPA_FLOOR,
    WatsonMixture,
    WatsonParams,
    fit_watson_mixture_em,
    mixture_second_moments,
    mode_widths,
    sample_mixture,
    sample_watson,
    solve_concentration,
    watson_cos2_moment,
    watson_log_density,
    watson_log_normalizer,
    watson_normalizer,
)

from conftest import random_rotation, unit_rows

E1 = np.array([1.0, 0.0])


class TestNormalizer:
    def test_uniform_circle(self):
        assert watson_normalizer(0.0, 2) == pytest.approx(1.0 / (2 * np.pi), rel=1e-14)

    def test_uniform_sphere(self):
        assert watson_normalizer(0.0, 3) == pytest.approx(1.0 / (4 * np.pi), rel=1e-14)

    def test_kappa_one_against_quadrature(self):
        # oracle: 2 pi F(1/2, 1, kappa) = integral of exp(kappa cos^2)
        total, _ = quad(lambda t: np.exp(np.cos(t) ** 2), 0.0, 2.0 * np.pi,
                        epsabs=1e-13, epsrel=1e-13)
        assert watson_normalizer(1.0, 2) == pytest.approx(1.0 / total, rel=1e-10)
        # closed form 1 / (2 pi e^{1/2} I0(1/2)) = 0.0907699690...
        assert watson_normalizer(1.0, 2) == pytest.approx(0.09076997, abs=1e-7)

    def test_range_error_propagates(self):
        with pytest.raises(DomainError):
            watson_normalizer(501.0, 2)


class TestLogDensity:
    def test_orthogonal_point(self):
        params = WatsonParams(E1, 3.7)
        val = watson_log_density([0.0, 1.0], params)
        assert val == pytest.approx(watson_log_normalizer(3.7, 2), rel=1e-14)

    def test_axial_symmetry_bitwise(self, rng):
        params = WatsonParams(unit_rows(rng, 1, 3)[0], -4.2)
        for x in unit_rows(rng, 20, 3):
            assert watson_log_density(x, params) == watson_log_density(-x, params)

    def test_at_the_director(self):
        params = WatsonParams(E1, 1.0)
        want = -np.log(2 * np.pi * np.exp(0.5) * 1.0634833707413236) + 1.0
        assert watson_log_density(E1, params) == pytest.approx(want, rel=1e-9)

    def test_kappa_zero_rejected(self):
        with pytest.raises(DomainError):
            WatsonParams(E1, 0.0)

    @pytest.mark.parametrize("kappa", [-20.0, -5.0, -1.0, 1.0, 5.0, 20.0])
    def test_integrates_to_one_circle(self, kappa):
        params = WatsonParams(E1, kappa)

        def f(t):
            return np.exp(watson_log_density([np.cos(t), np.sin(t)], params))

        total, _ = quad(f, 0.0, 2.0 * np.pi, epsabs=1e-12, epsrel=1e-12, limit=200)
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("kappa", [-5.0, 1.0, 10.0])
    def test_integrates_to_one_sphere(self, kappa):
        params = WatsonParams(np.array([0.0, 0.0, 1.0]), kappa)
        log_c = watson_log_normalizer(kappa, 3)

        def f(psi, t):
            return np.exp(log_c + kappa * t * t)

        total, _ = dblquad(f, -1.0, 1.0, 0.0, 2.0 * np.pi,
                           epsabs=1e-11, epsrel=1e-11)
        assert total == pytest.approx(1.0, abs=1e-7)


class TestMomentFunction:
    def test_value_at_zero(self):
        assert watson_cos2_moment(0.0, 2) == pytest.approx(0.5, rel=1e-14)
        assert watson_cos2_moment(0.0, 3) == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_gradient_check_against_finite_differences(self):
        h = 1e-5
        for d in (2, 3):
            for kappa in np.linspace(-50.0, 50.0, 41):
                k = float(kappa)
                fd = (
                    np.log(np.exp(watson_log_normalizer(k - h, d))
                           / np.exp(watson_log_normalizer(k + h, d)))
                ) / (2 * h)
                # ln c = const - ln M, so d/dk ln M = -d/dk ln c
                assert watson_cos2_moment(k, d) == pytest.approx(fd, abs=1e-7)

    def test_monotone(self):
        grid = [watson_cos2_moment(k, 2) for k in np.linspace(-100, 100, 81)]
        assert np.all(np.diff(grid) > 0)

    def test_solver_roundtrip(self):
        for target in (0.2, 0.45, 0.5, 0.73, 0.99):
            kappa, capped = solve_concentration(target, 2)
            assert not capped
            assert watson_cos2_moment(kappa, 2) == pytest.approx(target, abs=1e-9)

    def test_solver_caps(self):
        kappa, capped = solve_concentration(1.0 - 1e-12, 2)
        assert capped and kappa == 500.0


class TestSampler:
    def test_deterministic(self):
        p = WatsonParams(E1, 7.0)
        a = sample_watson(p, 500, seed=3).points
        b = sample_watson(p, 500, seed=3).points
        c = sample_watson(p, 500, seed=3, threads=4).points
        assert np.array_equal(a, b)
        assert np.array_equal(a, c)

    def test_concentrated_bipolar(self):
        p = WatsonParams(E1, 200.0)
        pts = sample_watson(p, 10_000, seed=1).points
        assert np.mean((pts @ E1) ** 2) >= 0.99

    def test_girdle(self):
        p = WatsonParams(E1, -50.0)
        pts = sample_watson(p, 10_000, seed=2).points
        assert np.mean((pts @ E1) ** 2) <= 0.02

    def test_matches_analytic_moment(self):
        for kappa in (-5.0, 5.0):
            p = WatsonParams(E1, kappa)
            pts = sample_watson(p, 40_000, seed=9).points
            m_emp = float(np.mean((pts @ E1) ** 2))
            assert m_emp == pytest.approx(watson_cos2_moment(kappa, 2), abs=0.01)

    def test_second_moments_match_quadrature(self):
        axis = np.array([0.0, 0.0, 1.0])
        mix = WatsonMixture(axis[None, :], 5.0)
        target = mixture_second_moments(mix)
        pts = sample_watson(WatsonParams(axis, 5.0), 100_000, seed=4).points
        emp = pts.T @ pts / pts.shape[0]
        assert np.linalg.norm(emp - target) < 0.01

    def test_unsupported_dimension(self):
        with pytest.raises(DomainError):
            sample_watson(WatsonParams(np.array([1.0, 0, 0, 0]), 2.0), 10, seed=0)


class TestMixture:
    def test_single_component_equals_watson(self):
        mix = WatsonMixture(E1[None, :], 6.0)
        a = sample_mixture(mix, 400, seed=12).points
        b = sample_watson(WatsonParams(E1, 6.0), 400, seed=12).points
        assert np.array_equal(a, b)

    def test_deterministic_and_thread_invariant(self):
        mix = WatsonMixture(harmonic_fntf_r2(3), 10.0)
        a = sample_mixture(mix, 3000, seed=8).points
        b = sample_mixture(mix, 3000, seed=8, threads=3).points
        assert np.array_equal(a, b)

    def test_weighted_component_frequencies(self):
        mix = WatsonMixture(np.eye(2), [50.0, 50.0], weights=[0.8, 0.2])
        pts = sample_mixture(mix, 20_000, seed=5).points
        near_first = np.mean((pts @ [1.0, 0.0]) ** 2 > 0.5)
        assert near_first == pytest.approx(0.8, abs=0.02)

    def test_invalid_weights(self):
        with pytest.raises(DomainError):
            WatsonMixture(np.eye(2), 1.0, weights=[0.7, 0.7])


class TestMixtureSecondMoments:
    @pytest.mark.parametrize("n_dirs", [2, 3, 5])
    @pytest.mark.parametrize("kappa", [-5.0, 10.0])
    def test_fntf_directors_give_isotropic_moments(self, n_dirs, kappa):
        mix = WatsonMixture(harmonic_fntf_r2(n_dirs), kappa)
        m = mixture_second_moments(mix)
        assert np.linalg.norm(m - np.eye(2) / 2) <= 1e-8

    def test_near_uniform_limit(self):
        for kappa in (1e-6, -1e-6):
            mix = WatsonMixture(E1[None, :], kappa)
            m = mixture_second_moments(mix)
            assert np.linalg.norm(m - np.eye(2) / 2) <= 1e-5

    def test_concentrated_single_director(self):
        mix = WatsonMixture(E1[None, :], 200.0)
        m = mixture_second_moments(mix)
        assert m[0, 0] >= 0.99

    def test_rotation_equivariance(self, rng):
        rot = random_rotation(rng, 2)
        mix = WatsonMixture(harmonic_fntf_r2(3)[:2], [4.0, -2.0], weights=[0.6, 0.4])
        rotated = WatsonMixture(mix.directors @ rot.T, mix.concentrations, mix.weights)
        m = mixture_second_moments(mix)
        m_rot = mixture_second_moments(rotated)
        assert np.allclose(m_rot, rot @ m @ rot.T, atol=1e-9)

    def test_sphere_case_single_axis(self):
        axis = np.array([0.0, 0.0, 1.0])
        mix = WatsonMixture(axis[None, :], 5.0)
        m = mixture_second_moments(mix)
        want_m33 = watson_cos2_moment(5.0, 3)
        assert m[2, 2] == pytest.approx(want_m33, abs=1e-9)
        assert m[0, 0] == pytest.approx((1 - want_m33) / 2, abs=1e-9)
        assert abs(m[0, 1]) < 1e-10


class TestModeWidths:
    def test_monotone_in_kappa(self):
        w100 = mode_widths(WatsonMixture(E1[None, :], 100.0))[0][1]
        w400 = mode_widths(WatsonMixture(E1[None, :], 400.0))[0][1]
        assert w400 < w100

    def test_near_uniform_width(self):
        width = mode_widths(WatsonMixture(E1[None, :], 1e-6))[0][1]
        assert width == pytest.approx(np.pi / 4, abs=1e-6)

    def test_girdle_has_no_width(self):
        width = mode_widths(WatsonMixture(E1[None, :], -3.0))[0][1]
        assert width is None

    def test_permutation_equivariance(self):
        dirs = harmonic_fntf_r2(3)
        mix = WatsonMixture(dirs, [5.0, 10.0, 20.0])
        perm = [2, 0, 1]
        mix_p = WatsonMixture(dirs[perm], np.array([5.0, 10.0, 20.0])[perm])
        widths = [w for _, w in mode_widths(mix)]
        widths_p = [w for _, w in mode_widths(mix_p)]
        assert widths_p == [widths[i] for i in perm]


def _axial_deg(a, b):
    d = abs(a - b) % np.pi
    return np.degrees(min(d, np.pi - d))


class TestEMFit:
    def test_single_component_recovery(self):
        sample = sample_watson(WatsonParams(E1, 20.0), 5000, seed=31)
        fit = fit_watson_mixture_em(sample, 1, seed=7)
        ang = np.mod(np.arctan2(fit.mixture.directors[0, 1],
                                fit.mixture.directors[0, 0]), np.pi)
        assert _axial_deg(ang, 0.0) <= 1.0
        assert fit.mixture.concentrations[0] == pytest.approx(20.0, rel=0.10)
        assert fit.converged

    def test_three_director_recovery(self):
        true_angles = np.array([0.0, np.pi / 3, 2 * np.pi / 3])
        mix = WatsonMixture(harmonic_fntf_r2(3), 20.0)
        sample = sample_mixture(mix, 6000, seed=17)
        fit = fit_watson_mixture_em(sample, 3, shared_kappa=True, seed=17)
        est = np.mod(np.arctan2(fit.mixture.directors[:, 1],
                                fit.mixture.directors[:, 0]), np.pi)
        best = min(
            max(_axial_deg(est[p[i]], true_angles[i]) for i in range(3))
            for p in permutations(range(3))
        )
        assert best <= 2.0
        assert fit.mixture.concentrations[0] == pytest.approx(20.0, rel=0.15)

    def test_degenerate_symmetric_sample(self):
        pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] * 3)
        fit = fit_watson_mixture_em(SampleSet(pts), 1, seed=0)
        assert fit.mixture.concentrations[0] == pytest.approx(KAPPA_FLOOR)
        assert fit.degenerate == (True,)

    def test_monotone_loglik_on_random_data(self, rng):
        for trial in range(10):
            pts = unit_rows(rng, 120, 2)
            fit = fit_watson_mixture_em(SampleSet(pts), 2, seed=trial,
                                        shared_kappa=bool(trial % 2))
            breaks = set(fit.reinit_steps)
            diffs = np.diff(fit.trace)
            for i, diff in enumerate(diffs):
                if i not in breaks:
                    assert diff >= 0.0

    def test_equal_weights_mode(self):
        mix = WatsonMixture(harmonic_fntf_r2(3), 15.0)
        sample = sample_mixture(mix, 900, seed=2)
        fit = fit_watson_mixture_em(sample, 3, equal_weights=True, seed=2)
        assert np.allclose(fit.mixture.weights, 1.0 / 3.0)

    def test_preconditions(self):
        sample = sample_watson(WatsonParams(E1, 5.0), 25, seed=0)
        with pytest.raises(DomainError):
            fit_watson_mixture_em(sample, 3, seed=0)  # n < 10 N
        sphere = SampleSet(unit_rows(np.random.default_rng(0), 30, 3))
        with pytest.raises(DomainError):
            fit_watson_mixture_em(sphere, 1, seed=0)  # d != 2

    def test_deterministic(self):
        mix = WatsonMixture(harmonic_fntf_r2(2), 8.0)
        sample = sample_mixture(mix, 500, seed=3)
        a = fit_watson_mixture_em(sample, 2, seed=5)
        b = fit_watson_mixture_em(sample, 2, seed=5)
        assert np.array_equal(a.mixture.directors, b.mixture.directors)
        assert np.array_equal(a.trace, b.trace)
