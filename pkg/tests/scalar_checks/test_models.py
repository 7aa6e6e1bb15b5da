import math

import numpy as np
import pytest

from modules.exceptions import DomainError
from modules.scalar_checks.models import (
    SUITES, HilbertVariant, KernelMatrix, alpha_fn, beta_distributions, beta_ratio,
    check_subadditivity, cosine_log_moment, gaussian_smoothing_check, laplace_log_identity,
    mixture_constant, run_suite, scalar_dist, shifted_cosine_closed_form,
    shifted_cosine_log_moment, verify_scalar_hilbert, ScalarDist,
)

LOG2 = math.log(2)


class TestAlpha:
    @pytest.mark.parametrize('y', [-3.0, 0.0, 0.5, 7.0])
    def test_vanishes_on_the_axis(self, y):
        assert alpha_fn(0.0, y, 3.5) == 0

    def test_examples(self):
        assert alpha_fn(1, 1, 3) == pytest.approx(0, abs=1e-14)
        assert alpha_fn(1, -2, 4) == pytest.approx(24)

    def test_vectorised(self):
        values = alpha_fn(np.array([0.0, 1.0]), np.array([2.0, 1.0]), 3)
        assert values.shape == (2,)
        with pytest.raises(DomainError):
            alpha_fn(1, 1, 0.5)


class TestBeta:
    def test_half_gives_power_of_two(self):
        assert beta_ratio(0.5, 1.5) == pytest.approx(2 ** -0.5)

    def test_small_beta_breaks_subadditivity_below_three(self):
        assert beta_ratio(0.01, 2.5) < 1
        assert beta_ratio(0.3, 4) > 1

    def test_distributions_reproduce_the_ratio(self):
        X, Y = beta_distributions(0.05)
        assert X.mean == pytest.approx(0, abs=1e-15)
        check = check_subadditivity(X, Y, 2.5)
        assert not check.holds
        assert check.lhs / check.rhs == pytest.approx(beta_ratio(0.05, 2.5), rel=1e-12)

    @pytest.mark.parametrize('beta', [0, 0.6, -0.1])
    def test_range(self, beta):
        with pytest.raises(DomainError):
            beta_ratio(beta, 3)
        with pytest.raises(DomainError):
            beta_distributions(beta)


class TestSubadditivity:
    def test_rademacher_pair(self):
        X = scalar_dist([-1.0, 1.0])
        check = check_subadditivity(X, X, 3)
        assert check.lhs == pytest.approx(4)
        assert check.rhs == pytest.approx(2)
        assert check.holds

    def test_point_mass_at_zero_gives_equality(self):
        Y = scalar_dist([-2.0, 1.0], [1 / 3, 2 / 3])
        check = check_subadditivity(scalar_dist([0.0]), Y, 4)
        assert check.lhs == pytest.approx(check.rhs)
        assert check.holds

    def test_requires_centered_inputs(self):
        with pytest.raises(DomainError):
            check_subadditivity(scalar_dist([0.0, 1.0]), scalar_dist([0.0]), 3)
        with pytest.raises(DomainError):
            check_subadditivity(scalar_dist([0.0]), scalar_dist([0.0]), 0)


class TestLogMoments:
    @pytest.mark.parametrize('atoms, expected', [
        ([1.0], 0.0),
        ([2.0], LOG2),
        ([1.0, math.e ** 2], 1.0),
    ])
    def test_laplace_identity(self, atoms, expected):
        check = laplace_log_identity(scalar_dist(atoms))
        assert check.lhs == pytest.approx(expected, abs=1e-15)
        assert check.rhs == pytest.approx(expected, abs=1e-6)
        assert check.holds

    def test_laplace_rejects_nonpositive_atoms(self):
        with pytest.raises(DomainError):
            laplace_log_identity(scalar_dist([0.0, 1.0]))

    @pytest.mark.parametrize('alpha', [0.0, math.pi / 2, 1.0, math.pi, -2.5, 7.0])
    def test_cosine_identity(self, alpha):
        assert cosine_log_moment(alpha) == pytest.approx(-LOG2, abs=1e-6)

    @pytest.mark.parametrize('t', [-1.0, -0.4, 0.3, 1.0, 1.5, -4.0])
    def test_shifted_cosine(self, t):
        value = shifted_cosine_log_moment(t)
        assert value == pytest.approx(shifted_cosine_closed_form(t), abs=1e-6)
        assert value >= -LOG2 - 1e-6

    def test_shifted_cosine_exceeds_minus_log_two_outside_the_unit_interval(self):
        assert shifted_cosine_log_moment(1.5) > -LOG2


class TestSmoothing:
    def test_identical_inputs_give_equality(self):
        X = scalar_dist([0.0, 1.0, 3.0], [0.5, 0.25, 0.25])
        check = gaussian_smoothing_check(X, X, 0.7)
        assert check.lhs == pytest.approx(check.rhs)
        assert check.holds

    def test_zero_scale(self):
        check = gaussian_smoothing_check(scalar_dist([0.0]), scalar_dist([4.0]), 0)
        assert check.lhs == pytest.approx(1)
        assert check.rhs == pytest.approx(1)

    def test_strict_gap(self):
        check = gaussian_smoothing_check(scalar_dist([0.0, 1.0]), scalar_dist([5.0]), 1)
        assert check.lhs > check.rhs

    def test_rejects_negative_scale(self):
        with pytest.raises(DomainError):
            gaussian_smoothing_check(scalar_dist([0.0]), scalar_dist([1.0]), -1)


class TestHilbert:
    def test_constant_kernel(self):
        f = KernelMatrix([0.5, 0.5], [0.2, 0.3, 0.5], np.full((2, 3), 2 - 1j))
        check = verify_scalar_hilbert(f, HilbertVariant.ROUNDNESS)
        assert check.lhs == pytest.approx(10)
        assert check.rhs == pytest.approx(0, abs=1e-12)

    def test_rank_one_equality(self):
        mu = np.array([0.25, 0.75])
        phi = np.array([3.0, -1.0])
        f = KernelMatrix(mu, [0.5, 0.5], np.outer(phi, [1.0, 1.0]))
        check = verify_scalar_hilbert(f, 'Roundness')
        assert check.rhs == pytest.approx(check.lhs, rel=1e-12)
        assert check.holds

    def test_mixture_constant_is_attained(self):
        constant = KernelMatrix([0.4, 0.6], [1.0], np.full((2, 1), 1.5j))
        check = verify_scalar_hilbert(constant, 'Mixture', alpha=0, beta=0)
        assert check.rhs == pytest.approx(check.lhs, rel=1e-12)

        mean_zero = KernelMatrix([0.25, 0.75], [0.5, 0.5], np.outer([3.0, -1.0], [1.0, 1.0]))
        check = verify_scalar_hilbert(mean_zero, 'Mixture', alpha=1, beta=1)
        assert mixture_constant(1, 1) == 1
        assert check.rhs == pytest.approx(check.lhs, rel=1e-12)

    def test_mixture_on_random_kernels(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            f = KernelMatrix(rng.dirichlet(np.ones(5)), rng.dirichlet(np.ones(5)),
                             rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
            assert verify_scalar_hilbert(f, 'Mixture').holds

    def test_antisym_needs_a_square_kernel(self):
        f = KernelMatrix([1.0], [0.5, 0.5], [[1.0, 2.0]])
        with pytest.raises(DomainError):
            verify_scalar_hilbert(f, HilbertVariant.ANTISYM)
        with pytest.raises(ValueError):
            verify_scalar_hilbert(f, 'Sideways')

    def test_kernel_validation(self):
        with pytest.raises(DomainError):
            KernelMatrix([0.5, 0.5], [1.0], [1.0, 2.0])
        with pytest.raises(DomainError):
            KernelMatrix([0.5, 0.6], [1.0], [[1.0], [2.0]])


def test_scalar_dist_validation():
    with pytest.raises(DomainError):
        ScalarDist([1.0, math.inf], [0.5, 0.5])
    with pytest.raises(DomainError):
        scalar_dist([])
    assert scalar_dist([1.0, 3.0]).mean == 2


class TestSuites:
    @pytest.mark.parametrize('name, options', [
        ('alpha', {'grid': 60}),
        ('beta', {}),
        ('subadditivity', {'seeds': 50}),
        ('smoothing', {'seeds': 50}),
        ('hilbert', {'seeds': 50}),
        ('cosine', {'grid': 5}),
        ('laplace', {'seeds': 3}),
    ])
    def test_small_runs_pass(self, name, options):
        result = run_suite(name, **options)
        assert result.passed, result.violations[:5]
        assert result.header == SUITES[name][0]
        assert all(len(row) == len(result.header) for row in result.rows)

    def test_beta_rows(self):
        result = run_suite('beta', grid=100)
        by_q = {row[0]: row for row in result.rows}
        assert by_q[1.5][2] < 1
        assert by_q[2.5][2] < 1
        assert by_q[3.0][2] >= 1 - 1e-12
        assert by_q[4.0][4] == 0

    def test_violations_are_collected(self):
        result = run_suite('beta', grid=20, tolerance=-1.0)
        assert not result.passed
        assert all(v[0] == 'beta' for v in result.violations)

    def test_hilbert_rows_per_variant(self):
        result = run_suite('hilbert', seeds=5)
        assert [row[0] for row in result.rows] == ['Roundness', 'Mixture', 'Antisym']
        assert [row[1] for row in result.rows] == [5, 5, 5]

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            run_suite('gamma')
        with pytest.raises(DomainError):
            run_suite('alpha', grid=0)
        with pytest.raises(DomainError):
            run_suite('laplace', seeds=-1)

    @pytest.mark.slow
    @pytest.mark.parametrize('name', sorted(SUITES))
    def test_full_suites(self, name):
        assert run_suite(name).passed
