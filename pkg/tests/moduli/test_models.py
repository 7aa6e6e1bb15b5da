import math

import numpy as np
import pytest

from modules.constants.models import PQ, C_exponent, c_exponent, general_bound
from modules.constructions.models import (
    make_bipartite, make_disjoint_bernoulli, make_eps_atom, make_fn, make_jensen,
    make_schatten_parallelogram, make_two_point,
)
from modules.distributions.models import (
    Config, centered_moment, cross_moment, finite_dist, mixture, point_mass, self_moment,
)
from modules.exceptions import DegenerateRatioError, DomainError, SpaceMismatchError
from modules.moduli.models import (
    CSV_HEADER, RatioName, RatioReport, applicable_reports, barycenter_ratio, jensen_inf_ratio,
    jensen_ratio, log_roundness_report, metric_barycenter_ratio, mixture_ratio, random_z_ratio,
    roundness_bound, roundness_ratio,
)
from modules.spaces.models import BipartiteGraph, RealLine, Schatten, Snowflake, WeightedLq

SOLVER = {'max_iter': 2_000, 'patience': 300}


def _random_config(rng, space, p, dim):
    kx, ky = rng.integers(1, 5, size=2)
    X = finite_dist(space, rng.normal(size=(kx, dim)), rng.dirichlet(np.ones(kx)))
    Y = finite_dist(space, rng.normal(size=(ky, dim)), rng.dirichlet(np.ones(ky)))
    return Config(space, X, Y, p)


def test_report_slack_and_sides():
    upper = RatioReport(RatioName.ROUNDNESS, 3.0, bound=4.0)
    assert upper.slack == 1.0
    assert upper.within_bound
    assert not RatioReport(RatioName.ROUNDNESS, 4.1, bound=4.0).within_bound
    lower = RatioReport(RatioName.JENSEN, 1.5, bound=2.0, bound_side='lower')
    assert not lower.within_bound
    assert RatioReport(RatioName.MIXTURE, 9.0).within_bound


def test_report_serialisation():
    report = roundness_ratio(make_disjoint_bernoulli(2, 3, 2).config)
    row = report.csv_row()
    assert len(row) == len(CSV_HEADER)
    assert row[0] == 'Roundness'
    assert row[4] == 'WeightedLq(3)'
    data = report.to_dict()
    assert data['bound_side'] == 'upper'
    assert data['slack'] == pytest.approx(data['bound'] - data['value'])
    assert 'solver' not in data


class TestRoundness:
    def test_disjoint_bernoulli(self):
        report = roundness_ratio(make_disjoint_bernoulli(8, 3, 3).config)
        assert report.value == pytest.approx(3.5, rel=1e-10)
        assert report.bound == pytest.approx(4)
        assert report.within_bound

    def test_identical_distributions(self):
        X = finite_dist(RealLine(), [0.0, 1.0, 5.0], [0.2, 0.3, 0.5])
        assert roundness_ratio(Config(X.space, X, X, 1.7)).value == pytest.approx(2)

    def test_schatten_parallelogram(self):
        report = roundness_ratio(make_schatten_parallelogram(16, 1).config)
        assert report.value == pytest.approx(15 / 16 * 2 ** 1.5, rel=1e-10)

    def test_degenerate_denominator(self):
        X = point_mass(RealLine(), 2.0)
        with pytest.raises(DegenerateRatioError) as info:
            roundness_ratio(Config(X.space, X, X, 1))
        assert info.value.numerator == 0
        assert info.value.denominator == 0

    def test_bound_per_space_kind(self):
        assert roundness_bound(WeightedLq.unit(3, 2), 3) == pytest.approx(4)
        assert roundness_bound(RealLine(), 0.5) == 2
        assert roundness_bound(RealLine(), 1) == 2
        assert roundness_bound(RealLine(), 1.5) == 2
        assert roundness_bound(WeightedLq.unit(2, 2), 1.2) == 2
        assert roundness_bound(BipartiteGraph(3), 2) == 8
        assert roundness_bound(BipartiteGraph(3), 0.5) == 4
        assert roundness_bound(Snowflake(WeightedLq.unit(4, 2), 0.5), 4) == pytest.approx(
            2 ** C_exponent(PQ(2, 4)))

    def test_snowflake_transfer(self):
        rng = np.random.default_rng(5)
        base = WeightedLq.unit(3, 2)
        flake = Snowflake(base, 0.4)
        for _ in range(50):
            c = _random_config(rng, base, 2.5, 2)
            snow = Config(flake, finite_dist(flake, c.X.atoms, c.X.probs),
                          finite_dist(flake, c.Y.atoms, c.Y.probs), 2.5)
            direct = roundness_ratio(Config(base, c.X, c.Y, 0.4 * 2.5)).value
            assert roundness_ratio(snow).value == pytest.approx(direct, rel=1e-12)

    def test_trivial_and_scalar_bounds(self):
        rng = np.random.default_rng(11)
        line = RealLine()
        for _ in range(300):
            p = float(rng.uniform(0.2, 4))
            xs, ys = rng.normal(size=3), rng.normal(size=4)
            c = Config(line, finite_dist(line, xs, rng.dirichlet(np.ones(3))),
                       finite_dist(line, ys, rng.dirichlet(np.ones(4))), p)
            value = roundness_ratio(c).value
            assert value <= 2 ** (p + 1) + 1e-9
            if p <= 2:
                assert value <= 2 + 1e-9

    @pytest.mark.parametrize('p, q', [(3, 2), (2, 4), (1.2, 4), (1.5, 1.2), (1.2, 1.8)])
    def test_lq_ranges(self, p, q):
        rng = np.random.default_rng(int(10 * p + q))
        space = WeightedLq.unit(q, 3)
        bound = 2 ** C_exponent(PQ(p, q))
        for _ in range(200):
            c = _random_config(rng, space, p, 3)
            assert roundness_ratio(c).value <= bound + 1e-7


class TestJensen:
    def test_two_point(self):
        X = finite_dist(RealLine(), [-1.0, 1.0])
        report = jensen_ratio(X, 3)
        assert report.value == pytest.approx(4)
        assert report.bound_side == 'lower'
        assert report.within_bound

    def test_basis(self):
        X = make_jensen('Basis', 2, n=10, q=2).config.X
        assert jensen_ratio(X, 2).value == pytest.approx(2, rel=1e-12)

    def test_rademacher(self):
        X = make_jensen('Rademacher', 3, n=10, q=3).config.X
        report = jensen_ratio(X, 3)
        assert report.value == pytest.approx(4, rel=1e-12)
        assert report.bound == pytest.approx(2 ** c_exponent(PQ(3, 3)))

    def test_errors(self):
        with pytest.raises(DegenerateRatioError):
            jensen_ratio(point_mass(RealLine(), 1.0), 2)
        with pytest.raises(DomainError):
            jensen_ratio(finite_dist(RealLine(), [0.0, 1.0]), 0.5)
        with pytest.raises(SpaceMismatchError):
            jensen_ratio(finite_dist(BipartiteGraph(2), [0, 1]), 2)

    @pytest.mark.parametrize('p, q', [(1.5, 1.5), (3, 1.5), (1.5, 4), (4, 4)])
    def test_lq_lower_bound(self, p, q):
        rng = np.random.default_rng(int(100 * p + q))
        space = WeightedLq.unit(q, 3)
        factor = 2 ** c_exponent(PQ(p, q))
        for _ in range(200):
            k = int(rng.integers(2, 6))
            X = finite_dist(space, rng.normal(size=(k, 3)), rng.dirichlet(np.ones(k)))
            centered = centered_moment(X, p)
            assert self_moment(X, p) >= factor * centered - 1e-7 * max(1.0, centered)

    def test_eps_atom_infimum(self):
        construction = make_eps_atom(0.1, 3)
        report = jensen_inf_ratio(construction.config.X, 3, **SOLVER)
        assert report.value == pytest.approx(3.2, rel=1e-4)
        assert report.solver_info is not None


class TestMixture:
    def test_identical_two_point(self):
        X = finite_dist(RealLine(), [0.0, 1.0])
        assert mixture_ratio(Config(X.space, X, X, 1)).value == pytest.approx(2)

    @pytest.mark.parametrize('p', [1, 2, 3])
    def test_two_point_masses(self, p):
        line = RealLine()
        c = Config(line, point_mass(line, -1.0), point_mass(line, 3.0), p)
        assert mixture_ratio(c).value == pytest.approx(2 ** (1 - p))

    def test_matches_centered_mixture(self):
        rng = np.random.default_rng(3)
        space = WeightedLq.unit(1.5, 2)
        for _ in range(100):
            c = _random_config(rng, space, float(rng.uniform(1, 4)), 2)
            expected = 2 * centered_moment(mixture(c.X, c.Y), c.p) / cross_moment(c.X, c.Y, c.p)
            value = mixture_ratio(c).value
            assert value == pytest.approx(expected, rel=1e-10)
            assert value <= general_bound(c.p) + 1e-9

    def test_needs_linear_space(self):
        c = make_bipartite(2, 1).config
        with pytest.raises(SpaceMismatchError):
            mixture_ratio(c)


class TestBarycenter:
    def test_fn_sharpness(self):
        report = barycenter_ratio(make_fn(5, math.inf, 1).config, **SOLVER)
        assert report.value == pytest.approx(2.6, rel=1e-9)
        assert report.bound == pytest.approx(3)

    @pytest.mark.parametrize('p', [1, 2])
    def test_two_point(self, p):
        report = barycenter_ratio(make_two_point(p).config, **SOLVER)
        assert report.value == pytest.approx(2 ** (2 - p), rel=1e-4)

    def test_identical_distributions_stay_below_two(self):
        rng = np.random.default_rng(8)
        space = WeightedLq.unit(2, 2)
        for _ in range(10):
            k = int(rng.integers(2, 5))
            X = finite_dist(space, rng.normal(size=(k, 2)), rng.dirichlet(np.ones(k)))
            assert barycenter_ratio(Config(space, X, X, 2), **SOLVER).value <= 2 + 1e-9

    def test_chain_and_universal_bound(self):
        rng = np.random.default_rng(21)
        for q in (1, 3, math.inf):
            space = WeightedLq.unit(q, 2)
            for _ in range(5):
                c = _random_config(rng, space, float(rng.uniform(1, 3)), 2)
                b = barycenter_ratio(c, **SOLVER)
                assert b.value <= mixture_ratio(c).value + 1e-9
                assert b.value <= general_bound(c.p) + 1e-7
                assert b.value <= random_z_ratio(c).value + 1e-9

    def test_degenerate(self):
        X = point_mass(WeightedLq.unit(2, 1), [1.0])
        with pytest.raises(DegenerateRatioError):
            barycenter_ratio(Config(X.space, X, X, 2))


class TestMetricBarycenter:
    @pytest.mark.parametrize('n, p', [(1, 1), (2, 3), (4, 2), (100, 1)])
    def test_bipartite(self, n, p):
        report = metric_barycenter_ratio(make_bipartite(n, p).config)
        assert report.value == pytest.approx((n - 1) / n * 2 ** p + 1, abs=1e-12)
        assert report.value <= 2 ** p + 1
        assert report.bound == 2 ** p + 1

    def test_candidates(self):
        c = make_bipartite(3, 2).config
        restricted = metric_barycenter_ratio(c, candidates=[0])
        assert restricted.value >= metric_barycenter_ratio(c).value
        with pytest.raises(DomainError):
            metric_barycenter_ratio(c, candidates=[])

    def test_linear_spaces_use_atoms(self):
        line = RealLine()
        c = Config(line, point_mass(line, 0.0), point_mass(line, 2.0), 1)
        assert metric_barycenter_ratio(c).value == 1
        assert metric_barycenter_ratio(c, candidates=[1.0]).value == 1


def test_log_roundness_of_atomic_distributions():
    line = RealLine()
    c = Config(line, finite_dist(line, [0.0, 2.0]), finite_dist(line, [1.0, 3.0]), 1)
    report = log_roundness_report(c)
    assert report.value == -math.inf
    assert report.bound == 0
    assert report.within_bound
    d = Config(line, point_mass(line, 0.0), point_mass(line, 1.0), 1)
    assert log_roundness_report(d).value == -math.inf
    assert log_roundness_report(make_bipartite(2, 1).config).bound is None


def test_random_z_ratio():
    line = RealLine()
    c = Config(line, finite_dist(line, [0.0, 1.0]), point_mass(line, 4.0), 1.5)
    report = random_z_ratio(c)
    expected = (0.5 * self_moment(c.X, 1.5) + cross_moment(c.X, c.Y, 1.5)) / cross_moment(c.X, c.Y, 1.5)
    assert report.value == pytest.approx(expected)
    assert report.bound == 2
    assert report.within_bound
    assert random_z_ratio(make_bipartite(3, 1).config).bound is None
    assert random_z_ratio(Config(line, c.X, c.Y, 3)).bound is None


class TestApplicableReports:
    def test_metric_space(self):
        names = [r.name for r in applicable_reports(make_bipartite(2, 2).config)]
        assert names == [RatioName.ROUNDNESS, RatioName.RANDOM_Z, RatioName.METRIC_BARYCENTER,
                         RatioName.LOG_ROUNDNESS]

    def test_linear_space_labels_jensen_targets(self):
        line = RealLine()
        c = Config(line, finite_dist(line, [0.0, 1.0]), finite_dist(line, [2.0, 5.0]), 2)
        reports = applicable_reports(c, **SOLVER)
        jensen = [r for r in reports if r.name == RatioName.JENSEN]
        assert [r.target for r in jensen] == ['X', 'Y']
        assert RatioName.BARYCENTER in {r.name for r in reports}

    def test_point_mass_skips_jensen(self, caplog):
        line = RealLine()
        c = Config(line, point_mass(line, 0.0), finite_dist(line, [1.0, 2.0]), 0.5)
        names = {r.name for r in applicable_reports(c)}
        assert RatioName.BARYCENTER not in names
        assert RatioName.MIXTURE in names
        c = Config(line, point_mass(line, 0.0), finite_dist(line, [1.0, 2.0]), 2)
        with caplog.at_level('WARNING'):
            reports = applicable_reports(c, **SOLVER)
        assert [r.target for r in reports if r.name == RatioName.JENSEN] == ['Y']
        assert 'X is a point mass' in caplog.text

    def test_degenerate_configuration(self):
        X = point_mass(RealLine(), 1.0)
        with pytest.raises(DegenerateRatioError):
            applicable_reports(Config(X.space, X, X, 1))


def test_schatten_space_has_no_lq_bound():
    space = Schatten(2, 2)
    X = finite_dist(space, [np.eye(2), -np.eye(2)])
    report = roundness_ratio(Config(space, X, X, 1))
    assert report.value == pytest.approx(2)
    assert report.bound == pytest.approx(4)
