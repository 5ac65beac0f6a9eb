"""Tests for perturbation, selection and the SED search loop."""

import time

import numpy as np
import pytest
from scipy import stats

from pess_solver.packing.lbfgs import OptimizerSettings
from pess_solver.packing.models import Layout
from pess_solver.packing.sed import (
    Candidate,
    CandidateSet,
    SedSettings,
    exploration_count,
    exploration_score,
    perturb,
    random_layout,
    sed,
    select,
)

R4 = np.sqrt(6.0) / 2.0 + 1.0


def candidate(e, n=2):
    return Candidate(Layout(np.zeros((n, 3))), e)


class TestExplorationCount:
    """Candidate count m = max(1, ceil(-c log2 E))."""

    @pytest.mark.parametrize(
        "e,expected",
        [
            (1.0, 1),
            (0.5, 7),
            (2.0, 1),
            (0.25, 14),
            (1e-3, 70),
        ],
    )
    def test_examples(self, e, expected):
        assert exploration_count(e, 7.0) == expected

    @pytest.mark.parametrize("e", [0.0, -1.0, 1e-300])
    def test_capped(self, e):
        """Zero and vanishing energies explore the maximum number of candidates."""
        assert exploration_count(e, 7.0, cap=600) == 600

    def test_score_infinite_at_zero(self):
        assert exploration_score(0.0) == float("inf")

    def test_monotone_in_energy(self):
        counts = [exploration_count(e) for e in np.logspace(1, -30, 200)]
        assert counts == sorted(counts)


class TestPerturb:
    """Uniform coordinate perturbation."""

    def test_within_bounds(self, rng):
        layout = Layout(rng.normal(size=(50, 3)))
        moved = perturb(layout, 0.8, rng)
        shift = moved.centers - layout.centers
        assert np.all(np.abs(shift) <= 0.8)

    def test_input_untouched(self, rng):
        layout = Layout(np.ones((5, 3)))
        perturb(layout, 0.8, rng)
        np.testing.assert_array_equal(layout.centers, np.ones((5, 3)))

    def test_uniform_distribution(self, rng):
        """Shifts follow uniform(-theta, theta)."""
        layout = Layout(np.zeros((4000, 3)))
        shift = perturb(layout, 0.8, rng).centers.reshape(-1)
        assert abs(shift.mean()) < 0.03
        assert shift.var() == pytest.approx(0.8**2 / 3.0, rel=0.05)
        assert stats.kstest(shift, stats.uniform(loc=-0.8, scale=1.6).cdf).pvalue > 1e-3

    def test_rejects_non_positive_theta(self, rng):
        with pytest.raises(ValueError):
            perturb(Layout(np.zeros((1, 3))), 0.0, rng)


class TestSelect:
    """Greedy or exp(J)-weighted choice of the next layout."""

    def test_improving_candidate_wins(self, rng):
        """The lowest energy wins when it beats the current one, first on ties."""
        members = [candidate(0.5), candidate(0.1), candidate(0.1)]
        chosen = select(candidate(0.2), CandidateSet(members), 7.0, rng)
        assert chosen is members[1]

    def test_equal_energy_is_not_improvement(self, rng):
        """A tie with the current energy falls through to weighted sampling."""
        members = [candidate(0.2)]
        assert select(candidate(0.2), CandidateSet(members), 7.0, rng) is members[0]

    def test_weighted_sampling(self, rng):
        """Scores {3, 3, 10} give probabilities proportional to exp(J)."""
        members = [candidate(0.75), candidate(0.78), candidate(0.4)]
        scores = [exploration_score(m.energy) for m in members]
        assert scores == [3.0, 3.0, 10.0]
        weights = np.exp(np.array(scores) - 10.0)
        expected = weights / weights.sum()

        draws = 50_000
        counts = np.zeros(3)
        pool = CandidateSet(members)
        current = candidate(0.3)
        for _ in range(draws):
            chosen = select(current, pool, 7.0, rng)
            counts[next(i for i, m in enumerate(members) if m is chosen)] += 1

        assert stats.chisquare(counts, expected * draws).pvalue > 1e-3

    def test_zero_energy_candidates(self, rng):
        """Zero-energy candidates have a finite capped weight."""
        members = [candidate(0.0), candidate(0.0)]
        chosen = select(candidate(0.0), CandidateSet(members), 7.0, rng)
        assert chosen in members

    def test_empty_candidate_set(self):
        with pytest.raises(ValueError):
            CandidateSet([])


class TestRandomLayout:
    """Uniform sampling in the container."""

    def test_support(self, rng):
        layout = random_layout(500, 3.0, rng)
        assert layout.n == 500
        assert np.all(np.linalg.norm(layout.centers, axis=1) <= 2.0)

    def test_radius_at_most_one(self, rng):
        """With no room for a center every sphere sits at the origin."""
        np.testing.assert_array_equal(random_layout(3, 1.0, rng).centers, np.zeros((3, 3)))
        np.testing.assert_array_equal(random_layout(2, 0.5, rng).centers, np.zeros((2, 3)))

    def test_uniform_in_ball(self, rng):
        """(|c| / (R - 1))^3 is uniform on [0, 1]."""
        layout = random_layout(5000, 3.0, rng)
        scaled = (np.linalg.norm(layout.centers, axis=1) / 2.0) ** 3
        assert stats.kstest(scaled, "uniform").pvalue > 1e-3

    @pytest.mark.parametrize("n,radius", [(0, 2.0), (2, 0.0)])
    def test_invalid(self, rng, n, radius):
        with pytest.raises(ValueError):
            random_layout(n, radius, rng)


class TestSettings:
    def test_defaults(self):
        settings = SedSettings()
        assert settings.s_iter == 700
        assert settings.c == 7.0
        assert settings.theta == 0.8
        assert settings.feasible_energy == 1e-25

    @pytest.mark.parametrize("name", ["s_iter", "c", "theta", "exploration_cap"])
    def test_invalid(self, name):
        with pytest.raises(ValueError):
            SedSettings(**{name: 0})


class TestSed:
    """Perturb-descend-select loop."""

    def test_two_spheres_feasible(self, rng):
        """Two spheres fit in R=2."""
        result = sed(2, 2.0, SedSettings(s_iter=50), rng=rng)
        assert result.feasible
        assert result.energy <= 1e-25
        distance = np.linalg.norm(result.layout.centers[0] - result.layout.centers[1])
        assert distance == pytest.approx(2.0, abs=1e-6)

    def test_feasible_start_stops_immediately(self, rng, tetrahedron):
        """A zero-energy start needs no exploration."""
        result = sed(4, R4 + 0.01, start=Layout(tetrahedron), rng=rng)
        assert result.feasible
        assert result.iterations == 0
        assert result.trace == []

    def test_infeasible_radius(self, rng):
        """Three spheres cannot fit in R=1.5; SED runs out of iterations."""
        settings = SedSettings(s_iter=3, exploration_cap=4)
        result = sed(3, 1.5, settings, rng=rng)
        assert not result.feasible
        assert result.energy > 0.0
        assert result.iterations == 3
        assert not result.timed_out

    def test_best_energy_non_increasing(self, rng):
        settings = SedSettings(s_iter=6, exploration_cap=6)
        result = sed(13, 2.6, settings, rng=rng)
        best = [step.best_energy for step in result.trace]
        assert best == sorted(best, reverse=True)
        assert result.energy == pytest.approx(min(best))
        for step in result.trace:
            assert step.best_energy <= step.energy

    def test_candidate_count_follows_current_energy(self, rng):
        """Every round explores exploration_count(E(current)) candidates."""
        settings = SedSettings(s_iter=6, exploration_cap=6)
        result = sed(13, 2.6, settings, rng=rng)
        for previous, step in zip(result.trace, result.trace[1:]):
            assert step.m == exploration_count(previous.energy, settings.c, settings.exploration_cap)
            assert 1 <= step.m <= settings.exploration_cap

    def test_expired_deadline(self, rng):
        """A past deadline still descends once but starts no round."""
        result = sed(13, 2.5, rng=rng, deadline=time.monotonic() - 1.0)
        assert result.timed_out
        assert result.iterations == 0
        assert result.energy > 0.0

    def test_seeded_runs_repeat(self):
        settings = SedSettings(s_iter=3, exploration_cap=5)
        opt = OptimizerSettings(max_iter=500)
        first = sed(6, 2.5, settings, opt, np.random.default_rng(11))
        second = sed(6, 2.5, settings, opt, np.random.default_rng(11))
        assert first.energy == second.energy
        np.testing.assert_array_equal(first.layout.centers, second.layout.centers)

    def test_start_size_mismatch(self, rng):
        with pytest.raises(ValueError):
            sed(3, 2.5, start=Layout(np.zeros((2, 3))), rng=rng)
