"""Tests for qvfdag.learning.stability: kappa, half-splits and epsilon choice."""

import itertools

import numpy as np
import pytest

from qvfdag.common.errors import GlmInputError
from qvfdag.families import QvfFamily
from qvfdag.learning import choose_epsilon, cohen_kappa, run_stability, select_epsilon, stability_score
from qvfdag.learning.ratio import RatioStep
from qvfdag.learning.stability import SplitRatios, half_split, score_from_splits


def kappa_by_counting(a, b, universe):
    """Reference kappa from per-element agreement and marginal selection rates."""
    members = list(universe)
    agree = sum((v in a) == (v in b) for v in members) / len(members)
    rate_a = sum(v in a for v in members) / len(members)
    rate_b = sum(v in b for v in members) / len(members)
    chance = rate_a * rate_b + (1 - rate_a) * (1 - rate_b)
    return (agree - chance) / (1 - chance)


class TestCohenKappa:
    def test_identical_selection(self):
        """Identical selections agree perfectly."""
        assert cohen_kappa({0, 1}, {0, 1}, 4) == pytest.approx(1.0)

    def test_worked_example(self):
        """n11 = 2, n12 = 1, n21 = 0, n22 = 7 gives kappa 0.7368."""
        assert cohen_kappa({0, 1, 2}, {0, 1}, 10) == pytest.approx(0.7368, abs=1e-4)

    def test_complementary_selection(self):
        """Disjoint halves of a balanced universe give -1."""
        assert cohen_kappa({0, 1}, {2, 3}, 4) == pytest.approx(-1.0)

    def test_both_empty(self):
        """Chance agreement of 1 with identical sets scores 1."""
        assert cohen_kappa(set(), set(), 3) == 1.0

    def test_both_full(self):
        assert cohen_kappa({0, 1, 2}, {0, 1, 2}, 3) == 1.0

    def test_full_against_empty(self):
        """Chance agreement of 1 with differing sets scores 0."""
        assert cohen_kappa({0, 1, 2}, set(), 3) == 0.0

    def test_explicit_universe(self):
        assert cohen_kappa({5}, {5}, [5, 6, 7]) == pytest.approx(1.0)

    def test_element_outside_universe(self):
        """Selections must lie inside the universe."""
        with pytest.raises(ValueError, match="outside"):
            cohen_kappa({0, 9}, {0}, 4)

    def test_matches_counting_oracle(self):
        """Closed form agrees with per-element counting on every subset pair of 5 nodes."""
        universe = range(5)
        subsets = [set(c) for r in range(6) for c in itertools.combinations(universe, r)]
        checked = 0
        for a, b in itertools.product(subsets, repeat=2):
            rate_a, rate_b = len(a) / 5, len(b) / 5
            if rate_a * rate_b + (1 - rate_a) * (1 - rate_b) == 1.0:
                continue
            assert cohen_kappa(a, b, 5) == pytest.approx(kappa_by_counting(a, b, universe))
            checked += 1
        assert checked > 900


class TestHalfSplit:
    def test_odd_n(self):
        """The first half takes the extra row."""
        first, second = half_split(7, np.random.default_rng(0))
        assert (len(first), len(second)) == (4, 3)
        assert sorted([*first, *second]) == list(range(7))

    def test_even_n(self):
        """Halves are disjoint and equal sized."""
        first, second = half_split(10, np.random.default_rng(1))
        assert len(first) == len(second) == 5
        assert not set(first) & set(second)


class TestChooseEpsilon:
    def test_smallest_passing_c(self):
        """Smallest epsilon whose score reaches c times the best."""
        assert choose_epsilon([0.1, 0.2, 0.3], [0.5, 0.95, 1.0], 0.9) == (0.2, False)

    def test_best_passes_itself(self):
        assert choose_epsilon([0.1, 0.2], [0.2, 0.8], 0.99) == (0.2, False)

    def test_all_zero_falls_back_to_first(self):
        """A best score of 0 falls back to the first grid point."""
        assert choose_epsilon([0.1, 0.2, 0.3], [0.0, 0.0, 0.0], 0.9) == (0.1, True)

    def test_negative_best_falls_back_to_argmax(self):
        """A negative best score falls back to the argmax."""
        assert choose_epsilon([0.1, 0.2, 0.3], [-0.2, -0.1, -0.3], 0.9) == (0.2, True)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            choose_epsilon([0.1], [0.5, 0.6], 0.9)


def _step(ratios, degenerate=frozenset()):
    return RatioStep(step=0, cond_set=frozenset(), ratios=ratios, degenerate=frozenset(degenerate))


class TestScoreFromSplits:
    def test_agreeing_halves(self):
        """Halves selecting the same nodes score 1."""
        split = SplitRatios(seed=1, first=_step({0: 1.0, 1: 2.0}), second=_step({0: 1.05, 1: 1.9}))
        assert score_from_splits(0.5, [split], {0, 1}) == pytest.approx(1.0)

    def test_failed_split_scores_zero(self):
        """A split whose ratios failed contributes kappa 0 to the mean."""
        good = SplitRatios(seed=1, first=_step({0: 1.0, 1: 2.0}), second=_step({0: 1.0, 1: 2.0}))
        bad = SplitRatios(seed=2, error="node 1: did not converge")
        assert bad.failed
        assert score_from_splits(0.5, [good, bad], {0, 1}) == pytest.approx(0.5)

    def test_degenerate_nodes_count_as_selected(self):
        """A node degenerate in one half counts as selected there."""
        first = _step({0: 1.0, 1: 2.0}, degenerate={2})
        second = _step({0: 1.0, 1: 2.0, 2: 3.0})
        # First half selects {0, 2}, second {0}.
        expected = cohen_kappa({0, 2}, {0}, {0, 1, 2})
        split = SplitRatios(seed=1, first=first, second=second)
        assert score_from_splits(0.5, [split], {0, 1, 2}) == pytest.approx(expected)

    def test_requires_splits(self):
        with pytest.raises(ValueError):
            score_from_splits(0.5, [], {0})


class TestRunStability:
    GRID = (0.02, 0.05, 0.1, 0.2, 0.5, 1.0)

    def test_report(self, chain_sim):
        """The report carries one score per grid point and one seed per split."""
        families = [QvfFamily.poisson()] * 4
        report = run_stability(
            self.GRID, {0, 1, 2, 3}, set(), chain_sim.data, families, 3, 0.9, np.random.default_rng(4)
        )
        assert report.grid == self.GRID
        assert len(report.scores) == len(self.GRID)
        assert report.chosen_epsilon in self.GRID
        assert len(report.split_seeds) == 3
        assert report.universe_size == 4
        assert report.failed_splits == ()
        assert all(-1.0 <= s <= 1.0 for s in report.scores)

    def test_reproducible(self, chain_sim):
        """Same generator seed, same report."""
        families = [QvfFamily.poisson()] * 4
        args = (self.GRID, {0, 1, 2, 3}, set(), chain_sim.data, families, 2, 0.9)
        a = run_stability(*args, np.random.default_rng(8))
        b = run_stability(*args, np.random.default_rng(8))
        assert a == b

    def test_stability_score_single_epsilon(self, chain_sim):
        families = [QvfFamily.poisson()] * 4
        score = stability_score(0.2, {0, 1, 2, 3}, set(), chain_sim.data, families, 2, np.random.default_rng(2))
        assert -1.0 <= score <= 1.0

    def test_select_epsilon_matches_report(self, chain_sim):
        """select_epsilon returns the report's chosen value."""
        families = [QvfFamily.poisson()] * 4
        args = (self.GRID, {0, 1, 2, 3}, set(), chain_sim.data, families, 2, 0.9)
        chosen = select_epsilon(*args, np.random.default_rng(5))
        assert chosen == run_stability(*args, np.random.default_rng(5)).chosen_epsilon

    def test_invalid_c(self, chain_sim):
        with pytest.raises(ValueError, match="c must"):
            run_stability(self.GRID, {0}, set(), chain_sim.data, [QvfFamily.poisson()] * 4, 2, 1.0, np.random.default_rng(0))

    def test_needs_four_rows(self):
        """Each half needs at least two rows."""
        data = np.array([[1.0, 2.0], [2.0, 3.0], [0.0, 1.0]])
        with pytest.raises(GlmInputError, match="4 rows"):
            run_stability(self.GRID, {0, 1}, set(), data, [QvfFamily.poisson()] * 2, 2, 0.9, np.random.default_rng(0))
