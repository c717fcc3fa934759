import math
from collections import Counter

import numpy as np
import pytest

from postexplore.errors import EmptyGoalSpaceError
from postexplore.goal_space.goals import GoalSpace, init_goal_space, post_explore_probability
from postexplore.grid_env.generators import build_four_rooms
from postexplore.grid_env.schemas import Action, GridMap

OPEN_3X3 = """
#####
#...#
#.S.#
#...#
#####
"""

LAVA_POCKET = """
#####
#LSL#
##.##
#####
"""


class TestInitGoalSpace:
    def test_single_step_episode(self):
        grid = GridMap.from_text(OPEN_3X3)
        goal_space = init_goal_space(grid, 1, np.random.default_rng(0))
        assert grid.start in goal_space
        assert goal_space.total_observations == 2
        assert len(goal_space) == 2
        assert goal_space.init_episode_length == 1

    def test_deterministic(self):
        grid = build_four_rooms()
        first = init_goal_space(grid, 100, np.random.default_rng(5))
        second = init_goal_space(grid, 100, np.random.default_rng(5))
        assert list(first.items()) == list(second.items())

    def test_goals_are_free_cells(self):
        grid = build_four_rooms()
        goal_space = init_goal_space(grid, 100, np.random.default_rng(11))
        assert goal_space.total_observations == 101
        assert all(grid.is_free(goal) for goal in goal_space)

    def test_repeats_until_a_goal_besides_start(self):
        grid = GridMap.from_text(LAVA_POCKET)
        seed = next(
            s for s in range(1000) if int(np.random.default_rng(s).integers(4)) == Action.LEFT
        )
        goal_space = init_goal_space(grid, 100, np.random.default_rng(seed))
        assert goal_space.goals[:2] == [grid.start, (2, 2)]
        assert goal_space.init_episode_length > 1

    def test_never_left_with_start_only(self):
        grid = GridMap.from_text(LAVA_POCKET)
        for seed in range(200):
            goal_space = init_goal_space(grid, 100, np.random.default_rng(seed))
            assert (2, 2) in goal_space
            assert (1, 1) not in goal_space and (3, 1) not in goal_space

    def test_rejects_zero_cap(self):
        with pytest.raises(ValueError):
            init_goal_space(GridMap.from_text(OPEN_3X3), 0, np.random.default_rng(0))


class TestAddObservation:
    def test_new_state(self):
        goal_space = GoalSpace()
        goal_space.add_observation((1, 1))
        assert len(goal_space) == 1
        assert goal_space.count((1, 1)) == 1

    def test_repeat_state(self):
        goal_space = GoalSpace()
        goal_space.add_observation((1, 1))
        goal_space.add_observation((1, 1))
        assert len(goal_space) == 1
        assert goal_space.count((1, 1)) == 2

    def test_counts_match_recount(self):
        rng = np.random.default_rng(3)
        observations = [(int(x), int(y)) for x, y in rng.integers(1, 4, size=(50, 2))]
        goal_space = GoalSpace()
        for obs in observations:
            goal_space.add_observation(obs)
        assert goal_space.total_observations == 50
        assert dict(goal_space.items()) == dict(Counter(observations))
        assert goal_space.goals == list(dict.fromkeys(observations))


class TestSampleGoal:
    def test_singleton(self):
        goal_space = GoalSpace()
        goal_space.add_observation((2, 3))
        assert goal_space.sample_goal(np.random.default_rng(0)) == (2, 3)

    def test_empty_space(self):
        with pytest.raises(EmptyGoalSpaceError):
            GoalSpace().sample_goal(np.random.default_rng(0))

    def test_uniform(self):
        goal_space = GoalSpace()
        for goal, times in zip([(1, 1), (1, 2), (2, 1), (2, 2)], [1, 5, 20, 100]):
            for _ in range(times):
                goal_space.add_observation(goal)
        rng = np.random.default_rng(17)
        draws = 100_000
        freq = Counter(goal_space.sample_goal(rng) for _ in range(draws))
        sigma = math.sqrt(0.25 * 0.75 / draws)
        for goal in goal_space:
            assert abs(freq[goal] / draws - 0.25) < 3 * sigma

    def test_reproducible(self):
        goal_space = GoalSpace()
        for goal in [(1, 1), (1, 2), (2, 1)]:
            goal_space.add_observation(goal)
        first = [goal_space.sample_goal(np.random.default_rng(9)) for _ in range(5)]
        second = [goal_space.sample_goal(np.random.default_rng(9)) for _ in range(5)]
        assert first == second


class TestPostExploreProbability:
    def test_beta_zero_always(self):
        assert post_explore_probability(12345, 0.0) == 1.0

    def test_arithmetic(self):
        assert post_explore_probability(4, 1.0) == pytest.approx(0.25, abs=1e-15)
        assert post_explore_probability(10, 0.05) == pytest.approx(10 ** (-0.05), abs=1e-12)

    def test_matches_formula_over_grid(self):
        for n in [1, 2, 3, 7, 10, 100, 1_000, 54_321, 1_000_000]:
            for beta in np.linspace(0.0, 10.0, 41):
                expected = math.exp(-beta * math.log(n))
                assert post_explore_probability(n, float(beta)) == pytest.approx(
                    expected, rel=1e-12, abs=1e-12
                )

    def test_monotone(self):
        for beta in [0.01, 0.05, 1.0, 3.0]:
            values = [post_explore_probability(n, beta) for n in range(1, 50)]
            assert all(a >= b for a, b in zip(values, values[1:]))
        for n in [2, 5, 40]:
            values = [post_explore_probability(n, beta) for beta in np.linspace(0, 5, 26)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_first_visit_is_certain(self):
        assert all(post_explore_probability(1, beta) == 1.0 for beta in [0, 0.5, 10])

    def test_zero_visits_rejected(self):
        with pytest.raises(ValueError):
            post_explore_probability(0, 1.0)
