"""
The goal-exploration training loop: sample a goal from the discovered goal space,
try to reach it with the epsilon-greedy goal-conditioned policy while learning online,
optionally post-explore with random actions once the goal is reached, then relabel the
whole episode in hindsight. Coverage is evaluated every `eval_interval` environment
steps, where post-exploration steps count like any other step.
"""

from __future__ import annotations

import logging
from decimal import ROUND_HALF_UP, Decimal
from typing import List, Optional

import numpy as np

from ..evaluator.coverage import evaluate_coverage, evaluation_goals
from ..evaluator.heatmap import Heatmap
from ..evaluator.schemas import EvalReport
from ..gcq_agent.qtable import QTable, q_update, reward, select_action
from ..gcq_agent.schemas import Transition
from ..goal_space.goals import GoalSpace, init_goal_space, post_explore_probability
from ..grid_env.generators import build_map
from ..grid_env.schemas import ACTIONS, EnvState, GridMap, Position
from ..grid_env.world import step
from ..harness.schemas import Checkpoint, Counters, EpisodeTrace, RunConfig, RunLog
from ..hindsight.relabel import relabel_trajectory
from ..utils.seeding import spawn_streams
from .schemas import PeDurationKind, PeMode, PeSchedule, Trajectory

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

MAX_IDLE_EPISODES = 10_000


def _observe(goal_space: GoalSpace, heatmap: Optional[Heatmap], state: EnvState) -> None:
    if state.terminal:
        return
    goal_space.add_observation(state.pos)
    if heatmap is not None:
        heatmap.record_visit(state.pos)


def run_goal_phase(
    grid: GridMap,
    q: QTable,
    goal: Position,
    epsilon: float,
    step_cap: int,
    rng: np.random.Generator,
    goal_space: GoalSpace,
    start: Optional[EnvState] = None,
    heatmap: Optional[Heatmap] = None,
) -> Trajectory:
    state = start if start is not None else EnvState(grid.start)
    traj = Trajectory(goal=goal, start=state.pos)
    if state.pos == goal:
        traj.goal_reached = True
        return traj
    for _ in range(step_cap):
        action = select_action(q, state.pos, goal, epsilon, rng)
        nxt = step(grid, state, action)
        transition = Transition(
            state.pos, action, reward(nxt.pos, goal), nxt.pos, nxt.terminal, goal
        )
        q_update(q, transition)
        traj.append_goal_step(transition)
        _observe(goal_space, heatmap, nxt)
        state = nxt
        if nxt.pos == goal:
            traj.goal_reached = True
            break
        if nxt.terminal:
            break
    return traj


def pe_length(schedule: PeSchedule, n_ep: int) -> int:
    if n_ep < 0:
        raise ValueError(f"Goal-phase length must be non-negative, got {n_ep}.")
    if schedule.duration is PeDurationKind.FIXED:
        return schedule.n_pe
    scaled = (Decimal(repr(schedule.p_pe)) * n_ep).quantize(Decimal(1), rounding=ROUND_HALF_UP)
    return max(1, int(scaled))


def should_post_explore(
    schedule: PeSchedule,
    goal_space: GoalSpace,
    goal: Position,
    goal_reached: bool,
    rng: np.random.Generator,
) -> bool:
    if not goal_reached or schedule.mode is PeMode.OFF:
        return False
    if schedule.mode is PeMode.ALWAYS:
        return True
    probability = post_explore_probability(max(goal_space.count(goal), 1), schedule.beta)
    return bool(rng.random() <= probability)


def run_post_exploration(
    grid: GridMap,
    state: EnvState,
    n_steps: int,
    rng: np.random.Generator,
    goal_space: GoalSpace,
    heatmap: Optional[Heatmap] = None,
) -> List[Transition]:
    """Uniform-random walk of `n_steps` steps (shorter on lava); no Q updates, goal=None."""
    if state.terminal:
        raise ValueError("Cannot post-explore from a terminal state.")
    if n_steps < 1:
        raise ValueError(f"Post-exploration needs at least one step, got {n_steps}.")
    segment = []
    for _ in range(n_steps):
        action = ACTIONS[int(rng.integers(len(ACTIONS)))]
        nxt = step(grid, state, action)
        segment.append(Transition(state.pos, action, 0.0, nxt.pos, nxt.terminal, None))
        _observe(goal_space, heatmap, nxt)
        state = nxt
        if nxt.terminal:
            break
    return segment


class Explorer:
    """
    One training run. Holds the run-private map, Q-table, goal space, heat map and RNG
    streams; `run()` executes the whole budget and returns the run log.
    """

    def __init__(self, config: RunConfig, grid: Optional[GridMap] = None) -> None:
        self.config = config
        self.grid = grid if grid is not None else build_map(config.env_family, config.env_seed)
        self.schedule = config.schedule
        self.q = QTable(alpha=config.alpha, gamma=config.gamma)
        self.heatmap = Heatmap.for_map(self.grid)
        self.counters = Counters()
        self.checkpoints: List[Checkpoint] = []
        self.last_report: Optional[EvalReport] = None
        self.last_trajectory: Optional[Trajectory] = None
        self._rng, self._eval_rng = spawn_streams(config.master_seed)
        self._eval_goals = evaluation_goals(self.grid)
        self._next_eval = config.eval_interval
        self.goal_space = GoalSpace()

    @property
    def remaining(self) -> int:
        return max(0, self.config.budget - self.counters.total_steps)

    def _initialize(self) -> None:
        self.goal_space = init_goal_space(self.grid, self.config.init_episode_cap, self._rng)
        for goal, visits in self.goal_space.items():
            for _ in range(visits):
                self.heatmap.record_visit(goal)
        self.counters.init_steps = self.goal_space.init_episode_length
        self.counters.total_steps = self.goal_space.init_episode_length

    def _episode(self, start: EnvState) -> Trajectory:
        goal = self.goal_space.sample_goal(self._rng)
        traj = run_goal_phase(
            self.grid,
            self.q,
            goal,
            self.config.epsilon,
            min(self.config.step_cap, self.remaining),
            self._rng,
            self.goal_space,
            start=start,
            heatmap=self.heatmap,
        )
        self.counters.total_steps += len(traj)
        self.counters.goal_reaches += traj.goal_reached
        self.counters.lava_deaths += traj.ended_terminal
        if self.remaining and should_post_explore(
            self.schedule, self.goal_space, goal, traj.goal_reached, self._rng
        ):
            n_steps = min(pe_length(self.schedule, traj.goal_phase_length), self.remaining)
            segment = run_post_exploration(
                self.grid, _end_state(traj, start), n_steps, self._rng, self.goal_space,
                self.heatmap,
            )
            traj.extend_post_exploration(segment)
            self.counters.pe_steps += len(segment)
            self.counters.pe_episodes += 1
            self.counters.total_steps += len(segment)
            self.counters.lava_deaths += traj.ended_terminal
        self.counters.relabel_updates += relabel_trajectory(self.q, traj, self._rng)
        self.counters.episodes += 1
        logger.debug(
            "Episode %s: goal %s reached=%s n_ep=%s n_pe=%s",
            self.counters.episodes,
            goal,
            traj.goal_reached,
            traj.goal_phase_length,
            traj.post_exploration_length,
        )
        return traj

    def _evaluate_due(self, upto: Optional[int] = None) -> None:
        reached = self.counters.total_steps if upto is None else upto
        while self._next_eval <= reached and self._next_eval <= self.config.budget:
            self.last_report = evaluate_coverage(
                self.q,
                self.grid,
                self.config.eval_cap,
                self._eval_rng,
                step_index=self._next_eval,
                goals=self._eval_goals,
            )
            self.checkpoints.append(
                Checkpoint(
                    step=self._next_eval,
                    coverage=self.last_report.coverage,
                    goals=len(self.goal_space),
                )
            )
            logger.info(
                "step=%s coverage=%.4f goals=%s",
                self._next_eval,
                self.last_report.coverage,
                len(self.goal_space),
            )
            self._next_eval += self.config.eval_interval

    def run(self) -> RunLog:
        logger.info(
            "Training on %s (env_seed=%s, master_seed=%s) for %s steps",
            self.config.env_family.value,
            self.config.env_seed,
            self.config.master_seed,
            self.config.budget,
        )
        self._initialize()
        self._evaluate_due()
        state = EnvState(self.grid.start)
        idle = 0
        while self.remaining > 0:
            if self.config.episodic or state.terminal:
                state = EnvState(self.grid.start)
            traj = self._episode(state)
            state = _end_state(traj, state)
            self.last_trajectory = traj
            idle = idle + 1 if not traj.transitions else 0
            if idle >= MAX_IDLE_EPISODES:
                logger.error(
                    "No environment step in %s consecutive episodes; stopping at %s steps",
                    idle,
                    self.counters.total_steps,
                )
                # the table can no longer change: it stands for every remaining checkpoint
                self._evaluate_due(upto=self.config.budget)
                break
            self._evaluate_due()
        logger.info(
            "Finished after %s steps, %s episodes, %s post-exploration steps",
            self.counters.total_steps,
            self.counters.episodes,
            self.counters.pe_steps,
        )
        return self.run_log()

    def run_log(self) -> RunLog:
        trace = None
        if self.last_trajectory is not None:
            traj = self.last_trajectory
            trace = EpisodeTrace(
                goal=traj.goal,
                positions=traj.states(),
                pe_boundary=traj.pe_boundary,
            )
        return RunLog(
            config=self.config,
            checkpoints=self.checkpoints,
            counters=self.counters,
            heatmap=self.heatmap.counts.tolist(),
            trace=trace,
        )


def _end_state(traj: Trajectory, start: EnvState) -> EnvState:
    if not traj.transitions:
        return start
    last = traj.transitions[-1]
    return EnvState(last.s_next, last.terminal)


def train(config: RunConfig) -> RunLog:
    return Explorer(config).run()
