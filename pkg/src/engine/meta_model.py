import logging
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from mesa import DataCollector, Model

from ..errors import InvariantViolation
from ..ensemble import (
    best_step_size, bn_stat_distances, build_cube, initial_weights, observe_bn, optimize_weights,
    weight_entropy_grad, weight_entropy_hessian, weighted_pseudo_labels,
)
from ..models import (
    AdapterConfig, AdapterKind, BatchRecord, ForgettingRecord, ScenarioFile, SolverConfig, StepMode, UpdateTarget,
    WeightSolveReport,
)
from ..nn import MlpModel, check_compatible, dumps
from ..scenario import LabeledBatch, iter_stream, stream_rng
from ..scenario.domains import WEIGHT_INIT_STREAM
from .baselines import IndependentSources, error_rate, uniform_error
from .forgetting import evaluate_forgetting
from .source_agent import SourceAgent

logger = logging.getLogger(__name__)


class WeightSolve(NamedTuple):
    """Everything decided on one batch from its features alone."""
    cube: np.ndarray
    report: WeightSolveReport
    alpha: float
    w_star: np.ndarray
    k: int
    updated: List[int]


def adaptation_targets(w_star: np.ndarray, target: UpdateTarget) -> List[int]:
    """Sources to adapt after inference; argmax/argmin keep the smallest index on ties."""
    if target == UpdateTarget.MOST:
        return [int(np.argmax(w_star))]
    if target == UpdateTarget.LEAST:
        return [int(np.argmin(w_star))]
    return list(range(len(w_star)))


class MetaModel(Model):
    """Online multi-source test-time adaptation over a scripted test stream.

    Every step consumes one test batch: all sources predict on it, the
    combination weights are solved from their BN statistics and predictions,
    the weighted ensemble is scored, and only then the target sources adapt.
    """

    def __init__(
        self,
        models: Sequence[MlpModel],
        scenario: ScenarioFile,
        adapter: Optional[AdapterConfig] = None,
        solver: Optional[SolverConfig] = None,
        update_target: UpdateTarget = UpdateTarget.MOST,
        seed: int = 0,
        debug_snapshots: bool = False,
        held_out_sets: Optional[Sequence[LabeledBatch]] = None,
    ):
        super().__init__(seed=seed)
        check_compatible(models)
        if scenario.total_batches < 1:
            raise ValueError("the scenario has no test batches")
        self.scenario = scenario
        self.adapter = adapter or AdapterConfig()
        self.solver = solver or SolverConfig()
        self.update_target = update_target
        self.run_seed = seed
        self.debug_snapshots = debug_snapshots
        self.held_out_sets = held_out_sets

        self.source_agents: List[SourceAgent] = [
            SourceAgent(self, index, model.copy(), self.adapter) for index, model in enumerate(models)
        ]
        # reference columns: every source adapted alone, and the frozen sources
        self.independent = IndependentSources(models, self.adapter)
        self.records: List[BatchRecord] = []
        self.forgetting: List[ForgettingRecord] = []
        self._stream = iter_stream(scenario)
        self._segment_ends = np.cumsum([segment.batches for segment in scenario.segments]) - 1
        self.current_features: Optional[np.ndarray] = None

        self.meta_error = 0.0
        self.selected_source = -1
        self.alpha_best = 0.0
        self.entropy_final = 0.0
        self.datacollector = DataCollector(
            model_reporters={
                "meta_error": "meta_error",
                "selected_source": "selected_source",
                "alpha_best": "alpha_best",
                "entropy_final": "entropy_final",
            },
            agent_reporters={
                "source_index": "source_index",
                "weight": "weight",
                "batch_error": "batch_error",
                "param_drift": "param_drift",
                "adapted": "adapted",
            },
        )

    @property
    def source_models(self) -> List[MlpModel]:
        return [agent.source_model for agent in self.source_agents]

    @property
    def pristine_models(self) -> List[MlpModel]:
        return [agent.pristine for agent in self.source_agents]

    def step(self):
        """Process ONE test batch."""
        item = next(self._stream, None)
        if item is None:
            self.running = False
            return
        t, segment, X, y = item.t, item.segment, item.batch.X, item.batch.y

        solve = self.solve_batch(t, X)
        record = self.score_batch(t, segment, item.pi, solve, X, y)
        self.records.append(record)
        self.meta_error = record.meta_error
        self.selected_source = record.k
        self.alpha_best = record.alpha_best
        self.entropy_final = record.entropy_final
        print(
            f"Running batch {t + 1}/{self.scenario.total_batches} (segment {segment}) - "
            f"MeTA error: {record.meta_error:.4f}"
        )

        before = self._serialize() if self.debug_snapshots else None
        self.current_features = X
        for agent in self.source_agents:
            agent.marked = agent.source_index in record.updated
        self.agents.do("step")
        self.current_features = None
        if before is not None:
            self._audit_snapshots(before, record.updated, t)

        self.datacollector.collect(self)
        if t in self._segment_ends and self.held_out_sets is not None:
            self.forgetting.append(
                evaluate_forgetting(self.source_models, self.pristine_models, self.held_out_sets, f"segment_{segment}")
            )
        if t + 1 >= self.scenario.total_batches:
            self.running = False

    def solve_batch(self, t: int, X: np.ndarray) -> WeightSolve:
        """Combination weights and adaptation targets for one batch, from its features only."""
        solver = self.solver
        cube, traces = build_cube(self.source_models, X)
        theta = bn_stat_distances(observe_bn(self.source_models, traces))
        w_init = initial_weights(theta, solver.init_mode, stream_rng(self.run_seed, WEIGHT_INIT_STREAM, t))

        if solver.step_mode == StepMode.NEWTON:
            alpha = best_step_size(
                weight_entropy_grad(cube, w_init, solver.eps_log),
                weight_entropy_hessian(cube, w_init, solver.eps_log),
                solver.alpha_min, solver.alpha_max, solver.alpha_default,
            )
            in_clamp = solver.alpha_min <= alpha <= solver.alpha_max or alpha == solver.alpha_default
        else:
            alpha = solver.alpha_fixed
            in_clamp = True
        if not (np.isfinite(alpha) and alpha > 0 and in_clamp):
            raise InvariantViolation(f"batch {t}: step size {alpha} outside [{solver.alpha_min}, {solver.alpha_max}]")

        report = optimize_weights(cube, w_init, alpha, solver.iters, solver.projection, solver.safeguard_retries, solver.eps_log)
        w_star = np.asarray(report.w_final)
        k = int(np.argmax(w_star))
        logger.debug(
            "batch %d: theta=%s w_init=%s alpha=%.4g accepted=%d w_star=%s",
            t, np.round(theta, 4).tolist(), np.round(w_init, 4).tolist(), alpha,
            report.iterations_accepted, np.round(w_star, 4).tolist(),
        )

        updated = [] if self.adapter.kind == AdapterKind.NONE else adaptation_targets(w_star, self.update_target)
        return WeightSolve(cube, report, alpha, w_star, k, updated)

    def score_batch(
        self,
        t: int,
        segment: int,
        pi: List[float],
        solve: WeightSolve,
        X: np.ndarray,
        y: np.ndarray,
    ) -> BatchRecord:
        """Error columns of one batch; the independently adapted copies take their step here."""
        for agent, weight, probs in zip(self.source_agents, solve.w_star, np.moveaxis(solve.cube, 1, 0)):
            agent.weight = float(weight)
            agent.batch_error = error_rate(probs, y)
        source_errors = self.independent.score_then_adapt(X, y)
        return BatchRecord(
            t=t,
            segment=segment,
            pi=list(pi),
            w_init=solve.report.w_init,
            w_star=solve.report.w_final,
            k=solve.k,
            alpha_best=solve.alpha,
            entropy_init=solve.report.losses[0],
            entropy_final=solve.report.losses[-1],
            meta_error=error_rate(weighted_pseudo_labels(solve.cube, solve.w_star), y),
            source_errors=source_errors,
            best_error=min(source_errors),
            worst_error=max(source_errors),
            uniform_error=uniform_error(self.pristine_models, X, y),
            updated=solve.updated,
        )

    def run_full_stream(self) -> List[BatchRecord]:
        while self.running:
            self.step()
        return self.records

    def _serialize(self) -> Dict[int, str]:
        return {agent.source_index: dumps(agent.source_model) for agent in self.source_agents}

    def _audit_snapshots(self, before: Dict[int, str], updated: List[int], t: int):
        after = self._serialize()
        for index, document in before.items():
            if index not in updated and after[index] != document:
                raise InvariantViolation(f"batch {t}: source {index} changed although it was not selected")
