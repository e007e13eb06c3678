from enum import Enum
from pathlib import Path
from typing import List, Optional, Union
import json

from pydantic import BaseModel, Field, field_validator, model_validator

from config import (
    ADAM_BETA1, ADAM_BETA2, ADAM_EPS,
    ALPHA_DEFAULT, ALPHA_FIXED, ALPHA_MAX, ALPHA_MIN,
    BATCH_SIZE, BN_MOMENTUM, EPS_LOG, INPUT_DIM, MEAN_JITTER, MEAN_SCALE,
    N_CLASSES, N_SOURCES, NOISE_SCALE, SAFEGUARD_RETRIES, SHIFT_SCALE,
    TENT_LR, TENT_STEPS, TRAIN_BATCH_SIZE, TRAIN_EPOCHS, TRAIN_LR,
    TRAIN_MAX_ERROR, TRAIN_SAMPLES, WEIGHT_ITERS,
)

SIMPLEX_TOLERANCE = 1e-9


class AdapterKind(str, Enum):
    TENT = "tent"
    BN_STATS = "bn_stats"
    NONE = "none"


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


class ProjectionMode(str, Enum):
    SOFTMAX = "softmax"
    EUCLIDEAN = "euclidean"


class InitMode(str, Enum):
    KL = "kl"
    UNIFORM = "uniform"
    RANDOM = "random"


class StepMode(str, Enum):
    NEWTON = "newton"
    FIXED = "fixed"


class UpdateTarget(str, Enum):
    MOST = "most"
    LEAST = "least"
    ALL = "all"


# =============================================================================
# SCENARIO
# =============================================================================

class DomainParams(BaseModel):
    """Knobs for building one synthetic domain; None picks the per-id default."""
    n_classes: int = Field(N_CLASSES, ge=2, description="Number of classes K")
    input_dim: int = Field(INPUT_DIM, ge=2, description="Feature dimension d_in")
    rotation_angle: Optional[float] = Field(None, description="Radians; None uses the default angle for the domain id")
    rotation_planes: Optional[int] = Field(None, ge=1, description="Consecutive coordinate pairs rotated; None rotates every pair")
    shift: Optional[List[float]] = Field(None, description="Explicit shift; None draws one of scale shift_scale")
    shift_scale: float = Field(SHIFT_SCALE, ge=0, description="Std of the drawn shift")
    noise_scale: float = Field(NOISE_SCALE, gt=0, description="Isotropic Gaussian sample noise")
    mean_scale: float = Field(MEAN_SCALE, gt=0, description="Scale of the shared class means")
    mean_jitter: float = Field(MEAN_JITTER, ge=0, description="Std of the per-domain class-mean perturbation")

    @model_validator(mode="after")
    def _check_geometry(self):
        if self.rotation_planes is not None and 2 * self.rotation_planes > self.input_dim:
            raise ValueError("rotation_planes needs 2 * rotation_planes <= input_dim")
        if self.shift is not None and len(self.shift) != self.input_dim:
            raise ValueError("shift length must equal input_dim")
        return self


class DomainSpec(BaseModel):
    """One source or target domain: shared class means under a rotation, a shift and noise."""
    domain_id: int = Field(..., ge=0, description="Domain identifier")
    class_means: List[List[float]] = Field(..., description="K points in R^d_in, before rotation")
    rotation_angle: float = Field(0.0, description="Radians")
    rotation_planes: int = Field(1, ge=1, description="Coordinate pairs (0,1), (2,3), ... rotated")
    shift: List[float] = Field(..., description="Vector in R^d_in added after rotation")
    noise_scale: float = Field(..., gt=0, description="Isotropic Gaussian std")
    seed: int = Field(..., description="Base seed the domain was derived from")

    @model_validator(mode="after")
    def _check_invariants(self):
        if len(self.class_means) < 2:
            raise ValueError("a domain needs at least 2 classes")
        dim = len(self.shift)
        if any(len(mean) != dim for mean in self.class_means):
            raise ValueError("every class mean must have the shift's dimension")
        if 2 * self.rotation_planes > dim:
            raise ValueError("rotation_planes needs 2 * rotation_planes <= d_in")
        seen = {tuple(mean) for mean in self.class_means}
        if len(seen) != len(self.class_means):
            raise ValueError("class means must be pairwise distinct")
        return self

    @property
    def n_classes(self) -> int:
        return len(self.class_means)

    @property
    def input_dim(self) -> int:
        return len(self.shift)


class MixtureSpec(BaseModel):
    """Mixing proportions over the scenario's domains."""
    pi: List[float] = Field(..., min_length=1, description="Proportions on the domain simplex")

    @field_validator("pi")
    @classmethod
    def _on_simplex(cls, pi: List[float]) -> List[float]:
        if any(p < 0 for p in pi):
            raise ValueError("mixture proportions must be non-negative")
        if abs(sum(pi) - 1.0) > SIMPLEX_TOLERANCE:
            raise ValueError(f"mixture proportions sum to {sum(pi)}, expected 1")
        return pi


class ScenarioSegment(MixtureSpec):
    batches: int = Field(..., ge=1, description="Number of test batches drawn from this mixture")


class ScenarioScript(BaseModel):
    """Ordered mixture schedule; stationary iff it has a single segment."""
    segments: List[ScenarioSegment] = Field(..., min_length=1)

    @property
    def stationary(self) -> bool:
        return len(self.segments) == 1

    @property
    def total_batches(self) -> int:
        return sum(segment.batches for segment in self.segments)


class ScenarioFile(ScenarioScript):
    """The scenario JSON document: domains plus the segment schedule."""
    domains: List[DomainSpec] = Field(..., min_length=1)
    batch_size: int = Field(BATCH_SIZE, ge=2, description="Test batch size B")
    seed: int = Field(0, description="Stream seed")

    @model_validator(mode="after")
    def _check_segments(self):
        for index, segment in enumerate(self.segments):
            if len(segment.pi) != len(self.domains):
                raise ValueError(
                    f"segment {index} has {len(segment.pi)} proportions for {len(self.domains)} domains"
                )
        return self

    @property
    def script(self) -> ScenarioScript:
        return ScenarioScript(segments=self.segments)


class ScenarioPreset(ScenarioScript):
    """Compact scenario form: the default domains of `base_seed` instead of explicit class means."""
    base_seed: int = Field(0, description="Seed the domains are derived from")
    n_domains: int = Field(N_SOURCES, ge=1)
    params: DomainParams = Field(default_factory=DomainParams)
    batch_size: int = Field(BATCH_SIZE, ge=2, description="Test batch size B")
    seed: Optional[int] = Field(None, description="Stream seed; None uses base_seed")

    def expand(self) -> ScenarioFile:
        from .scenario.domains import make_default_domains

        return ScenarioFile(
            domains=make_default_domains(self.base_seed, self.n_domains, self.params),
            segments=self.segments,
            batch_size=self.batch_size,
            seed=self.base_seed if self.seed is None else self.seed,
        )


def scenario_from_dict(data: dict) -> ScenarioFile:
    """Full documents list their domains; anything else is read as a preset."""
    if "domains" in data:
        return ScenarioFile.model_validate(data)
    return ScenarioPreset.model_validate(data).expand()


# =============================================================================
# CONFIGURATION
# =============================================================================

class TrainConfig(BaseModel):
    epochs: int = Field(TRAIN_EPOCHS, ge=1)
    batch_size: int = Field(TRAIN_BATCH_SIZE, ge=2)
    lr: float = Field(TRAIN_LR, gt=0)
    seed: int = Field(0)
    n_samples: int = Field(TRAIN_SAMPLES, ge=2)
    permute_labels: bool = Field(False, description="Train on labels shifted by one class (corrupted source)")
    max_error: float = Field(TRAIN_MAX_ERROR, ge=0, le=1, description="Own-domain error the source must reach")


class AdapterConfig(BaseModel):
    """Single-source test-time adaptation applied to the selected model."""
    kind: AdapterKind = Field(AdapterKind.TENT)
    lr: float = Field(TENT_LR, ge=0, description="Learning rate; 0 leaves the model untouched")
    steps: int = Field(TENT_STEPS, ge=1)
    optimizer: OptimizerKind = Field(OptimizerKind.ADAM)
    bn_momentum: float = Field(BN_MOMENTUM, ge=0, le=1)
    beta1: float = Field(ADAM_BETA1, ge=0, lt=1)
    beta2: float = Field(ADAM_BETA2, ge=0, lt=1)
    adam_eps: float = Field(ADAM_EPS, gt=0)


class SolverConfig(BaseModel):
    """Combination-weight solver settings."""
    iters: int = Field(WEIGHT_ITERS, ge=0)
    projection: ProjectionMode = Field(ProjectionMode.SOFTMAX)
    alpha_min: float = Field(ALPHA_MIN, gt=0)
    alpha_max: float = Field(ALPHA_MAX, gt=0)
    alpha_default: float = Field(ALPHA_DEFAULT, gt=0)
    alpha_fixed: float = Field(ALPHA_FIXED, gt=0)
    eps_log: float = Field(EPS_LOG, gt=0, lt=1)
    init_mode: InitMode = Field(InitMode.KL)
    step_mode: StepMode = Field(StepMode.NEWTON)
    safeguard_retries: int = Field(SAFEGUARD_RETRIES, ge=0)

    @model_validator(mode="after")
    def _check_clamp(self):
        if self.alpha_min > self.alpha_max:
            raise ValueError("alpha_min must not exceed alpha_max")
        return self


class DebugConfig(BaseModel):
    snapshots: bool = Field(False, description="Verify exactly-one-update with serialized snapshots")


class RunConfig(BaseModel):
    """Everything a command needs; scenario may be embedded or given as a path."""
    scenario: ScenarioFile
    models_dir: str = Field("out/models")
    output_dir: str = Field("out")
    seed: int = Field(0)
    train: TrainConfig = Field(default_factory=TrainConfig)
    adapter: AdapterConfig = Field(default_factory=AdapterConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    debug: DebugConfig = Field(default_factory=DebugConfig)
    update_target: UpdateTarget = Field(UpdateTarget.MOST)
    corrupted_sources: List[int] = Field(default_factory=list, description="Sources trained on permuted labels")

    @field_validator("scenario", mode="before")
    @classmethod
    def _load_scenario(cls, value: Union[str, Path, dict, ScenarioFile]):
        if isinstance(value, (str, Path)):
            path = Path(value)
            if not path.is_file():
                raise ValueError(f"scenario file not found: {path}")
            with open(path, "r", encoding="utf-8") as f:
                value = json.load(f)
        if isinstance(value, dict):
            return scenario_from_dict(value)
        return value


# =============================================================================
# RECORDS
# =============================================================================

class WeightSolveReport(BaseModel):
    w_init: List[float]
    alpha_best: float = Field(..., gt=0)
    losses: List[float] = Field(..., description="Loss at w_init followed by the loss after every iteration")
    w_final: List[float]
    iterations_accepted: int = Field(..., ge=0)


class BatchRecord(BaseModel):
    """One row per test batch of a MeTA run."""
    t: int = Field(..., ge=0)
    segment: int = Field(..., ge=0)
    pi: List[float]
    w_init: List[float]
    w_star: List[float]
    k: int = Field(..., ge=0, description="argmax of w_star, smallest index on ties")
    alpha_best: float = Field(..., gt=0)
    entropy_init: float
    entropy_final: float
    meta_error: float = Field(..., ge=0, le=1)
    source_errors: List[float]
    best_error: float = Field(..., ge=0, le=1)
    worst_error: float = Field(..., ge=0, le=1)
    uniform_error: float = Field(..., ge=0, le=1)
    updated: List[int] = Field(default_factory=list, description="Sources adapted after inference")

    @field_validator("source_errors")
    @classmethod
    def _errors_in_range(cls, errors: List[float]) -> List[float]:
        if any(e < 0 or e > 1 for e in errors):
            raise ValueError("error rates must lie in [0, 1]")
        return errors


class SourceBaselineRecord(BaseModel):
    """Per-batch errors of independently adapted single sources."""
    t: int = Field(..., ge=0)
    segment: int = Field(..., ge=0)
    source_errors: List[float]
    best_error: float = Field(..., ge=0, le=1)
    worst_error: float = Field(..., ge=0, le=1)


class UniformRecord(BaseModel):
    t: int = Field(..., ge=0)
    segment: int = Field(..., ge=0)
    uniform_error: float = Field(..., ge=0, le=1)


class ForgettingRecord(BaseModel):
    """Own-domain errors of every source at one checkpoint."""
    checkpoint: str = Field(..., description="e.g. 'segment_0'")
    adapted_errors: List[float]
    pristine_errors: List[float]
    param_drift: List[float]

    @property
    def deltas(self) -> List[float]:
        return [a - p for a, p in zip(self.adapted_errors, self.pristine_errors)]


class TrainingSummaryRow(BaseModel):
    source_id: int
    domain_id: int
    seed: int
    permute_labels: bool
    own_domain_error: float = Field(..., ge=0, le=1)
    path: str
