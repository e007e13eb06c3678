from .baselines import IndependentSources, error_rate, uniform_error
from .forgetting import evaluate_forgetting, own_domain_sets
from .meta_model import MetaModel, WeightSolve, adaptation_targets
from .runs import MetaRun, run_meta, run_single_source_baseline, run_uniform_ensemble, run_update_ablation
from .source_agent import SourceAgent
