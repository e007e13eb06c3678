import logging
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.special import log_softmax

from config import BATCH_SIZE, HELD_OUT_SIZE, HIDDEN_WIDTHS
from ..errors import TrainingDivergedError
from ..models import DomainSpec, TrainConfig
from ..nn import MlpModel, NormMode, forward, grad_full, sgd_step, update_running_stats
from ..nn.functional import as_matrix
from .domains import EVAL_STREAM, INIT_STREAM, TRAIN_STREAM, stream_rng
from .sampling import draw

logger = logging.getLogger(__name__)


def chunk_slices(n: int, batch_size: int) -> Iterator[slice]:
    """Consecutive slices of at most batch_size rows; a trailing chunk under 2 rows joins the previous one."""
    starts = list(range(0, n, batch_size))
    if len(starts) > 1 and n - starts[-1] < 2:
        starts.pop()
    for index, start in enumerate(starts):
        stop = starts[index + 1] if index + 1 < len(starts) else n
        yield slice(start, stop)


def predict_labels(
    model: MlpModel,
    X: np.ndarray,
    batch_size: int = BATCH_SIZE,
    mode: NormMode = NormMode.BATCH_STATS,
) -> np.ndarray:
    X = as_matrix(X)
    predictions = np.empty(X.shape[0], dtype=np.int64)
    for rows in chunk_slices(X.shape[0], batch_size):
        predictions[rows] = np.argmax(forward(model, X[rows], mode).logits, axis=1)
    return predictions


def evaluate_error(
    model: MlpModel,
    X: np.ndarray,
    y: np.ndarray,
    batch_size: int = BATCH_SIZE,
    mode: NormMode = NormMode.BATCH_STATS,
) -> float:
    """Misclassification rate, evaluated chunk by chunk like the test stream."""
    return float(np.mean(predict_labels(model, X, batch_size, mode) != np.asarray(y)))


def train_source(
    domain: DomainSpec,
    train_cfg: Optional[TrainConfig] = None,
    hidden_widths: Sequence[int] = HIDDEN_WIDTHS,
) -> MlpModel:
    """Mini-batch SGD on cross-entropy with batch-statistics BN; running stats by EMA.

    The returned model's meta.train_err is its error on a fresh 2000-sample
    set of its own domain (against the true labels, also for corrupted sources).
    """
    train_cfg = train_cfg or TrainConfig()
    n_classes = domain.n_classes
    rng = stream_rng(train_cfg.seed, TRAIN_STREAM, domain.domain_id)
    data = draw([domain], [1.0], train_cfg.n_samples, rng)
    labels = (data.y + 1) % n_classes if train_cfg.permute_labels else data.y

    model = MlpModel.initialize(
        [domain.input_dim, *hidden_widths, n_classes],
        seed=int(stream_rng(train_cfg.seed, INIT_STREAM, domain.domain_id).integers(2**31)),
        domain_id=domain.domain_id,
    )
    model.meta.seed = train_cfg.seed

    for epoch in range(train_cfg.epochs):
        order = rng.permutation(train_cfg.n_samples)
        losses = []
        for rows in chunk_slices(train_cfg.n_samples, train_cfg.batch_size):
            idx = order[rows]
            X_batch, y_batch = data.X[idx], labels[idx]
            trace = forward(model, X_batch, NormMode.BATCH_STATS)
            log_probs = log_softmax(trace.logits, axis=1)
            loss = float(-np.mean(log_probs[np.arange(len(idx)), y_batch]))
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"loss became {loss} in epoch {epoch} while training on domain {domain.domain_id}"
                )
            losses.append(loss)
            grads = grad_full(model, X_batch, y_batch)
            model.assign(sgd_step(model.parameters(), grads, train_cfg.lr))
            update_running_stats(model, trace)
        logger.debug("domain %d epoch %d mean loss %.5f", domain.domain_id, epoch, np.mean(losses))

    eval_set = draw([domain], [1.0], HELD_OUT_SIZE, stream_rng(train_cfg.seed, EVAL_STREAM, domain.domain_id))
    model.meta.train_err = evaluate_error(model, eval_set.X, eval_set.y)
    if not train_cfg.permute_labels and model.meta.train_err > train_cfg.max_error:
        logger.warning(
            "source for domain %d reached own-domain error %.4f, above %.4f",
            domain.domain_id, model.meta.train_err, train_cfg.max_error,
        )
    return model
