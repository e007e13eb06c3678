"""Static SVG charts of a run: error over time and own-domain error per checkpoint."""
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

ERROR_SERIES = {
    "meta_err": "MeTA",
    "best_err": "best source",
    "worst_err": "worst source",
    "uniform_err": "uniform ensemble",
}
SVG_STYLE = {
    "svg.fonttype": "none",
    "svg.hashsalt": "meta-report",
    "path.simplify": False,
}


def series_gid(name: str) -> str:
    return f"series-{name}"


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_error_over_time(batches: pd.DataFrame, path: Union[str, Path]) -> Path:
    """One polyline per error series against the batch index t."""
    sns.set_theme(style="whitegrid")
    with plt.rc_context(SVG_STYLE):
        fig, ax = plt.subplots(figsize=(9, 4.5))
        palette = sns.color_palette("deep", len(ERROR_SERIES))
        for color, (column, label) in zip(palette, ERROR_SERIES.items()):
            if column not in batches.columns:
                continue
            (line,) = ax.plot(batches["t"], batches[column], label=label, color=color, linewidth=1.6)
            line.set_gid(series_gid(column))
        for boundary in batches["t"][batches["segment"].diff().fillna(0) != 0]:
            ax.axvline(boundary - 0.5, color="0.6", linestyle=":", linewidth=1)
        ax.set_xlabel("test batch t")
        ax.set_ylabel("error rate")
        ax.set_title("Online error")
        ax.legend(loc="upper right")
        fig.tight_layout()
        return _save(fig, Path(path))


def plot_forgetting(forgetting: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Adapted (solid) and pristine (dashed) own-domain error of every source per checkpoint."""
    sns.set_theme(style="whitegrid")
    checkpoints = list(dict.fromkeys(forgetting["checkpoint"]))
    positions = {name: index for index, name in enumerate(checkpoints)}
    sources = sorted(forgetting["source_id"].astype(int).unique())
    with plt.rc_context(SVG_STYLE):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        palette = sns.color_palette("deep", len(sources))
        for color, source in zip(palette, sources):
            rows = forgetting[forgetting["source_id"].astype(int) == source]
            x = rows["checkpoint"].map(positions)
            (adapted,) = ax.plot(x, rows["adapted_err"], marker="o", color=color, label=f"source {source}")
            adapted.set_gid(series_gid(f"source_{source}"))
            (pristine,) = ax.plot(x, rows["pristine_err"], linestyle="--", color=color, alpha=0.6)
            pristine.set_gid(series_gid(f"source_{source}_pristine"))
        ax.set_xticks(range(len(checkpoints)))
        ax.set_xticklabels(checkpoints)
        ax.set_xlabel("checkpoint")
        ax.set_ylabel("own-domain error")
        ax.set_title("Forgetting")
        ax.legend(loc="upper left")
        fig.tight_layout()
        return _save(fig, Path(path))
