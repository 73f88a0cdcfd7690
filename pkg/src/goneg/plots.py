"""SVG figures for analysis and benchmark outputs (requires matplotlib)."""

from __future__ import annotations

import os
from collections import defaultdict

try:
    import matplotlib
except ImportError as exc:  # pragma: no cover - exercised only without the extra
    raise ImportError("plots need matplotlib; install the 'plot' extra") from exc

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import EvaluationReport  # noqa: E402
from .evolution import AnalysisResult  # noqa: E402

# fixed metadata keeps the SVG text reproducible
_SVG_META = {"Date": None, "Creator": "goneg"}
plt.rcParams["svg.hashsalt"] = "goneg"


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def plot_analysis(result: AnalysisResult, outdir: str) -> list[str]:
    """Box plots of per-term mean ranks and of fork distances, one file each."""
    written = []
    per_term: dict[tuple[str, str], dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in result.ranks:
        per_term[(r.measure, r.branch)][r.term].append(r.rank)
    if per_term:
        keys = sorted(per_term)
        fig, ax = plt.subplots(figsize=(1.4 * len(keys) + 2, 4))
        data = [[sum(v) / len(v) for v in per_term[k].values()] for k in keys]
        ax.boxplot(data, showmeans=True, meanline=True)
        ax.set_xticks(range(1, len(keys) + 1), [f"{m}\n{b}" for m, b in keys])
        ax.set_ylabel("mean normalized rank per term")
        ax.set_ylim(0, 1.02)
        path = os.path.join(outdir, "ranks.svg")
        _save(fig, path)
        written.append(path)
    dist: dict[str, list[int]] = defaultdict(list)
    for f in result.forks:
        dist[f.branch].append(f.distance)
    if dist:
        keys = sorted(dist)
        fig, ax = plt.subplots(figsize=(1.4 * len(keys) + 2, 4))
        ax.boxplot([dist[k] for k in keys], showmeans=True, meanline=True)
        ax.set_xticks(range(1, len(keys) + 1), keys)
        ax.set_ylabel("distance from fork point")
        path = os.path.join(outdir, "forks.svg")
        _save(fig, path)
        written.append(path)
    return written


def plot_report(report: EvaluationReport, outdir: str) -> list[str]:
    """Mean false negatives against budget, one file per branch."""
    written = []
    budgets = report.metadata["budgets"]
    for branch, curves in sorted(report.curves().items()):
        fig, ax = plt.subplots(figsize=(6, 4))
        for method, values in sorted(curves.items()):
            ax.plot(budgets, values, marker="o", label=method)
        ax.set_xlabel("budget B")
        ax.set_ylabel("mean false negatives per term")
        ax.set_title(branch)
        ax.legend(fontsize="small")
        path = os.path.join(outdir, f"fn_curves_{branch}.svg")
        _save(fig, path)
        written.append(path)
    return written
