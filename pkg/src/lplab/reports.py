"""Experiment reports: CSV rows, JSON summaries, and rendered figures.

Rows are written with ``repr`` formatting so a rerun with the same config
reproduces the CSV byte for byte; the timestamp lives only in the JSON
provenance block.  One figure per experiment is rendered next to the
delimited output unless plotting is disabled.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__


@dataclass
class ExperimentReport:
    """Structured record of one experiment run."""
    experiment: str
    config: dict
    rows: list
    summary: dict
    provenance: dict = field(default_factory=dict)

    def row_header(self):
        return list(self.rows[0].keys()) if self.rows else []


def make_report(experiment: str, config: dict, rows: list, summary: dict) -> ExperimentReport:
    return ExperimentReport(
        experiment=experiment, config=dict(config), rows=rows, summary=dict(summary),
        provenance={"toolkit": "lplab", "version": __version__,
                    "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")})


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(report: ExperimentReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = report.row_header()
        writer.writerow(header)
        for row in report.rows:
            writer.writerow([_fmt(row[k]) for k in header])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def write_json(report: ExperimentReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "experiment": report.experiment,
        "config": _jsonable(report.config),
        "summary": _jsonable(report.summary),
        "row_count": len(report.rows),
        "provenance": report.provenance,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _column(report, name):
    return np.array([row[name] for row in report.rows])


def render_figure(report: ExperimentReport, path) -> Path:
    """One summary figure per experiment kind, written as a file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    kind = report.experiment
    if kind == "partition-check":
        ax.semilogy(_column(report, "r"), np.maximum(_column(report, "residual"), 1e-18),
                    ".", ms=2)
        ax.set_xscale("log")
        ax.set_xlabel("r"); ax.set_ylabel("|sum_j psi(r/2^j) - 1|")
        ax.set_title("dyadic partition residual")
    elif kind == "chemin":
        j = _column(report, "j")
        ax.semilogy(j, _column(report, "ratio"), "o-", label="measured")
        ax.semilogy(j, _column(report, "bound"), "s--", label="annulus bound")
        ax.set_xlabel("j"); ax.set_ylabel("decay ratio"); ax.legend()
        ax.set_title("heat decay of dyadic blocks (t = 1)")
    elif kind == "inflation":
        for zid in sorted(set(_column(report, "zeta_id"))):
            rows = [r for r in report.rows if r["zeta_id"] == zid]
            ax.plot([r["N"] for r in rows],
                    [r["value_third_component"] for r in rows], "o-",
                    label=f"zeta {int(zid)}")
        rows0 = [r for r in report.rows if r["zeta_id"] == 0]
        ax.plot([r["N"] for r in rows0], [r["sum_alpha_sq"] for r in rows0],
                "k--", label="sum alpha_k^2")
        ax.set_xlabel("N"); ax.set_ylabel("third component"); ax.legend()
        ax.set_title(f"second-iterate growth ({report.config.get('alpha', '?')})")
    elif kind == "boundedness":
        grids = _column(report, "grid")
        ratios = _column(report, "ratio")
        for n in sorted(set(grids)):
            ax.plot(np.flatnonzero(grids == n), ratios[grids == n], "o",
                    label=f"grid {int(n)}")
        ax.set_xlabel("pair"); ax.set_ylabel("operator ratio"); ax.legend()
        ax.set_yscale("log")
        ax.set_title(f"boundedness ratios: {report.config.get('symbol', '?')}")
    elif kind == "embeddings":
        x = np.arange(len(report.rows))
        for name in ("binf_inf", "grad_bmo", "binf_2"):
            ax.plot(x, _column(report, name), "o-", label=name)
        ax.set_xlabel("field"); ax.set_ylabel("norm"); ax.legend()
        ax.set_title("embedding chain norms")
    elif kind == "besov":
        names = sorted(set(_column(report, "norm_name")))
        for name in names:
            rows = [r for r in report.rows if r["norm_name"] == name]
            ax.plot([r["field_id"] for r in rows], [r["value"] for r in rows],
                    "o-", label=name)
        ax.set_xlabel("field"); ax.set_ylabel("value"); ax.legend()
        ax.set_title("Besov norms across the ensemble")
    elif kind == "symbol-check":
        names = [r["identity"] for r in report.rows]
        vals = np.maximum(_column(report, "residual"), 1e-20)
        ax.bar(range(len(names)), vals)
        ax.set_yscale("log")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
        ax.set_ylabel("max residual")
        ax.set_title("symbol decomposition residuals")
    elif kind == "iterate":
        j = _column(report, "j")
        ax.semilogy(j, np.maximum(_column(report, "block_linf"), 1e-20), "o-")
        ax.set_xlabel("j"); ax.set_ylabel("||Delta_j u||_inf")
        ax.set_title("dyadic profile of the iterate")
    else:
        ax.text(0.5, 0.5, f"no figure for {kind}", ha="center")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
