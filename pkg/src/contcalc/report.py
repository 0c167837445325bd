"""Suite reports: delimited results plus rendered figures.

`write_report` drops a `results.csv` with one row per check and, when the
suite data supports it, PNG figures: enumeration growth against the oracle
for least fixed points, and path-count growth per seed for greatest fixed
points.
"""
from __future__ import annotations

import csv
import os
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .suites import CheckResult  # noqa: E402


def write_results_csv(results: List[CheckResult], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "check", "status", "detail"])
        for r in results:
            writer.writerow([r.suite, r.name, "pass" if r.passed else "FAIL", r.detail])


def _growth_figure(result: CheckResult, path: str) -> None:
    data = result.data
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(data["heights"], data["engine"], "o-", label="engine enumeration")
    ax.plot(data["heights"], data["oracle"], "x--", label="oracle iteration")
    ax.set_xlabel("height budget")
    ax.set_ylabel("elements")
    ax.set_title(f"{result.suite}: enumeration growth")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _pos_growth_figure(result: CheckResult, path: str) -> None:
    data = result.data
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, counts in data["curves"].items():
        ax.plot(data["depths"], counts, marker=".", label=label)
    ax.set_xlabel("path depth budget")
    ax.set_ylabel("positions")
    ax.set_title(f"{result.suite}: path growth per seed")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_report(results: List[CheckResult], directory: str) -> List[str]:
    """Write results.csv and any applicable figures; returns written paths."""
    os.makedirs(directory, exist_ok=True)
    written = []
    csv_path = os.path.join(directory, "results.csv")
    write_results_csv(results, csv_path)
    written.append(csv_path)
    for r in results:
        if not r.data:
            continue
        safe = r.suite.replace(":", "-")
        if "heights" in r.data:
            p = os.path.join(directory, f"{safe}-growth.png")
            _growth_figure(r, p)
            written.append(p)
        elif "curves" in r.data:
            p = os.path.join(directory, f"{safe}-pos-growth.png")
            _pos_growth_figure(r, p)
            written.append(p)
    return written
