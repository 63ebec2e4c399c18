"""CSV tables and PNG figures for relation-search certificates."""

from __future__ import annotations

import csv
from collections import Counter
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .freeness import NONTRIVIAL, RELATION, UNRESOLVED, Certificate, word_str  # noqa: E402

PathLike = Union[str, Path]

CSV_FIELDS = ("word", "length", "verdict", "witness")


def write_csv(cert: Certificate, path: PathLike) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for vd in cert.verdicts:
            w.writerow([word_str(vd.word), len(vd.word), vd.verdict, "" if vd.witness is None else vd.witness])
    return path


def plot_certificate(cert: Certificate, path: PathLike, title: str = "") -> Path:
    """Witness valuation against word length, plus verdict counts."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), gridspec_kw={"width_ratios": [3, 1]})

    pts = Counter((len(vd.word), vd.witness) for vd in cert.verdicts if isinstance(vd.witness, int))
    if pts:
        xs, ys, ns = zip(*[(ln, k, n) for (ln, k), n in sorted(pts.items())])
        ax1.scatter(xs, ys, s=[20 + 6 * n for n in ns], alpha=0.7)
        for x, y, n in zip(xs, ys, ns):
            ax1.annotate(str(n), (x, y), textcoords="offset points", xytext=(6, 4), fontsize=7)
    ax1.axhline(cert.N, color="grey", linestyle="--", linewidth=1)
    ax1.text(0.6, cert.N, f" N = {cert.N}", va="bottom", fontsize=8, color="grey")
    ax1.set_xlim(0.5, cert.L + 0.5)
    ax1.set_ylim(0, cert.N + 2)
    ax1.set_xlabel("word length")
    ax1.set_ylabel("witness valuation")
    ax1.set_xticks(range(1, cert.L + 1))

    counts = cert.counts()
    kinds = [NONTRIVIAL, RELATION, UNRESOLVED]
    ax2.bar(range(3), [counts[k] for k in kinds], color=["tab:blue", "tab:red", "tab:orange"])
    ax2.set_xticks(range(3))
    ax2.set_xticklabels(["nontrivial", "relation", "unresolved"], rotation=30, fontsize=8)
    ax2.set_ylabel("words")

    fig.suptitle(title or cert.summary, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
