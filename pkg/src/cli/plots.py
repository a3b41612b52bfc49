"""
Deterministic SVG plots of the result tables.
"""

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..analysis import REVEALMENT_COLUMNS, THETA_COLUMNS, read_table  # noqa: E402
from ..utils import get_logger  # noqa: E402

logger = get_logger(__name__)

PLOT_KINDS = ("theta_vs_lambda", "theta_vs_n_log", "revealment_map")
FIGSIZE = (6.4, 4.8)
# Fixed salt makes the generated SVG element ids reproducible
SVG_HASHSALT = "coxperc"

PathLike = Union[str, Path]


def _theta_vs_lambda(ax, frame) -> None:
    for n, rows in frame.sort_values(["n", "lambda"]).groupby("n", sort=True):
        x = rows["lambda"].to_numpy(dtype=float)
        y = rows["theta"].to_numpy(dtype=float)
        err = np.vstack([y - rows["ci_lo"].to_numpy(dtype=float), rows["ci_hi"].to_numpy(dtype=float) - y])
        ax.errorbar(x, y, yerr=err, fmt="o-", capsize=3, label=f"n={int(n)}")
    ax.set_xlabel("lambda")
    ax.set_ylabel("theta_n(lambda)")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Crossing probability")
    if len(frame):
        ax.legend(fontsize=8)


def _theta_vs_n_log(ax, frame) -> None:
    ax.set_yscale("log")
    for lam, rows in frame.sort_values(["lambda", "n"]).groupby("lambda", sort=True):
        rows = rows[rows["theta"] > 0]
        if len(rows):
            ax.plot(rows["n"].to_numpy(dtype=float), rows["theta"].to_numpy(dtype=float), "o-", label=f"lambda={lam:g}")
    ax.set_xlabel("n")
    ax.set_ylabel("theta_n (log scale)")
    ax.set_title("Decay of crossing probability")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)


def _revealment_map(ax, frame) -> None:
    ax.set_xlabel("block x")
    ax.set_ylabel("block y")
    ax.set_title("Revealment per block")
    ax.set_aspect("equal")
    if not len(frame):
        return
    zx = frame["zx"].to_numpy(dtype=int)
    zy = frame["zy"].to_numpy(dtype=int)
    grid = np.full((zy.max() - zy.min() + 1, zx.max() - zx.min() + 1), np.nan)
    grid[zy - zy.min(), zx - zx.min()] = frame["delta"].to_numpy(dtype=float)
    extent = (zx.min() - 0.5, zx.max() + 0.5, zy.min() - 0.5, zy.max() + 0.5)
    image = ax.imshow(grid, origin="lower", extent=extent, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.figure.colorbar(image, ax=ax, label="delta")


def emit_plot(table_path: PathLike, kind: str, out_path: PathLike) -> Path:
    """
    Render a result table as an SVG file.

    Args:
        table_path: Table written by the ``theta``/``sweep``/``sharpness``
            commands (theta kinds) or by ``reveal`` (revealment_map)
        kind: One of ``theta_vs_lambda``, ``theta_vs_n_log``, ``revealment_map``
        out_path: SVG file to write

    Returns:
        Path of the written file

    Raises:
        BadHeaderError: The table does not carry the expected columns
        ValueError: Unknown plot kind
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"Unknown plot kind '{kind}'; expected one of {', '.join(PLOT_KINDS)}")
    expected = REVEALMENT_COLUMNS if kind == "revealment_map" else THETA_COLUMNS
    _, frame = read_table(table_path, expected)

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        try:
            {"theta_vs_lambda": _theta_vs_lambda, "theta_vs_n_log": _theta_vs_n_log, "revealment_map": _revealment_map}[kind](ax, frame)
            ax.grid(True, alpha=0.3)
            fig.savefig(out_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    logger.info(f"Wrote {kind} plot of {len(frame)} rows to {out_path}")
    return out_path
