"""Static SVG rendering of reverse-chain snapshots."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError


def _read_snapshots(directory: Path):
    files = sorted(directory.glob("t_*.json"), key=lambda p: -int(p.stem[2:]))
    snaps = []
    for f in files:
        try:
            snaps.append(json.loads(f.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{f}: {exc.msg}") from None
    return snaps


def degree_order(adjacency: np.ndarray) -> np.ndarray:
    """Node indices by descending degree, ties broken by index."""
    deg = np.asarray(adjacency).sum(axis=1)
    return np.lexsort((np.arange(len(deg)), -deg))


def plot_trajectory(directory, out_dir, index: int = 0) -> list[Path]:
    """One SVG per snapshot: reordered adjacency heatmap plus a circular layout.

    Nodes are ordered once, by degree in the final quantized graph, so the
    ordering is shared by every snapshot of the run.
    """
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    from .io import load_graphs

    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"trajectory directory not found: {directory}")
    snaps = _read_snapshots(directory)
    if not snaps:
        raise InputError(f"no snapshots in {directory}")
    final_path = directory / "final.jsonl"
    if final_path.is_file():
        final = load_graphs(final_path)[index].adjacency
    else:
        final = (np.asarray(snaps[-1]["graphs"][index]["adjacency"]) >= 0.5).astype(int)
    order = degree_order(final)
    n = len(order)
    angle = 2 * np.pi * np.arange(n) / max(n, 1)
    pos = np.stack([np.cos(angle), np.sin(angle)], axis=1)

    plt.rcParams["svg.hashsalt"] = "betagraph"
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for snap in snaps:
        vals = np.asarray(snap["graphs"][index]["adjacency"], dtype=np.float64)[np.ix_(order, order)]
        fig, (ax_h, ax_g) = plt.subplots(1, 2, figsize=(8, 4))
        ax_h.imshow(vals, vmin=0.0, vmax=1.0, cmap="Greys", interpolation="nearest")
        ax_h.set_title(f"t = {snap['t']}")
        ax_h.set_xticks([])
        ax_h.set_yticks([])
        iu, ju = np.triu_indices(n, 1)
        for i, j in zip(iu, ju):
            w = vals[i, j]
            if w > 0.05:
                ax_g.plot(pos[[i, j], 0], pos[[i, j], 1], color="black", alpha=float(min(w, 1.0)), lw=0.8)
        ax_g.scatter(pos[:, 0], pos[:, 1], s=30, color="tab:blue", zorder=3)
        ax_g.set_aspect("equal")
        ax_g.axis("off")
        path = out_dir / f"snapshot_t{snap['t']:05d}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written
