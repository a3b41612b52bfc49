"""
Versioned text dump of an environment.

Layout (one record per line, floats with 17 significant digits)::

    # coxperc-environment v1
    params {json}
    window lo_x lo_y hi_x hi_y
    y_window lo_x lo_y hi_x hi_y
    seed S
    trial T
    y_digest HEX
    yblock zx zy N           followed by N lines "x y"
    block zx zy sites S pieces K edges E
    site kx ky mass total C  followed by C lines "piece x0 y0 x1 y1 length cum"
    edge x0 y0 x1 y1         (E lines, WIDTH only)
    end

Site lines come in local order. For WIDTH the stored mass is the quadrature
area.
"""

import json
from pathlib import Path
from typing import Dict, Iterator, List, Union

import numpy as np

from ..lattice import BlockId, BlockWindow, make_params, site_of_local
from ..utils import get_logger
from ..utils.errors import BadHeaderError
from .builder import Environment
from .sites import BlockSites

logger = get_logger(__name__)

ENVIRONMENT_HEADER = "# coxperc-environment v1"


def _f(value: float) -> str:
    return f"{float(value):.17g}"


def _window_line(tag: str, w: BlockWindow) -> str:
    return f"{tag} {w.lo[0]} {w.lo[1]} {w.hi[0]} {w.hi[1]}"


def dump_environment(env: Environment, path: Union[str, Path]) -> Path:
    """
    Write ``env`` to ``path``.

    Returns:
        The path written
    """
    p = env.params
    lines: List[str] = [
        ENVIRONMENT_HEADER,
        "params " + json.dumps(p.to_dict(), sort_keys=True),
        _window_line("window", env.window),
        _window_line("y_window", env.y_window),
        f"seed {env.seed}",
        f"trial {env.trial}",
        f"y_digest {env.digest()}",
    ]
    for z in sorted(env.y_blocks):
        pts = env.y_blocks[z]
        lines.append(f"yblock {z[0]} {z[1]} {pts.shape[0]}")
        lines.extend(f"{_f(x)} {_f(y)}" for x, y in pts)

    for z in env.window:
        data = env.block(z)
        masses = env.block_mass(z)
        edges = data.width_edges if data.width_edges is not None else np.empty((0, 4))
        lines.append(
            f"block {z[0]} {z[1]} sites {data.n_sites} pieces {data.segments.shape[0]} edges {edges.shape[0]}"
        )
        for local in range(data.n_sites):
            k = site_of_local(z, local, p)
            sl = data.site_slice(local)
            count = sl.stop - sl.start
            lines.append(f"site {k[0]} {k[1]} {_f(masses[local])} {_f(data.total[local])} {count}")
            for seg, length, cum in zip(data.segments[sl], data.lengths[sl], data.cum[sl]):
                lines.append("piece " + " ".join(_f(c) for c in (*seg, length, cum)))
        for row in edges:
            lines.append("edge " + " ".join(_f(c) for c in row))
    lines.append("end")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote environment dump ({len(env.window)} blocks) to {path}")
    return path


def _expect(it: Iterator[List[str]], tag: str) -> List[str]:
    try:
        fields = next(it)
    except StopIteration:
        raise BadHeaderError(f"Truncated environment dump: expected '{tag}'") from None
    if not fields or fields[0] != tag:
        raise BadHeaderError(f"Malformed environment dump: expected '{tag}', got {' '.join(fields)!r}")
    return fields[1:]


def _window(fields: List[str]) -> BlockWindow:
    lo_x, lo_y, hi_x, hi_y = (int(c) for c in fields)
    return BlockWindow((lo_x, lo_y), (hi_x, hi_y))


def load_environment_dump(path: Union[str, Path]) -> Environment:
    """
    Read a dump written by ``dump_environment``.

    Raises:
        BadHeaderError: Wrong header, malformed records or a seed field whose
            digest does not match
    """
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0].strip() != ENVIRONMENT_HEADER:
        raise BadHeaderError(f"{path} is not a coxperc environment dump")
    it = iter(line.split() for line in text[1:] if line.strip())

    header = next(it, None)
    if not header or header[0] != "params":
        raise BadHeaderError("Malformed environment dump: expected 'params'")
    p = make_params(**json.loads(" ".join(header[1:])))
    window = _window(_expect(it, "window"))
    y_window = _window(_expect(it, "y_window"))
    seed = int(_expect(it, "seed")[0])
    trial = int(_expect(it, "trial")[0])
    digest = _expect(it, "y_digest")[0]

    y_blocks: Dict[BlockId, np.ndarray] = {}
    blocks: Dict[BlockId, BlockSites] = {}
    masses: Dict[BlockId, np.ndarray] = {}
    fields = next(it, ["end"])
    while fields[0] == "yblock":
        zx, zy, count = (int(c) for c in fields[1:4])
        pts = np.array([[float(c) for c in next(it)] for _ in range(count)]).reshape(-1, 2)
        y_blocks[(zx, zy)] = pts
        fields = next(it, ["end"])

    while fields[0] == "block":
        z = (int(fields[1]), int(fields[2]))
        n_sites, n_pieces, n_edges = int(fields[4]), int(fields[6]), int(fields[8])
        mass = np.zeros(n_sites)
        total = np.zeros(n_sites)
        sizes = np.zeros(n_sites, dtype=np.int64)
        rows: List[List[float]] = []
        for local in range(n_sites):
            site = _expect(it, "site")
            mass[local] = float(site[2])
            total[local] = float(site[3])
            sizes[local] = int(site[4])
            rows.extend([float(c) for c in _expect(it, "piece")] for _ in range(sizes[local]))
        table = np.array(rows, dtype=float).reshape(-1, 6)
        if table.shape[0] != n_pieces:
            raise BadHeaderError(f"Block {z}: expected {n_pieces} pieces, found {table.shape[0]}")
        edges = np.array(
            [[float(c) for c in _expect(it, "edge")] for _ in range(n_edges)], dtype=float
        ).reshape(-1, 4)
        width = not p.variant.has_segments
        blocks[z] = BlockSites(
            block=z,
            total=total,
            mass=None if width else mass,
            offsets=np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64),
            segments=table[:, 0:4].copy(),
            lengths=table[:, 4].copy(),
            cum=table[:, 5].copy(),
            width_edges=edges if width else None,
        )
        if width:
            masses[z] = mass
        fields = next(it, ["end"])

    if fields[0] != "end":
        raise BadHeaderError(f"Malformed environment dump: unexpected record {fields[0]!r}")

    env = Environment(p, window, y_window, y_blocks, blocks, seed=seed, trial=trial)
    env._width_cache.update(masses)
    if env.digest() != digest:
        raise BadHeaderError("Seed field digest does not match the dump")
    return env
