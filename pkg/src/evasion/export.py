"""File formats: CSV tables, a PGM density raster and the JSON run manifest.

All CSVs are UTF-8 with a header row and deterministic row order. Floats
are written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import json
import math
import platform
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(a: np.ndarray) -> list[str]:
    return ["%.17g" % v for v in np.asarray(a, dtype=float).tolist()]


def write_table(path: str | Path, header: list[str], columns: list, int_columns: tuple[int, ...] = ()) -> Path:
    """Write equal-length columns as CSV. Columns listed in ``int_columns`` are integers."""
    path = Path(path)
    fmt = ",".join("%d" if i in int_columns else "%.17g" for i in range(len(columns)))
    cols = [np.asarray(c).astype(np.int64 if i in int_columns else float).tolist()
            for i, c in enumerate(columns)]
    body = map(fmt.__mod__, zip(*cols))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for line in body:
            fh.write(line)
            fh.write("\n")
    return path


def write_density_grid(path, r, theta, xi) -> Path:
    return write_table(path, ["r", "theta", "xi"], [np.ravel(r), np.ravel(theta), np.ravel(xi)])


def write_solution(path, mesh, u) -> Path:
    r, th = mesh.grid()
    u = np.asarray(u).reshape(mesh.shape)
    return write_table(path, ["r", "theta", "u", "xi"],
                       [r.ravel(), th.ravel(), u.ravel(), (u * u).ravel()])


def write_traces(path, result) -> Path:
    """Rows ``trajectory_id,k,prey_x,prey_y,pred_x,pred_y,distance``; captured tails are skipped."""
    n_traj, n_k, _ = result.prey.shape
    tid = np.repeat(np.arange(n_traj), n_k)
    k = np.tile(np.arange(n_k), n_traj)
    prey = result.prey.reshape(-1, 2)
    pred = result.predator.reshape(-1, 2)
    dist = result.distances.ravel()
    keep = np.isfinite(dist)
    return write_table(path, ["trajectory_id", "k", "prey_x", "prey_y", "pred_x", "pred_y", "distance"],
                       [tid[keep], k[keep], prey[keep, 0], prey[keep, 1], pred[keep, 0],
                        pred[keep, 1], dist[keep]], int_columns=(0, 1))


def write_histograms(path, hists) -> Path:
    """Rows ``variable,k,bin_lo,bin_hi,mass``; variable is distance or squared_distance."""
    var, ks, lo, hi, mass = [], [], [], [], []
    for h in hists:
        n = h.mass.size
        var += ["squared_distance" if h.squared else "distance"] * n
        ks.append(np.full(n, h.k))
        lo.append(h.edges[:-1])
        hi.append(h.edges[1:])
        mass.append(h.mass)
    ks, lo, hi, mass = (np.concatenate(x) for x in (ks, lo, hi, mass))
    lines = ["variable,k,bin_lo,bin_hi,mass"]
    for v, k, a, b, m in zip(var, ks, _fmt(lo), _fmt(hi), _fmt(mass)):
        lines.append(f"{v},{int(k)},{a},{b},{m}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def cartesian_raster(density, width: int = 256, height: int = 256, extent=None):
    """Sample ``density.pdf_xy`` on a pixel grid; returns (values, extent).

    ``extent`` is ``(x_min, x_max, y_min, y_max)``; row 0 is the top (y_max).
    """
    w = density.wedge
    if extent is None:
        R = density.r_max * 0.75
        extent = (w.apex.x - R, w.apex.x + R, w.apex.y - R, w.apex.y + R)
    x0, x1, y0, y1 = extent
    xs = x0 + (np.arange(width) + 0.5) * (x1 - x0) / width
    ys = y1 - (np.arange(height) + 0.5) * (y1 - y0) / height
    X, Y = np.meshgrid(xs, ys)
    return density.pdf_xy(X, Y), extent


def write_pgm(path, values: np.ndarray, extent, wedge=None) -> Path:
    """Binary PGM (P5), 8-bit, row-major, darker = larger density.

    Header comments carry ``extent`` and, when given, the wedge apex,
    heading and half angle so the dashed boundary can be redrawn.
    """
    v = np.asarray(values, dtype=float)
    vmax = float(v.max()) if v.size and v.max() > 0 else 1.0
    pix = (255 - np.rint(255.0 * v / vmax)).astype(np.uint8)
    h, w = pix.shape
    lines = ["P5",
             "# evasion density raster; darker pixels = larger density",
             "# extent x_min={:.17g} x_max={:.17g} y_min={:.17g} y_max={:.17g}".format(*extent),
             f"# pixel = 255 - round(255 * xi / xi_max), xi_max={vmax:.17g}"]
    if wedge is not None:
        lines.append("# boundary dashed apex={:.17g},{:.17g} heading={:.17g},{:.17g} half_angle={:.17g}".format(
            wedge.apex.x, wedge.apex.y, wedge.heading.x, wedge.heading.y, wedge.half_angle))
    lines += [f"{w} {h}", "255"]
    data = ("\n".join(lines) + "\n").encode("ascii") + pix.tobytes()
    Path(path).write_bytes(data)
    return Path(path)


def read_pgm(path) -> tuple[np.ndarray, list[str]]:
    """Read a P5 file written by :func:`write_pgm`; returns (pixels, comment lines)."""
    raw = Path(path).read_bytes()
    comments, fields, pos = [], [], 0
    while len(fields) < 4:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            fields += line.split()
    magic, w, h, _ = fields
    if magic != "P5":
        raise ValueError(f"not a binary PGM: {magic}")
    pix = np.frombuffer(raw[pos:], dtype=np.uint8).reshape(int(h), int(w))
    return pix, comments


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if hasattr(obj, "x") and hasattr(obj, "y") and not isinstance(obj, (int, float, str)):
        return [obj.x, obj.y]
    return obj


def write_manifest(path, command: str, config: dict, seed, metrics: dict | None = None,
                   wall_time: float | None = None, extra: dict | None = None) -> Path:
    doc = {
        "command": command,
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "seed": seed,
        "config": config,
        "metrics": metrics or {},
    }
    if wall_time is not None:
        doc["wall_time_s"] = wall_time
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    return Path(path)
