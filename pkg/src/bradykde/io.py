"""Plain-text file formats. Every writer is atomic (temp file + rename).

Formats
-------
signal     one integer or decimal sample per line
onsets     one sample index per line
peaks      CSV ``event_id,t_sample,amplitude``
labels     CSV ``label`` with 0/1 per peak, aligned with a peaks file
grid       CSV ``x,y,density``, row-major over (x, y)
hull       ``# c_k=<v> p_fa=<v> n=<v> h=<v> kernel=<name>`` then CSV ``x,y``
curve      CSV ``h,score`` (``h_1,...,h_q,score`` for per-axis searches)
trials     CSV ``trial,seed,h,c_k,tp,fp,fn,tn,epe`` (per-axis h as ``h_1;h_2``)

Blank lines are ignored and CRLF line endings are accepted everywhere.
Floats are written with ``repr`` so reading them back is lossless.
"""

from __future__ import annotations

import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .conformal import PredictionSet
from .density import DensityGrid
from .evaluation import PeakTable, TrialResult
from .ecg import DEFAULT_PRE

__all__ = [
    "FormatError",
    "atomic_write",
    "read_signal",
    "write_signal",
    "read_onsets",
    "write_onsets",
    "read_peaks",
    "write_peaks",
    "read_labels",
    "write_labels",
    "write_grid",
    "read_grid",
    "write_hull",
    "read_hull",
    "write_curve",
    "write_trials",
]

PEAKS_HEADER = "event_id,t_sample,amplitude"
TRIALS_HEADER = "trial,seed,h,c_k,tp,fp,fn,tn,epe"


class FormatError(ValueError):
    pass


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if f.is_integer() and abs(f) < 2**53:
        return str(int(f))
    return repr(f)


def _lines(path):
    """(line number, stripped text) for every non-blank line."""
    with open(path, newline="") as fh:
        for i, ln in enumerate(fh.read().splitlines(), start=1):
            s = ln.strip()
            if s:
                yield i, s


def _float(tok: str, path, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(f"{path}:{lineno}: {tok!r} is not a number") from None
    if not np.isfinite(v):
        raise FormatError(f"{path}:{lineno}: non-finite value {tok!r}")
    return v


def _int(tok: str, path, lineno: int) -> int:
    if not re.fullmatch(r"[+-]?\d+", tok):
        raise FormatError(f"{path}:{lineno}: {tok!r} is not an integer")
    return int(tok)


def read_signal(path) -> np.ndarray:
    vals = [_float(s, path, i) for i, s in _lines(path)]
    if not vals:
        raise FormatError(f"{path}: no samples")
    return np.asarray(vals)


def write_signal(path, samples) -> None:
    atomic_write(path, "".join(_fmt(v) + "\n" for v in np.asarray(samples).tolist()))


def read_onsets(path) -> np.ndarray:
    return np.asarray([_int(s, path, i) for i, s in _lines(path)], dtype=np.int64)


def write_onsets(path, onsets) -> None:
    atomic_write(path, "".join(f"{int(o)}\n" for o in onsets))


def _csv_rows(path, header: str):
    rows = _lines(path)
    try:
        lineno, first = next(rows)
    except StopIteration:
        raise FormatError(f"{path}: empty file, expected header {header!r}") from None
    if first.replace(" ", "") != header:
        raise FormatError(f"{path}:{lineno}: expected header {header!r}, got {first!r}")
    width = header.count(",") + 1
    for lineno, s in rows:
        parts = [p.strip() for p in s.split(",")]
        if len(parts) != width:
            raise FormatError(f"{path}:{lineno}: expected {width} fields, got {len(parts)}")
        yield lineno, parts


def read_peaks(path, fs: float, onset_offset: int = DEFAULT_PRE, labels_path=None) -> PeakTable:
    ev, t, a = [], [], []
    for i, (e, ts, amp) in _csv_rows(path, PEAKS_HEADER):
        ev.append(_int(e, path, i))
        t.append(_float(ts, path, i))
        a.append(_float(amp, path, i))
    truth = read_labels(labels_path) if labels_path is not None else None
    if truth is not None and len(truth) != len(ev):
        raise FormatError(f"{labels_path}: {len(truth)} labels for {len(ev)} peaks")
    return PeakTable(np.asarray(ev, dtype=np.int64), np.asarray(t), np.asarray(a), fs, onset_offset, truth)


def write_peaks(path, table_or_rows) -> None:
    """Write a ``PeakTable`` or an iterable of ``(event_id, t_sample, amplitude)``."""
    if isinstance(table_or_rows, PeakTable):
        rows = zip(table_or_rows.event_id, table_or_rows.t_sample, table_or_rows.amplitude)
    else:
        rows = table_or_rows
    body = "".join(f"{int(e)},{_fmt(t)},{_fmt(a)}\n" for e, t, a in rows)
    atomic_write(path, PEAKS_HEADER + "\n" + body)


def read_labels(path) -> np.ndarray:
    out = []
    for i, (v,) in _csv_rows(path, "label"):
        if v not in ("0", "1"):
            raise FormatError(f"{path}:{i}: label must be 0 or 1, got {v!r}")
        out.append(v == "1")
    return np.asarray(out, dtype=bool)


def write_labels(path, labels) -> None:
    atomic_write(path, "label\n" + "".join(f"{int(bool(v))}\n" for v in labels))


def write_grid(path, grid: DensityGrid) -> None:
    xx, yy = np.meshgrid(grid.x_axis, grid.y_axis, indexing="ij")
    body = "".join(
        f"{x!r},{y!r},{v!r}\n" for x, y, v in zip(xx.ravel().tolist(), yy.ravel().tolist(), grid.values.ravel().tolist())
    )
    atomic_write(path, "x,y,density\n" + body)


def read_grid(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(x_axis, y_axis, values)`` from a grid CSV."""
    rows = np.asarray([[_float(p, path, i) for p in parts] for i, parts in _csv_rows(path, "x,y,density")])
    if rows.size == 0:
        raise FormatError(f"{path}: no grid rows")
    x_axis = np.unique(rows[:, 0])
    y_axis = np.unique(rows[:, 1])
    if x_axis.size * y_axis.size != rows.shape[0]:
        raise FormatError(f"{path}: rows do not form a rectangular grid")
    return x_axis, y_axis, rows[:, 2].reshape(x_axis.size, y_axis.size)


def _h_text(h) -> str:
    hv = np.atleast_1d(np.asarray(h, dtype=float))
    return ";".join(repr(float(v)) for v in hv)


def write_hull(path, pset: PredictionSet, h, kind) -> None:
    meta = f"# c_k={pset.c_k!r} p_fa={pset.p_fa!r} n={pset.n_train} h={_h_text(h)} kernel={kind}\n"
    body = "".join(f"{x!r},{y!r}\n" for x, y in pset.hull.tolist())
    atomic_write(path, meta + "x,y\n" + body)


def read_hull(path) -> tuple[dict, np.ndarray]:
    """``(metadata, vertices)``; metadata values are strings."""
    with open(path, newline="") as fh:
        first = fh.readline().strip()
    if not first.startswith("#"):
        raise FormatError(f"{path}:1: missing '# c_k=... kernel=...' metadata line")
    meta = {}
    for tok in first[1:].split():
        k, sep, v = tok.partition("=")
        if not sep:
            raise FormatError(f"{path}:1: malformed metadata token {tok!r}")
        meta[k] = v
    missing = {"c_k", "p_fa", "n", "h", "kernel"} - meta.keys()
    if missing:
        raise FormatError(f"{path}:1: metadata lacks {sorted(missing)}")
    rows = _lines(path)
    next(rows)
    pts = []
    lineno, hdr = next(rows, (2, ""))
    if hdr.replace(" ", "") != "x,y":
        raise FormatError(f"{path}:{lineno}: expected header 'x,y'")
    for i, s in rows:
        parts = s.split(",")
        if len(parts) != 2:
            raise FormatError(f"{path}:{i}: expected 2 fields, got {len(parts)}")
        pts.append([_float(p.strip(), path, i) for p in parts])
    return meta, np.asarray(pts, dtype=float).reshape(-1, 2)


def write_curve(path, h, score) -> None:
    H = np.asarray(h, dtype=float)
    if H.ndim == 1:
        header = "h,score"
        rows = [f"{a!r},{s!r}" for a, s in zip(H.tolist(), np.asarray(score).tolist())]
    else:
        header = ",".join(f"h_{i + 1}" for i in range(H.shape[1])) + ",score"
        rows = [",".join(map(repr, hv)) + f",{s!r}" for hv, s in zip(H.tolist(), np.asarray(score).tolist())]
    atomic_write(path, header + "\n" + "".join(r + "\n" for r in rows))


def trials_csv(records: list[TrialResult]) -> str:
    lines = [TRIALS_HEADER]
    for i, r in enumerate(records):
        c = r.cm
        lines.append(f"{i},{r.seed},{_h_text(r.h_cv)},{r.c_k!r},{c.tp},{c.fp},{c.fn},{c.tn},{r.epe!r}")
    return "\n".join(lines) + "\n"


def write_trials(path, records: list[TrialResult]) -> None:
    atomic_write(path, trials_csv(records))
