"""Command-line front end: ``bradykde <subcommand> [flags]``.

Exit status is 0 on success and 2 on any error, with a one-line diagnostic
on stderr. All randomness comes from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bandwidth import default_bandwidth_grid, select_bandwidth
from .config import Config, load_config
from .conformal import fit_prediction_set, test_onsets
from .density import kde_grid
from .ecg import calibrate, parse_header, remove_baseline_wander, segment_events
from .evaluation import SplitSpec, compute_metrics, monte_carlo
from .kernels import KernelKind
from .qrs import NormalizeTransform, detect_r_peaks, normalize_peaks
from .synthetic import SyntheticSpec, generate_synthetic

log = logging.getLogger("bradykde")


def _config(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    return cfg.replace(
        kernel=getattr(args, "kernel", None),
        p_fa=getattr(args, "p_fa", None),
        grid_size=getattr(args, "grid_size", None),
        seed=getattr(args, "seed", None),
        fs=getattr(args, "fs", None),
        trials=getattr(args, "trials", None),
        splits=getattr(args, "splits", None),
        pre=getattr(args, "pre", None),
        post=getattr(args, "post", None),
        hp_cutoff=getattr(args, "hp_cutoff", None),
    )


def _h_grid(cfg: Config, coords):
    grid = cfg.h_grid()
    return default_bandwidth_grid(coords, cfg.h_steps) if grid is None else grid


def _fit_h(cfg: Config, coords):
    return select_bandwidth(coords, cfg.kernel, _h_grid(cfg, coords), per_axis=cfg.per_axis)


def _write_transform(path, transform: NormalizeTransform) -> None:
    io.atomic_write(path, json.dumps(transform.to_dict(), indent=2) + "\n")


def _read_transform(path) -> NormalizeTransform:
    with open(path) as fh:
        return NormalizeTransform.from_dict(json.load(fh))


def cmd_calibrate(args) -> None:
    header = parse_header(Path(args.header).read_text())
    cfg = _config(args)
    sig = calibrate(io.read_signal(args.signal), header)
    if not args.keep_baseline:
        sig = remove_baseline_wander(sig, cfg.hp_cutoff)
    io.write_signal(args.out, sig.samples)
    print(f"fs={header.fs:g} gain={header.gain!r} base={header.base} samples={sig.samples.size}")


def cmd_segment(args) -> None:
    cfg = _config(args)
    seg = segment_events(io.read_signal(args.signal), io.read_onsets(args.onsets), cfg.pre, cfg.post)
    out = Path(args.out_dir)
    for i, ev in enumerate(seg.events):
        io.write_signal(out / f"event_{i:04d}.txt", ev.samples)
    print(f"events={len(seg.events)} skipped={len(seg.skipped)}")
    for o in seg.skipped:
        print(f"skipped onset {o}: insufficient margin", file=sys.stderr)


def cmd_detect_peaks(args) -> None:
    cfg = _config(args)
    files = []
    for p in map(Path, args.events):
        files.extend(sorted(p.glob("event_*.txt")) if p.is_dir() else [p])
    if not files:
        raise ValueError("no event files found")
    rows = []
    for eid, f in enumerate(files):
        for pk in detect_r_peaks(io.read_signal(f), cfg.fs, cfg.pan_tompkins()):
            rows.append((eid, pk.t, pk.r))
    io.write_peaks(args.out, rows)
    print(f"events={len(files)} peaks={len(rows)}")


def _coords(args, cfg: Config, path):
    table = io.read_peaks(path, cfg.fs)
    if getattr(args, "no_normalize", False):
        return table.peaks(), None
    return normalize_peaks(table.peaks(), cfg.fs, method=cfg.normalization)


def cmd_select_bandwidth(args) -> None:
    cfg = _config(args)
    coords, _ = _coords(args, cfg, args.peaks)
    h_cv, curve = _fit_h(cfg, coords)
    if args.curve:
        io.write_curve(args.curve, curve.h, curve.score)
    print(f"h_cv={io._h_text(h_cv)}")


def _fit_set(args, cfg: Config):
    coords, transform = _coords(args, cfg, args.peaks)
    if args.h is not None:
        h = args.h
    elif args.validation:
        val = io.read_peaks(args.validation, cfg.fs).peaks()
        val_xy = transform.apply(val) if transform is not None else val
        h, _ = _fit_h(cfg, val_xy)
    else:
        h, _ = _fit_h(cfg, coords)
    pset = fit_prediction_set(coords, cfg.kernel, h, cfg.p_fa, cfg.grid_size, cfg.margin_factor)
    return pset, h, transform


def cmd_build_set(args) -> None:
    cfg = _config(args)
    pset, h, transform = _fit_set(args, cfg)
    io.write_hull(args.out, pset, h, cfg.kernel)
    if args.transform and transform is not None:
        _write_transform(args.transform, transform)
    if args.grid_out:
        io.write_grid(args.grid_out, pset.grid)
    print(f"h={io._h_text(h)} c_k={pset.c_k!r} hull_vertices={pset.hull.shape[0]}")


def cmd_export_grid(args) -> None:
    cfg = _config(args)
    pset, h, transform = _fit_set(args, cfg)
    io.write_grid(args.out_grid, pset.grid)
    if args.out_hull:
        io.write_hull(args.out_hull, pset, h, cfg.kernel)
    if args.transform and transform is not None:
        _write_transform(args.transform, transform)
    print(f"grid={pset.grid.values.shape[0]}x{pset.grid.values.shape[1]} h={io._h_text(h)} c_k={pset.c_k!r}")


def cmd_test_points(args) -> None:
    from .conformal import PredictionSet

    meta, hull = io.read_hull(args.set)
    table = io.read_peaks(args.peaks, float(args.fs) if args.fs else 1.0)
    if args.transform:
        tr = _read_transform(args.transform)
        coords = tr.apply(table.peaks())
    else:
        coords = table.peaks()
    pset = PredictionSet(float(meta["c_k"]), np.zeros((0, 0), bool), hull, float(meta["p_fa"]), int(meta["n"]))
    if pset.is_empty:
        log.warning("prediction set is empty; every point is flagged")
    flags = test_onsets(pset, coords)
    lines = ["event_id,t_sample,amplitude,onset"]
    for e, t, a, f in zip(table.event_id, table.t_sample, table.amplitude, flags):
        lines.append(f"{int(e)},{io._fmt(t)},{io._fmt(a)},{int(f)}")
    io.atomic_write(args.out, "\n".join(lines) + "\n")
    print(f"tested={flags.size} flagged={int(flags.sum())}")


def _summary(cfg: Config, spec: SplitSpec, records) -> str:
    mean_epe = sum(r.epe for r in records) / len(records)
    pooled = records[0].cm
    for r in records[1:]:
        pooled = pooled + r.cm
    m = compute_metrics(pooled)

    def fmt(v):
        return "undefined" if v is None else f"{v:.6f}"

    return "\n".join(
        [
            "# summary",
            f"kernel={cfg.kernel} splits={spec} trials={len(records)} base_seed={cfg.seed} p_fa={cfg.p_fa:g}",
            f"mean_epe={mean_epe:.6f}",
            f"pooled tp={pooled.tp} fp={pooled.fp} fn={pooled.fn} tn={pooled.tn}",
            f"sensitivity={fmt(m.sensitivity)} precision={fmt(m.precision)} fdr={fmt(m.fdr)} "
            f"for={fmt(m.for_rate)} accuracy={fmt(m.accuracy)} f1={fmt(m.f1)} epe={fmt(m.epe)}",
        ]
    ) + "\n"


def cmd_evaluate(args) -> None:
    cfg = _config(args)
    onset = args.onset_offset if args.onset_offset is not None else cfg.pre
    table = io.read_peaks(args.peaks, cfg.fs, onset, args.labels)
    mc = monte_carlo(
        table,
        [cfg.splits],
        trials=cfg.trials,
        base_seed=cfg.seed,
        kind=cfg.kernel,
        h_grid=cfg.h_grid(),
        p_fa=cfg.p_fa,
        grid_size=cfg.grid_size,
        margin_factor=cfg.margin_factor,
        normalization=cfg.normalization,
        window=cfg.label_window,
        per_axis=cfg.per_axis,
    )
    records = mc.records[cfg.splits]
    io.write_trials(args.out, records)
    summary = _summary(cfg, cfg.splits, records)
    if args.summary:
        io.atomic_write(args.summary, summary)
    sys.stdout.write(summary)


def cmd_synth(args) -> None:
    spec = SyntheticSpec(
        n_points=args.n,
        n_anomalies=args.anomalies,
        displacement=args.displacement,
        fs=args.fs if args.fs else 500.0,
    )
    seed = args.seed if args.seed is not None else 0
    table = generate_synthetic(spec, seed)
    io.write_peaks(args.out_peaks, table)
    if args.out_labels:
        io.write_labels(args.out_labels, table.truth)
    print(f"points={len(table)} anomalies={int(table.truth.sum())}")


def _splits(text: str) -> SplitSpec:
    try:
        return SplitSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # One-line diagnostic instead of the usage block.
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bradykde", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", help="key = value configuration file")
        sp.set_defaults(func=func)
        return sp

    def model_flags(sp, normalize=True):
        sp.add_argument("--kernel", choices=[k.value for k in KernelKind])
        sp.add_argument("--p-fa", type=float)
        sp.add_argument("--grid-size", type=int)
        sp.add_argument("--fs", type=float, help="sampling frequency in Hz (default 500)")
        if normalize:
            sp.add_argument("--no-normalize", action="store_true", help="use coordinates as given")

    sp = add("calibrate", cmd_calibrate, "apply gain/base and remove baseline wander")
    sp.add_argument("--signal", required=True)
    sp.add_argument("--header", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--hp-cutoff", type=float)
    sp.add_argument("--keep-baseline", action="store_true")

    sp = add("segment", cmd_segment, "cut events around bradycardia onsets")
    sp.add_argument("--signal", required=True)
    sp.add_argument("--onsets", required=True)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--pre", type=int)
    sp.add_argument("--post", type=int)

    sp = add("detect-peaks", cmd_detect_peaks, "Pan-Tompkins R-peaks for every event")
    sp.add_argument("--events", nargs="+", required=True, help="event files or directories")
    sp.add_argument("--fs", type=float)
    sp.add_argument("--out", required=True)

    sp = add("select-bandwidth", cmd_select_bandwidth, "LOOCV bandwidth for a peaks file")
    sp.add_argument("--peaks", required=True)
    sp.add_argument("--curve", help="write the CV curve as CSV h,score")
    model_flags(sp)

    for name, func, help in (
        ("build-set", cmd_build_set, "fit the prediction set and write its hull"),
        ("export-grid", cmd_export_grid, "write the density grid (and hull) for plotting"),
    ):
        sp = add(name, func, help)
        sp.add_argument("--peaks", required=True, help="training peaks")
        sp.add_argument("--validation", help="peaks used to cross-validate h")
        sp.add_argument("--h", type=float, help="fixed bandwidth (skips cross-validation)")
        sp.add_argument("--transform", help="JSON file for the fitted normalisation")
        model_flags(sp)
        if name == "build-set":
            sp.add_argument("--out", required=True)
            sp.add_argument("--grid-out")
        else:
            sp.add_argument("--out-grid", required=True)
            sp.add_argument("--out-hull")

    sp = add("test-points", cmd_test_points, "flag points outside a prediction-set hull")
    sp.add_argument("--set", required=True, help="hull CSV from build-set")
    sp.add_argument("--peaks", required=True)
    sp.add_argument("--transform", help="normalisation JSON from build-set")
    sp.add_argument("--fs", type=float)
    sp.add_argument("--out", required=True)

    sp = add("evaluate", cmd_evaluate, "Monte Carlo evaluation over shuffled splits")
    sp.add_argument("--peaks", required=True)
    sp.add_argument("--labels", help="ground-truth labels (otherwise the onset-window rule)")
    sp.add_argument("--onset-offset", type=int, help="onset index inside each event (default: pre)")
    sp.add_argument("--splits", type=_splits, help="train,val,test fractions, e.g. 0.6,0.2,0.2")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True, help="per-trial CSV")
    sp.add_argument("--summary", help="also write the summary block here")
    model_flags(sp, normalize=False)

    sp = add("synth", cmd_synth, "synthetic R-tuples with planted anomalies")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--anomalies", type=int, default=0)
    sp.add_argument("--displacement", type=float, default=6.0)
    sp.add_argument("--fs", type=float)
    sp.add_argument("--out-peaks", required=True)
    sp.add_argument("--out-labels")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
