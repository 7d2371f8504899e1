"""Command-line front end.

Commands: analyze, scan, corpus gen, corpus verify, calibrate, classify,
report, bench. Exit codes: 0 success, 1 completed with row errors or
verification failures, 2 usage, environment, or fatal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import statistics
import sys
import time
import tracemalloc
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bitstring, classifier, corpus, metrics, svgplot
from .config import RunConfig, resolve_all
from .errors import BitspectraError, CalibrationError, SizeLimitError

CSV_HEADER = [
    "path", "size_bytes", "m_bits", "popcount", "mf", "adj_mf", "df",
    "entropy", "alpha", "kernel", "runtime_ms", "error",
]

GROUP_COLORS = {
    "structured": "#d62728",
    "compressed": "#1f77b4",
    "random": "#2ca02c",
    "indeterminate": "#9467bd",
    "": "#444444",
}


def _sig6(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.6g}"


def _record_row(label: str, size_bytes: int, rec: metrics.MetricsRecord,
                runtime_cell: str | None = None) -> list[str]:
    alpha = ""
    if rec.length_bits >= 2:
        alpha = _sig6(classifier.features(rec).alpha)
    runtime = runtime_cell if runtime_cell is not None else f"{rec.runtime_ms:.3f}"
    return [
        label, str(size_bytes), str(rec.length_bits), str(rec.popcount),
        str(rec.mf), _sig6(rec.adj_mf), _sig6(rec.df),
        _sig6(rec.entropy_bits_per_byte), alpha, rec.kernel, runtime, "",
    ]


def _error_row(label: str, message: str, size_bytes: int | None = None) -> list[str]:
    row = [label] + [""] * (len(CSV_HEADER) - 2) + [message]
    if size_bytes is not None:
        row[1] = str(size_bytes)
    return row


def _open_output(path: str | None):
    return open(path, "w", encoding="utf-8", newline="") if path else None


def _load_input(path: str, raw_bits: bool, max_bits: int) -> bitstring.BitString:
    if raw_bits:
        p = Path(path)
        text = p.read_text(encoding="ascii") if p.is_file() else path
        text = "".join(text.split())
        if not text:
            raise ValueError("empty input")
        b = bitstring.from_bits(text)
        return bitstring.BitString(
            packed=b.packed, length_bits=b.length_bits, popcount=b.popcount,
            origin=bitstring.Origin(path=path),
        )
    b = bitstring.from_file(path, max_bits=max_bits)
    if b.length_bits == 0:
        raise ValueError("empty input")
    return b


def _analyze_row(path: str, label: str, cfg: RunConfig, raw_bits: bool,
                 runtime_cell: str | None = None) -> list[str]:
    try:
        b = _load_input(path, raw_bits, cfg.max_bits)
        rec = metrics.analyze(
            b, kernel=cfg.kernel, reference_cap=cfg.reference_cap,
            bitparallel_cap=cfg.bitparallel_cap, fft_cap=cfg.fft_cap,
        )
    except (OSError, ValueError, BitspectraError) as exc:
        size = None
        try:
            size = os.path.getsize(path)
        except OSError:
            pass
        return _error_row(label, str(exc) or exc.__class__.__name__, size)
    return _record_row(label, (b.length_bits + 7) // 8, rec, runtime_cell)


def cmd_analyze(args, cfg: RunConfig) -> int:
    out = _open_output(args.output)
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    errored = False
    for path in args.paths:
        row = _analyze_row(path, path, cfg, args.raw_bits)
        errored = errored or bool(row[-1])
        writer.writerow(row)
    if out:
        out.close()
    return 1 if errored else 0


def _scan_worker(job: tuple[str, str, RunConfig]) -> list[str]:
    path, label, cfg = job
    # runtime is pinned to 0 so scan output is byte-identical across runs
    # and worker counts.
    return _analyze_row(path, label, cfg, raw_bits=False, runtime_cell="0")


def cmd_scan(args, cfg: RunConfig) -> int:
    root = Path(args.root)
    if not root.is_dir():
        print(f"error: {args.root} is not a directory", file=sys.stderr)
        return 2
    files = sorted(
        (p for p in root.rglob("*") if p.is_file()),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    jobs = [(str(p), p.relative_to(root).as_posix(), cfg) for p in files]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_scan_worker, jobs, chunksize=1))
    else:
        rows = [_scan_worker(job) for job in jobs]
    out = _open_output(args.output)
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    if out:
        out.close()
    return 1 if any(row[-1] for row in rows) else 0


def cmd_corpus_gen(args, cfg: RunConfig) -> int:
    manifest = corpus.generate_corpus(
        args.out,
        seed=cfg.seed,
        files_per_group=args.files_per_group,
        size_range=(args.min_bytes, args.max_bytes),
    )
    print(f"wrote {len(manifest.entries)} entries under {args.out}")
    return 0


def cmd_corpus_verify(args, cfg: RunConfig) -> int:
    manifest_path = Path(args.manifest)
    manifest = corpus.CorpusManifest.load(manifest_path)
    report = corpus.verify(manifest, manifest_path.parent)
    for r in report.results:
        if r.status != "ok":
            print(f"{r.status.upper()}: {r.path} {r.detail}".rstrip())
    ok = sum(1 for r in report.results if r.status == "ok")
    print(f"{ok}/{len(report.results)} entries verified, "
          f"{len(report.failures)} failures")
    return 0 if report.all_ok else 1


def _read_csv_rows(path: str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("line 1: empty CSV") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if row:
                rows.append((lineno, row))
    missing = [c for c in CSV_HEADER if c not in header]
    if missing:
        raise ValueError(f"line 1: missing columns {missing}")
    return header, rows


def _row_record(header: list[str], row: list[str]) -> metrics.MetricsRecord | None:
    """Rebuild the fields classification needs; None for error rows."""
    col = {name: row[header.index(name)] for name in CSV_HEADER}
    if col["error"] or not col["m_bits"]:
        return None
    return metrics.MetricsRecord(
        source=col["path"],
        length_bits=int(col["m_bits"]),
        popcount=int(col["popcount"] or 0),
        mf=int(col["mf"]),
        adj_mf=float(col["adj_mf"] or 0.0),
        df=float(col["df"]),
        entropy_bits_per_byte=float(col["entropy"]) if col["entropy"] else math.nan,
        kernel=col["kernel"],
        runtime_ms=float(col["runtime_ms"] or 0.0),
    )


def cmd_classify(args, cfg: RunConfig) -> int:
    thresholds = (
        classifier.Thresholds.load(cfg.thresholds) if cfg.thresholds
        else classifier.Thresholds()
    )
    try:
        header, rows = _read_csv_rows(args.csv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _open_output(args.output)
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(header + ["group", "confidence"])
    for lineno, row in rows:
        if len(row) != len(header):
            print(f"error: line {lineno}: expected {len(header)} fields, got {len(row)}",
                  file=sys.stderr)
            if out:
                out.close()
            return 2
        try:
            rec = _row_record(header, row)
        except ValueError as exc:
            print(f"error: line {lineno}: {exc}", file=sys.stderr)
            if out:
                out.close()
            return 2
        if rec is None or rec.length_bits < 2:
            writer.writerow(row + ["", ""])
            continue
        label, confidence = classifier.classify(rec, thresholds)
        writer.writerow(row + [label.value, f"{confidence:.4f}"])
    if out:
        out.close()
    return 0


def cmd_calibrate(args, cfg: RunConfig) -> int:
    manifest_path = Path(args.manifest)
    manifest = corpus.CorpusManifest.load(manifest_path)
    groups = {e.path: e.group for e in manifest.entries}
    try:
        header, rows = _read_csv_rows(args.csv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    labeled = []
    for _, row in rows:
        rec = _row_record(header, row)
        if rec is None:
            continue
        group = groups.get(rec.source)
        if group:
            labeled.append((rec, classifier.GroupLabel(group)))
    try:
        thresholds = classifier.calibrate(labeled)
    except CalibrationError as exc:
        print(f"error: calibration failed: {exc}", file=sys.stderr)
        return 2
    thresholds.save(args.out)
    note = " (degenerate fit, defaults kept)" if thresholds.calibration_warning else ""
    print(
        f"calibrated on {len(labeled)} records{note}: "
        f"df_split = {thresholds.df_split_c:.4g} * M^{thresholds.df_split_gamma:.4g}, "
        f"alpha_split = {thresholds.alpha_split:.4g} -> {args.out}"
    )
    return 0


def cmd_report(args, cfg: RunConfig) -> int:
    try:
        header, rows = _read_csv_rows(args.csv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    group_idx = header.index("group") if "group" in header else None
    points = []
    for _, row in rows:
        rec = _row_record(header, row)
        if rec is None:
            continue
        group = row[group_idx] if group_idx is not None and group_idx < len(row) else ""
        points.append((rec.length_bits, rec.mf, rec.adj_mf, rec.df, group))
    if not points:
        print("error: no analyzable rows in CSV", file=sys.stderr)
        return 1

    figures = [
        ("figure1.svg", "total lag-profile mass mf vs size", "mf",
         [(m, mf, g) for m, mf, _, _, g in points],
         [("M^2", 1.0, 2.0), ("M^1.5", 1.0, 1.5), ("M", 1.0, 1.0)]),
        ("figure2.svg", "adjusted mf vs size", "adj_mf",
         [(m, adj, g) for m, _, adj, _, g in points], []),
        ("figure3.svg", "profile dispersion df vs size", "df",
         [(m, dfv, g) for m, _, _, dfv, g in points],
         [("M/100", 0.01, 1.0), ("df = 1", 1.0, 0.0)]),
    ]
    for name, title, ylabel, pts, guides in figures:
        doc = svgplot.scatter_loglog(
            pts, title=title, xlabel="size M, bits", ylabel=ylabel,
            guides=guides, series_colors=GROUP_COLORS,
        )
        target = Path(args.prefix + name)
        if target.parent != Path(""):
            target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(doc, encoding="utf-8")
        print(f"wrote {target}")
    return 0


def _bench_bitstring(seed: int, m_bits: int) -> bitstring.BitString:
    data = corpus.keystream(seed, (m_bits + 7) // 8)
    if m_bits % 8 == 0:
        return bitstring.from_bytes(data)
    full = bitstring.from_bytes(data)
    return bitstring.from_bits(full.bits_array()[:m_bits])


def cmd_bench(args, cfg: RunConfig) -> int:
    kernels = [k.strip() for k in args.kernels.split(",")]
    sizes = [int(x) for x in args.sizes.split(",")]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["kernel", "m_bits", "repetitions", "median_ms", "peak_mib", "flag"])
    kernel_fns = {
        "reference": lambda b: metrics.lag_profile_reference(b, cap=cfg.reference_cap),
        "bitparallel": metrics.lag_profile_bitparallel,
        "fft": lambda b: metrics.lag_profile_fft(b, cap=cfg.fft_cap),
    }
    for kernel in kernels:
        if kernel not in kernel_fns:
            print(f"error: unknown kernel {kernel!r}", file=sys.stderr)
            return 2
        for m_bits in sizes:
            if kernel == "reference" and m_bits > cfg.reference_cap:
                writer.writerow([kernel, m_bits, args.repetitions, "", "",
                                 f"error:over-cap({cfg.reference_cap})"])
                continue
            if kernel == "fft" and m_bits > cfg.fft_cap:
                writer.writerow([kernel, m_bits, args.repetitions, "", "",
                                 f"error:over-cap({cfg.fft_cap})"])
                continue
            b = _bench_bitstring(cfg.seed, m_bits)
            times, peaks = [], []
            for _ in range(args.repetitions):
                tracemalloc.start()
                t0 = time.perf_counter()
                kernel_fns[kernel](b)
                times.append((time.perf_counter() - t0) * 1000.0)
                _, peak = tracemalloc.get_traced_memory()
                tracemalloc.stop()
                peaks.append(peak)
            flag = "low-confidence" if args.repetitions < 2 else ""
            writer.writerow([
                kernel, m_bits, args.repetitions,
                f"{statistics.median(times):.3f}",
                f"{max(peaks) / (1 << 20):.2f}", flag,
            ])
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (also BITSPECTRA_CONFIG)")
    p.add_argument("--kernel", choices=metrics.KERNELS, default=None)
    p.add_argument("--max-bits", type=int, default=None, dest="max_bits")
    p.add_argument("--reference-cap", type=int, default=None, dest="reference_cap")
    p.add_argument("--bitparallel-cap", type=int, default=None, dest="bitparallel_cap")
    p.add_argument("--fft-cap", type=int, default=None, dest="fft_cap")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--thresholds", default=None)
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitspectra",
        description="Self-correlation metrics, classification, and corpus tools "
                    "for binary files",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="metrics for explicit files, CSV to stdout")
    p.add_argument("paths", nargs="+")
    p.add_argument("--raw-bits", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("-o", "--output")
    _add_common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("scan", help="recursive directory scan to CSV")
    p.add_argument("root")
    p.add_argument("-o", "--output")
    _add_common(p)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("corpus", help="generate or verify labeled corpora")
    csub = p.add_subparsers(dest="subcommand", required=True)
    g = csub.add_parser("gen", help="generate a three-group corpus")
    g.add_argument("--out", required=True)
    g.add_argument("--files-per-group", type=int, default=12)
    g.add_argument("--min-bytes", type=int, default=4096)
    g.add_argument("--max-bytes", type=int, default=262144)
    _add_common(g)
    g.set_defaults(fn=cmd_corpus_gen)
    v = csub.add_parser("verify", help="re-derive a corpus from its manifest")
    v.add_argument("--manifest", required=True)
    _add_common(v)
    v.set_defaults(fn=cmd_corpus_verify)

    p = sub.add_parser("calibrate", help="fit thresholds from a labeled scan")
    p.add_argument("--csv", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_calibrate)

    p = sub.add_parser("classify", help="append group and confidence to a CSV")
    p.add_argument("csv")
    p.add_argument("-o", "--output")
    _add_common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("report", help="emit figure1-3 SVG scatter plots from a CSV")
    p.add_argument("csv")
    p.add_argument("--prefix", default="")
    _add_common(p)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("bench", help="kernel timing and memory table")
    p.add_argument("--sizes", default="1024,4096,16384")
    p.add_argument("--kernels", default="reference,bitparallel,fft")
    p.add_argument("--repetitions", type=int, default=3)
    _add_common(p)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {
        name: getattr(args, name, None)
        for name in ("kernel", "max_bits", "reference_cap", "bitparallel_cap",
                     "fft_cap", "workers", "seed", "thresholds")
    }
    if hasattr(args, "paths"):
        inputs = list(args.paths)
    elif hasattr(args, "root"):
        inputs = [args.root]
    elif hasattr(args, "csv"):
        inputs = [args.csv]
    else:
        inputs = []
    try:
        settings = resolve_all(flags, getattr(args, "config", None))
        cfg = RunConfig(
            command=args.command, inputs=inputs,
            output=getattr(args, "output", None),
            verbosity=getattr(args, "verbose", 0), **settings,
        )
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.fn(args, cfg)
    except BrokenPipeError:
        return 0
    except (OSError, BitspectraError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
