"""Command-line front end.

Exit codes: 0 on success, 1 on bad input data (unreadable files, malformed
descriptions, values out of range), 2 on command-line usage errors.
Output is deterministic: the same invocation always produces the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from typing import NoReturn

import click
import numpy as np

from .archmodel import ArchConfig, ArchError, default_arch, parse_arch
from .dataflow import DATA_TYPES, LEVELS, DataflowKind
from .energy import Modifiers, compare_dataflows, network_energy
from .kernels import (MULT_METHODS, conv_direct, conv_fft, conv_im2col,
                      conv_winograd_f22_33, mult_count)
from .netmodel import NetworkError, ResolvedNetwork, parse_network, resolve_shapes
from .optkit import (MAX_VALUE, CodecError, compression_ratio, prune_network,
                     rle_decode, rle_encode, rle_pair_count, sparse_stats)
from .stats import layer_stats, network_stats
from .zoo import BUILTIN_NAMES, builtin

FORMATS = ("table", "csv", "json")
DATAFLOW_NAMES = tuple(k.value for k in DataflowKind)


def _fail(message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    raise SystemExit(1)


def _network_options(fn):
    fn = click.option("--batch", type=int, default=1, show_default=True,
                      help="Batch size used when resolving shapes.")(fn)
    fn = click.option("--net", "net_path", type=str, default=None,
                      help="Path to a network description file.")(fn)
    fn = click.option("--builtin", "builtin_name", type=str, default=None,
                      help=f"Bundled network: one of {', '.join(BUILTIN_NAMES)}.")(fn)
    return fn


def _report_options(fn):
    fn = click.option("--out", "out_path", type=str, default=None,
                      help="Write the report to this file instead of stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(FORMATS),
                      default="table", show_default=True)(fn)
    return fn


def _modifier_options(fn):
    fn = click.option("--density-w", type=float, default=1.0, show_default=True,
                      help="Nonzero fraction of the weights.")(fn)
    fn = click.option("--density-in", type=float, default=1.0, show_default=True,
                      help="Nonzero fraction of the inputs.")(fn)
    fn = click.option("--bits", type=int, default=None,
                      help="Operand precision for inputs and weights (defaults to the word size).")(fn)
    fn = click.option("--arch", "arch_path", type=str, default=None,
                      help="Path to a hardware description file.")(fn)
    return fn


def _load_network(builtin_name, net_path, batch) -> ResolvedNetwork:
    if (builtin_name is None) == (net_path is None):
        raise click.UsageError("give exactly one of --builtin or --net")
    try:
        if builtin_name is not None:
            spec = builtin(builtin_name)
        else:
            with open(net_path, encoding="utf-8") as fh:
                spec = parse_network(fh.read())
        return resolve_shapes(spec, batch=batch)
    except (NetworkError, OSError, ValueError) as exc:
        _fail(str(exc))


def _load_arch(arch_path) -> ArchConfig:
    if arch_path is None:
        return default_arch()
    try:
        with open(arch_path, encoding="utf-8") as fh:
            return parse_arch(fh.read())
    except (ArchError, OSError, ValueError) as exc:
        _fail(str(exc))


def _modifiers(bits, density_in, density_w) -> Modifiers:
    try:
        return Modifiers(density_in=density_in, density_w=density_w,
                         bits_in=bits, bits_w=bits)
    except ValueError as exc:
        _fail(str(exc))


def _emit(text: str, out_path) -> None:
    if out_path is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        _fail(str(exc))


def _cell(value) -> str:
    if isinstance(value, int):
        return f"{value:,}"
    if isinstance(value, float):
        return f"{value:,.1f}"
    return str(value)


def _render_table(headers, rows, title=None, footer=()) -> str:
    cells = [[str(h) for h in headers]] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = [] if title is None else [title]
    for index, row in enumerate(cells):
        joined = "  ".join(
            row[i].ljust(widths[i]) if i == 0 else row[i].rjust(widths[i])
            for i in range(len(row)))
        lines.append(joined.rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    lines.extend(footer)
    return "\n".join(lines) + "\n"


def _render_csv(headers, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _render_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


@click.group()
def main():
    """Analytical cost modeling for neural-network inference hardware."""


@main.command("stats")
@_network_options
@_report_options
def stats_cmd(builtin_name, net_path, batch, fmt, out_path):
    """Storage and compute counts for every weighted layer."""
    net = _load_network(builtin_name, net_path, batch)
    report = network_stats(net)
    headers = ("layer", "kind", "weights", "macs", "d_in", "d_w", "d_out")
    rows = [(r.name, r.kind, r.weights, r.macs, r.di, r.dw, r.do)
            for r in report.layers]
    rows.append(("total", "", report.total_weights, report.total_macs,
                 sum(r.di for r in report.layers),
                 sum(r.dw for r in report.layers),
                 sum(r.do for r in report.layers)))
    if fmt == "json":
        obj = {
            "network": report.network,
            "batch": report.batch,
            "layers": [
                {"layer": r.name, "kind": r.kind, "weights": r.weights,
                 "macs": r.macs, "d_in": r.di, "d_w": r.dw, "d_out": r.do}
                for r in report.layers
            ],
            "totals": {
                "weights": report.total_weights,
                "macs": report.total_macs,
                "conv_layers": report.conv_layers,
                "conv_weights": report.conv_weights,
                "conv_macs": report.conv_macs,
                "fc_layers": report.fc_layers,
                "fc_weights": report.fc_weights,
                "fc_macs": report.fc_macs,
            },
        }
        _emit(_render_json(obj), out_path)
    elif fmt == "csv":
        _emit(_render_csv(headers, rows), out_path)
    else:
        title = f"{report.network}  batch {report.batch}"
        _emit(_render_table(headers, rows, title=title), out_path)


@main.command("analyze")
@_network_options
@_modifier_options
@click.option("--dataflow", type=click.Choice(DATAFLOW_NAMES), default="rs",
              show_default=True, help="Mapping policy to price.")
@_report_options
def analyze_cmd(builtin_name, net_path, batch, arch_path, bits, density_in,
                density_w, dataflow, fmt, out_path):
    """Per-layer data-movement and compute energy under one dataflow."""
    net = _load_network(builtin_name, net_path, batch)
    arch = _load_arch(arch_path)
    mods = _modifiers(bits, density_in, density_w)
    try:
        reports, agg = network_energy(net, DataflowKind(dataflow), arch, mods)
    except (ValueError, OverflowError) as exc:
        _fail(str(exc))
    everything = reports + [agg]
    if fmt == "json":
        obj = {
            "network": net.name,
            "batch": net.batch,
            "dataflow": dataflow,
            "layers": [
                {"layer": rep.layer, "movement": rep.movement,
                 "by_type": rep.by_type, "by_level": rep.by_level,
                 "compute": rep.compute, "total": rep.total}
                for rep in reports
            ],
            "total": {"movement": agg.movement, "by_type": agg.by_type,
                      "by_level": agg.by_level, "compute": agg.compute,
                      "total": agg.total},
        }
        _emit(_render_json(obj), out_path)
    elif fmt == "csv":
        headers = ("layer", "dataflow", "type", "level", "energy")
        rows = []
        for rep in everything:
            for dtype in DATA_TYPES:
                for level in LEVELS:
                    rows.append((rep.layer, rep.dataflow, dtype, level,
                                 rep.movement[dtype][level]))
            rows.append((rep.layer, rep.dataflow, "compute", "mac", rep.compute))
        _emit(_render_csv(headers, rows), out_path)
    else:
        headers = ("layer", "input", "weight", "psum", "compute", "total")
        rows = [(rep.layer, rep.by_type["input"], rep.by_type["weight"],
                 rep.by_type["psum"], rep.compute, rep.total)
                for rep in everything]
        title = f"{net.name}  batch {net.batch}  dataflow {dataflow}"
        levels = "  ".join(f"{lv} {_cell(agg.by_level[lv])}" for lv in LEVELS)
        _emit(_render_table(headers, rows, title=title,
                            footer=(f"movement by level: {levels}",)), out_path)


@main.command("compare")
@_network_options
@_modifier_options
@_report_options
def compare_cmd(builtin_name, net_path, batch, arch_path, bits, density_in,
                density_w, fmt, out_path):
    """Rank all dataflows by total energy on one network."""
    net = _load_network(builtin_name, net_path, batch)
    arch = _load_arch(arch_path)
    mods = _modifiers(bits, density_in, density_w)
    try:
        report = compare_dataflows(net, arch, mods)
    except (ValueError, OverflowError) as exc:
        _fail(str(exc))
    if fmt == "json":
        obj = {
            "network": report.network,
            "batch": report.batch,
            "winner": report.winner,
            "conv_winner": report.conv_winner,
            "entries": [
                {"dataflow": e.kind, "total": e.total, "ratio": e.ratio,
                 "conv_total": e.conv_total, "conv_ratio": e.conv_ratio,
                 "compute": e.compute, "by_type": e.by_type,
                 "by_level": e.by_level}
                for e in report.entries
            ],
        }
        _emit(_render_json(obj), out_path)
    elif fmt == "csv":
        headers = ("dataflow", "total", "ratio", "conv_total", "conv_ratio")
        rows = [(e.kind, e.total, e.ratio, e.conv_total, e.conv_ratio)
                for e in report.entries]
        _emit(_render_csv(headers, rows), out_path)
    else:
        headers = ("dataflow", "total", "ratio", "conv_total", "conv_ratio")
        rows = [(e.kind, e.total, f"{e.ratio:.3f}", e.conv_total,
                 f"{e.conv_ratio:.3f}") for e in report.entries]
        title = f"{report.network}  batch {report.batch}"
        footer = (f"winner {report.winner}  conv winner {report.conv_winner}",)
        _emit(_render_table(headers, rows, title=title, footer=footer), out_path)


@main.group("kernels")
def kernels_group():
    """Convolution transform checks and multiplication counts."""


@kernels_group.command("verify")
@click.option("--trials", type=int, default=20, show_default=True,
              help="Number of random problems.")
@click.option("--size", type=int, default=None,
              help="Fix the input extent (default: random in [3, 16]).")
@click.option("--seed", type=int, default=0, show_default=True)
def kernels_verify_cmd(trials, size, seed):
    """Cross-check all transforms against direct convolution."""
    if trials < 1:
        _fail(f"--trials must be >= 1, got {trials}")
    if size is not None and size < 3:
        _fail(f"--size must be >= 3 to fit a 3x3 filter, got {size}")
    rng = np.random.default_rng(seed)
    tolerances = {"im2col": 1e-9, "winograd": 1e-6, "fft": 1e-6}
    worst = {name: 0.0 for name in tolerances}
    for _ in range(trials):
        channels = int(rng.integers(1, 5))
        filters = int(rng.integers(1, 5))
        height = size if size is not None else int(rng.integers(3, 17))
        width = size if size is not None else int(rng.integers(3, 17))
        x = rng.standard_normal((channels, height, width))
        w = rng.standard_normal((filters, channels, 3, 3))
        reference = conv_direct(x, w)
        scale = float(np.max(np.abs(reference))) or 1.0
        candidates = {
            "im2col": conv_im2col(x, w),
            "winograd": conv_winograd_f22_33(x, w),
            "fft": conv_fft(x, w),
        }
        for name, got in candidates.items():
            deviation = float(np.max(np.abs(got - reference))) / scale
            worst[name] = max(worst[name], deviation)
    failed = False
    for name in ("im2col", "winograd", "fft"):
        ok = worst[name] <= tolerances[name]
        failed = failed or not ok
        click.echo(f"{name:8s} vs direct: max rel {worst[name]:.3e}  "
                   f"tol {tolerances[name]:.0e}  {'ok' if ok else 'FAIL'}")
    click.echo(f"{trials} random problems checked")
    if failed:
        raise SystemExit(1)


@kernels_group.command("count")
@click.option("--method", type=click.Choice(MULT_METHODS), required=True)
@click.option("--out-size", type=int, default=None,
              help="Square output extent of the convolution.")
@click.option("--filter-size", type=int, default=None,
              help="Square filter extent of the convolution.")
@click.option("--matrix-size", type=int, default=None,
              help="Square matrix extent (strassen only).")
def kernels_count_cmd(method, out_size, filter_size, matrix_size):
    """Scalar multiplication count of one method at one problem size."""
    try:
        mc = mult_count(method, out_size=out_size, filter_size=filter_size,
                        matrix_size=matrix_size)
    except ValueError as exc:
        _fail(str(exc))
    params = "  ".join(f"{k} {v}" for k, v in mc.params.items())
    click.echo(f"{mc.method}: {mc.count} multiplications  ({params})")
    if mc.method in ("fft", "winograd"):
        direct = mult_count("direct", out_size=out_size,
                            filter_size=filter_size).count
        click.echo(f"direct: {direct} multiplications  "
                   f"ratio {mc.count / direct:.3f}")


@main.command("compress")
@click.option("--n", "length", type=int, default=4096, show_default=True,
              help="Synthetic stream length.")
@click.option("--sparsity", type=float, default=0.7, show_default=True,
              help="Zero fraction of the synthetic stream.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--encode", "encode_path", type=str, default=None,
              help="Encode a text file of words (whitespace separated).")
@click.option("--decode", "decode_path", type=str, default=None,
              help="Decode a packed binary file.")
@click.option("--out", "out_path", type=str, default=None,
              help="Output path (required for --encode).")
def compress_cmd(length, sparsity, seed, encode_path, decode_path, out_path):
    """Run-length compression of sparse 16-bit streams."""
    if encode_path is not None and decode_path is not None:
        raise click.UsageError("give at most one of --encode or --decode")
    if encode_path is not None and out_path is None:
        raise click.UsageError("--encode needs --out for the packed stream")
    try:
        if encode_path is not None:
            with open(encode_path, encoding="utf-8") as fh:
                words = [int(token) for token in fh.read().split()]
            data = rle_encode(words)
            with open(out_path, "wb") as fh:
                fh.write(data)
            click.echo(f"{len(words)} words -> {len(data)} bytes "
                       f"({rle_pair_count(words)} pairs)")
            click.echo(f"compression ratio {compression_ratio(words):.3f}")
            return
        if decode_path is not None:
            with open(decode_path, "rb") as fh:
                data = fh.read()
            words = rle_decode(data)
            text = "".join(f"{word}\n" for word in words)
            _emit(text, out_path)
            if out_path is not None:
                click.echo(f"{len(data)} bytes -> {len(words)} words")
            return
        if length < 1:
            _fail(f"--n must be >= 1, got {length}")
        if not 0.0 <= sparsity <= 1.0:
            _fail(f"--sparsity must be in [0, 1], got {sparsity}")
        rng = np.random.default_rng(seed)
        values = rng.integers(1, MAX_VALUE + 1, size=length)
        zero = rng.random(length) < sparsity
        words = [0 if z else int(v) for z, v in zip(zero, values)]
        data = rle_encode(words)
        st = sparse_stats(words)
        click.echo(f"elements {st.elements}  zeros {st.zeros}  "
                   f"density {st.density:.3f}")
        click.echo(f"pairs {rle_pair_count(words)}  packed bytes {len(data)}")
        click.echo(f"compression ratio {compression_ratio(words):.3f}")
        if rle_decode(data) != words:
            click.echo("round trip FAILED")
            raise SystemExit(1)
        click.echo("round trip ok")
    except (CodecError, OSError, ValueError) as exc:
        _fail(str(exc))


@main.command("prune")
@_network_options
@click.option("--fraction", type=float, default=0.5, show_default=True,
              help="Fraction of multiplicative weights to zero.")
@click.option("--order", type=click.Choice(("magnitude", "energy")),
              default="magnitude", show_default=True,
              help="Global magnitude competition, or drain the most "
                   "energy-hungry layers first.")
@click.option("--arch", "arch_path", type=str, default=None,
              help="Hardware description used for energy ordering.")
@click.option("--seed", type=int, default=0, show_default=True)
@_report_options
def prune_cmd(builtin_name, net_path, batch, fraction, order, arch_path, seed,
              fmt, out_path):
    """Prune synthetic weights for a network and report layer densities."""
    net = _load_network(builtin_name, net_path, batch)
    weighted = [layer for layer in net.layers if layer.kind in ("conv", "fc")]
    if not weighted:
        _fail(f"network {net.name!r} has no weighted layers")
    rng = np.random.default_rng(seed)
    weights = {layer.name: rng.standard_normal(layer_stats(layer).dw)
               for layer in weighted}
    ranking = None
    if order == "energy":
        arch = _load_arch(arch_path)
        try:
            reports, _ = network_energy(net, DataflowKind.RS, arch, Modifiers())
        except (ValueError, OverflowError) as exc:
            _fail(str(exc))
        ranking = {rep.layer: rep.total / weights[rep.layer].size
                   for rep in reports}
    try:
        pruned = prune_network(weights, fraction, order=ranking)
    except ValueError as exc:
        _fail(str(exc))

    entries = []
    for layer in weighted:
        _, mask = pruned[layer.name]
        kept = int(mask.sum())
        entries.append((layer.name, mask.size, kept, kept / mask.size))
    total_size = sum(size for _, size, _, _ in entries)
    total_kept = sum(kept for _, _, kept, _ in entries)
    totals = ("total", total_size, total_kept, total_kept / total_size)

    headers = ("layer", "weights", "kept", "density")
    if fmt == "json":
        obj = {
            "network": net.name,
            "fraction": fraction,
            "order": order,
            "seed": seed,
            "layers": [
                {"layer": name, "weights": size, "kept": kept, "density": dens}
                for name, size, kept, dens in entries
            ],
            "total": {"weights": total_size, "kept": total_kept,
                      "density": total_kept / total_size},
        }
        _emit(_render_json(obj), out_path)
    elif fmt == "csv":
        _emit(_render_csv(headers, entries + [totals]), out_path)
    else:
        rows = [(name, size, kept, f"{dens:.3f}")
                for name, size, kept, dens in entries + [totals]]
        title = (f"{net.name}  fraction {fraction}  order {order}  "
                 f"seed {seed}")
        _emit(_render_table(headers, rows, title=title), out_path)


if __name__ == "__main__":
    main()
