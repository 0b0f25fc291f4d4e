"""Command-line entry point: assembler, disassembler, simulator and benchmarks."""

from __future__ import annotations

import re
import sys
from pathlib import Path

import click

from . import bench as B
from .isa import AsmError, assemble, disassemble, from_bytes, to_bytes
from .sim import Machine


def _read(path: str, binary: bool):
    try:
        return Path(path).read_bytes() if binary else Path(path).read_text()
    except OSError as exc:
        raise click.ClickException(f"{path}: {exc.strerror or exc}")


def _write(path: str, data) -> None:
    try:
        if isinstance(data, bytes):
            Path(path).write_bytes(data)
        else:
            Path(path).write_text(data)
    except OSError as exc:
        raise click.ClickException(f"{path}: {exc.strerror or exc}")


@click.group()
def main() -> None:
    """Posit arithmetic and Xposit instruction tools."""


@main.command()
@click.argument("source")
@click.option("-o", "--output", required=True, help="Output binary (little-endian words).")
def asm(source: str, output: str) -> None:
    """Assemble SOURCE into a flat binary."""
    try:
        words = assemble(_read(source, binary=False))
    except AsmError as exc:
        raise click.ClickException(f"{source}:{exc.line}:{exc.column}: {exc.message}")
    _write(output, to_bytes(words))


@main.command()
@click.argument("binary")
@click.option("--fmt-lenient", is_flag=True, help="Also accept fmt=01 in bits 26:25.")
def disasm(binary: str, fmt_lenient: bool) -> None:
    """Print the instructions in BINARY, one per line."""
    data = _read(binary, binary=True)
    if len(data) % 4:
        raise click.ClickException(f"{binary}: length {len(data)} is not a multiple of 4")
    warnings: list[str] = []
    click.echo(disassemble(from_bytes(data), fmt_lenient, warnings), nl=False)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)


_SET_RE = re.compile(r"^([xp])(\d+)=(.+)$")


def _parse_sets(items, machine: Machine) -> None:
    for item in items:
        m = _SET_RE.match(item.strip())
        if not m or int(m.group(2)) > 31:
            raise click.BadParameter(f"{item!r}: expected xN=<int> or pN=<bits|float>", param_hint="--set")
        kind, idx, raw = m.group(1), int(m.group(2)), m.group(3)
        try:
            value = int(raw, 0)
        except ValueError:
            if kind == "x":
                raise click.BadParameter(f"{item!r}: integer required", param_hint="--set")
            from .convert import from_float
            try:
                value = from_float(float(raw))
            except ValueError:
                raise click.BadParameter(f"{item!r}: not a number", param_hint="--set")
        (machine.set_x if kind == "x" else machine.set_p)(idx, value)


@main.command()
@click.argument("program")
@click.option("--mem-init", help="Raw bytes loaded at address 0.")
@click.option("--mem-size", type=int, default=1 << 20, show_default=True)
@click.option("--dump-regs", is_flag=True, help="Print registers and quire after the run.")
@click.option("--trace", "trace_path", help="Write a JSON-lines trace here.")
@click.option("--max-steps", type=int, default=None)
@click.option("--set", "sets", multiple=True, help="Preset a register, e.g. x2=0x100 or p1=2.5.")
@click.option("--fmt-lenient", is_flag=True)
def run(program: str, mem_init: str | None, mem_size: int, dump_regs: bool, trace_path: str | None,
        max_steps: int | None, sets, fmt_lenient: bool) -> None:
    """Execute PROGRAM on a fresh machine."""
    data = _read(program, binary=True)
    if len(data) % 4:
        raise click.ClickException(f"{program}: length {len(data)} is not a multiple of 4")
    machine = Machine(mem_size=mem_size, fmt_lenient=fmt_lenient)
    if mem_init:
        init = _read(mem_init, binary=True)
        if len(init) > mem_size:
            raise click.ClickException(f"{mem_init}: {len(init)} bytes exceed memory size {mem_size}")
        machine.write_mem(0, init)
    _parse_sets(sets, machine)
    result = machine.run(from_bytes(data), max_steps)
    if trace_path:
        _write(trace_path, "".join(e.to_json() + "\n" for e in result.trace))
    if dump_regs:
        click.echo(machine.dump_regs())
    click.echo(f"{result.status} after {result.steps} steps", err=True)
    if result.status == "halted":
        click.echo(f"fault: {result.fault}", err=True)
        sys.exit(1)
    if result.status == "max_steps":
        sys.exit(2)


@main.group("bench")
def bench_group() -> None:
    """Accuracy benchmarks against float64 references."""


def _int_list(text: str) -> list[int]:
    """Parse '16,32' or '-1..3' (inclusive) or a mix of both."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", part)
        try:
            if m:
                lo, hi = int(m.group(1)), int(m.group(2))
                out.extend(range(lo, hi + 1) if lo <= hi else range(lo, hi - 1, -1))
            else:
                out.append(int(part))
        except ValueError:
            raise click.BadParameter(f"{part!r} is not an integer or a lo..hi range")
    return out


def _formats(text: str, known) -> list[str]:
    if text == "all":
        return list(known)
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    for f in fmts:
        if f not in known:
            raise click.BadParameter(f"unknown format {f!r}; choose from {', '.join(known)} or all")
    return fmts


def _emit(rows, csv_path: str | None) -> None:
    text = B.report(rows)
    if csv_path:
        _write(csv_path, text)
    else:
        click.echo(text, nl=False)


@bench_group.command("gemm")
@click.option("--sizes", default="16,32,64,128,256", show_default=True)
@click.option("--ranges", default="-1..3", show_default=True, help="Exponents i of [-10^i, 10^i].")
@click.option("--seeds", type=click.IntRange(0), default=10, show_default=True)
@click.option("--seed-base", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--formats", default="all", show_default=True)
@click.option("--csv", "csv_path", help="Write CSV here instead of stdout.")
@click.option("--check", is_flag=True, help="Exit nonzero if an accuracy invariant fails.")
def bench_gemm(sizes, ranges, seeds, seed_base, formats, csv_path, check) -> None:
    """Square GEMM MSE in each arithmetic format."""
    size_list = _int_list(sizes)
    if any(n < 1 for n in size_list):
        raise click.BadParameter("sizes must be positive", param_hint="--sizes")
    seed_list = [(seed_base + i) % 2**64 for i in range(seeds)]
    rows = B.run_gemm(size_list, _int_list(ranges), seed_list, _formats(formats, B.GEMM_FORMATS))
    _emit(rows, csv_path)
    if check:
        bad = B.check_gemm(rows)
        for msg in bad:
            click.echo(f"invariant violated: {msg}", err=True)
        if bad:
            sys.exit(1)


@bench_group.command("maxpool")
@click.option("--layer", "layers", multiple=True, type=click.Choice(sorted(B.LAYERS)),
              help="Layer shape; repeat for several (default all).")
@click.option("--ranges", default="0", show_default=True)
@click.option("--seeds", type=click.IntRange(0), default=1, show_default=True)
@click.option("--seed-base", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--formats", default="all", show_default=True)
@click.option("--csv", "csv_path")
@click.option("--check", is_flag=True)
def bench_maxpool(layers, ranges, seeds, seed_base, formats, csv_path, check) -> None:
    """Max-pooling error per layer shape."""
    names = list(layers) or list(B.LAYERS)
    seed_list = [(seed_base + i) % 2**64 for i in range(seeds)]
    range_list = _int_list(ranges)
    rows = B.run_maxpool(names, range_list, seed_list, _formats(formats, B.MAXPOOL_FORMATS))
    _emit(rows, csv_path)
    if check:
        bad = [m for name in names for s in seed_list for r in range_list
               for m in B.check_maxpool_layer(name, s, r)]
        for msg in bad:
            click.echo(f"invariant violated: {msg}", err=True)
        if bad:
            sys.exit(1)


if __name__ == "__main__":
    main()
