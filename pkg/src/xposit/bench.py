"""GEMM and max-pooling accuracy benchmarks: posits against IEEE 754.

Inputs are drawn as float64, uniform on [-10**i, 10**i], then converted to
each format. Every result is converted back to float64 and compared with a
float64 fused-multiply-add GEMM of the original inputs.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._backend import kernels

GEMM_FORMATS = ("posit32_quire", "posit32_noquire", "f32_fused", "f32_nofused", "f64")
MAXPOOL_FORMATS = ("posit32", "f32", "f64")
DEFAULT_SIZES = (16, 32, 64, 128, 256)
DEFAULT_RANGES = (-1, 0, 1, 2, 3)
CSV_COLUMNS = ("kind", "size_or_shape", "range_exp", "format", "seed", "mse", "wall_ns")


@dataclass(frozen=True)
class Layer:
    shape: tuple[int, int, int]
    kernel: int
    stride: int

    def out_shape(self) -> tuple[int, int, int]:
        h, w, c = self.shape
        return ((h - self.kernel) // self.stride + 1, (w - self.kernel) // self.stride + 1, c)


LAYERS = {
    "lenet5": Layer((28, 28, 6), 2, 2),
    "alexnet": Layer((54, 54, 96), 3, 2),
    "resnet50": Layer((112, 112, 64), 3, 2),
}


@dataclass
class Row:
    kind: str
    size_or_shape: str
    range_exp: int
    format: str
    seed: int | str
    mse: float
    wall_ns: int | None

    def cells(self) -> list[str]:
        return [self.kind, self.size_or_shape, str(self.range_exp), self.format, str(self.seed),
                repr(float(self.mse)), "" if self.wall_ns is None else str(self.wall_ns)]


def gen_inputs(n: int, range_exp: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    lim = 10.0 ** range_exp
    return rng.uniform(-lim, lim, (n, n)), rng.uniform(-lim, lim, (n, n))


def golden(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return kernels.gemm_f64(a, b, fused=True)


def gemm(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    """Multiply float64 inputs in ``fmt``; returns the result as float64."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    if fmt == "posit32_quire":
        c = kernels.gemm_posit_quire(kernels.from_f64_array(a), kernels.from_f64_array(b))
        return kernels.to_f64_array(c)
    if fmt == "posit32_noquire":
        c = kernels.gemm_posit_noquire(kernels.from_f64_array(a), kernels.from_f64_array(b))
        return kernels.to_f64_array(c)
    if fmt in ("f32_fused", "f32_nofused"):
        c = kernels.gemm_f32(a.astype(np.float32), b.astype(np.float32), fused=fmt == "f32_fused")
        return c.astype(np.float64)
    if fmt == "f64":
        return kernels.gemm_f64(a, b, fused=True)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(GEMM_FORMATS)}")


def mse(result: np.ndarray, ref: np.ndarray) -> float:
    result = np.asarray(result, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if result.shape != ref.shape:
        raise ValueError(f"shape mismatch {result.shape} vs {ref.shape}")
    return float(np.mean((result - ref) ** 2))


def _pool(x: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    win = sliding_window_view(x, (kernel, kernel), axis=(0, 1))[::stride, ::stride]
    return win.max(axis=(-2, -1))


def maxpool(x: np.ndarray, kernel: int, stride: int, fmt: str = "f64") -> np.ndarray:
    """Max-pool an HxWxC float64 tensor in ``fmt``.

    The result stays in the format's own representation: uint32 patterns for
    posit32, float32 or float64 otherwise. Posit windows are reduced by
    signed comparison of the raw patterns.
    """
    if x.ndim != 3 or x.shape[0] < kernel or x.shape[1] < kernel or kernel < 1 or stride < 1:
        raise ValueError(f"cannot pool shape {x.shape} with kernel {kernel}, stride {stride}")
    if fmt == "posit32":
        bits = kernels.from_f64_array(x).view(np.int32)
        return _pool(bits, kernel, stride).view(np.uint32)
    if fmt == "f32":
        return _pool(x.astype(np.float32), kernel, stride)
    if fmt == "f64":
        return _pool(np.asarray(x, dtype=np.float64), kernel, stride)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(MAXPOOL_FORMATS)}")


def as_f64(result: np.ndarray, fmt: str) -> np.ndarray:
    if fmt.startswith("posit"):
        return kernels.to_f64_array(result)
    return np.asarray(result, dtype=np.float64)


def geomean(values: Sequence[float]) -> float:
    if any(v == 0 for v in values):
        return 0.0
    return math.exp(sum(math.log(v) for v in values) / len(values))


def _with_geomeans(rows: list[Row], nseeds: int) -> list[Row]:
    if nseeds < 2:
        return rows
    out: list[Row] = []
    for i in range(0, len(rows), nseeds):
        group = rows[i:i + nseeds]
        out.extend(group)
        r = group[0]
        out.append(Row(r.kind, r.size_or_shape, r.range_exp, r.format, "geomean",
                       geomean([g.mse for g in group]), None))
    return out


def run_gemm(sizes: Iterable[int], ranges: Iterable[int], seeds: Sequence[int],
             formats: Sequence[str] = GEMM_FORMATS, summary: bool = True) -> list[Row]:
    """Per-seed rows ordered by size, range, format, seed, each cell followed by its geomean."""
    for f in formats:
        if f not in GEMM_FORMATS:
            raise ValueError(f"unknown format {f!r}")
    sizes, ranges = list(sizes), list(ranges)
    cells: dict[tuple[int, int, str], list[Row]] = {}
    for n in sizes:
        for r in ranges:
            for seed in seeds:
                a, b = gen_inputs(n, r, seed)
                ref = golden(a, b)
                for f in formats:
                    t0 = time.perf_counter_ns()
                    c = gemm(a, b, f)
                    dt = time.perf_counter_ns() - t0
                    cells.setdefault((n, r, f), []).append(
                        Row("gemm", str(n), r, f, seed, mse(c, ref), dt))
    rows = [row for n in sizes for r in ranges for f in formats for row in cells.get((n, r, f), [])]
    return _with_geomeans(rows, len(seeds)) if summary else rows


def run_maxpool(layers: Iterable[str], ranges: Iterable[int], seeds: Sequence[int],
                formats: Sequence[str] = MAXPOOL_FORMATS, summary: bool = True) -> list[Row]:
    rows: list[Row] = []
    for name in layers:
        layer = LAYERS[name]
        shape = "x".join(map(str, layer.shape))
        for r in ranges:
            for f in formats:
                for seed in seeds:
                    lim = 10.0 ** r
                    x = np.random.default_rng(seed).uniform(-lim, lim, layer.shape)
                    ref = maxpool(x, layer.kernel, layer.stride, "f64")
                    t0 = time.perf_counter_ns()
                    y = maxpool(x, layer.kernel, layer.stride, f)
                    dt = time.perf_counter_ns() - t0
                    rows.append(Row("maxpool", shape, r, f, seed, mse(as_f64(y, f), ref), dt))
    return _with_geomeans(rows, len(seeds)) if summary else rows


def write_csv(rows: Iterable[Row], out: io.TextIOBase) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(row.cells())


def report(rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def check_gemm(rows: Sequence[Row]) -> list[str]:
    """Invariant violations across GEMM cells, judged on per-cell geometric means."""
    cell: dict[tuple[int, int], dict[str, list[float]]] = {}
    for row in rows:
        if row.kind == "gemm" and row.seed != "geomean":
            cell.setdefault((int(row.size_or_shape), row.range_exp), {}).setdefault(
                row.format, []).append(row.mse)
    g = {k: {f: geomean(v) for f, v in fm.items()} for k, fm in cell.items()}
    bad = []
    for (n, r), m in sorted(g.items()):
        where = f"n={n} range_exp={r}"
        if "posit32_quire" in m and "posit32_noquire" in m and not m["posit32_quire"] < m["posit32_noquire"]:
            bad.append(f"{where}: quire MSE {m['posit32_quire']:.3e} not below no-quire "
                       f"{m['posit32_noquire']:.3e}")
        if "f32_fused" in m and "f32_nofused" in m:
            lo, hi = sorted((m["f32_fused"], m["f32_nofused"]))
            if lo == 0 or hi / lo > 10:
                bad.append(f"{where}: fused/unfused f32 MSE differ by more than 10x")
        if r == 3 and "f32_fused" in m:
            if "posit32_noquire" in m and not m["posit32_noquire"] > m["f32_fused"]:
                bad.append(f"{where}: no-quire posit MSE not above f32 at the wide range")
            if "posit32_quire" in m and not m["posit32_quire"] < m["f32_fused"]:
                bad.append(f"{where}: quire posit MSE not below f32 at the wide range")
    sizes = sorted({n for n, _ in g})
    if len(sizes) >= 2:
        for r in sorted({r for _, r in g}):
            lo, hi = g.get((sizes[0], r), {}), g.get((sizes[-1], r), {})
            if all(f in lo and f in hi and lo[f] > 0 for f in ("posit32_quire", "f32_fused")):
                q = hi["posit32_quire"] / lo["posit32_quire"]
                f32 = hi["f32_fused"] / lo["f32_fused"]
                if not q < f32:
                    bad.append(f"range_exp={r}: quire MSE grew {q:.3g}x from n={sizes[0]} to "
                               f"n={sizes[-1]}, f32 only {f32:.3g}x")
    return bad


def check_maxpool_layer(name: str, seed: int = 0, range_exp: int = 0) -> list[str]:
    """Output dims and posit-vs-converted-f64 agreement for one layer."""
    layer = LAYERS[name]
    lim = 10.0 ** range_exp
    x = np.random.default_rng(seed).uniform(-lim, lim, layer.shape)
    bad = []
    ref = maxpool(x, layer.kernel, layer.stride, "f64")
    for f in MAXPOOL_FORMATS:
        y = maxpool(x, layer.kernel, layer.stride, f)
        if y.shape != layer.out_shape():
            bad.append(f"{name} {f}: output shape {y.shape}, expected {layer.out_shape()}")
    p = maxpool(x, layer.kernel, layer.stride, "posit32")
    if p.shape == ref.shape and not np.array_equal(p, kernels.from_f64_array(ref)):
        bad.append(f"{name}: posit max differs from converted f64 max")
    return bad
