import io

import numpy as np
import pytest

from xposit import bench as B
from xposit._backend import kernels
from xposit.isa import Instruction
from xposit.sim import Machine, gemm_program


def test_gen_inputs_deterministic_and_bounded():
    a1, b1 = B.gen_inputs(64, 2, 123)
    a2, b2 = B.gen_inputs(64, 2, 123)
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    assert np.abs(a1).max() <= 100 and np.abs(b1).max() <= 100
    assert not np.array_equal(a1, B.gen_inputs(64, 2, 124)[0])


def test_gen_inputs_mean():
    a, b = B.gen_inputs(256, 0, 1)
    sigma = 1 / np.sqrt(3) / np.sqrt(a.size)
    assert abs(a.mean()) < 3 * sigma and abs(b.mean()) < 3 * sigma


@pytest.mark.parametrize("fmt", B.GEMM_FORMATS)
def test_identity_and_ones(fmt):
    a = np.round(B.gen_inputs(8, 1, 0)[0])
    eye = np.eye(8)
    assert np.array_equal(B.gemm(eye, a, fmt), a)
    assert np.array_equal(B.gemm(np.ones((2, 2)), np.ones((2, 2)), fmt), np.full((2, 2), 2.0))


def test_bad_inputs():
    with pytest.raises(ValueError):
        B.gemm(np.ones((2, 3)), np.ones((2, 3)), "f64")
    with pytest.raises(ValueError):
        B.gemm(np.ones((2, 2)), np.ones((2, 2)), "bfloat16")


def test_mse():
    x = np.arange(12.0).reshape(3, 4)
    assert B.mse(x, x) == 0
    assert B.mse(x + 0.5, x) == 0.25
    with pytest.raises(ValueError):
        B.mse(x, x.T)


def test_quire_gemm_equals_simulator_16():
    n = 16
    a, b = B.gen_inputs(n, 0, 42)
    pa, pb = kernels.from_f64_array(a), kernels.from_f64_array(b)
    words, regs = gemm_program(n, 0x1000, 0x2000, 0x3000)
    m = Machine(mem_size=0x4000)
    for r, v in regs.items():
        m.set_x(r, v)
    m.write_mem(0x1000, pa.astype("<u4").tobytes())
    m.write_mem(0x2000, pb.astype("<u4").tobytes())
    assert m.run(words).status == "completed"
    c = np.frombuffer(m.read_mem(0x3000, 4 * n * n), "<u4").reshape(n, n)
    assert np.array_equal(c, kernels.gemm_posit_quire(pa, pb))
    assert np.array_equal(kernels.to_f64_array(c), B.gemm(a, b, "posit32_quire"))


def test_quire_beats_noquire_small():
    rows = B.run_gemm([32], [0], [0, 1], ["posit32_quire", "posit32_noquire"])
    g = {r.format: r.mse for r in rows if r.seed == "geomean"}
    assert g["posit32_quire"] < g["posit32_noquire"]


def test_report_shape():
    assert B.report([]) == ",".join(B.CSV_COLUMNS) + "\n"
    rows = B.run_gemm([4, 8], [0], [7], ["f64", "f32_fused"])
    lines = B.report(rows).splitlines()
    assert len(lines) == 1 + 4
    assert [ln.split(",")[:4] for ln in lines[1:]] == [
        ["gemm", "4", "0", "f64"], ["gemm", "4", "0", "f32_fused"],
        ["gemm", "8", "0", "f64"], ["gemm", "8", "0", "f32_fused"]]


def test_report_geomean_rows_and_determinism():
    cfg = ([8], [-1, 1], [3, 4], ["posit32_quire", "f32_nofused"])
    rows1, rows2 = B.run_gemm(*cfg), B.run_gemm(*cfg)
    assert [r.mse for r in rows1] == [r.mse for r in rows2]
    assert [r.seed for r in rows1[:3]] == [3, 4, "geomean"]
    assert rows1[2].mse == pytest.approx(np.sqrt(rows1[0].mse * rows1[1].mse))
    buf = io.StringIO()
    B.write_csv(rows1, buf)
    assert buf.getvalue().count("\n") == 1 + len(rows1)


def test_geomean():
    assert B.geomean([1e-4, 1e-2]) == pytest.approx(1e-3)
    assert B.geomean([0.0, 1.0]) == 0.0


@pytest.mark.parametrize("name,out", [
    ("lenet5", (14, 14, 6)), ("alexnet", (26, 26, 96)), ("resnet50", (55, 55, 64))])
def test_layer_shapes(name, out):
    layer = B.LAYERS[name]
    assert layer.out_shape() == out
    x = np.random.default_rng(0).uniform(-1, 1, layer.shape)
    for fmt in B.MAXPOOL_FORMATS:
        assert B.maxpool(x, layer.kernel, layer.stride, fmt).shape == out


def test_maxpool_values():
    x = np.full((6, 6, 2), 3.25)
    for fmt in B.MAXPOOL_FORMATS:
        assert np.all(B.as_f64(B.maxpool(x, 2, 2, fmt), fmt) == 3.25)
    x = np.arange(16.0).reshape(4, 4, 1)
    assert B.maxpool(x, 2, 2, "f64")[..., 0].tolist() == [[5, 7], [13, 15]]
    y = np.random.default_rng(3).uniform(-50, 50, (9, 9, 3))
    p = B.maxpool(y, 3, 2, "posit32")
    assert np.array_equal(p, kernels.from_f64_array(B.maxpool(y, 3, 2, "f64")))
    with pytest.raises(ValueError):
        B.maxpool(np.ones((2, 2, 1)), 3, 1)


def test_maxpool_negative_values_posit():
    x = -np.arange(1.0, 17.0).reshape(4, 4, 1)
    p = B.maxpool(x, 2, 2, "posit32")
    assert B.as_f64(p, "posit32")[..., 0].tolist() == [[-1, -3], [-9, -11]]


def test_check_layers_clean():
    for name in B.LAYERS:
        assert B.check_maxpool_layer(name) == []


def test_check_gemm_flags_violation():
    rows = [B.Row("gemm", "16", 0, "posit32_quire", 0, 1.0, 1),
            B.Row("gemm", "16", 0, "posit32_noquire", 0, 0.5, 1)]
    assert any("quire" in msg for msg in B.check_gemm(rows))


def test_run_maxpool_rows():
    rows = B.run_maxpool(["lenet5"], [0, 3], [0])
    assert len(rows) == 2 * 3
    assert all(r.size_or_shape == "28x28x6" for r in rows)
    assert {r.format: r.mse for r in rows if r.range_exp == 0}["f64"] == 0


def test_instruction_unit_for_pool():
    # the pooled max is the ALU's PMAX
    assert Instruction("PMAX.S").unit.name == "ALU"
