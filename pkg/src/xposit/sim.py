"""Straight-line instruction-set simulator for Xposit programs.

The machine has 32 64-bit integer registers (x0 reads as zero), 32 Posit32
registers, a single quire and a flat little-endian byte memory. There is no
RV64I control flow: programs run from word 0 to the end, and loops are either
unrolled or driven from the host through the accessors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from . import approx, convert
from . import posit as P
from .isa import IllegalInstruction, Instruction, decode_instr, format_instruction
from .quire import Quire

XMASK = (1 << 64) - 1
N = 32


class MemoryFault(Exception):
    pass


@dataclass
class TraceEntry:
    pc: int
    word: int
    text: str
    writes: list[tuple[str, int]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "pc": self.pc,
            "word": f"0x{self.word:08X}",
            "mnemonic": self.text,
            "writes": [{"dest": d, "value": f"0x{v:X}"} for d, v in self.writes],
        })


@dataclass
class RunResult:
    status: str  # "completed", "halted" or "max_steps"
    steps: int
    trace: list[TraceEntry]
    fault: str | None = None


def _sext32(v: int) -> int:
    v &= 0xFFFFFFFF
    return (v | (XMASK ^ 0xFFFFFFFF)) if v >> 31 else v


class Machine:
    def __init__(self, mem_size: int = 1 << 20, fmt_lenient: bool = False):
        self.xregs = [0] * 32
        self.pregs = [0] * 32
        self.quire = Quire(N)
        self.mem = bytearray(mem_size)
        self.pc = 0
        self.halted = False
        self.fault: str | None = None
        self.fmt_lenient = fmt_lenient

    # -- host accessors --------------------------------------------------

    def get_x(self, i: int) -> int:
        return 0 if i == 0 else self.xregs[i]

    def set_x(self, i: int, value: int) -> None:
        if i:
            self.xregs[i] = value & XMASK

    def get_p(self, i: int) -> int:
        return self.pregs[i]

    def set_p(self, i: int, bits: int) -> None:
        self.pregs[i] = bits & 0xFFFFFFFF

    def read_mem(self, addr: int, size: int) -> bytes:
        if addr < 0 or addr + size > len(self.mem):
            raise MemoryFault(f"access of {size} bytes at 0x{addr:X} outside memory")
        return bytes(self.mem[addr:addr + size])

    def write_mem(self, addr: int, data: bytes) -> None:
        if addr < 0 or addr + len(data) > len(self.mem):
            raise MemoryFault(f"access of {len(data)} bytes at 0x{addr:X} outside memory")
        self.mem[addr:addr + len(data)] = data

    def read_word(self, addr: int) -> int:
        return int.from_bytes(self.read_mem(addr, 4), "little")

    def write_word(self, addr: int, value: int) -> None:
        self.write_mem(addr, (value & 0xFFFFFFFF).to_bytes(4, "little"))

    # -- execution -------------------------------------------------------

    def _wx(self, rd: int, value: int, writes: list) -> None:
        self.set_x(rd, value)
        writes.append((f"x{rd}", self.get_x(rd)))

    def _wp(self, rd: int, bits: int, writes: list) -> None:
        self.set_p(rd, bits)
        writes.append((f"p{rd}", self.pregs[rd]))

    def execute(self, ins: Instruction) -> list[tuple[str, int]]:
        """Apply one decoded instruction; returns the architectural writes."""
        m = ins.mnemonic
        writes: list[tuple[str, int]] = []
        p = self.pregs
        a, b = p[ins.rs1], p[ins.rs2]
        if m == "PLW":
            addr = (self.get_x(ins.rs1) + ins.imm) & XMASK
            self._wp(ins.rd, self.read_word(addr), writes)
        elif m == "PSW":
            addr = (self.get_x(ins.rs1) + ins.imm) & XMASK
            self.write_word(addr, b)
            writes.append((f"mem[0x{addr:X}]", b))
        elif m in _BINARY:
            self._wp(ins.rd, _BINARY[m](a, b), writes)
        elif m == "PSQRT.S":
            self._wp(ins.rd, approx.asqrt(a, N), writes)
        elif m in ("QMADD.S", "QMSUB.S"):
            (self.quire.qmadd if m == "QMADD.S" else self.quire.qmsub)(a, b)
            writes.append(("quire", self.quire.acc & ((1 << 512) - 1)))
        elif m == "QCLR.S":
            self.quire.qclr()
            writes.append(("quire", 0))
        elif m == "QNEG.S":
            self.quire.qneg()
            writes.append(("quire", self.quire.acc & ((1 << 512) - 1)))
        elif m == "QROUND.S":
            self._wp(ins.rd, self.quire.qround(), writes)
        elif m in _TO_INT:
            target = _TO_INT[m]
            v = convert.posit_to_int(a, target, N)
            self._wx(ins.rd, _sext32(v) if target in ("i32", "u32") else v, writes)
        elif m in _FROM_INT:
            self._wp(ins.rd, convert.int_to_posit(self.get_x(ins.rs1), _FROM_INT[m], N), writes)
        elif m == "PMV.X.W":
            self._wx(ins.rd, convert.pmv_x_w(a, N), writes)
        elif m == "PMV.W.X":
            self._wp(ins.rd, convert.pmv_w_x(self.get_x(ins.rs1), N), writes)
        elif m in _COMPARE:
            self._wx(ins.rd, int(_COMPARE[m](a, b, N)), writes)
        else:  # pragma: no cover - every mnemonic is dispatched above
            raise IllegalInstruction(0, f"no semantics for {m}")
        return writes

    def step(self, program: Sequence[int]) -> TraceEntry | None:
        """Run the instruction at pc. Returns None once halted or past the end."""
        if self.halted or self.pc >= len(program):
            return None
        word = program[self.pc]
        entry = TraceEntry(self.pc, word, f".word 0x{word:08X}")
        try:
            ins = decode_instr(word, self.fmt_lenient)
            entry.text = format_instruction(ins)
            entry.writes = self.execute(ins)
        except (IllegalInstruction, MemoryFault) as exc:
            self.halted = True
            self.fault = f"pc {self.pc}: {exc}"
            return entry
        self.pc += 1
        return entry

    def run(self, program: Sequence[int], max_steps: int | None = None) -> RunResult:
        trace: list[TraceEntry] = []
        steps = 0
        while not self.halted and self.pc < len(program):
            if max_steps is not None and steps >= max_steps:
                return RunResult("max_steps", steps, trace)
            entry = self.step(program)
            trace.append(entry)
            steps += 1
        status = "halted" if self.halted else "completed"
        return RunResult(status, steps, trace, self.fault)

    def dump_regs(self) -> str:
        lines = []
        for i in range(32):
            lines.append(f"x{i:<2} = 0x{self.get_x(i):016X}    p{i:<2} = 0x{self.pregs[i]:08X}"
                         f"  ({P.to_float(self.pregs[i], N)!r})")
        lines.append(f"quire = {self.quire.hex()}")
        return "\n".join(lines)


_BINARY = {
    "PADD.S": lambda a, b: P.add(a, b, N),
    "PSUB.S": lambda a, b: P.sub(a, b, N),
    "PMUL.S": lambda a, b: P.mul(a, b, N),
    "PDIV.S": lambda a, b: approx.adiv(a, b, N),
    "PMIN.S": lambda a, b: P.pmin(a, b, N),
    "PMAX.S": lambda a, b: P.pmax(a, b, N),
    "PSGNJ.S": lambda a, b: P.sign_inject(a, b, "j", N),
    "PSGNJN.S": lambda a, b: P.sign_inject(a, b, "jn", N),
    "PSGNJX.S": lambda a, b: P.sign_inject(a, b, "jx", N),
}
_TO_INT = {"PCVT.W.S": "i32", "PCVT.WU.S": "u32", "PCVT.L.S": "i64", "PCVT.LU.S": "u64"}
_FROM_INT = {"PCVT.S.W": "i32", "PCVT.S.WU": "u32", "PCVT.S.L": "i64", "PCVT.S.LU": "u64"}
_COMPARE = {"PEQ.S": P.peq, "PLT.S": P.plt, "PLE.S": P.ple}


def gemm_program(n: int, a_addr: int, b_addr: int, c_addr: int) -> tuple[list[int], dict[int, int]]:
    """Unrolled posit-quire GEMM for row-major n x n Posit32 matrices.

    Returns the program words and the integer registers the host must preset
    (one base register per 2 KiB window of each matrix).
    """
    from .isa import encode_instr

    regs: dict[int, int] = {}
    bases: dict[tuple[int, int], int] = {}

    def ref(base_addr: int, index: int) -> tuple[int, int]:
        offset = 4 * index
        window = offset // 2048
        key = (base_addr, window)
        if key not in bases:
            reg = len(regs) + 1
            if reg > 31:
                raise ValueError(f"n={n} needs more than 31 base registers")
            regs[reg] = base_addr + 2048 * window
            bases[key] = reg
        return bases[key], offset - 2048 * window

    words = []
    for i in range(n):
        for j in range(n):
            words.append(encode_instr(Instruction("QCLR.S")))
            for k in range(n):
                ra, oa = ref(a_addr, i * n + k)
                rb, ob = ref(b_addr, k * n + j)
                words.append(encode_instr(Instruction("PLW", rd=0, rs1=ra, imm=oa)))
                words.append(encode_instr(Instruction("PLW", rd=1, rs1=rb, imm=ob)))
                words.append(encode_instr(Instruction("QMADD.S", rs1=0, rs2=1)))
            words.append(encode_instr(Instruction("QROUND.S", rd=2)))
            rc, oc = ref(c_addr, i * n + j)
            words.append(encode_instr(Instruction("PSW", rs2=2, rs1=rc, imm=oc)))
    return words, regs
