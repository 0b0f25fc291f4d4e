"""Xposit instruction encoding, decoding, assembly and disassembly.

Every Xposit instruction lives in the custom-0 major opcode (0b0001011).
funct3 selects the group: 000 computational, 001 PLW, 011 PSW. Computational
words are laid out as::

    funct5[31:27] | fmt[26:25]=10 | rs2 | rs1 | 000 | rd | 0001011

Registers are written ``p0``-``p31`` (posit file) and ``x0``-``x31``
(integer file). The informal ``pt0`` style names used in hand-written
kernels are not accepted.
"""

from __future__ import annotations

import enum
import re
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

OPCODE = 0b0001011
FUNCT3_COMP = 0b000
FUNCT3_LOAD = 0b001
FUNCT3_STORE = 0b011
FMT = 0b10
FMT_ALT = 0b01  # accepted only with fmt_lenient


class IllegalInstruction(ValueError):
    def __init__(self, word: int, reason: str):
        super().__init__(f"illegal instruction 0x{word:08X}: {reason}")
        self.word = word
        self.reason = reason


class AsmError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class Unit(enum.Enum):
    PAU = "PAU"
    ALU = "ALU"
    LOAD = "LOAD"
    STORE = "STORE"


class Form(enum.Enum):
    """Operand shape; letters give register files of (rd, rs1, rs2)."""

    PPP = "rd:p rs1:p rs2:p"
    XPP = "rd:x rs1:p rs2:p"
    PP = "rd:p rs1:p"
    XP = "rd:x rs1:p"
    PX = "rd:p rs1:x"
    Q2 = "rs1:p rs2:p"
    Q0 = ""
    QR = "rd:p"
    LOAD = "rd:p imm(rs1:x)"
    STORE = "rs2:p imm(rs1:x)"


@dataclass(frozen=True)
class OpInfo:
    mnemonic: str
    funct5: int | None
    form: Form
    unit: Unit


_COMP = [
    ("PADD.S", Form.PPP, Unit.PAU),
    ("PSUB.S", Form.PPP, Unit.PAU),
    ("PMUL.S", Form.PPP, Unit.PAU),
    ("PDIV.S", Form.PPP, Unit.PAU),
    ("PMIN.S", Form.PPP, Unit.ALU),
    ("PMAX.S", Form.PPP, Unit.ALU),
    ("PSQRT.S", Form.PP, Unit.PAU),
    ("QMADD.S", Form.Q2, Unit.PAU),
    ("QMSUB.S", Form.Q2, Unit.PAU),
    ("QCLR.S", Form.Q0, Unit.PAU),
    ("QNEG.S", Form.Q0, Unit.PAU),
    ("QROUND.S", Form.QR, Unit.PAU),
    ("PCVT.W.S", Form.XP, Unit.PAU),
    ("PCVT.WU.S", Form.XP, Unit.PAU),
    ("PCVT.L.S", Form.XP, Unit.PAU),
    ("PCVT.LU.S", Form.XP, Unit.PAU),
    ("PCVT.S.W", Form.PX, Unit.PAU),
    ("PCVT.S.WU", Form.PX, Unit.PAU),
    ("PCVT.S.L", Form.PX, Unit.PAU),
    ("PCVT.S.LU", Form.PX, Unit.PAU),
    ("PSGNJ.S", Form.PPP, Unit.PAU),
    ("PSGNJN.S", Form.PPP, Unit.PAU),
    ("PSGNJX.S", Form.PPP, Unit.PAU),
    ("PMV.X.W", Form.XP, Unit.PAU),
    ("PMV.W.X", Form.PX, Unit.PAU),
    ("PEQ.S", Form.XPP, Unit.ALU),
    ("PLT.S", Form.XPP, Unit.ALU),
    ("PLE.S", Form.XPP, Unit.ALU),
]

OPS: dict[str, OpInfo] = {
    "PLW": OpInfo("PLW", None, Form.LOAD, Unit.LOAD),
    "PSW": OpInfo("PSW", None, Form.STORE, Unit.STORE),
}
for _f5, (_name, _form, _unit) in enumerate(_COMP):
    OPS[_name] = OpInfo(_name, _f5, _form, _unit)
BY_FUNCT5 = {op.funct5: op for op in OPS.values() if op.funct5 is not None}
MNEMONICS = tuple(OPS)

_USES = {
    Form.PPP: ("rd", "rs1", "rs2"),
    Form.XPP: ("rd", "rs1", "rs2"),
    Form.PP: ("rd", "rs1"),
    Form.XP: ("rd", "rs1"),
    Form.PX: ("rd", "rs1"),
    Form.Q2: ("rs1", "rs2"),
    Form.Q0: (),
    Form.QR: ("rd",),
    Form.LOAD: ("rd", "rs1"),
    Form.STORE: ("rs2", "rs1"),
}


@dataclass(frozen=True)
class Instruction:
    mnemonic: str
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mnemonic", self.mnemonic.upper())
        if self.mnemonic not in OPS:
            raise ValueError(f"unknown mnemonic {self.mnemonic!r}")

    @property
    def info(self) -> OpInfo:
        return OPS[self.mnemonic]

    @property
    def unit(self) -> Unit:
        return self.info.unit

    def __str__(self) -> str:
        return format_instruction(self)


def _check_reg(name: str, value: int) -> None:
    if not 0 <= value < 32:
        raise ValueError(f"{name} out of range: {value}")


def encode_instr(ins: Instruction) -> int:
    info = ins.info
    used = _USES[info.form]
    for field in ("rd", "rs1", "rs2"):
        value = getattr(ins, field)
        _check_reg(field, value)
        if field not in used and value != 0:
            raise ValueError(f"{ins.mnemonic} has no {field} operand")
    if info.form in (Form.LOAD, Form.STORE):
        if not -2048 <= ins.imm <= 2047:
            raise ValueError(f"offset {ins.imm} outside the signed 12-bit range")
        imm = ins.imm & 0xFFF
        if info.form is Form.LOAD:
            return imm << 20 | ins.rs1 << 15 | FUNCT3_LOAD << 12 | ins.rd << 7 | OPCODE
        return ((imm >> 5) << 25 | ins.rs2 << 20 | ins.rs1 << 15 | FUNCT3_STORE << 12
                | (imm & 0x1F) << 7 | OPCODE)
    if ins.imm:
        raise ValueError(f"{ins.mnemonic} takes no immediate")
    return (info.funct5 << 27 | FMT << 25 | ins.rs2 << 20 | ins.rs1 << 15
            | FUNCT3_COMP << 12 | ins.rd << 7 | OPCODE)


def _sext12(v: int) -> int:
    return v - 0x1000 if v & 0x800 else v


def decode_instr(word: int, fmt_lenient: bool = False) -> Instruction:
    """Inverse of :func:`encode_instr`; raises IllegalInstruction otherwise."""
    if not 0 <= word <= 0xFFFFFFFF:
        raise IllegalInstruction(word & 0xFFFFFFFF, "not a 32-bit word")
    opcode = word & 0x7F
    if opcode != OPCODE:
        raise IllegalInstruction(word, f"opcode {opcode:07b} is not custom-0")
    rd = (word >> 7) & 0x1F
    funct3 = (word >> 12) & 0x7
    rs1 = (word >> 15) & 0x1F
    rs2 = (word >> 20) & 0x1F
    if funct3 == FUNCT3_LOAD:
        return Instruction("PLW", rd=rd, rs1=rs1, imm=_sext12(word >> 20))
    if funct3 == FUNCT3_STORE:
        imm = ((word >> 25) << 5) | rd
        return Instruction("PSW", rs1=rs1, rs2=rs2, imm=_sext12(imm))
    if funct3 != FUNCT3_COMP:
        raise IllegalInstruction(word, f"funct3 {funct3:03b} unassigned")
    fmt = (word >> 25) & 0x3
    if fmt != FMT and not (fmt_lenient and fmt == FMT_ALT):
        raise IllegalInstruction(word, f"fmt {fmt:02b} is not single precision")
    funct5 = word >> 27
    info = BY_FUNCT5.get(funct5)
    if info is None:
        raise IllegalInstruction(word, f"funct5 {funct5:05b} unassigned")
    used = _USES[info.form]
    fields = {"rd": rd, "rs1": rs1, "rs2": rs2}
    for field, value in fields.items():
        if field not in used and value != 0:
            raise IllegalInstruction(word, f"{info.mnemonic} requires {field} = 0")
    return Instruction(info.mnemonic, **fields)


def _reg_files(form: Form) -> dict[str, str]:
    return {part.split(":")[0].replace("imm(", ""): part.split(":")[1].rstrip(")")
            for part in form.value.split()}


def format_instruction(ins: Instruction) -> str:
    info = ins.info
    files = _reg_files(info.form)
    name = ins.mnemonic.lower()
    if info.form is Form.LOAD:
        return f"{name} p{ins.rd}, {ins.imm}(x{ins.rs1})"
    if info.form is Form.STORE:
        return f"{name} p{ins.rs2}, {ins.imm}(x{ins.rs1})"
    ops = [f"{files[f]}{getattr(ins, f)}" for f in _USES[info.form]]
    return f"{name} {', '.join(ops)}" if ops else name


# ---- assembler ---------------------------------------------------------

_REG = re.compile(r"([px])(\d+)$")
_MEM = re.compile(r"(-?(?:0x[0-9a-fA-F]+|\d+))\(\s*([^)\s]+)\s*\)$")


def _parse_reg(tok: str, want: str, line: int, col: int) -> int:
    m = _REG.match(tok.lower())
    if not m or int(m.group(2)) > 31:
        raise AsmError(line, col, f"unknown register {tok!r}")
    if m.group(1) != want:
        kind = "posit" if want == "p" else "integer"
        raise AsmError(line, col, f"expected {kind} register, got {tok!r}")
    return int(m.group(2))


def _parse_int(tok: str, line: int, col: int) -> int:
    try:
        return int(tok, 0)
    except ValueError:
        raise AsmError(line, col, f"malformed integer {tok!r}") from None


def _split_operands(text: str, start: int) -> list[tuple[str, int]]:
    out = []
    pos = start
    for piece in text.split(","):
        stripped = piece.strip()
        col = pos + len(piece) - len(piece.lstrip())
        out.append((stripped, col))
        pos += len(piece) + 1
    return out


def assemble_line(text: str, line: int = 1) -> int | None:
    """Encode one source line; None for blank or comment-only lines."""
    code = text.split("#", 1)[0].rstrip()
    if not code.strip():
        return None
    col0 = len(code) - len(code.lstrip())
    parts = code.strip().split(None, 1)
    mnem = parts[0]
    rest = parts[1] if len(parts) > 1 else ""
    rest_col = code.index(rest, col0 + len(mnem)) if rest else len(code)
    operands = _split_operands(rest, rest_col) if rest else []
    if mnem.lower() == ".word":
        if len(operands) != 1:
            raise AsmError(line, col0 + 1, ".word takes one value")
        value = _parse_int(operands[0][0], line, operands[0][1] + 1)
        if not 0 <= value <= 0xFFFFFFFF:
            raise AsmError(line, operands[0][1] + 1, ".word value does not fit in 32 bits")
        return value
    info = OPS.get(mnem.upper())
    if info is None:
        raise AsmError(line, col0 + 1, f"unknown mnemonic {mnem!r}")
    if info.form in (Form.LOAD, Form.STORE):
        if len(operands) != 2:
            raise AsmError(line, rest_col + 1, f"{mnem} expects 'preg, offset(xreg)'")
        (reg_tok, reg_col), (mem_tok, mem_col) = operands
        preg = _parse_reg(reg_tok, "p", line, reg_col + 1)
        m = _MEM.match(mem_tok)
        if not m:
            raise AsmError(line, mem_col + 1, f"malformed address {mem_tok!r}")
        imm = int(m.group(1), 0)
        if not -2048 <= imm <= 2047:
            raise AsmError(line, mem_col + 1, f"offset {imm} outside -2048..2047")
        base = _parse_reg(m.group(2), "x", line, mem_col + 1 + m.start(2))
        if info.form is Form.LOAD:
            return encode_instr(Instruction(info.mnemonic, rd=preg, rs1=base, imm=imm))
        return encode_instr(Instruction(info.mnemonic, rs2=preg, rs1=base, imm=imm))
    fields = _USES[info.form]
    if len(operands) != len(fields):
        raise AsmError(line, rest_col + 1,
                       f"{mnem} expects {len(fields)} operand(s), got {len(operands)}")
    files = _reg_files(info.form)
    values = {f: _parse_reg(tok, files[f], line, col + 1)
              for f, (tok, col) in zip(fields, operands)}
    return encode_instr(Instruction(info.mnemonic, **values))


def assemble(text: str) -> list[int]:
    words = []
    for lineno, line in enumerate(text.splitlines(), 1):
        word = assemble_line(line, lineno)
        if word is not None:
            words.append(word)
    return words


def disassemble(words: Iterable[int], fmt_lenient: bool = False,
                warnings: list[str] | None = None) -> str:
    """One line per word. Illegal words become ``.word`` directives."""
    lines = []
    for index, word in enumerate(words):
        try:
            lines.append(format_instruction(decode_instr(word, fmt_lenient)))
        except IllegalInstruction as exc:
            lines.append(f".word 0x{word:08X}")
            if warnings is not None:
                warnings.append(f"word {index}: {exc}")
    return "\n".join(lines) + ("\n" if lines else "")


def to_bytes(words: Sequence[int]) -> bytes:
    return struct.pack(f"<{len(words)}I", *words)


def from_bytes(data: bytes) -> list[int]:
    if len(data) % 4:
        raise ValueError(f"binary length {len(data)} is not a multiple of 4")
    return list(struct.unpack(f"<{len(data) // 4}I", data))
