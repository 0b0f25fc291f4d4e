"""Posit(n, 2) arithmetic, a 16n-bit quire and the Xposit RISC-V extension."""

from . import approx, convert, posit, quire
from ._backend import BACKEND
from .posit import PositBits, PositFields, Special, add, decode, encode, mul, neg, sub
from .quire import Quire

__all__ = [
    "BACKEND",
    "PositBits",
    "PositFields",
    "Quire",
    "Special",
    "add",
    "approx",
    "convert",
    "decode",
    "encode",
    "mul",
    "neg",
    "posit",
    "quire",
    "sub",
]
