"""Text formats shared by the CLI, the certificates and their replay.

Matrices are written 'a,b;c,d' with exact rationals or decimal floats;
quaternions are written like '3+2i' or '1/2+3i-j+2k'.  Parse errors carry
the offending position.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .certificate import frac_str
from .sl2 import Mat2


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


def _parse_scalar(token: str, text: str, position: int, exact: bool):
    token = token.strip()
    if not token:
        raise ParseError("empty number", text, position)
    try:
        if exact:
            return Fraction(token)
        if "/" in token:
            return float(Fraction(token))
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {token!r}", text, position) from None


def parse_matrix(text: str, exact: bool = True) -> Mat2:
    """Parse 'a,b;c,d' into a Mat2 (exact rationals by default)."""
    rows = text.split(";")
    if len(rows) != 2:
        raise ParseError("expected two ';'-separated rows", text, text.find(";"))
    entries = []
    pos = 0
    for row in rows:
        cells = row.split(",")
        if len(cells) != 2:
            raise ParseError("expected two ','-separated entries", text, pos)
        for cell in cells:
            entries.append(_parse_scalar(cell, text, pos, exact))
            pos += len(cell) + 1
    return Mat2(*entries)


def matrix_str(m: Mat2) -> str:
    """Exact 'a,b;c,d' encoding of a rational matrix."""
    return (f"{frac_str(m.x)},{frac_str(m.y)};"
            f"{frac_str(m.z)},{frac_str(m.w)}")


def matrix_str_float(m: Mat2) -> str:
    return f"{float(m.x)!r},{float(m.y)!r};{float(m.z)!r},{float(m.w)!r}"


_QUAT_TERM = re.compile(
    r"\s*([+-]?)\s*((?:\d+(?:/\d+)?|\d*\.\d+|\.\d+|\d+\.)?)\s*([ijk]?)\s*")


def parse_quaternion(text: str, exact: bool = True) -> tuple:
    """Parse 'x+yi+zj+wk' (any subset of terms) into components (x,y,z,w)."""
    comps = {"": None, "i": None, "j": None, "k": None}
    pos = 0
    src = text.strip()
    if not src:
        raise ParseError("empty quaternion", text, 0)
    while pos < len(src):
        m = _QUAT_TERM.match(src, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ParseError("expected a term like '3', '2i' or '-j'", text, pos)
        sign, mag, unit = m.group(1), m.group(2), m.group(3)
        if comps[unit] is not None:
            raise ParseError(f"duplicate '{unit or 'real'}' term", text, pos)
        value = _parse_scalar(mag, text, pos, exact) if mag else (
            Fraction(1) if exact else 1.0)
        if sign == "-":
            value = -value
        comps[unit] = value
        pos = m.end()
    zero = Fraction(0) if exact else 0.0
    return tuple(comps[u] if comps[u] is not None else zero for u in ("", "i", "j", "k"))


def quaternion_str(components) -> str:
    """Format components (x, y, z, w) as 'x+yi+zj+wk', exact rationals."""
    parts = []
    for value, unit in zip(components, ("", "i", "j", "k")):
        f = Fraction(value)
        if f == 0:
            continue
        s = frac_str(f)
        if unit and s == "1":
            s = ""
        elif unit and s == "-1":
            s = "-"
        term = f"{s}{unit}"
        if parts and not term.startswith("-"):
            parts.append("+")
        parts.append(term)
    return "".join(parts) if parts else "0"
