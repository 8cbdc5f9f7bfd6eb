"""Square-class groups of rigid-field models and their automorphisms.

A field model is an iterated Laurent series field over one of the bases
F3, R, C (or the 2-square-class level-1 base obtained from F3 by
adjoining a square root of -1).  A square class is a sign bit together
with an F2 exponent vector over the Laurent variables; the group law is
bitwise XOR.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator

from .errors import FieldMismatchError, ParseError, UnitClassError


class Base(enum.Enum):
    F3 = "F3"
    R = "R"
    C = "C"
    # Image of F3 under adjoining sqrt(-1): two unit square classes, but
    # -1 is a square (level 1).  Not directly parseable; arises from
    # quadratic extensions only.
    SQUARE_MINUS_ONE = "F3(i)"


_LEVELS = {Base.F3: 2, Base.R: None, Base.C: 1, Base.SQUARE_MINUS_ONE: 1}


@dataclass(frozen=True)
class FieldDesc:
    """A rigid-field model: base field plus Laurent variable count."""

    base: Base
    nvars: int

    def __post_init__(self) -> None:
        if self.nvars < 0:
            raise ValueError("nvars must be nonnegative")

    def level(self) -> int | None:
        """Level of the field: 1, 2, or None (meaning infinity)."""
        return _LEVELS[self.base]

    def unit_class_count(self) -> int:
        return 1 if self.base is Base.C else 2

    def square_class_count(self) -> int:
        return self.unit_class_count() * (1 << self.nvars)

    def one(self) -> "SquareClass":
        return SquareClass(self, 0)

    def minus_one(self) -> "SquareClass":
        """The class of -1 (trivial when the level is 1)."""
        if self.base in (Base.C, Base.SQUARE_MINUS_ONE):
            return SquareClass(self, 0)
        return SquareClass(self, 1)

    def nonsquare_unit(self) -> "SquareClass":
        """The nontrivial unit class, if there is one."""
        if self.base is Base.C:
            raise UnitClassError("C has a single unit square class")
        return SquareClass(self, 1)

    def var(self, i: int) -> "SquareClass":
        """The class of the i-th Laurent variable (1-based)."""
        if not 1 <= i <= self.nvars:
            raise ValueError(f"variable index {i} out of range 1..{self.nvars}")
        return SquareClass(self, 1 << i)

    def classes(self) -> Iterator["SquareClass"]:
        """All square classes, in the global tie-break order."""
        for exps in range(1 << self.nvars):
            yield SquareClass(self, exps << 1)
        if self.unit_class_count() == 2:
            for exps in range(1 << self.nvars):
                yield SquareClass(self, (exps << 1) | 1)

    def residue(self) -> "FieldDesc":
        """The residue field model (one Laurent variable fewer)."""
        if self.nvars == 0:
            raise ValueError("base field has no residue field in the model")
        return FieldDesc(self.base, self.nvars - 1)

    def extended(self, k: int) -> "FieldDesc":
        return FieldDesc(self.base, self.nvars + k)

    def __str__(self) -> str:
        vars_part = ",".join(f"t{i}" for i in range(1, self.nvars + 1))
        return f"{self.base.value}[{vars_part}]"


@dataclass(frozen=True, order=False)
class SquareClass:
    """An element of F*/F*^2: bit 0 is the unit bit, bit i the t_i exponent."""

    field: FieldDesc
    bits: int

    def __post_init__(self) -> None:
        mask = (1 << (self.field.nvars + 1)) - 1
        bits = self.bits & mask
        if self.field.base is Base.C:
            bits &= ~1  # -1 is a square
        object.__setattr__(self, "bits", bits)

    @property
    def unit(self) -> int:
        return self.bits & 1

    @property
    def exps(self) -> int:
        """Exponent vector as an integer, t1 in the least significant bit."""
        return self.bits >> 1

    def is_unit_class(self) -> bool:
        return self.exps == 0

    def is_one(self) -> bool:
        return self.bits == 0

    def _check(self, other: "SquareClass") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        self._check(other)
        return SquareClass(self.field, self.bits ^ other.bits)

    def __neg__(self) -> "SquareClass":
        """Multiply by the class of -1 (identity over level-1 fields)."""
        return self * self.field.minus_one()

    def sort_key(self) -> tuple[int, int]:
        return (self.unit, self.exps)

    def __lt__(self, other: "SquareClass") -> bool:
        self._check(other)
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return format_square_class(self)

    def __repr__(self) -> str:
        return f"SquareClass({self.field}, {format_square_class(self)!r})"


def mul(a: SquareClass, b: SquareClass) -> SquareClass:
    return a * b


def negate(a: SquareClass) -> SquareClass:
    return -a


@dataclass(frozen=True)
class ClassAutomorphism:
    """Invertible F2-linear map on the (1 + nvars)-bit class representation.

    Column j holds the image of the j-th basis vector.  Maps fixing the
    class of -1 correspond to variable reorderings and uniformizer
    changes, and induce Witt-ring automorphisms of the model.
    """

    field: FieldDesc
    cols: tuple[int, ...]

    def apply(self, a: SquareClass) -> SquareClass:
        if a.field != self.field:
            raise FieldMismatchError(f"{a.field} vs {self.field}")
        out = 0
        bits = a.bits
        for col in self.cols:
            if bits & 1:
                out ^= col
            bits >>= 1
        return SquareClass(self.field, out)

    def inverse(self) -> "ClassAutomorphism":
        return ClassAutomorphism(self.field, _invert_cols(self.cols))


def _extend_to_basis(field: FieldDesc, a_bits: int) -> list[int]:
    """Basis (e0, v_1, ..., v_{n-1}, a) of the class bit space over F2."""
    n = field.nvars + 1
    pivots: dict[int, int] = {}  # pivot bit -> reduced vector

    def add(v: int) -> bool:
        while v:
            low = v & -v
            if low not in pivots:
                pivots[low] = v
                return True
            v ^= pivots[low]
        return False

    add(1)
    add(a_bits)
    basis = [1, a_bits]
    for i in range(1, n):
        cand = 1 << i
        if add(cand):
            basis.insert(len(basis) - 1, cand)
    assert len(basis) == n
    return basis  # order: e0, extensions..., a


def find_basis_change(a: SquareClass) -> ClassAutomorphism:
    """An automorphism fixing -1 and sending a to the class of t_n.

    Models the paper's two moves: reordering Laurent variables and
    replacing the uniformizer t_n by a unit multiple.
    """
    field = a.field
    if a.is_unit_class():
        raise UnitClassError("class has no Laurent variable part")
    n = field.nvars + 1
    source = _extend_to_basis(field, a.bits)
    targets = [1] + [1 << i for i in range(1, n)]
    # M maps source[i] to targets[i]: M = T * S^{-1} on raw bit vectors.
    src_inv_cols = _invert_cols(tuple(source))
    cols = []
    for j in range(n):
        coords = _apply_cols(src_inv_cols, 1 << j)
        out = 0
        for i in range(n):
            if (coords >> i) & 1:
                out ^= targets[i]
        cols.append(out)
    return ClassAutomorphism(field, tuple(cols))


def _invert_cols(cols: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cols)
    rows = [0] * n
    for j, col in enumerate(cols):
        for i in range(n):
            if (col >> i) & 1:
                rows[i] |= 1 << j
    aug = [rows[i] | (1 << (n + i)) for i in range(n)]
    for c in range(n):
        pivot = next(r for r in range(c, n) if (aug[r] >> c) & 1)
        aug[c], aug[pivot] = aug[pivot], aug[c]
        for r in range(n):
            if r != c and (aug[r] >> c) & 1:
                aug[r] ^= aug[c]
    inv_rows = [aug[i] >> n for i in range(n)]
    inv_cols = [0] * n
    for i in range(n):
        for j in range(n):
            if (inv_rows[i] >> j) & 1:
                inv_cols[j] |= 1 << i
    return tuple(inv_cols)


def _apply_cols(cols: tuple[int, ...], bits: int) -> int:
    out = 0
    for col in cols:
        if bits & 1:
            out ^= col
        bits >>= 1
    return out


# --- textual syntax -------------------------------------------------------

_VAR_RE = re.compile(r"t(\d+)$")


def format_square_class(a: SquareClass) -> str:
    parts = []
    for i in range(1, a.field.nvars + 1):
        if (a.exps >> (i - 1)) & 1:
            parts.append(f"t{i}")
    body = "*".join(parts) if parts else "1"
    if a.unit:
        if a.field.base is Base.SQUARE_MINUS_ONE:
            return "u*" + body if parts else "u"
        return "-" + body
    return body


def parse_square_class(s: str, field: FieldDesc) -> SquareClass:
    """Parse `[-] (1 | t<k>(*t<k>)*)`, e.g. `-t1*t3`; round-trips bit-exactly."""
    text = s.strip()
    if not text:
        raise ParseError("empty square-class literal")
    bits = 0
    pos = 0
    if text.startswith("-"):
        # -1 is a square over level-1 bases, so the sign is a no-op there.
        if field.base in (Base.F3, Base.R):
            bits ^= 1
        text = text[1:]
        pos += 1
    elif text.startswith("u*") or text == "u":
        if field.base is not Base.SQUARE_MINUS_ONE:
            raise ParseError("unit class 'u' only exists over the level-1 "
                             "two-unit-class base", pos)
        bits ^= 1
        text = text[1:].lstrip("*")
        if not text:
            return SquareClass(field, bits)
    if not text:
        raise ParseError("missing square-class body", pos)
    for factor in text.split("*"):
        factor = factor.strip()
        if factor == "1":
            continue
        m = _VAR_RE.match(factor)
        if not m:
            raise ParseError(f"bad square-class factor {factor!r}", pos)
        k = int(m.group(1))
        if not 1 <= k <= field.nvars:
            raise ParseError(f"unknown variable t{k} over {field}", pos)
        bits ^= 1 << k
        pos += len(factor) + 1
    return SquareClass(field, bits)


_FIELD_RE = re.compile(r"^\s*(F3|R|C)\s*\[\s*([^\]]*)\s*\]\s*$")


def parse_field(s: str) -> FieldDesc:
    """Parse `F3|R|C [t1,...,tn]` with contiguous variables t1..tn."""
    m = _FIELD_RE.match(s)
    if not m:
        raise ParseError(f"bad field literal {s!r}", 0)
    base = {"F3": Base.F3, "R": Base.R, "C": Base.C}[m.group(1)]
    body = m.group(2).strip()
    if not body:
        return FieldDesc(base, 0)
    names = [v.strip() for v in body.split(",")]
    for i, name in enumerate(names, start=1):
        if name != f"t{i}":
            raise ParseError(
                f"variables must be contiguous t1..tn, got {name!r} in "
                f"position {i}", s.find(name) if name in s else 0)
    return FieldDesc(base, len(names))
