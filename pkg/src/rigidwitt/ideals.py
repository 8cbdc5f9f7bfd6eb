"""The fundamental-ideal filtration and residue-based decompositions.

Membership in I^n is decided by the split exact sequence of the
t-adic valuation, recursing into the residue field; forms in I^n are
split into unimodular pieces, and quadratic extensions stay inside the
four-base model family.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    FieldMismatchError,
    HyperbolicResidueError,
    SquareClassIsOneError,
    UnitClassError,
)
from .qform import DiagonalForm, PfisterSpec, neg, orth_sum, scale
from .sqclass import Base, FieldDesc, SquareClass, find_basis_change
from .witt import (
    anisotropic_part,
    is_hyperbolic,
    represents,
    residue_forms,
    value_set,
    witt_vector,
)

__all__ = [
    "UnimodularSplit",
    "in_In",
    "decompose_unimodular",
    "rigid_decompose",
    "lift_form",
    "lift_representation",
    "extend_scalars_quadratic",
    "extend_fresh_variable",
]


def in_In(phi: DiagonalForm, n: int) -> bool:
    """Membership of phi's Witt class in the n-th fundamental-ideal power."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return True
    field = phi.field
    if field.nvars == 0:
        return _in_In_base(phi, n)
    phi1, phi2 = residue_forms(phi)
    # phi = (phi1 - phi2) + <<-t>> (x) phi2 in WF
    return in_In(phi2, n - 1) and in_In(orth_sum(phi1, neg(phi2)), n)


def _in_In_base(phi: DiagonalForm, n: int) -> bool:
    base = phi.field.base
    if base is Base.C:
        return phi.dim % 2 == 0
    if n == 1:
        return phi.dim % 2 == 0
    if base is Base.R:
        p = sum(1 for e in phi if not e.unit)
        return (2 * p - phi.dim) % (1 << n) == 0
    # F3 (Z/4) and the level-1 two-unit base (Z/2 x Z/2): I^2 = 0
    return not any(witt_vector(phi))


@dataclass(frozen=True)
class UnimodularSplit:
    """Witt decomposition phi = sigma + <1,t> (x) tau with unimodular parts."""

    t: SquareClass
    sigma: DiagonalForm
    tau: DiagonalForm

    def reassembled(self) -> DiagonalForm:
        fld = self.t.field
        binary = DiagonalForm(fld, (fld.one(), self.t))
        from .qform import tensor

        return orth_sum(self.sigma, tensor(binary, self.tau))


def _inplace_residues(
    phi: DiagonalForm, i: int
) -> tuple[DiagonalForm, DiagonalForm]:
    """Residue class forms wrt t_i kept over the same field model."""
    bit = 1 << i
    fld = phi.field
    even = tuple(e for e in phi if not e.bits & bit)
    odd = tuple(
        SquareClass(fld, e.bits & ~bit) for e in phi if e.bits & bit)
    return DiagonalForm(fld, even), DiagonalForm(fld, odd)


def decompose_unimodular(phi: DiagonalForm, i: int | None = None) -> UnimodularSplit:
    """Split phi = sigma + <1,t> (x) tau along the variable t_i.

    The uniformizer class t is t_i times a unit multiple u chosen so the
    residue value sets of the two parts meet (u = a*b for the smallest
    represented classes a, b); both residues must be non-hyperbolic.
    """
    field = phi.field
    if i is None:
        i = field.nvars
    if not 1 <= i <= field.nvars:
        raise ValueError(f"variable index {i} out of range 1..{field.nvars}")
    phi1, phi2 = _inplace_residues(phi, i)
    if is_hyperbolic(phi1) or is_hyperbolic(phi2):
        raise HyperbolicResidueError(
            "both residue class forms must be non-hyperbolic")
    a = min(value_set(phi1), key=SquareClass.sort_key)
    b = min(value_set(phi2), key=SquareClass.sort_key)
    u = a * b
    t = u * field.var(i)
    sigma = anisotropic_part(orth_sum(phi1, neg(scale(u, phi2))))
    tau = scale(u, phi2)
    return UnimodularSplit(t, sigma, tau)


def rigid_decompose(phi: DiagonalForm, a: SquareClass) -> UnimodularSplit:
    """decompose_unimodular along the class a instead of a plain variable.

    Requires 1 in D(phi) and a with a nonzero exponent part; a is moved
    onto the last variable by a basis change, the split is computed
    there, and the result is pulled back.
    """
    if a.field != phi.field:
        raise FieldMismatchError(f"{a.field} vs {phi.field}")
    if a.is_unit_class():
        raise UnitClassError("class has no Laurent variable part")
    if not represents(phi, phi.field.one()):
        raise ValueError("phi must represent 1")
    m = find_basis_change(a)
    from .qform import apply_automorphism

    moved = apply_automorphism(m, phi)
    split = decompose_unimodular(moved, phi.field.nvars)
    inv = m.inverse()
    return UnimodularSplit(
        inv.apply(split.t),
        apply_automorphism(inv, split.sigma),
        apply_automorphism(inv, split.tau),
    )


def lift_form(phi: DiagonalForm, field: FieldDesc) -> DiagonalForm:
    """Inject phi through the canonical embedding into a larger model."""
    if field.base is not phi.field.base or field.nvars < phi.field.nvars:
        raise FieldMismatchError(
            f"cannot embed {phi.field} into {field}")
    return DiagonalForm(
        field, tuple(SquareClass(field, e.bits) for e in phi))


def lift_representation(
    reps: list[PfisterSpec], field: FieldDesc
) -> list[PfisterSpec]:
    """Lift Pfister terms slotwise through the canonical embedding."""
    out = []
    for spec in reps:
        src = spec.scalar.field
        if field.base is not src.base or field.nvars < src.nvars:
            raise FieldMismatchError(f"cannot embed {src} into {field}")
        out.append(PfisterSpec(
            SquareClass(field, spec.scalar.bits),
            tuple(SquareClass(field, s.bits) for s in spec.slots)))
    return out


def extend_scalars_quadratic(
    phi: DiagonalForm, a: SquareClass
) -> tuple[FieldDesc, DiagonalForm]:
    """Image of phi over the quadratic extension by the square root of a.

    A class with a Laurent part is moved onto the last variable, whose
    exponent bit then collapses; extension by the nontrivial unit class
    changes the base field (F3 to the level-1 two-unit base, R to C).
    """
    if a.field != phi.field:
        raise FieldMismatchError(f"{a.field} vs {phi.field}")
    field = phi.field
    if a.is_one():
        raise SquareClassIsOneError("extension requires a nonsquare class")
    if not a.is_unit_class():
        from .qform import apply_automorphism

        moved = apply_automorphism(find_basis_change(a), phi)
        bit = 1 << field.nvars
        entries = tuple(SquareClass(field, e.bits & ~bit) for e in moved)
        return field, DiagonalForm(field, entries)
    # nontrivial unit class: sqrt makes every unit a square
    new_base = {
        Base.F3: Base.SQUARE_MINUS_ONE,
        Base.R: Base.C,
        Base.SQUARE_MINUS_ONE: Base.SQUARE_MINUS_ONE,
    }[field.base]
    target = FieldDesc(new_base, field.nvars)
    entries = tuple(SquareClass(target, e.bits & ~1) for e in phi)
    return target, DiagonalForm(target, entries)


def extend_fresh_variable(phi: DiagonalForm, k: int) -> DiagonalForm:
    """phi viewed over the model with k additional Laurent variables."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return lift_form(phi, phi.field.extended(k))
