"""Finitely atomic measures on the nonnegative half-line and their transforms.

All integrals against these measures are finite sums, so every quantity the
criteria consume (moments of any integer power, masses of single atoms) is
computed exactly when the atom data is rational.  Negative-power moments of
a measure with an atom at 0 are +inf; the transforms that need 1/s-integrals
treat that as a hard error instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from .errors import (
    MassExceedsOneError,
    NotInDomainError,
    NotNormalizableError,
    ZeroAtomError,
)
from .rationals import INF, ONE, ZERO, Scalar, all_exact, as_scalar, mul0


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite list of (location, mass) atoms, sorted by location.

    Locations are pairwise distinct and nonnegative, masses strictly
    positive.  The empty tuple is the zero measure.
    """

    atoms: Tuple[Tuple[Scalar, Scalar], ...]

    @staticmethod
    def from_atoms(pairs: Iterable[Tuple[object, object]]) -> "AtomicMeasure":
        """Coerce, merge coincident locations, sort, and validate."""
        merged: dict = {}
        order: list = []
        for loc, mass in pairs:
            loc = as_scalar(loc)
            mass = as_scalar(mass)
            if loc < 0:
                raise ValueError(f"atom location {loc} is negative")
            if loc in merged:
                merged[loc] = merged[loc] + mass
            else:
                merged[loc] = mass
                order.append(loc)
        atoms = []
        for loc in sorted(order):
            mass = merged[loc]
            if mass == 0:
                continue
            if mass < 0:
                raise ValueError(f"atom at {loc} has nonpositive mass {mass}")
            atoms.append((loc, mass))
        return AtomicMeasure(tuple(atoms))

    @staticmethod
    def point_mass(loc) -> "AtomicMeasure":
        return AtomicMeasure.from_atoms([(loc, ONE)])

    def __iter__(self):
        return iter(self.atoms)

    def locations(self) -> Tuple[Scalar, ...]:
        return tuple(loc for loc, _ in self.atoms)

    def mass_at(self, loc) -> Scalar:
        loc = as_scalar(loc)
        for s, w in self.atoms:
            if s == loc:
                return w
        return ZERO

    def total_mass(self) -> Scalar:
        return sum((w for _, w in self.atoms), ZERO)

    def has_zero_atom(self) -> bool:
        return any(s == 0 for s, _ in self.atoms)

    def is_exact(self) -> bool:
        return all_exact(x for atom in self.atoms for x in atom)

    def is_probability(self, tol: float = 0.0) -> bool:
        total = self.total_mass()
        if self.is_exact():
            return total == 1
        return abs(float(total) - 1.0) <= tol

    def moment(self, n: int) -> Scalar:
        """The n-th power moment; +inf when n < 0 and an atom sits at 0."""
        if n < 0 and self.has_zero_atom():
            return INF
        total = ZERO
        for s, w in self.atoms:
            if n == 0:
                total = total + w
            elif s == 0:
                continue  # 0**n = 0 for n > 0
            else:
                total = total + w * s ** n
        return total

    def without_zero_atom(self) -> "AtomicMeasure":
        return AtomicMeasure(tuple(a for a in self.atoms if a[0] != 0))

    def scaled(self, factor) -> "AtomicMeasure":
        factor = as_scalar(factor)
        if factor == 0:
            return AtomicMeasure(())
        return AtomicMeasure(tuple((s, w * factor) for s, w in self.atoms))


def moments_of(mu: AtomicMeasure, n: int) -> Scalar:
    """Power moment of any integer order, as an extended nonnegative real."""
    return mu.moment(n)


def measures_equal(a: AtomicMeasure, b: AtomicMeasure,
                   loc_tol: float = 1e-10, mass_tol: float = 1e-10) -> bool:
    """Atom-set equality; exact when both measures are rational."""
    if a.is_exact() and b.is_exact():
        return a.atoms == b.atoms
    if len(a.atoms) != len(b.atoms):
        return False
    for (sa, wa), (sb, wb) in zip(a.atoms, b.atoms):
        if abs(float(sa) - float(sb)) > loc_tol or abs(float(wa) - float(wb)) > mass_tol:
            return False
    return True


def _require_probability(mu: AtomicMeasure, what: str) -> None:
    if not mu.is_probability(tol=1e-9):
        raise ValueError(f"{what} must be a probability measure; total mass is {mu.total_mass()}")


def parent_measure_from_child(mu: AtomicMeasure, lambda_w_sq) -> AtomicMeasure:
    """Upward transform along a single-child edge with squared weight lambda_w_sq.

    Sends a representing measure of the child's orbit sequence (with finite
    1/s-integral bounded by 1/lambda_w_sq) to a representing measure of the
    parent's: each atom (s, w) becomes (s, lambda_w_sq*w/s) and the mass
    defect lands at 0.  Inverse of :func:`child_measure_from_parent`.
    """
    lam = as_scalar(lambda_w_sq)
    if lam <= 0:
        raise ValueError("squared weight must be positive")
    _require_probability(mu, "input measure")
    if mu.has_zero_atom():
        raise ZeroAtomError(
            "measure has an atom at 0, so its 1/s-integral is infinite; "
            "the bounded-integral condition fails"
        )
    inv = mu.moment(-1)
    if lam * inv > 1:
        raise NotInDomainError(lam * inv, 1)
    atoms = [(s, lam * w / s) for s, w in mu.atoms]
    defect = 1 - lam * inv
    if defect != 0:
        atoms.append((ZERO, defect))
    return AtomicMeasure.from_atoms(atoms)


def child_measure_from_parent(rho: AtomicMeasure, lambda_w_sq) -> AtomicMeasure:
    """Downward transform: atom (s, w) with s > 0 becomes (s, s*w/lambda_w_sq).

    The atom of rho at 0 is annihilated.  Requires the first moment of rho
    to equal lambda_w_sq, so the result is a probability measure.
    """
    lam = as_scalar(lambda_w_sq)
    if lam <= 0:
        raise ValueError("squared weight must be positive")
    first = rho.moment(1)
    if rho.is_exact() and isinstance(lam, Fraction):
        if first != lam:
            raise NotNormalizableError(first, lam)
    elif abs(float(first) - float(lam)) > 1e-9 * max(1.0, abs(float(lam))):
        raise NotNormalizableError(first, lam)
    atoms = [(s, s * w / lam) for s, w in rho.atoms if s != 0]
    return AtomicMeasure.from_atoms(atoms)


def root_measure_from_branches(mus: Sequence[AtomicMeasure],
                               entry_weight_sq: Sequence,
                               left_weight_sq: Sequence,
                               eps=None) -> AtomicMeasure:
    """Assemble the root vertex's measure from the branch measures.

    With stem length kappa = len(left_weight_sq), each branch atom (s, w)
    contributes P * e_i * w / s**(kappa+1) at location s, where P is the
    product of the squared stem weights and e_i the squared entry weight;
    the defect (1 - total) sits at 0.  ``eps`` may pin the defect
    explicitly, in which case the total mass must come out exactly 1.
    """
    if len(mus) != len(entry_weight_sq):
        raise ValueError("one entry weight per branch measure is required")
    kappa = len(left_weight_sq)
    if kappa < 1:
        raise ValueError("at least one stem weight is required")
    P = ONE
    for sq in left_weight_sq:
        P = P * as_scalar(sq)
    atoms = []
    for mu, e in zip(mus, entry_weight_sq):
        _require_probability(mu, "branch measure")
        if mu.has_zero_atom():
            raise ZeroAtomError("branch measure has an atom at 0; negative-power integrals diverge")
        e = as_scalar(e)
        for s, w in mu.atoms:
            atoms.append((s, mul0(P * e, w * s ** (-(kappa + 1)))))
    body = AtomicMeasure.from_atoms(atoms)
    total = body.total_mass()
    if eps is None:
        defect = 1 - total
        if defect < 0:
            raise MassExceedsOneError(total)
    else:
        defect = as_scalar(eps)
        if defect < 0:
            raise ValueError("explicit defect mass must be nonnegative")
        if total + defect != 1:
            raise MassExceedsOneError(total + defect)
    if defect != 0:
        return AtomicMeasure.from_atoms(list(body.atoms) + [(ZERO, defect)])
    return body
