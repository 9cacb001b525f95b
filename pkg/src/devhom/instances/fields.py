"""Finite fields over Spec(Z) with the units coefficient system.

The category of finite fields of characteristic p is modelled by its
compatible-embedding skeleton: one field F_{p^a} per degree a <= N and one
embedding F_{p^a} -> F_{p^b} whenever a | b. On the affine side the arrows
reverse, and every Spec(F_q) maps to Spec(Z).

Units are cyclic, F_{p^a}^x = Z/(p^a - 1), and with compatible generators
the embedding induces multiplication by (p^b - 1)/(p^a - 1). The units of Z
are {+1, -1} = Z/2, sent to the element of order 2 in F_q^x (trivial when q
is even).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from devhom.errors import InstitutionError
from devhom.fincat import FinCategory, SliceResult, opposite, slice_over, thin_category
from devhom.homalg import IntMatrix, PresentedGroup
from devhom.simplicial import CoefficientSystem, check_coefficients, pullback_coefficients

SPEC_Z = "Spec(Z)"
MAX_DEGREE = 6


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def field_name(p: int, a: int) -> str:
    return f"F{p}^{a}"


def _parse(name: str) -> tuple[int, int]:
    p, a = name[1:].split("^")
    return int(p), int(a)


def units_group(q: int) -> PresentedGroup:
    return PresentedGroup.cyclic(q - 1)


def _mult(k: int, src: PresentedGroup, tgt: PresentedGroup) -> IntMatrix:
    m = IntMatrix(tgt.ngens, src.ngens)
    if src.ngens and tgt.ngens:
        m.data[0][0] = k
    return m


@dataclass(frozen=True)
class FieldSite:
    primes: tuple[int, ...]
    degree_bound: int
    ambient: FinCategory = field(repr=False)
    units: CoefficientSystem = field(repr=False)

    def fields(self, p: int | None = None) -> list[str]:
        ps = self.primes if p is None else (p,)
        return [field_name(q, a) for q in ps for a in range(1, self.degree_bound + 1)]

    def degree_poset(self, p: int) -> FinCategory:
        """Degrees 1..N ordered by divisibility (field embeddings)."""
        degs = [str(a) for a in range(1, self.degree_bound + 1)]
        return thin_category(degs, lambda a, b: int(b) % int(a) == 0)

    def degree_units(self, p: int) -> CoefficientSystem:
        """Units as a covariant functor on the divisibility poset."""
        C = self.degree_poset(p)
        groups = {a: units_group(p ** int(a)) for a in C.objects}
        maps = {}
        for m in C.morphisms:
            a, b = int(m.dom), int(m.cod)
            maps[m.id] = _mult((p**b - 1) // (p**a - 1), groups[m.dom], groups[m.cod])
        T = CoefficientSystem(C, "covariant", groups, maps)
        check_coefficients(T)
        return T

    def ring_side(self) -> FinCategory:
        return opposite(self.ambient)

    def slice_over_spec_z(self, p: int | None = None) -> SliceResult:
        """K_p/Spec(Z) for one characteristic, or the mixed site K/Spec(Z)."""
        if p is not None and p not in self.primes:
            raise InstitutionError("unknown-prime", f"{p} is not in the site", (p,))
        return slice_over(self.ambient, self.fields(p), SPEC_Z)

    def units_on(self, s: SliceResult) -> CoefficientSystem:
        return pullback_coefficients(self.units, s.projection)

    def terminal_field(self, p: int) -> str:
        return field_name(p, 1)


def build_field_site(primes: Sequence[int], degree_bound: int) -> FieldSite:
    primes = tuple(primes)
    if not primes:
        raise InstitutionError("invalid-prime", "at least one prime is required")
    for p in primes:
        if not is_prime(p):
            raise InstitutionError("invalid-prime", f"{p} is not prime", (p,))
    if len(set(primes)) != len(primes):
        raise InstitutionError("invalid-prime", "primes must be distinct")
    if not 1 <= degree_bound <= MAX_DEGREE:
        raise InstitutionError("bound-too-large", f"degree bound must be in 1..{MAX_DEGREE}")
    objs = [field_name(p, a) for p in primes for a in range(1, degree_bound + 1)] + [SPEC_Z]

    def leq(x: str, y: str) -> bool:
        # arrow x -> y on the affine side: Spec of a bigger field maps to Spec of a subfield
        if y == SPEC_Z:
            return True
        if x == SPEC_Z:
            return False
        (p, b), (q, a) = _parse(x), _parse(y)
        return p == q and b % a == 0

    ambient = thin_category(objs, leq)
    groups = {x: (PresentedGroup.cyclic(2) if x == SPEC_Z else units_group(_parse(x)[0] ** _parse(x)[1])) for x in objs}
    maps = {}
    for m in ambient.morphisms:
        x, y = m.dom, m.cod  # contravariant: T(y) -> T(x)
        if x == y:
            maps[m.id] = IntMatrix.identity(groups[x].ngens)
            continue
        p, b = _parse(x)
        q = p**b
        if y == SPEC_Z:
            k = (q - 1) // 2 if q % 2 else 0
        else:
            k = (q - 1) // (p ** _parse(y)[1] - 1)
        maps[m.id] = _mult(k, groups[y], groups[x])
    units = CoefficientSystem(ambient, "contravariant", groups, maps)
    check_coefficients(units)
    return FieldSite(primes, degree_bound, ambient, units)
