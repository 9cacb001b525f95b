"""Classical propositional logic as a finite institution.

Grammar (whitespace is insignificant)::

    formula := atom | "~" formula | "[" formula op formula "]"
    op      := "&" | "|" | "->"
    atom    := decimal natural

Signatures are finite sets of atoms ordered by inclusion, models are
valuations (a discrete category), and formula classes are truth tables over
the signature's valuations, each with a canonical disjunctive normal form.
A signature with no atoms has no formulas, hence no classes.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Union

from devhom.errors import FormulaSyntaxError, InstitutionError
from devhom.fincat import FinCategory
from devhom.institution import Institution, SignatureMorphism

MAX_ATOMS = 4


@dataclass(frozen=True)
class Atom:
    index: int


@dataclass(frozen=True)
class Not:
    arg: "PropFormula"


@dataclass(frozen=True)
class Binary:
    op: str  # "&", "|", "->"
    left: "PropFormula"
    right: "PropFormula"


PropFormula = Union[Atom, Not, Binary]
OPS = ("&", "|", "->")


def parse_formula(text: str) -> PropFormula:
    pos = 0
    n = len(text)

    def skip():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def formula() -> PropFormula:
        nonlocal pos
        skip()
        if pos >= n:
            raise FormulaSyntaxError("unexpected end of input", pos)
        ch = text[pos]
        if ch.isdigit():
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            return Atom(int(text[start:pos]))
        if ch == "~":
            pos += 1
            return Not(formula())
        if ch == "[":
            pos += 1
            left = formula()
            skip()
            op = next((o for o in OPS if text.startswith(o, pos)), None)
            if op is None:
                raise FormulaSyntaxError("expected one of & | ->", pos)
            pos += len(op)
            right = formula()
            skip()
            if pos >= n or text[pos] != "]":
                raise FormulaSyntaxError("expected ]", pos)
            pos += 1
            return Binary(op, left, right)
        raise FormulaSyntaxError(f"unexpected {ch!r}", pos)

    result = formula()
    skip()
    if pos != n:
        op_at = pos
        op = next((o for o in OPS if text.startswith(o, pos)), None)
        if op is None:
            raise FormulaSyntaxError("trailing input", pos)
        # an unbracketed binary formula: report a missing operand first
        pos += len(op)
        formula()
        raise FormulaSyntaxError("binary formulas must be bracketed", op_at)
    return result


def format_formula(phi: PropFormula) -> str:
    if isinstance(phi, Atom):
        return str(phi.index)
    if isinstance(phi, Not):
        return "~" + format_formula(phi.arg)
    return f"[{format_formula(phi.left)} {phi.op} {format_formula(phi.right)}]"


def free_vars(phi: PropFormula) -> frozenset[int]:
    if isinstance(phi, Atom):
        return frozenset((phi.index,))
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    return free_vars(phi.left) | free_vars(phi.right)


def eval_formula(f: Mapping[int, int | bool], phi: PropFormula) -> bool:
    if isinstance(phi, Atom):
        if phi.index not in f:
            raise InstitutionError("unbound-atom", f"atom {phi.index} has no value", (phi.index,))
        return bool(f[phi.index])
    if isinstance(phi, Not):
        return not eval_formula(f, phi.arg)
    a, b = eval_formula(f, phi.left), eval_formula(f, phi.right)
    if phi.op == "&":
        return a and b
    if phi.op == "|":
        return a or b
    return (not a) or b


# ---------------------------------------------------------------------------


def _sig_name(sigma: tuple[int, ...]) -> str:
    return "{" + ",".join(map(str, sigma)) + "}"


def _valuation(sigma: tuple[int, ...], v: int) -> dict[int, int]:
    return {a: v >> i & 1 for i, a in enumerate(sigma)}


def _model_name(val: Mapping[int, int]) -> str:
    return "{" + ",".join(f"{a}:{val[a]}" for a in sorted(val)) + "}"


def _parse_model(name: str) -> dict[int, int]:
    body = name.strip()[1:-1]
    if not body:
        return {}
    return {int(k): int(v) for k, v in (p.split(":") for p in body.split(","))}


def _join(op: str, parts: list[PropFormula]) -> PropFormula:
    out = parts[0]
    for p in parts[1:]:
        out = Binary(op, out, p)
    return out


def canonical_formula(sigma: tuple[int, ...], mask: int) -> PropFormula:
    """DNF representative of a truth table (bit v = value at valuation v)."""
    a = Atom(sigma[0])
    full = (1 << (1 << len(sigma))) - 1
    if mask == 0:
        return Binary("&", a, Not(a))
    if mask == full:
        return Binary("|", a, Not(a))
    terms = []
    for v in range(1 << len(sigma)):
        if mask >> v & 1:
            lits = [Atom(x) if v >> i & 1 else Not(Atom(x)) for i, x in enumerate(sigma)]
            terms.append(_join("&", lits))
    return _join("|", terms)


class PropositionalInstitution(Institution):
    name = "prop"

    def __init__(self, max_atoms: int):
        super().__init__()
        if max_atoms < 1:
            raise InstitutionError("bound", "at least one atom is required")
        if max_atoms > MAX_ATOMS:
            raise InstitutionError("bound-too-large", f"at most {MAX_ATOMS} atoms are supported (2^16 classes)")
        self.max_atoms = max_atoms
        atoms = range(max_atoms)
        self._sigs = tuple(s for k in range(max_atoms + 1) for s in combinations(atoms, k))
        self._cats: dict = {}

    # -- evaluation hook (overridden by fault-injection tests) ---------------
    def _eval(self, val: Mapping[int, int], phi: PropFormula) -> bool:
        return eval_formula(val, phi)

    def signatures(self):
        return self._sigs

    def signature_morphisms(self):
        return tuple(
            SignatureMorphism(f"{_sig_name(s)}->{_sig_name(t)}", s, t)
            for s in self._sigs
            for t in self._sigs
            if set(s) <= set(t)
        )

    def formula_classes(self, sigma):
        sigma = self.find_signature(tuple(sigma))
        if not sigma:
            return ()
        return tuple(range(1 << (1 << len(sigma))))

    def model_category(self, sigma) -> FinCategory:
        sigma = self.find_signature(tuple(sigma))
        C = self._cats.get(sigma)
        if C is None:
            objs = [_model_name(_valuation(sigma, v)) for v in range(1 << len(sigma))]
            C = FinCategory(objs, [(f"id_{o}", o, o) for o in objs], {o: f"id_{o}" for o in objs},
                            {(f"id_{o}", f"id_{o}"): f"id_{o}" for o in objs})
            self._cats[sigma] = C
        return C

    def _check_class(self, sigma, phi):
        if not sigma or not isinstance(phi, int) or not 0 <= phi < 1 << (1 << len(sigma)):
            raise InstitutionError("unknown-formula-class", f"no formula class {phi!r} over {_sig_name(sigma)}", (phi,))

    def satisfies(self, sigma, model: str, phi) -> bool:
        sigma = tuple(sigma)
        self._check_class(sigma, phi)
        return self._eval(_parse_model(model), canonical_formula(sigma, phi))

    def extent(self, sigma, phi) -> int:
        if type(self)._eval is PropositionalInstitution._eval:
            self._check_class(tuple(sigma), phi)
            return phi
        return super().extent(sigma, phi)

    def translate_formula(self, sm: SignatureMorphism, phi):
        s, t = tuple(sm.source), tuple(sm.target)
        self._check_class(s, phi)
        pos = {a: i for i, a in enumerate(s)}
        out = 0
        for v in range(1 << len(t)):
            r = sum((v >> j & 1) << pos[a] for j, a in enumerate(t) if a in pos)
            if phi >> r & 1:
                out |= 1 << v
        return out

    def reduct_model(self, sm: SignatureMorphism, model: str) -> str:
        val = _parse_model(model)
        return _model_name({a: val[a] for a in sm.source})

    def classify(self, sigma, text: str):
        sigma = tuple(sigma)
        phi = parse_formula(text) if isinstance(text, str) else text
        extra = free_vars(phi) - set(sigma)
        if extra:
            raise InstitutionError("unbound-atom", f"atoms {sorted(extra)} are not in {_sig_name(sigma)}", tuple(sorted(extra)))
        return sum(1 << v for v in range(1 << len(sigma)) if eval_formula(_valuation(sigma, v), phi))

    def describe(self, sigma, phi) -> str:
        sigma = tuple(sigma)
        self._check_class(sigma, phi)
        return format_formula(canonical_formula(sigma, phi))

    def describe_signature(self, sigma) -> str:
        return _sig_name(tuple(sigma))

    def model_payload(self, sigma, model: str):
        return _parse_model(model)

    def signature(self, atoms) -> tuple[int, ...]:
        return self.find_signature(tuple(sorted(atoms)))

    def model_of(self, valuation: Mapping[int, int]) -> str:
        return _model_name({a: int(bool(x)) for a, x in valuation.items()})


def build_prop_institution(max_atoms: int) -> PropositionalInstitution:
    return PropositionalInstitution(max_atoms)
