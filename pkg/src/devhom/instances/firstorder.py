"""Finite relational first-order logic (no equality, no function symbols).

Formulas are prefix s-expressions::

    (R x y)            relation atom, R declared with arity 2
    (not f)  (and f g ...)  (or f g ...)  (implies f g)
    (exists x f)  (forall x f)

Models are all labeled structures with universe {1..k}, 0 <= k <= max_size;
morphisms are relation-preserving maps. The formula classes of a signature
are the closed fragment formulas that only mention its relation symbols.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from itertools import combinations, product
from typing import Mapping, Sequence

from devhom.errors import FormulaSyntaxError, InstitutionError
from devhom.fincat import FinCategory, Morphism
from devhom.institution import Institution, SignatureMorphism

MAX_SIZE = 3
MAX_STRUCTURES = 600

# -- syntax -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_sexp(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError("bad token", pos)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    i = 0

    def read():
        nonlocal i
        if i >= len(tokens):
            raise FormulaSyntaxError("unexpected end of input", len(text))
        tok, at = tokens[i]
        i += 1
        if tok == "(":
            items = []
            while True:
                if i >= len(tokens):
                    raise FormulaSyntaxError("expected )", len(text))
                if tokens[i][0] == ")":
                    if not items:
                        raise FormulaSyntaxError("empty list", at)
                    i += 1
                    return tuple(items)
                items.append(read())
        if tok == ")":
            raise FormulaSyntaxError("unexpected )", at)
        return tok

    out = read()
    if i != len(tokens):
        raise FormulaSyntaxError("trailing input", tokens[i][1])
    return out


def format_sexp(e) -> str:
    if isinstance(e, str):
        return e
    return "(" + " ".join(format_sexp(x) for x in e) + ")"


_CONNECTIVES = {"not": (1, 1), "and": (1, None), "or": (1, None), "implies": (2, 2)}
_QUANTIFIERS = ("exists", "forall")


def check_formula(e, sig: Mapping[str, int]) -> frozenset[str]:
    """Validate against a signature and return the free variables."""
    if isinstance(e, str) or not e:
        raise InstitutionError("bad-formula", f"not a formula: {format_sexp(e) if e else '()'}")
    head = e[0]
    if head in _CONNECTIVES:
        lo, hi = _CONNECTIVES[head]
        args = e[1:]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise InstitutionError("bad-formula", f"{head} takes {lo}..{hi or 'n'} arguments")
        return frozenset().union(*(check_formula(a, sig) for a in args))
    if head in _QUANTIFIERS:
        if len(e) != 3 or not isinstance(e[1], str):
            raise InstitutionError("bad-formula", f"{head} takes a variable and a formula")
        return check_formula(e[2], sig) - {e[1]}
    if head in sig:
        if len(e) - 1 != sig[head] or not all(isinstance(x, str) for x in e[1:]):
            raise InstitutionError("bad-formula", f"{head} has arity {sig[head]}")
        return frozenset(e[1:])
    raise InstitutionError("unknown-symbol", f"unknown relation or connective {head!r}", (head,))


def relations_of(e) -> frozenset[str]:
    if isinstance(e, str):
        return frozenset()
    head = e[0]
    if head in _CONNECTIVES:
        return frozenset().union(*(relations_of(a) for a in e[1:]))
    if head in _QUANTIFIERS:
        return relations_of(e[2])
    return frozenset((head,))


# -- structures -------------------------------------------------------------


@dataclass(frozen=True)
class RelStructure:
    size: int
    relations: tuple[tuple[str, frozenset[tuple[int, ...]]], ...]

    @property
    def universe(self) -> range:
        return range(1, self.size + 1)

    def rel(self, name: str) -> frozenset:
        for r, ts in self.relations:
            if r == name:
                return ts
        raise KeyError(name)

    @property
    def id(self) -> str:
        parts = [f"{r}[{','.join('(' + ','.join(map(str, t)) + ')' for t in sorted(ts))}]" for r, ts in self.relations]
        return f"k{self.size}:" + ";".join(parts)

    def restrict(self, names) -> RelStructure:
        keep = set(names)
        return RelStructure(self.size, tuple((r, ts) for r, ts in self.relations if r in keep))


def make_structure(size: int, relations: Mapping[str, Sequence[Sequence[int]]]) -> RelStructure:
    rels = []
    for r in sorted(relations):
        ts = frozenset(tuple(t) for t in relations[r])
        for t in ts:
            if any(not 1 <= x <= size for x in t):
                raise InstitutionError("bad-structure", f"tuple {t} of {r} leaves the universe")
        rels.append((r, ts))
    return RelStructure(size, tuple(rels))


def all_structures(sig: Mapping[str, int], max_size: int) -> list[RelStructure]:
    names = sorted(sig)
    out = []
    for k in range(max_size + 1):
        spaces = [list(product(range(1, k + 1), repeat=sig[r])) for r in names]
        choices = [range(1 << len(s)) for s in spaces]
        for pick in product(*choices):
            rels = tuple(
                (r, frozenset(t for i, t in enumerate(space) if bits >> i & 1))
                for r, space, bits in zip(names, spaces, pick)
            )
            out.append(RelStructure(k, rels))
    return out


def enumerate_homomorphisms(A: RelStructure, B: RelStructure) -> list[tuple[int, ...]]:
    """All relation-preserving maps A -> B as image tuples (h(1), ..., h(k))."""
    # tuples of A grouped by the largest element they mention: checked once all are assigned
    due: dict[int, list[tuple[str, tuple[int, ...]]]] = {x: [] for x in A.universe}
    for r, ts in A.relations:
        for t in ts:
            due[max(t)].append((r, t))
    brel = {r: B.rel(r) for r, _ in A.relations}
    h = [0] * (A.size + 1)
    out = []

    def assign(x: int):
        if x > A.size:
            out.append(tuple(h[1:]))
            return
        for y in B.universe:
            h[x] = y
            if all(tuple(h[i] for i in t) in brel[r] for r, t in due[x]):
                assign(x + 1)
        h[x] = 0

    assign(1)
    return out


def evaluate(S: RelStructure, e, env: Mapping[str, int] | None = None) -> bool:
    """Tarski satisfaction by recursion on the formula."""
    env = dict(env or {})
    head = e[0]
    if head == "not":
        return not evaluate(S, e[1], env)
    if head == "and":
        return all(evaluate(S, a, env) for a in e[1:])
    if head == "or":
        return any(evaluate(S, a, env) for a in e[1:])
    if head == "implies":
        return (not evaluate(S, e[1], env)) or evaluate(S, e[2], env)
    if head in _QUANTIFIERS:
        x, body = e[1], e[2]
        vals = (evaluate(S, body, {**env, x: d}) for d in S.universe)
        return any(vals) if head == "exists" else all(vals)
    try:
        return tuple(env[v] for v in e[1:]) in S.rel(head)
    except KeyError as exc:
        raise InstitutionError("unbound-variable", f"variable {exc.args[0]} is free") from None


# -- institution ------------------------------------------------------------


def _sig_name(names: tuple[str, ...]) -> str:
    return "{" + ",".join(names) + "}"


class FirstOrderInstitution(Institution):
    name = "fo"

    def __init__(self, sig: Mapping[str, int], max_size: int, fragment: Sequence[str]):
        super().__init__()
        if not 0 <= max_size <= MAX_SIZE:
            raise InstitutionError("bound-too-large", f"universe size is limited to {MAX_SIZE}")
        self.sig = dict(sorted(sig.items()))
        self.max_size = max_size
        count = sum(2 ** sum(k ** a for a in self.sig.values()) for k in range(max_size + 1))
        if count > MAX_STRUCTURES:
            raise InstitutionError("bound-too-large", f"{count} structures exceed the limit of {MAX_STRUCTURES}")
        self.fragment: list[str] = []
        self._parsed: dict[str, tuple] = {}
        for text in fragment:
            e = parse_sexp(text)
            free = check_formula(e, self.sig)
            if free:
                raise InstitutionError("non-closed-formula", f"{text} has free variables {sorted(free)}", (text,))
            canon = format_sexp(e)
            if canon not in self._parsed:
                self.fragment.append(canon)
                self._parsed[canon] = e
        names = tuple(self.sig)
        self._sigs = tuple(s for k in range(len(names) + 1) for s in combinations(names, k))
        self._structs: dict = {}
        self._cats: dict = {}
        self._lock_build = threading.Lock()

    def signatures(self):
        return self._sigs

    def signature_morphisms(self):
        return tuple(
            SignatureMorphism(f"{_sig_name(s)}->{_sig_name(t)}", s, t)
            for s in self._sigs
            for t in self._sigs
            if set(s) <= set(t)
        )

    def structures(self, sigma) -> dict[str, RelStructure]:
        sigma = self.find_signature(tuple(sigma))
        with self._lock_build:
            st = self._structs.get(sigma)
            if st is None:
                st = {S.id: S for S in all_structures({r: self.sig[r] for r in sigma}, self.max_size)}
                self._structs[sigma] = st
        return st

    def formula_classes(self, sigma):
        sigma = self.find_signature(tuple(sigma))
        return tuple(f for f in self.fragment if relations_of(self._parsed[f]) <= set(sigma))

    def model_category(self, sigma) -> FinCategory:
        sigma = self.find_signature(tuple(sigma))
        with self._lock_build:
            C = self._cats.get(sigma)
        if C is not None:
            return C
        structs = self.structures(sigma)
        ids = list(structs)
        morphisms: list[Morphism] = []
        identities = {}
        maps: dict[str, tuple[str, str, tuple[int, ...]]] = {}
        lookup: dict[tuple[str, str, tuple[int, ...]], str] = {}
        for a in ids:
            for b in ids:
                for h in enumerate_homomorphisms(structs[a], structs[b]):
                    mid = f"{a} -> {b} | ({','.join(map(str, h))})"
                    morphisms.append(Morphism(mid, a, b))
                    maps[mid] = (a, b, h)
                    lookup[(a, b, h)] = mid
                    if a == b and h == tuple(structs[a].universe):
                        identities[a] = mid
        by_dom: dict[str, list[str]] = {}
        for m in morphisms:
            by_dom.setdefault(m.dom, []).append(m.id)
        compose = {}
        for f in morphisms:
            a, b, hf = maps[f.id]
            for g in by_dom.get(b, ()):
                _, c, hg = maps[g]
                compose[(g, f.id)] = lookup[(a, c, tuple(hg[x - 1] for x in hf))]
        C = FinCategory(ids, morphisms, identities, compose)
        with self._lock_build:
            self._cats.setdefault(sigma, C)
        return C

    def satisfies(self, sigma, model: str, phi) -> bool:
        sigma = tuple(sigma)
        if phi not in self.formula_classes(sigma):
            raise InstitutionError("unknown-formula-class", f"{phi!r} is not a class over {_sig_name(sigma)}", (phi,))
        try:
            S = self.structures(sigma)[model]
        except KeyError:
            raise InstitutionError("unknown-model", f"no model {model!r}", (model,)) from None
        return evaluate(S, self._parsed[phi])

    def translate_formula(self, sm: SignatureMorphism, phi):
        return phi

    def reduct_model(self, sm: SignatureMorphism, model: str) -> str:
        S = self.structures(sm.target)[model]
        return S.restrict(sm.source).id

    def classify(self, sigma, text: str):
        canon = format_sexp(parse_sexp(text))
        if canon not in self.formula_classes(sigma):
            raise InstitutionError("unknown-formula-class", f"{text} is not in the fragment over {_sig_name(tuple(sigma))}", (text,))
        return canon

    def describe_signature(self, sigma) -> str:
        return _sig_name(tuple(sigma))

    def model_payload(self, sigma, model: str):
        return self.structures(sigma)[model]

    @property
    def full_signature(self) -> tuple[str, ...]:
        return tuple(self.sig)


def build_fo_institution(sig: Mapping[str, int], max_size: int, fragment: Sequence[str]) -> FirstOrderInstitution:
    return FirstOrderInstitution(sig, max_size, fragment)


GRAPH_FRAGMENT = (
    "(exists x (E x x))",
    "(forall x (exists y (E x y)))",
    "(exists x (exists y (E x y)))",
    "(forall x (not (E x x)))",
    "(forall x (forall y (implies (E x y) (E y x))))",
)


def graphs_institution(max_size: int = 2, fragment: Sequence[str] = GRAPH_FRAGMENT) -> FirstOrderInstitution:
    """Directed graphs: one binary relation E."""
    return FirstOrderInstitution({"E": 2}, max_size, fragment)
