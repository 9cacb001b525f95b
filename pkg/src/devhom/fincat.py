"""Finite categories stored as explicit composition tables, with functors,
slices, products, coproducts, opposites, full subcategories and posetal
reflections.

All values are immutable once built and every iteration follows the listed
order of objects and morphisms, so downstream matrices are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from devhom.errors import CategoryError


class Morphism(NamedTuple):
    id: str
    dom: str
    cod: str


@dataclass(frozen=True)
class Diagnostic:
    code: str
    ids: tuple[str, ...]
    message: str = ""

    def __str__(self) -> str:
        return f"{self.code} @ ({','.join(self.ids)})"


class FinCategory:
    """A finite category. ``compose[(g, f)]`` is the id of g∘f.

    The constructor does not validate; use :func:`validate_category` or the
    builders, which refuse invalid input.
    """

    __slots__ = ("objects", "morphisms", "identities", "compose", "_mor", "_hom", "_out", "_in", "_idset")

    def __init__(
        self,
        objects: Iterable[str],
        morphisms: Iterable[Morphism | tuple[str, str, str]],
        identities: Mapping[str, str],
        compose: Mapping[tuple[str, str], str],
    ):
        self.objects = tuple(objects)
        self.morphisms = tuple(Morphism(*m) for m in morphisms)
        self.identities = dict(identities)
        self.compose = dict(compose)
        self._mor = {m.id: m for m in self.morphisms}
        self._idset = frozenset(self.identities.values())
        hom: dict[tuple[str, str], list[str]] = {}
        out: dict[str, list[str]] = {o: [] for o in self.objects}
        inn: dict[str, list[str]] = {o: [] for o in self.objects}
        for m in self.morphisms:
            hom.setdefault((m.dom, m.cod), []).append(m.id)
            out.setdefault(m.dom, []).append(m.id)
            inn.setdefault(m.cod, []).append(m.id)
        self._hom = {k: tuple(v) for k, v in hom.items()}
        self._out = {k: tuple(v) for k, v in out.items()}
        self._in = {k: tuple(v) for k, v in inn.items()}

    # -- access ---------------------------------------------------------------

    def morphism(self, f: str) -> Morphism:
        try:
            return self._mor[f]
        except KeyError:
            raise CategoryError("unknown-morphism", f"no morphism {f!r}", (f,)) from None

    def dom(self, f: str) -> str:
        return self.morphism(f).dom

    def cod(self, f: str) -> str:
        return self.morphism(f).cod

    def identity(self, a: str) -> str:
        try:
            return self.identities[a]
        except KeyError:
            raise CategoryError("unknown-object", f"no object {a!r}", (a,)) from None

    def is_identity(self, f: str) -> bool:
        return f in self._idset

    def comp(self, g: str, f: str) -> str:
        """g∘f."""
        try:
            return self.compose[(g, f)]
        except KeyError:
            raise CategoryError("not-composable", f"{g} o {f} is undefined", (g, f)) from None

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._hom.get((a, b), ())

    def out_of(self, a: str) -> tuple[str, ...]:
        return self._out.get(a, ())

    def into(self, b: str) -> tuple[str, ...]:
        return self._in.get(b, ())

    def has_object(self, a: str) -> bool:
        return a in self.identities or a in self._out

    def non_identities(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.morphisms if m.id not in self._idset)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.morphisms == other.morphisms
            and self.identities == other.identities
            and self.compose == other.compose
        )

    def __hash__(self) -> int:
        return hash((self.objects, self.morphisms))

    def __repr__(self) -> str:
        return f"FinCategory({self.n_objects} objects, {self.n_morphisms} morphisms)"

    def to_spec(self) -> dict:
        """Explicit JSON-ready description (inverse of ``build_from_spec``)."""
        return {
            "objects": list(self.objects),
            "morphisms": [{"id": m.id, "dom": m.dom, "cod": m.cod} for m in self.morphisms],
            "identities": {a: self.identities[a] for a in self.objects},
            "compose": [[g, f, gf] for (g, f), gf in self.compose.items()],
        }


# ---------------------------------------------------------------------------
# Validation


def validate_category(C: FinCategory) -> list[Diagnostic]:
    """One diagnostic per violated category law; empty iff C is a category."""
    diags: list[Diagnostic] = []
    seen: set[str] = set()
    for a in C.objects:
        if a in seen:
            diags.append(Diagnostic("duplicate-object", (a,), f"object {a} listed twice"))
        seen.add(a)
    obj = set(C.objects)
    seen = set()
    mor: dict[str, Morphism] = {}
    for m in C.morphisms:
        if m.id in seen:
            diags.append(Diagnostic("duplicate-morphism", (m.id,), f"morphism {m.id} listed twice"))
        seen.add(m.id)
        mor.setdefault(m.id, m)
        for end in (m.dom, m.cod):
            if end not in obj:
                diags.append(Diagnostic("unknown-object", (m.id, end), f"{m.id} touches unknown object {end}"))
    for a in C.objects:
        i = C.identities.get(a)
        if i is None:
            diags.append(Diagnostic("identity-missing", (a,), f"object {a} has no identity"))
        elif i not in mor or mor[i].dom != a or mor[i].cod != a:
            diags.append(Diagnostic("identity-typing", (a, i), f"{i} is not an endomorphism of {a}"))
    if diags:
        return diags

    for (g, f), gf in C.compose.items():
        if g not in mor or f not in mor or mor[f].cod != mor[g].dom:
            diags.append(Diagnostic("composition-typing", (g, f), f"entry for non-composable pair ({g},{f})"))
        elif gf not in mor:
            diags.append(Diagnostic("composition-not-closed", (g, f, gf), f"{g} o {f} = {gf} is not a morphism"))
        elif mor[gf].dom != mor[f].dom or mor[gf].cod != mor[g].cod:
            diags.append(Diagnostic("composition-typing", (g, f, gf), f"{g} o {f} = {gf} has the wrong ends"))
    by_dom: dict[str, list[str]] = {}
    for m in C.morphisms:
        by_dom.setdefault(m.dom, []).append(m.id)
    for f in C.morphisms:
        for g in by_dom.get(f.cod, ()):
            if (g, f.id) not in C.compose:
                diags.append(Diagnostic("composition-missing", (g, f.id), f"{g} o {f.id} is undefined"))
    if diags:
        return diags

    for f in C.morphisms:
        if C.compose[(C.identities[f.cod], f.id)] != f.id:
            diags.append(Diagnostic("identity", (C.identities[f.cod], f.id), f"id o {f.id} != {f.id}"))
        if C.compose[(f.id, C.identities[f.dom])] != f.id:
            diags.append(Diagnostic("identity", (f.id, C.identities[f.dom]), f"{f.id} o id != {f.id}"))
    for f in C.morphisms:
        for g in by_dom.get(f.cod, ()):
            gf = C.compose[(g, f.id)]
            for h in by_dom.get(mor[g].cod, ()):
                if C.compose[(h, gf)] != C.compose[(C.compose[(h, g)], f.id)]:
                    diags.append(Diagnostic("associativity", (h, g, f.id), f"({h} o {g}) o {f.id} != {h} o ({g} o {f.id})"))
    return diags


def _checked(C: FinCategory) -> FinCategory:
    diags = validate_category(C)
    if diags:
        first = diags[0]
        err = CategoryError(first.code, "; ".join(str(d) for d in diags[:5]), first.ids)
        err.diagnostics = diags
        raise err
    return C


# ---------------------------------------------------------------------------
# Builders


def thin_category(elements: Sequence[str], leq: Callable[[str, str], bool]) -> FinCategory:
    """Preorder category: one morphism a->b exactly when ``leq(a, b)``.

    ``leq`` must be reflexive and transitive. Identities are listed first,
    then strict relations in index order.
    """
    elements = list(elements)
    ids = {a: f"id_{a}" for a in elements}
    rel = {(a, b) for a in elements for b in elements if a == b or leq(a, b)}
    for a, b in rel:
        for c in elements:
            if (b, c) in rel and (a, c) not in rel:
                raise CategoryError("not-transitive", f"{a}<={b}<={c} but not {a}<={c}", (a, b, c))
    name = {(a, a): ids[a] for a in elements}
    morphisms = [Morphism(ids[a], a, a) for a in elements]
    for a in elements:
        for b in elements:
            if a != b and (a, b) in rel:
                name[(a, b)] = f"{a}->{b}"
                morphisms.append(Morphism(name[(a, b)], a, b))
    compose = {}
    for (a, b), f in name.items():
        for c in elements:
            if (b, c) in name:
                compose[(name[(b, c)], f)] = name[(a, c)]
    return FinCategory(elements, morphisms, ids, compose)


def poset(elements: Sequence[str], relations: Iterable[tuple[str, str]] = ()) -> FinCategory:
    """Thin category generated by ``relations`` (reflexive-transitive closure)."""
    elements = [str(e) for e in elements]
    known = set(elements)
    up: dict[str, set[str]] = {a: {a} for a in elements}
    for a, b in relations:
        a, b = str(a), str(b)
        for x in (a, b):
            if x not in known:
                raise CategoryError("unknown-object", f"relation mentions unknown element {x}", (x,))
        up[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in elements:
            new = set().union(*(up[b] for b in up[a]))
            if new != up[a]:
                up[a] = new
                changed = True
    return thin_category(elements, lambda a, b: b in up[a])


def discrete(n: int) -> FinCategory:
    objs = [str(i) for i in range(n)]
    return FinCategory(objs, [(f"id_{a}", a, a) for a in objs], {a: f"id_{a}" for a in objs},
                       {(f"id_{a}", f"id_{a}"): f"id_{a}" for a in objs})


def point() -> FinCategory:
    return FinCategory(["*"], [("id_*", "*", "*")], {"*": "id_*"}, {("id_*", "id_*"): "id_*"})


def arrow() -> FinCategory:
    """The category 0 -> 1."""
    return poset(["0", "1"], [("0", "1")])


def monoid(elements: Sequence[str], unit: str, table: Mapping[tuple[str, str], str]) -> FinCategory:
    """One-object category; ``table[(g, f)]`` is g∘f."""
    elements = list(elements)
    if unit not in elements:
        raise CategoryError("identity-missing", f"unit {unit} is not an element", (unit,))
    return _checked(FinCategory(["*"], [(e, "*", "*") for e in elements], {"*": unit}, dict(table)))


def free_on_dag(objects: Sequence[str], edges: Sequence[tuple[str, str, str]]) -> FinCategory:
    """Path category of an acyclic graph; ``edges`` are (id, dom, cod).

    A path e_1 then e_2 ... is named "e_k.....e_1" (composition order).
    """
    objects = list(objects)
    ids = {a: f"id_{a}" for a in objects}
    out: dict[str, list[tuple[str, str]]] = {a: [] for a in objects}
    for e, d, c in edges:
        out[d].append((e, c))
    paths: list[tuple[str, str, tuple[str, ...]]] = []

    def walk(start, here, trail, depth):
        if depth > len(objects):
            raise CategoryError("not-acyclic", "edge graph has a cycle", (start,))
        for e, c in out[here]:
            t = trail + (e,)
            paths.append((start, c, t))
            walk(start, c, t, depth + 1)

    for a in objects:
        walk(a, a, (), 0)

    def name(t):
        return ".".join(reversed(t))

    morphisms = [Morphism(ids[a], a, a) for a in objects] + [Morphism(name(t), d, c) for d, c, t in paths]
    by_dom: dict[str, list[tuple[str, tuple[str, ...]]]] = {a: [(a, ())] for a in objects}
    for d, c, t in paths:
        by_dom[d].append((c, t))
    pid = lambda a, t: name(t) if t else ids[a]  # noqa: E731
    compose = {}
    for a in objects:
        for b, t1 in by_dom[a]:
            for c, t2 in by_dom[b]:
                compose[(pid(b, t2), pid(a, t1))] = pid(a, t1 + t2)
    return FinCategory(objects, morphisms, ids, compose)


def build_from_spec(spec: Mapping) -> FinCategory:
    """Build and validate a category from a JSON-style description.

    Accepted shapes::

        {"objects": [...], "morphisms": [{"id", "dom", "cod"}, ...],
         "compose": [[g, f, gf], ...], "identities": {obj: id}}   # identities optional
        {"poset": {"elements": [...], "relations": [[a, b], ...]}}
        {"discrete": n}
        {"monoid": {"elements": [...], "unit": e, "table": [[g, f, gf], ...]}}

    Without ``identities``, each object x gets ``id_x`` (reused if already
    listed) and composites with identities are filled in.
    """
    if "poset" in spec:
        p = spec["poset"]
        return _checked(poset(p["elements"], [tuple(r) for r in p.get("relations", [])]))
    if "discrete" in spec:
        return discrete(int(spec["discrete"]))
    if "monoid" in spec:
        m = spec["monoid"]
        return monoid(m["elements"], m["unit"], {(g, f): gf for g, f, gf in m["table"]})
    objects = [str(o) for o in spec["objects"]]
    morphisms = [Morphism(str(m["id"]), str(m["dom"]), str(m["cod"])) for m in spec.get("morphisms", [])]
    compose = {(g, f): gf for g, f, gf in spec.get("compose", [])}
    if "identities" in spec:
        identities = dict(spec["identities"])
    else:
        listed = {m.id: m for m in morphisms}
        identities = {}
        extra = []
        for a in objects:
            i = f"id_{a}"
            identities[a] = i
            if i not in listed:
                extra.append(Morphism(i, a, a))
        morphisms = extra + morphisms
        for m in morphisms:
            compose.setdefault((identities.get(m.cod, ""), m.id), m.id)
            compose.setdefault((m.id, identities.get(m.dom, "")), m.id)
    return _checked(FinCategory(objects, morphisms, identities, compose))


# ---------------------------------------------------------------------------
# Functors


@dataclass(frozen=True)
class FunctorData:
    source: FinCategory
    target: FinCategory
    object_map: Mapping[str, str]
    morphism_map: Mapping[str, str]

    def __call__(self, x: str) -> str:
        if x in self.object_map:
            return self.object_map[x]
        return self.morphism_map[x]


def validate_functor(F: FunctorData) -> list[Diagnostic]:
    S, T = F.source, F.target
    diags = []
    for a in S.objects:
        if F.object_map.get(a) not in T.identities:
            diags.append(Diagnostic("object-map", (a,), f"object {a} is not sent to an object"))
    if diags:
        return diags
    for m in S.morphisms:
        fm = F.morphism_map.get(m.id)
        if fm is None or fm not in T._mor:
            diags.append(Diagnostic("morphism-map", (m.id,), f"{m.id} is not sent to a morphism"))
        elif T.dom(fm) != F.object_map[m.dom] or T.cod(fm) != F.object_map[m.cod]:
            diags.append(Diagnostic("functor-typing", (m.id, fm), f"{m.id} -> {fm} breaks domains"))
    if diags:
        return diags
    for a in S.objects:
        if F.morphism_map[S.identities[a]] != T.identities[F.object_map[a]]:
            diags.append(Diagnostic("functor-identity", (a,), f"identity of {a} not preserved"))
    for (g, f), gf in S.compose.items():
        if T.comp(F.morphism_map[g], F.morphism_map[f]) != F.morphism_map[gf]:
            diags.append(Diagnostic("functor-composition", (g, f), f"F({g} o {f}) != F({g}) o F({f})"))
    return diags


def identity_functor(C: FinCategory) -> FunctorData:
    return FunctorData(C, C, {a: a for a in C.objects}, {m.id: m.id for m in C.morphisms})


def to_point(C: FinCategory) -> FunctorData:
    P = point()
    return FunctorData(C, P, {a: "*" for a in C.objects}, {m.id: "id_*" for m in C.morphisms})


def inclusion(sub: FinCategory, C: FinCategory) -> FunctorData:
    """Inclusion of a subcategory that reuses the ambient ids."""
    F = FunctorData(sub, C, {a: a for a in sub.objects}, {m.id: m.id for m in sub.morphisms})
    diags = validate_functor(F)
    if diags:
        raise CategoryError(diags[0].code, "not a subcategory", diags[0].ids)
    return F


def compose_functors(G: FunctorData, F: FunctorData) -> FunctorData:
    """G∘F."""
    return FunctorData(
        F.source,
        G.target,
        {a: G.object_map[b] for a, b in F.object_map.items()},
        {f: G.morphism_map[g] for f, g in F.morphism_map.items()},
    )


def is_isomorphism(F: FunctorData) -> bool:
    """True iff F is a functor bijective on objects and on morphisms."""
    if validate_functor(F):
        return False
    objs = set(F.object_map[a] for a in F.source.objects)
    mors = set(F.morphism_map[m.id] for m in F.source.morphisms)
    return (
        len(objs) == F.source.n_objects == F.target.n_objects
        and len(mors) == F.source.n_morphisms == F.target.n_morphisms
    )


# ---------------------------------------------------------------------------
# Slices


@dataclass(frozen=True)
class SliceResult:
    slice: FinCategory
    projection: FunctorData
    witness: Mapping[str, tuple[str, str]]

    @property
    def category(self) -> FinCategory:
        return self.slice


def _slice_name(a: str, s: str) -> str:
    return f"({a}, {s})"


def _slice_core(
    source: FinCategory,
    target: FinCategory,
    obj: Callable[[str], str],
    mor: Callable[[str], str],
    X: str,
    keep: Callable[[str], bool],
) -> SliceResult:
    """Comma category u/X for a functor given by (obj, mor) on object/morphism ids."""
    objs: list[str] = []
    witness: dict[str, tuple[str, str]] = {}
    by_src: dict[str, list[tuple[str, str]]] = {}
    for a in source.objects:
        if not keep(a):
            continue
        for s in target.hom(obj(a), X):
            n = _slice_name(a, s)
            objs.append(n)
            witness[n] = (a, s)
            by_src.setdefault(a, []).append((n, s))
    morphisms: list[Morphism] = []
    identities: dict[str, str] = {}
    proj_m: dict[str, str] = {}
    # one slice arrow per (underlying arrow, slice source, slice target)
    by_key: dict[tuple[str, str, str], str] = {}
    for m in source.morphisms:
        if not keep(m.dom) or not keep(m.cod):
            continue
        um = mor(m.id)
        for n_a, s in by_src.get(m.dom, ()):
            for n_b, t in by_src.get(m.cod, ()):
                if target.comp(t, um) != s:
                    continue
                mid = f"({m.id}: {s} -> {t})" if source is target else f"({m.id}: {n_a} -> {n_b})"
                morphisms.append(Morphism(mid, n_a, n_b))
                proj_m[mid] = m.id
                by_key[(m.id, n_a, n_b)] = mid
                if source.is_identity(m.id) and n_a == n_b:
                    identities[n_a] = mid
    compose = {}
    for f in morphisms:
        for g in morphisms:
            if g.dom == f.cod:
                gf = source.comp(proj_m[g.id], proj_m[f.id])
                compose[(g.id, f.id)] = by_key[(gf, f.dom, g.cod)]
    S = FinCategory(objs, morphisms, identities, compose)
    P = FunctorData(S, source, {n: witness[n][0] for n in objs}, proj_m)
    return SliceResult(S, P, witness)


def slice(C: FinCategory, X: str, over: Iterable[str] | None = None) -> SliceResult:
    """C/X: objects (a, s: a -> X), morphisms u with t∘u = s.

    With ``over`` only objects (a, s) with a in ``over`` are kept (the slice
    of the full subcategory on ``over``).
    """
    if not C.has_object(X):
        raise CategoryError("unknown-object", f"no object {X!r}", (X,))
    if over is None:
        keep = lambda a: True  # noqa: E731
    else:
        allowed = set(over)
        for a in allowed:
            if not C.has_object(a):
                raise CategoryError("unknown-object", f"no object {a!r}", (a,))
        keep = allowed.__contains__
    return _slice_core(C, C, lambda a: a, lambda f: f, X, keep)


def slice_over(C: FinCategory, S: Iterable[str], X: str) -> SliceResult:
    return slice(C, X, over=S)


def slice_of_functor(u: FunctorData, b: str) -> SliceResult:
    """u/b: objects (a, s: u(a) -> b), morphisms f: a -> a' with s'∘u(f) = s."""
    if not u.target.has_object(b):
        raise CategoryError("unknown-object", f"no object {b!r}", (b,))
    return _slice_core(u.source, u.target, u.object_map.__getitem__, u.morphism_map.__getitem__, b, lambda a: True)


# ---------------------------------------------------------------------------
# Combinations


def product(C: FinCategory, D: FinCategory) -> FinCategory:
    def pair(x, y):
        return f"({x},{y})"

    objs = [pair(a, b) for a, b in _cartesian(C.objects, D.objects)]
    mors = [Morphism(pair(f.id, g.id), pair(f.dom, g.dom), pair(f.cod, g.cod)) for f, g in _cartesian(C.morphisms, D.morphisms)]
    ids = {pair(a, b): pair(C.identities[a], D.identities[b]) for a, b in _cartesian(C.objects, D.objects)}
    compose = {
        (pair(g1, g2), pair(f1, f2)): pair(h1, h2)
        for (g1, f1), h1 in C.compose.items()
        for (g2, f2), h2 in D.compose.items()
    }
    return FinCategory(objs, mors, ids, compose)


def coproduct(C: FinCategory, D: FinCategory, tags: tuple[str, str] = ("0", "1")) -> FinCategory:
    objs, mors, ids, compose = [], [], {}, {}
    for tag, K in zip(tags, (C, D)):
        t = lambda x, tag=tag: f"{tag}:{x}"  # noqa: E731
        objs += [t(a) for a in K.objects]
        mors += [Morphism(t(m.id), t(m.dom), t(m.cod)) for m in K.morphisms]
        ids.update({t(a): t(i) for a, i in K.identities.items()})
        compose.update({(t(g), t(f)): t(gf) for (g, f), gf in K.compose.items()})
    return FinCategory(objs, mors, ids, compose)


def opposite(C: FinCategory) -> FinCategory:
    return FinCategory(
        C.objects,
        [Morphism(m.id, m.cod, m.dom) for m in C.morphisms],
        C.identities,
        {(f, g): gf for (g, f), gf in C.compose.items()},
    )


def full_subcategory(C: FinCategory, objs: Iterable[str]) -> FinCategory:
    keep = set(objs)
    for a in keep:
        if not C.has_object(a):
            raise CategoryError("unknown-object", f"no object {a!r}", (a,))
    mors = [m for m in C.morphisms if m.dom in keep and m.cod in keep]
    ids = {m.id for m in mors}
    return FinCategory(
        [a for a in C.objects if a in keep],
        mors,
        {a: i for a, i in C.identities.items() if a in keep},
        {k: v for k, v in C.compose.items() if k[0] in ids and k[1] in ids},
    )


def combine(mode: str, C: FinCategory, D: FinCategory | None = None, objs: Iterable[str] | None = None) -> FinCategory:
    if mode in ("product", "coproduct") and D is None:
        raise CategoryError("missing-argument", f"{mode} needs a second category")
    if mode == "full_subcategory" and objs is None:
        raise CategoryError("missing-argument", "full_subcategory needs an object set")
    if mode == "product":
        return product(C, D)
    if mode == "coproduct":
        return coproduct(C, D)
    if mode == "opposite":
        return opposite(C)
    if mode == "full_subcategory":
        return full_subcategory(C, objs)
    raise CategoryError("unknown-mode", f"unknown combine mode {mode!r}")


# ---------------------------------------------------------------------------
# Analysis


@dataclass(frozen=True)
class CategoryAnalysis:
    terminal_objects: tuple[str, ...]
    initial_objects: tuple[str, ...]
    loop_free: bool
    longest_chain: int | None


def terminal_objects(C: FinCategory) -> tuple[str, ...]:
    return tuple(t for t in C.objects if all(len(C.hom(a, t)) == 1 for a in C.objects))


def initial_objects(C: FinCategory) -> tuple[str, ...]:
    return tuple(t for t in C.objects if all(len(C.hom(t, a)) == 1 for a in C.objects))


def is_loop_free(C: FinCategory) -> bool:
    for m in C.morphisms:
        if C.is_identity(m.id):
            continue
        if m.dom == m.cod:
            return False
        if any(not C.is_identity(g) for g in C.hom(m.cod, m.dom)):
            return False
    return True


def analyze_category(C: FinCategory) -> CategoryAnalysis:
    loop_free = is_loop_free(C)
    longest = None
    if loop_free:
        # longest path in the (acyclic) graph of non-identity morphisms
        succ: dict[str, set[str]] = {a: set() for a in C.objects}
        for f in C.non_identities():
            succ[C.dom(f)].add(C.cod(f))
        memo: dict[str, int] = {}

        def depth(a: str) -> int:
            if a not in memo:
                memo[a] = max((1 + depth(b) for b in succ[a]), default=0)
            return memo[a]

        longest = max((depth(a) for a in C.objects), default=0)
    return CategoryAnalysis(terminal_objects(C), initial_objects(C), loop_free, longest)


def is_preorder(C: FinCategory) -> bool:
    return all(len(v) <= 1 for v in C._hom.values())


def posetal_reflection(C: FinCategory) -> tuple[FinCategory, FunctorData]:
    """Quotient of a preorder by mutual comparability, with the quotient functor.

    Each class is named by its first-listed member.
    """
    if not is_preorder(C):
        bad = next(k for k, v in C._hom.items() if len(v) > 1)
        raise CategoryError("not-a-preorder", f"several morphisms {bad[0]} -> {bad[1]}", bad)
    rep: dict[str, str] = {}
    for a in C.objects:
        if a in rep:
            continue
        for b in C.objects:
            if b not in rep and C.hom(a, b) and C.hom(b, a):
                rep[b] = a
    reps = [a for a in C.objects if rep[a] == a]
    P = thin_category(reps, lambda x, y: bool(C.hom(x, y)))
    name = {(m.dom, m.cod): m.id for m in P.morphisms}
    F = FunctorData(
        C,
        P,
        {a: rep[a] for a in C.objects},
        {m.id: name[(rep[m.dom], rep[m.cod])] for m in C.morphisms},
    )
    return P, F
