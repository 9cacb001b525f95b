"""Nerve chains of finite categories and the chain/cochain complexes they
carry with functor coefficients.

A chain of length n is stored source-first: objects x_0 -> x_1 -> ... -> x_n
with arrows[k] : x_k -> x_{k+1}. Face i removes x_{n-i}: face n drops the
source x_0, face 0 drops the final object x_n, and an inner face composes
the two arrows meeting at the removed object. Only nondegenerate chains (no
identity arrow) are enumerated, and faces that produce an identity are sent
to zero.

Both complexes place the coefficient group of a chain at its source x_0.
For covariant coefficients this is the classical choice; for contravariant
coefficients it is the choice for which H^0 of a category with a terminal
object t is T(t).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from devhom.errors import CoefficientError, ComplexError
from devhom.fincat import FinCategory, FunctorData, analyze_category
from devhom.homalg import ChainComplex, EulerData, IntMatrix, PresentedGroup


@dataclass(frozen=True)
class NerveChain:
    objects: tuple[str, ...]
    arrows: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.arrows)

    @property
    def source(self) -> str:
        return self.objects[0]

    @property
    def target(self) -> str:
        return self.objects[-1]

    def label(self) -> str:
        if not self.arrows:
            return f"<{self.objects[0]}>"
        return "<" + ", ".join(self.arrows) + ">"


class _Degenerate:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "DEGENERATE"


DEGENERATE = _Degenerate()


def chain_of(C: FinCategory, arrows: tuple[str, ...] | list[str], start: str | None = None) -> NerveChain:
    """Build a chain from arrows (checks composability)."""
    arrows = tuple(arrows)
    if not arrows:
        if start is None:
            raise ValueError("a 0-chain needs its object")
        return NerveChain((start,), ())
    objs = [C.dom(arrows[0])]
    for f in arrows:
        if C.dom(f) != objs[-1]:
            raise ValueError(f"arrows not composable at {f}")
        objs.append(C.cod(f))
    return NerveChain(tuple(objs), arrows)


def enumerate_chains(C: FinCategory, n: int) -> list[NerveChain]:
    """All nondegenerate n-chains, ordered by arrows in listed morphism order."""
    if n == 0:
        return [NerveChain((a,), ()) for a in C.objects]
    out_nonid = {a: [f for f in C.out_of(a) if not C.is_identity(f)] for a in C.objects}
    result: list[NerveChain] = []

    def extend(objs: list[str], arrows: list[str]):
        if len(arrows) == n:
            result.append(NerveChain(tuple(objs), tuple(arrows)))
            return
        for f in out_nonid[objs[-1]]:
            objs.append(C.cod(f))
            arrows.append(f)
            extend(objs, arrows)
            objs.pop()
            arrows.pop()

    for f in C.non_identities():
        extend([C.dom(f), C.cod(f)], [f])
    return result


def count_chains(C: FinCategory, n: int) -> int:
    """Number of nondegenerate n-chains, by counting paths of non-identities."""
    ways = {a: 1 for a in C.objects}
    for _ in range(n):
        ways = {a: sum(ways[C.cod(f)] for f in C.out_of(a) if not C.is_identity(f)) for a in C.objects}
    return sum(ways.values())


# dense differentials above this many entries are refused rather than built
MAX_MATRIX_ENTRIES = 20_000_000


def face(C: FinCategory, c: NerveChain, i: int, normalize: bool = True):
    """The i-th face of an n-chain (n >= 1).

    With ``normalize`` a face containing an identity arrow is reported as
    DEGENERATE; without it the raw chain is returned.
    """
    n = c.n
    if n < 1 or not 0 <= i <= n:
        raise IndexError(f"face {i} of a {n}-chain")
    if i == n:
        objs, arrows = c.objects[1:], c.arrows[1:]
    elif i == 0:
        objs, arrows = c.objects[:-1], c.arrows[:-1]
    else:
        k = n - i  # removed object x_k sits between arrows[k-1] and arrows[k]
        composite = C.comp(c.arrows[k], c.arrows[k - 1])
        objs = c.objects[:k] + c.objects[k + 1 :]
        arrows = c.arrows[: k - 1] + (composite,) + c.arrows[k + 1 :]
    if normalize and any(C.is_identity(f) for f in arrows):
        return DEGENERATE
    return NerveChain(objs, arrows)


# ---------------------------------------------------------------------------
# Coefficient systems


def _congruent(a: IntMatrix, b: IntMatrix, orders: tuple[int, ...]) -> bool:
    if a.shape != b.shape:
        return False
    for i, o in enumerate(orders):
        for x, y in zip(a.data[i], b.data[i]):
            d = x - y
            if (o == 0 and d) or (o and d % o):
                return False
    return True


@dataclass(frozen=True)
class CoefficientSystem:
    """A functor into finitely generated abelian groups.

    Matrices act on generator coordinates. Covariant: T(f) : T(dom f) ->
    T(cod f). Contravariant: T(f) : T(cod f) -> T(dom f).
    """

    base: FinCategory
    variance: str
    groups: Mapping[str, PresentedGroup]
    maps: Mapping[str, IntMatrix]

    def group_at(self, a: str) -> PresentedGroup:
        return self.groups[a]

    def map_at(self, f: str) -> IntMatrix:
        return self.maps[f]

    def is_free(self) -> bool:
        return all(g.free_rank == g.ngens for g in self.groups.values())


def check_coefficients(T: CoefficientSystem) -> None:
    C = T.base
    if T.variance not in ("covariant", "contravariant"):
        raise CoefficientError("variance", f"unknown variance {T.variance!r}")
    for a in C.objects:
        if a not in T.groups:
            raise CoefficientError("missing-group", f"no group at {a}", (a,))
    for m in C.morphisms:
        src, tgt = (m.dom, m.cod) if T.variance == "covariant" else (m.cod, m.dom)
        G, H = T.groups[src], T.groups[tgt]
        M = T.maps.get(m.id)
        if M is None or M.shape != (H.ngens, G.ngens):
            raise CoefficientError("map-shape", f"map at {m.id} missing or of wrong shape", (m.id,))
        for j, o in enumerate(G.orders):
            if o == 0:
                continue
            col = IntMatrix(H.ngens, 1, [[o * x] for x in M.column(j)])
            if not _congruent(col, IntMatrix(H.ngens, 1), H.orders):
                raise CoefficientError("not-well-defined", f"map at {m.id} does not respect relations", (m.id,))
    for a in C.objects:
        i = C.identities[a]
        if not _congruent(T.maps[i], IntMatrix.identity(T.groups[a].ngens), T.groups[a].orders):
            raise CoefficientError("functoriality", f"identity at {a} is not sent to the identity", (i,))
    for (g, f), gf in C.compose.items():
        if T.variance == "covariant":
            lhs, orders = T.maps[g] @ T.maps[f], T.groups[C.cod(g)].orders
        else:
            lhs, orders = T.maps[f] @ T.maps[g], T.groups[C.dom(f)].orders
        if not _congruent(lhs, T.maps[gf], orders):
            raise CoefficientError("functoriality", f"composition {g} o {f} = {gf} not preserved", (g, f, gf))


def constant_coefficients(C: FinCategory, group: PresentedGroup | None = None, variance: str = "covariant") -> CoefficientSystem:
    group = group or PresentedGroup(1)
    I = IntMatrix.identity(group.ngens)
    return CoefficientSystem(C, variance, {a: group for a in C.objects}, {m.id: I for m in C.morphisms})


def pullback_coefficients(T: CoefficientSystem, F: FunctorData) -> CoefficientSystem:
    """T∘F on the source of F."""
    if F.target is not T.base and F.target != T.base:
        raise CoefficientError("base-mismatch", "functor does not land in the coefficient base")
    return CoefficientSystem(
        F.source,
        T.variance,
        {a: T.groups[F.object_map[a]] for a in F.source.objects},
        {m.id: T.maps[F.morphism_map[m.id]] for m in F.source.morphisms},
    )


def make_coefficients(kind: str, *args, **kwargs) -> CoefficientSystem:
    """``constant(C, group, variance)``, ``pullback(T, F)`` or
    ``explicit(C, variance, groups, maps)`` (maps as row lists or IntMatrix)."""
    if kind == "constant":
        T = constant_coefficients(*args, **kwargs)
    elif kind == "pullback":
        T = pullback_coefficients(*args, **kwargs)
    elif kind == "explicit":
        C, variance, groups, maps = args
        mats = {}
        for m in C.morphisms:
            raw = maps.get(m.id)
            if raw is None:
                raise CoefficientError("map-shape", f"no map at {m.id}", (m.id,))
            if isinstance(raw, IntMatrix):
                mats[m.id] = raw
            else:
                src, tgt = (m.dom, m.cod) if variance == "covariant" else (m.cod, m.dom)
                mats[m.id] = IntMatrix(groups[tgt].ngens, groups[src].ngens, raw) if raw else IntMatrix(groups[tgt].ngens, groups[src].ngens)
        T = CoefficientSystem(C, variance, dict(groups), mats)
    else:
        raise CoefficientError("unknown-kind", f"unknown coefficient kind {kind!r}")
    check_coefficients(T)
    return T


# ---------------------------------------------------------------------------
# Complexes


def exact_above(C: FinCategory, D: int) -> bool:
    """True iff C has no nondegenerate chain of length D + 1."""
    a = analyze_category(C)
    return a.loop_free and a.longest_chain <= D


def nerve_euler_characteristic(C: FinCategory, T: CoefficientSystem | None = None) -> EulerData:
    """Alternating sum over all nondegenerate chains of the free rank of the
    coefficient group at the chain source.

    Exact for loop-free categories, whose nerve is finite; None otherwise.
    Chains are counted by dynamic programming, not listed.
    """
    a = analyze_category(C)
    if not a.loop_free:
        return EulerData(None, "chain counts", False)
    weight = {x: sum(1 for o in (T.groups[x].orders if T else (0,)) if o == 0) for x in C.objects}
    succ = {x: [C.cod(f) for f in C.out_of(x) if not C.is_identity(f)] for x in C.objects}
    count = {x: 1 for x in C.objects}  # chains of length n starting at x
    chi = sum(weight.values())
    for n in range(1, a.longest_chain + 1):
        count = {x: sum(count[y] for y in succ[x]) for x in C.objects}
        chi += (-1) ** n * sum(weight[x] * count[x] for x in C.objects)
    return EulerData(chi, "chain counts", True)


def _layout(C: FinCategory, T: CoefficientSystem, D: int):
    counts = [count_chains(C, n) for n in range(D + 1)]
    for n in range(1, D + 1):
        if counts[n] * counts[n - 1] > MAX_MATRIX_ENTRIES:
            raise ComplexError(
                "too-large",
                f"the degree-{n} differential would be {counts[n - 1]}x{counts[n]}; lower the truncation",
                (n,),
            )
    chains = {n: enumerate_chains(C, n) for n in range(D + 1)}
    offsets, orders, basis = {}, {}, {}
    for n, cs in chains.items():
        off, o, b, pos = {}, [], [], 0
        for c in cs:
            g = T.groups[c.source]
            off[c] = pos
            pos += g.ngens
            o.extend(g.orders)
            b.extend((c.label(), k) for k in range(g.ngens))
        offsets[n], orders[n], basis[n] = off, tuple(o), tuple(b)
    return chains, offsets, orders, basis


def _face_blocks(C: FinCategory, T: CoefficientSystem, c: NerveChain):
    """(face chain, sign, block) for every nonzero face of c; block maps
    between the source groups in the direction the variance dictates."""
    n = c.n
    for i in range(n + 1):
        f = face(C, c, i)
        if f is DEGENERATE:
            continue
        sign = -1 if i % 2 else 1
        if i < n:
            block = None  # identity
        else:
            block = T.maps[c.arrows[0]]
        yield f, sign, block


def assemble_chain_complex(C: FinCategory, T: CoefficientSystem | None = None, D: int = 4) -> ChainComplex:
    """Normalized nerve chain complex with covariant coefficients, degrees 0..D."""
    T = T or constant_coefficients(C)
    if T.variance != "covariant":
        raise CoefficientError("variance", "chain complexes need covariant coefficients")
    chains, offsets, orders, basis = _layout(C, T, D)
    diffs = {}
    for n in range(1, D + 1):
        M = IntMatrix(len(orders[n - 1]), len(orders[n]))
        for c in chains[n]:
            col0 = offsets[n][c]
            k = T.groups[c.source].ngens
            for f, sign, block in _face_blocks(C, T, c):
                row0 = offsets[n - 1][f]
                if block is None:
                    for t in range(k):
                        M.data[row0 + t][col0 + t] += sign
                else:
                    for r in range(block.rows):
                        for t in range(k):
                            M.data[row0 + r][col0 + t] += sign * block.data[r][t]
        diffs[n] = M
    return ChainComplex("chain", orders, diffs, D, exact_above(C, D), basis, "covariant")


def assemble_cochain_complex(C: FinCategory, T: CoefficientSystem | None = None, D: int = 4) -> ChainComplex:
    """Normalized nerve cochain complex with contravariant coefficients, degrees 0..D."""
    T = T or constant_coefficients(C, variance="contravariant")
    if T.variance != "contravariant":
        raise CoefficientError("variance", "cochain complexes need contravariant coefficients")
    chains, offsets, orders, basis = _layout(C, T, D)
    diffs = {}
    for n in range(1, D + 1):
        M = IntMatrix(len(orders[n]), len(orders[n - 1]))
        for c in chains[n]:
            row0 = offsets[n][c]
            k = T.groups[c.source].ngens
            for f, sign, block in _face_blocks(C, T, c):
                col0 = offsets[n - 1][f]
                if block is None:
                    for t in range(k):
                        M.data[row0 + t][col0 + t] += sign
                else:
                    for r in range(block.rows):
                        for t in range(block.cols):
                            M.data[row0 + r][col0 + t] += sign * block.data[r][t]
        diffs[n - 1] = M
    return ChainComplex("cochain", orders, diffs, D, exact_above(C, D), basis, "contravariant")


def chain_map_of_functor(F: FunctorData, D: int = 4) -> dict[int, IntMatrix]:
    """Chain map between constant-Z chain complexes induced by a functor.

    A chain whose image contains an identity arrow goes to zero.
    """
    A, B = F.source, F.target
    out = {}
    for n in range(D + 1):
        src = enumerate_chains(A, n)
        tgt = {c: i for i, c in enumerate(enumerate_chains(B, n))}
        M = IntMatrix(len(tgt), len(src))
        for j, c in enumerate(src):
            if n == 0:
                img = NerveChain((F.object_map[c.source],), ())
            else:
                arrows = tuple(F.morphism_map[f] for f in c.arrows)
                if any(B.is_identity(f) for f in arrows):
                    continue
                img = NerveChain(tuple(F.object_map[x] for x in c.objects), arrows)
            M.data[tgt[img]][j] = 1
        out[n] = M
    return out
