"""Named example categories, instance configurations and seeded random
generators used by the CLI ``examples`` command and the test-suite."""
from __future__ import annotations

import random
from itertools import combinations
from typing import Callable

from devhom.fincat import FinCategory, discrete, free_on_dag, monoid, point, poset

CIRCLE_ELEMENTS = ["v1", "v2", "v3", "e12", "e23", "e13"]
CIRCLE_RELATIONS = [("v1", "e12"), ("v2", "e12"), ("v2", "e23"), ("v3", "e23"), ("v1", "e13"), ("v3", "e13")]

# minimal six-vertex triangulation of the real projective plane
RP2_TRIANGLES = [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 5), (3, 4, 6), (2, 4, 5), (3, 5, 6), (2, 4, 6),
]


def circle() -> FinCategory:
    """Face poset of a triangle boundary: a hexagonal circle after subdivision."""
    return poset(CIRCLE_ELEMENTS, CIRCLE_RELATIONS)


def cospan() -> FinCategory:
    return poset(["a", "b", "c"], [("a", "c"), ("b", "c")])


def span() -> FinCategory:
    return poset(["a", "b", "c"], [("c", "a"), ("c", "b")])


def chain_poset(n: int) -> FinCategory:
    """0 < 1 < ... < n-1."""
    return poset([str(i) for i in range(n)], [(str(i), str(i + 1)) for i in range(n - 1)])


def face_poset(faces: list[tuple[int, ...]]) -> FinCategory:
    """Face poset (inclusion order) of the simplicial complex generated by ``faces``."""
    simplices = sorted({s for f in faces for k in range(1, len(f) + 1) for s in combinations(sorted(f), k)}, key=lambda s: (len(s), s))
    name = {s: "".join(map(str, s)) if max(s) < 10 else "_".join(map(str, s)) for s in simplices}
    rel = [(name[s], name[t]) for s in simplices for t in simplices if len(s) + 1 == len(t) and set(s) <= set(t)]
    return poset([name[s] for s in simplices], rel)


def rp2() -> FinCategory:
    return face_poset(RP2_TRIANGLES)


def sphere2() -> FinCategory:
    """Boundary of the tetrahedron."""
    return face_poset([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])


def z2() -> FinCategory:
    """The group Z/2 as a one-object category."""
    return monoid(["e", "g"], "e", {("e", "e"): "e", ("e", "g"): "g", ("g", "e"): "g", ("g", "g"): "e"})


CATEGORIES: dict[str, Callable[[], FinCategory]] = {
    "point": point,
    "arrow": lambda: chain_poset(2),
    "chain3": lambda: chain_poset(3),
    "chain4": lambda: chain_poset(4),
    "cospan": cospan,
    "span": span,
    "circle": circle,
    "discrete2": lambda: discrete(2),
    "discrete3": lambda: discrete(3),
    "sphere2": sphere2,
    "rp2": rp2,
    "z2": z2,
}


def named(name: str) -> FinCategory:
    try:
        return CATEGORIES[name]()
    except KeyError:
        raise KeyError(f"unknown example category {name!r}; known: {', '.join(CATEGORIES)}") from None


INSTANCE_CONFIGS = {
    "fields-2-3-5": {"schema": "devhom/1", "primes": [2, 3, 5], "degree_bound": 4},
    "fields-3": {"schema": "devhom/1", "primes": [3], "degree_bound": 2},
    "graphs": {
        "schema": "devhom/1",
        "signature": {"E": 2},
        "max_size": 2,
        "fragment": [
            "(exists x (E x x))",
            "(forall x (exists y (E x y)))",
            "(exists x (exists y (E x y)))",
            "(forall x (not (E x x)))",
            "(forall x (forall y (implies (E x y) (E y x))))",
        ],
    },
}


# ---------------------------------------------------------------------------
# random generators


def random_poset(rng: random.Random, n: int, density: float = 0.4, prefix: str = "p") -> FinCategory:
    """Random poset on n elements: relations i < j drawn with ``density``."""
    elems = [f"{prefix}{i}" for i in range(n)]
    rel = [(elems[i], elems[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return poset(elems, rel)


def random_poset_with_top(rng: random.Random, n: int, density: float = 0.4) -> FinCategory:
    """Random poset plus a top element above everything."""
    elems = [f"p{i}" for i in range(n)] + ["top"]
    rel = [(elems[i], elems[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    rel += [(e, "top") for e in elems[:-1]]
    return poset(elems, rel)


def random_dag_category(rng: random.Random, n: int, density: float = 0.35, max_parallel: int = 2) -> FinCategory:
    """Free category on a random acyclic multigraph (not necessarily thin)."""
    objs = [f"o{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                for k in range(rng.randint(1, max_parallel)):
                    edges.append((f"e{i}_{j}_{k}", objs[i], objs[j]))
    return free_on_dag(objs, edges)


def random_loop_free(rng: random.Random) -> FinCategory:
    if rng.random() < 0.5:
        return random_poset(rng, rng.randint(1, 6), rng.uniform(0.2, 0.7))
    return random_dag_category(rng, rng.randint(1, 4), rng.uniform(0.2, 0.6))


def random_nested_chain(rng: random.Random, stages: int = 4, stabilize_at: int = 2) -> list[tuple[list[str], list[tuple[str, str]]]]:
    """Stages (elements, relations) of a growing poset, constant from stage
    ``stabilize_at`` (1-based) on. Relations only point from older or equal
    elements to newer ones, so each stage is a subposet of the next."""
    elems: list[str] = []
    rels: list[tuple[str, str]] = []
    out = []
    for j in range(1, stages + 1):
        if j <= stabilize_at:
            new = [f"x{len(elems) + k}" for k in range(rng.randint(1, 3))]
            for b in new:
                for a in elems:
                    if rng.random() < 0.35:
                        rels.append((a, b))
            elems = elems + new
        out.append((list(elems), list(rels)))
    return out
