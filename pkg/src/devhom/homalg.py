"""Exact integer linear algebra and homology of finitely generated complexes.

Everything here works over arbitrary-precision Python integers. Matrices are
dense; the sizes that show up in desk-scale nerve computations are small
enough that sparse storage would only add noise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from devhom.errors import ComplexError


class IntMatrix:
    """Dense integer matrix with an explicit shape (so 0 x n is representable)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[int]] | None = None):
        if data is None:
            data = [[0] * cols for _ in range(rows)]
        else:
            data = [list(r) for r in data]
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError(f"entry grid does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        if cols is None:
            if not rows:
                raise ValueError("column count needed for an empty row list")
            cols = len(rows[0])
        return cls(len(rows), cols, rows)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols)

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int, cols: int) -> IntMatrix:
        m = cls(rows, cols)
        for i, e in enumerate(entries):
            m.data[i][i] = e
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}, {self.cols}, {self.data})"

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for row in self.data:
            acc = [0] * other.cols
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[k]):
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return IntMatrix(self.rows, other.cols, out)

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, [[-x for x in r] for r in self.data])

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return IntMatrix(
            self.rows, self.cols, [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)]
        )

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, [list(c) for c in zip(*self.data)] if self.rows else [[] for _ in range(self.cols)])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.data]

    def apply(self, v: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(r, v)) for r in self.data]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.data]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


def block_matrix(blocks: Sequence[Sequence[IntMatrix]]) -> IntMatrix:
    """Assemble a matrix from a grid of blocks with consistent shapes."""
    row_heights = [row[0].rows for row in blocks]
    col_widths = [b.cols for b in blocks[0]]
    out = IntMatrix(sum(row_heights), sum(col_widths))
    r0 = 0
    for bi, row in enumerate(blocks):
        c0 = 0
        for bj, b in enumerate(row):
            if b.shape != (row_heights[bi], col_widths[bj]):
                raise ValueError("inconsistent block shapes")
            for i in range(b.rows):
                out.data[r0 + i][c0 : c0 + b.cols] = b.data[i]
            c0 += b.cols
        r0 += row_heights[bi]
    return out


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """U @ A @ V == diag(invariant_factors) padded with zeros.

    ``U_inv`` and ``V_inv`` are carried along because homology bases need
    coordinates with respect to the transformed bases.
    """

    U: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]
    U_inv: IntMatrix = field(repr=False)
    V_inv: IntMatrix = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _diagonalize(A: IntMatrix, track: bool):
    m, n = A.shape
    a = [list(r) for r in A.data]
    U = IntMatrix.identity(m).data if track else None
    Ui = IntMatrix.identity(m).data if track else None
    V = IntMatrix.identity(n).data if track else None
    Vi = IntMatrix.identity(n).data if track else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if track:
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        if track:
            for r in V:
                r[j], r[k] = r[k], r[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(i, k, q):
        # row_i += q * row_k
        ri, rk = a[i], a[k]
        for c in range(n):
            if rk[c]:
                ri[c] += q * rk[c]
        if track:
            Ui_, Uk = U[i], U[k]
            for c in range(m):
                Ui_[c] += q * Uk[c]
            for r in Ui:
                r[k] -= q * r[i]

    def add_col(j, k, q):
        # col_j += q * col_k
        for r in a:
            if r[k]:
                r[j] += q * r[k]
        if track:
            for r in V:
                r[j] += q * r[k]
            Vj, Vk = Vi[j], Vi[k]
            for c in range(n):
                Vk[c] -= q * Vj[c]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        if track:
            U[i] = [-x for x in U[i]]
            for r in Ui:
                r[i] = -r[i]

    factors: list[int] = []
    t = 0
    while t < min(m, n):
        # smallest nonzero |entry| in the trailing block, ties by row-major position
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        p = a[t][t]
        dirty = False
        for i in range(t + 1, m):
            if a[i][t]:
                add_row(i, t, -(a[i][t] // p))
                dirty = dirty or a[i][t] != 0
        for j in range(t + 1, n):
            if a[t][j]:
                add_col(j, t, -(a[t][j] // p))
                dirty = dirty or a[t][j] != 0
        if dirty:
            continue
        bad = next(
            (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
            None,
        )
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if p < 0:
            negate_row(t)
        factors.append(a[t][t])
        t += 1
    if not track:
        return factors, None
    return factors, (U, Ui, V, Vi)


def smith_normal_form(A: IntMatrix) -> SmithForm:
    """Smith normal form with unimodular transforms.

    Pivot choice is the smallest nonzero absolute value in the remaining
    block (row-major tie break), so output is a pure function of the input.
    """
    factors, (U, Ui, V, Vi) = _diagonalize(A, track=True)
    m, n = A.shape
    return SmithForm(
        U=IntMatrix(m, m, U),
        V=IntMatrix(n, n, V),
        invariant_factors=tuple(factors),
        U_inv=IntMatrix(m, m, Ui),
        V_inv=IntMatrix(n, n, Vi),
    )


def _unit_pivots(A: IntMatrix) -> tuple[int, IntMatrix]:
    """Eliminate +-1 pivots sparsely; return their count and the remaining block.

    A unit pivot clears its column by row operations and its row by column
    operations without touching any other entry, so each one contributes an
    invariant factor 1 and the factors of the rest are unchanged.
    """
    rows = [{j: x for j, x in enumerate(r) if x} for r in A.data]
    cols: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for j in r:
            cols.setdefault(j, set()).add(i)
    alive = set(range(len(rows)))
    ones = 0
    for j in range(A.cols):
        cand = [i for i in cols.get(j, ()) if abs(rows[i][j]) == 1]
        if not cand:
            continue
        p = min(cand, key=lambda i: (len(rows[i]), i))
        prow = rows[p]
        sign = prow[j]
        for i in sorted(cols[j] - {p}):
            r = rows[i]
            q = -r[j] * sign
            for c, x in prow.items():
                v = r.get(c, 0) + q * x
                if v:
                    if c not in r:
                        cols.setdefault(c, set()).add(i)
                    r[c] = v
                else:
                    del r[c]
                    cols[c].discard(i)
        for c in prow:
            cols[c].discard(p)
        rows[p] = {}
        alive.discard(p)
        ones += 1
    rest_rows = [i for i in sorted(alive) if rows[i]]
    rest_cols = sorted({c for i in rest_rows for c in rows[i]})
    pos = {c: k for k, c in enumerate(rest_cols)}
    data = [[0] * len(rest_cols) for _ in rest_rows]
    for k, i in enumerate(rest_rows):
        for c, x in rows[i].items():
            data[k][pos[c]] = x
    return ones, IntMatrix(len(rest_rows), len(rest_cols), data)


def invariant_factors(A: IntMatrix) -> tuple[int, ...]:
    """Nonzero Smith invariant factors, without computing transforms."""
    ones, rest = _unit_pivots(A)
    factors, _ = _diagonalize(rest, track=False)
    return (1,) * ones + tuple(factors)


def rank(A: IntMatrix) -> int:
    return len(invariant_factors(A))


# ---------------------------------------------------------------------------
# Finitely generated abelian groups


@dataclass(frozen=True)
class PresentedGroup:
    """Z^free_rank + Z/m_1 + ... + Z/m_k with m_1 | m_2 | ... and every m_i >= 2.

    Generators are ordered free ones first, then one per torsion factor.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        t = tuple(self.torsion)
        object.__setattr__(self, "torsion", t)
        if any(m < 2 for m in t):
            raise ValueError(f"torsion factors must be >= 2, got {t}")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion factors must form a divisibility chain, got {t}")

    @classmethod
    def cyclic(cls, m: int) -> PresentedGroup:
        """Z/m, with Z/0 = Z and Z/1 = 0."""
        m = abs(m)
        if m == 0:
            return cls(1)
        if m == 1:
            return cls()
        return cls(0, (m,))

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> PresentedGroup:
        """Normalize a direct sum of cyclic groups (0 meaning Z)."""
        orders = list(orders)
        free = sum(1 for o in orders if o == 0)
        finite = [o for o in orders if o not in (0, 1)]
        if not finite:
            return cls(free)
        inv = invariant_factors(IntMatrix.diagonal(finite, len(finite), len(finite)))
        return cls(free, tuple(x for x in inv if x > 1))

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each generator, 0 for free generators."""
        return (0,) * self.free_rank + self.torsion

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{m}" for m in self.torsion)
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HomologyGroup:
    """Free rank plus torsion invariant factors. ``exact`` is False for a
    degree the truncated complex cannot certify."""

    betti: int = 0
    torsion: tuple[int, ...] = ()
    exact: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))

    @property
    def group(self) -> PresentedGroup:
        return PresentedGroup(self.betti, self.torsion)

    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    def is_Z(self) -> bool:
        return self.betti == 1 and not self.torsion

    def __str__(self) -> str:
        return str(self.group)


def direct_sum(*groups: HomologyGroup | PresentedGroup) -> HomologyGroup:
    orders: list[int] = []
    exact = True
    for g in groups:
        if isinstance(g, HomologyGroup):
            exact = exact and g.exact
            g = g.group
        orders.extend(g.orders)
    pg = PresentedGroup.from_orders(orders)
    return HomologyGroup(pg.free_rank, pg.torsion, exact)


# ---------------------------------------------------------------------------
# Complexes


@dataclass(frozen=True)
class ChainComplex:
    """A bounded complex of finite direct sums of cyclic groups.

    ``kind`` is "chain" (differential n -> n-1, stored at key n for n >= 1)
    or "cochain" (differential n -> n+1, stored at key n for n < truncation).
    ``orders[n]`` lists the order of each basis generator in degree n
    (0 = free). ``basis[n]`` optionally labels the generators. Differentials
    are integer lifts to the free groups on those generators.
    """

    kind: str
    orders: Mapping[int, tuple[int, ...]]
    differentials: Mapping[int, IntMatrix]
    truncation: int
    exact_above: bool = True
    basis: Mapping[int, tuple] | None = None
    variance: str | None = None

    def __post_init__(self):
        if self.kind not in ("chain", "cochain"):
            raise ValueError(f"unknown complex kind {self.kind!r}")
        for n in range(self.truncation + 1):
            if n not in self.orders:
                raise ValueError(f"missing degree {n}")
        for n in range(self.truncation + 1):
            tgt = self.target_degree(n)
            if tgt is None:
                continue
            d = self.differentials.get(n)
            if d is None:
                raise ValueError(f"missing differential at degree {n}")
            if d.shape != (self.dim(tgt), self.dim(n)):
                raise ValueError(f"differential at degree {n} has shape {d.shape}")

    @classmethod
    def from_matrices(
        cls,
        dims: Sequence[int],
        differentials: Mapping[int, Sequence[Sequence[int]]],
        kind: str = "chain",
        orders: Mapping[int, Sequence[int]] | None = None,
        exact_above: bool = True,
    ) -> ChainComplex:
        D = len(dims) - 1
        if orders is None:
            orders = {n: (0,) * dims[n] for n in range(D + 1)}
        mats = {}
        for n, rows in differentials.items():
            tgt = n - 1 if kind == "chain" else n + 1
            mats[n] = IntMatrix(dims[tgt], dims[n], rows) if rows else IntMatrix(dims[tgt], dims[n])
        return cls(kind, {n: tuple(o) for n, o in orders.items()}, mats, D, exact_above)

    def target_degree(self, n: int) -> int | None:
        t = n - 1 if self.kind == "chain" else n + 1
        return t if 0 <= t <= self.truncation else None

    def dim(self, n: int) -> int:
        return len(self.orders.get(n, ()))

    def group(self, n: int) -> PresentedGroup:
        return PresentedGroup.from_orders(self.orders.get(n, ()))

    def is_free(self) -> bool:
        return all(o == 0 for os in self.orders.values() for o in os)

    def outgoing(self, n: int) -> IntMatrix | None:
        return self.differentials.get(n) if self.target_degree(n) is not None else None

    def incoming(self, n: int) -> IntMatrix | None:
        src = n + 1 if self.kind == "chain" else n - 1
        if 0 <= src <= self.truncation:
            return self.differentials.get(src)
        return None

    def exact_degree(self, n: int) -> bool:
        # the top degree misses its incoming (chain) / outgoing (cochain) map
        return n < self.truncation or self.exact_above


def _divide_into_relations(v: Sequence[int], orders: Sequence[int]) -> list[int] | None:
    """Coefficients r with v == sum r_j * orders_j * e_j over torsion generators."""
    out = []
    for x, o in zip(v, orders):
        if o == 0:
            if x:
                return None
        else:
            if x % o:
                return None
            out.append(x // o)
    return out


def _torsion_index(orders: Sequence[int]) -> list[int]:
    return [i for i, o in enumerate(orders) if o != 0]


def check_dd(cx: ChainComplex) -> None:
    """Raise ComplexError unless consecutive differentials compose to zero
    modulo the relations of the target group."""
    for n in range(cx.truncation + 1):
        d1 = cx.outgoing(n)
        if d1 is None:
            continue
        m = cx.target_degree(n)
        d2 = cx.outgoing(m)
        if d2 is None:
            continue
        prod = d2 @ d1
        tgt = cx.target_degree(m)
        tord = cx.orders[tgt]
        for j in range(prod.cols):
            if _divide_into_relations(prod.column(j), tord) is None:
                raise ComplexError("dd-not-zero", f"differentials out of degrees {n} and {m} do not compose to zero")


def _chain_form(cx: ChainComplex):
    """Re-index as a chain complex: degree k with maps k -> k-1.

    Cochain degree n becomes chain degree -n.
    """
    sgn = 1 if cx.kind == "chain" else -1
    orders = {sgn * n: tuple(o) for n, o in cx.orders.items()}
    maps = {}
    for n in range(cx.truncation + 1):
        d = cx.outgoing(n)
        if d is not None:
            maps[sgn * n] = d
    return orders, maps


def _free_homology(dims: Mapping[int, int], maps: Mapping[int, IntMatrix], degrees: Iterable[int]):
    inv = {k: invariant_factors(m) for k, m in maps.items()}
    out = {}
    for k in degrees:
        r_out = len(inv.get(k, ()))
        r_in = len(inv.get(k + 1, ()))
        out[k] = (dims.get(k, 0) - r_out - r_in, tuple(e for e in inv.get(k + 1, ()) if e > 1))
    return out


def _total_complex(orders: Mapping[int, tuple[int, ...]], maps: Mapping[int, IntMatrix]):
    """Free total complex of the two-term resolutions 0 -> R_k -> F_k -> C_k -> 0.

    Tot_k = F_k + R_{k-1} with differential [[d, rho], [g, -h]] where
    rho embeds relations, h lifts d to relations and g corrects for d∘d only
    vanishing modulo relations.
    """
    tors = {k: _torsion_index(o) for k, o in orders.items()}
    degrees = sorted(orders)
    lo, hi = degrees[0], degrees[-1]

    def nF(k):
        return len(orders.get(k, ()))

    def nR(k):
        return len(tors.get(k, ()))

    def rho(k) -> IntMatrix:
        m = IntMatrix(nF(k), nR(k))
        for c, i in enumerate(tors.get(k, ())):
            m.data[i][c] = orders[k][i]
        return m

    def lift(k) -> IntMatrix:
        # h_k : R_k -> R_{k-1} with rho_{k-1} h_k = d_k rho_k
        d = maps.get(k)
        h = IntMatrix(nR(k - 1), nR(k))
        if d is None:
            return h
        for c, j in enumerate(tors.get(k, ())):
            v = [orders[k][j] * x for x in d.column(j)]
            coeffs = _divide_into_relations(v, orders[k - 1])
            if coeffs is None:
                raise ComplexError("relations-not-preserved", f"differential at degree {k} does not respect relations")
            for r, x in enumerate(coeffs):
                h.data[r][c] = x
        return h

    def correction(k) -> IntMatrix:
        # g_k : F_k -> R_{k-2} with rho_{k-2} g_k = -d_{k-1} d_k
        g = IntMatrix(nR(k - 2), nF(k))
        d, d_prev = maps.get(k), maps.get(k - 1)
        if d is None or d_prev is None:
            return g
        prod = d_prev @ d
        for j in range(prod.cols):
            coeffs = _divide_into_relations(prod.column(j), orders[k - 2])
            if coeffs is None:
                raise ComplexError("dd-not-zero", f"differentials at degrees {k} and {k - 1} do not compose to zero")
            for r, x in enumerate(coeffs):
                g.data[r][j] = -x
        return g

    tot_dims = {k: nF(k) + nR(k - 1) for k in range(lo, hi + 2)}
    tot_maps = {}
    for k in range(lo + 1, hi + 2):
        d = maps.get(k, IntMatrix(nF(k - 1), nF(k)))
        tot_maps[k] = block_matrix(
            [
                [d, rho(k - 1)],
                [correction(k), -lift(k - 1)],
            ]
        )
    return tot_dims, tot_maps


def homology_of_complex(cx: ChainComplex) -> dict[int, HomologyGroup]:
    """Homology (or cohomology, for cochain complexes) in every stored degree.

    Free complexes use ranks and invariant factors of the differentials.
    Complexes with torsion generators are first replaced by the total
    complex of two-term free resolutions, then handled the same way.
    """
    check_dd(cx)
    orders, maps = _chain_form(cx)
    sgn = 1 if cx.kind == "chain" else -1
    degrees = sorted(orders)
    if cx.is_free():
        dims = {k: len(o) for k, o in orders.items()}
        raw = _free_homology(dims, maps, degrees)
    else:
        dims, tmaps = _total_complex(orders, maps)
        raw = _free_homology(dims, tmaps, degrees)
    return {
        sgn * k: HomologyGroup(b, t, exact=cx.exact_degree(sgn * k))
        for k, (b, t) in sorted(raw.items(), key=lambda kv: sgn * kv[0])
    }


# ---------------------------------------------------------------------------
# Euler characteristic


@dataclass(frozen=True)
class EulerData:
    chi: int | None
    via: str
    truncation_honest: bool

    @property
    def defined(self) -> bool:
        return self.chi is not None


def euler_characteristic(
    source: ChainComplex | Mapping[int, HomologyGroup],
    homology: Mapping[int, HomologyGroup] | None = None,
) -> EulerData:
    """Alternating sum of free ranks of (co)homology.

    Given a complex, the chain-rank route is computed as well and must
    agree; ``chi`` is None when the truncated complex still has chains in
    its top degree (the true sum is then not determined).
    """
    if isinstance(source, ChainComplex):
        cx = source
        H = homology if homology is not None else homology_of_complex(cx)
        if not cx.exact_above and cx.dim(cx.truncation) > 0:
            return EulerData(None, "homology", False)
        chi = sum((-1) ** n * g.betti for n, g in H.items())
        by_ranks = sum((-1) ** n * sum(1 for o in cx.orders[n] if o == 0) for n in range(cx.truncation + 1))
        if chi != by_ranks:
            raise ComplexError("euler-mismatch", f"homology gives {chi}, chain ranks give {by_ranks}")
        return EulerData(chi, "homology", True)
    H = source
    honest = all(g.exact for g in H.values())
    return EulerData(sum((-1) ** n * g.betti for n, g in H.items()), "homology", honest)


# ---------------------------------------------------------------------------
# Homology bases and induced maps (free complexes)


@dataclass(frozen=True)
class HomologyBasis:
    """Explicit generators of H_n of a free complex.

    ``generators`` are cycles (vectors in C_n); ``orders`` gives each one's
    order in homology (0 = free). ``_V_inv``/``_P``/``_rank`` let arbitrary
    cycles be written in these generators.
    """

    generators: tuple[tuple[int, ...], ...]
    orders: tuple[int, ...]
    _V_inv: IntMatrix = field(repr=False)
    _rank: int = field(repr=False)
    _P: IntMatrix = field(repr=False)
    _keep: tuple[int, ...] = field(repr=False)

    def coordinates(self, cycle: Sequence[int]) -> list[int]:
        y = self._V_inv.apply(cycle)
        if any(y[: self._rank]):
            raise ComplexError("not-a-cycle", "vector is not a cycle")
        z = self._P.apply(y[self._rank :])
        out = []
        for pos, o in zip(self._keep, self.orders):
            out.append(z[pos] % o if o else z[pos])
        return out


def homology_basis(cx: ChainComplex, n: int) -> HomologyBasis:
    if not cx.is_free():
        raise ComplexError("not-free", "explicit homology bases are only computed for free complexes")
    dim = cx.dim(n)
    out = cx.outgoing(n)
    if out is None:
        out = IntMatrix(0, dim)
    inc = cx.incoming(n)
    if inc is None:
        inc = IntMatrix(dim, 0)
    sf = smith_normal_form(out)
    r = sf.rank
    K = [sf.V.column(j) for j in range(r, dim)]  # kernel basis
    k = dim - r
    W_full = sf.V_inv @ inc
    W = IntMatrix(k, inc.cols, W_full.data[r:])
    sw = smith_normal_form(W)
    Pinv = sw.U_inv
    gens, orders, keep = [], [], []
    for j in range(k):
        e = sw.invariant_factors[j] if j < sw.rank else 0
        if e == 1:
            continue
        col = Pinv.column(j)
        gens.append(tuple(sum(K[i][row] * col[i] for i in range(k)) for row in range(dim)))
        orders.append(e)
        keep.append(j)
    return HomologyBasis(tuple(gens), tuple(orders), sf.V_inv, r, sw.U, tuple(keep))


def check_chain_map(src: ChainComplex, tgt: ChainComplex, maps: Mapping[int, IntMatrix]) -> None:
    if src.kind != tgt.kind:
        raise ComplexError("not-a-chain-map", "complexes of different kinds")
    top = min(src.truncation, tgt.truncation)
    for n in range(top + 1):
        f = maps[n]
        if f.shape != (tgt.dim(n), src.dim(n)):
            raise ComplexError("not-a-chain-map", f"degree {n} map has shape {f.shape}")
        m = src.target_degree(n)
        if m is None or m > top:
            continue
        if tgt.outgoing(n) @ f != maps[m] @ src.outgoing(n):
            raise ComplexError("not-a-chain-map", f"map does not commute with differentials at degree {n}")


def induced_homology_map(
    src: ChainComplex, tgt: ChainComplex, maps: Mapping[int, IntMatrix]
) -> dict[int, IntMatrix]:
    """Matrices of H_n(f) in the bases returned by :func:`homology_basis`."""
    check_chain_map(src, tgt, maps)
    out = {}
    for n in range(min(src.truncation, tgt.truncation) + 1):
        hs, ht = homology_basis(src, n), homology_basis(tgt, n)
        cols = [ht.coordinates(maps[n].apply(g)) for g in hs.generators]
        out[n] = IntMatrix(len(ht.generators), len(hs.generators), [list(r) for r in zip(*cols)] if cols else [[] for _ in ht.generators])
    return out


def is_isomorphism(H_src: HomologyBasis, H_tgt: HomologyBasis, M: IntMatrix) -> bool:
    """Whether M (source generators -> target generators) is an isomorphism.

    Uses that a surjection between isomorphic finitely generated abelian
    groups is an isomorphism.
    """
    if PresentedGroup.from_orders(H_src.orders) != PresentedGroup.from_orders(H_tgt.orders):
        return False
    k = len(H_tgt.orders)
    rels = [o for o in H_tgt.orders if o]
    R = IntMatrix(k, len(rels))
    c = 0
    for i, o in enumerate(H_tgt.orders):
        if o:
            R.data[i][c] = o
            c += 1
    if k == 0:
        return True
    inv = invariant_factors(block_matrix([[M, R]]))
    return len(inv) == k and all(e == 1 for e in inv)


def is_quasi_isomorphism(src: ChainComplex, tgt: ChainComplex, maps: Mapping[int, IntMatrix]) -> bool:
    induced = induced_homology_map(src, tgt, maps)
    return all(
        is_isomorphism(homology_basis(src, n), homology_basis(tgt, n), M) for n, M in induced.items()
    )
