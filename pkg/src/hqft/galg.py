"""G-graded algebras given by per-degree structure constants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .groups import GroupTable
from .scalars import (ONE, ZERO, Matrix, Scalar, format_scalar, kron, parse_scalar,
                      rank, solve, to_scalar)


class AlgebraError(ValueError):
    pass


class NotAssociative(AlgebraError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"associativity fails on basis triple {witness}")


class UnitFails(AlgebraError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"unit law fails at {witness}")


class GradingViolated(AlgebraError):
    pass


class CocycleInvalid(AlgebraError):
    pass


class NotAHomomorphism(AlgebraError):
    pass


class StabViolated(AlgebraError):
    pass


def vkron(x: Sequence, y: Sequence) -> list:
    """Flat Kronecker product of two vectors, index i * len(y) + j."""
    out = []
    for a in x:
        if a:
            out.extend(a * b if b else ZERO for b in y)
        else:
            out.extend([ZERO] * len(y))
    return out


def unit_vector(n: int, i: int) -> list:
    v = [ZERO] * n
    v[i] = ONE
    return v


def swap_matrix(m: int, n: int) -> Matrix:
    """Permutation k^m (x) k^n -> k^n (x) k^m, x (x) y -> y (x) x."""
    out = Matrix.zeros(m * n, m * n)
    for i in range(m):
        for j in range(n):
            out.data[j * m + i][i * n + j] = ONE
    return out


class GradedAlgebra:
    """An associative unital algebra A = (+)_g A_g with A_g A_h in A_gh.

    ``mult[(g, h)]`` is the dims[gh] x (dims[g] * dims[h]) matrix of the product
    A_g (x) A_h -> A_gh, so grading is built into the storage.
    """

    def __init__(self, group: GroupTable, dims: Sequence[int],
                 mult: Mapping[tuple[int, int], Matrix], unit: Sequence[Scalar]):
        self.group = group
        self.dims = tuple(dims)
        self.mult = dict(mult)
        self.unit = tuple(unit)
        self._sparse: dict = {}

    # structural equality
    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedAlgebra) and self.group == other.group
                and self.dims == other.dims and self.unit == other.unit
                and all(self.mult[k] == other.mult[k] for k in self.mult))

    def __hash__(self):
        return hash((self.dims, self.unit))

    def __repr__(self):
        return f"GradedAlgebra(order={self.group.order}, dims={self.dims})"

    @property
    def e(self) -> int:
        return self.group.e

    def zero(self, g: int) -> list:
        return [ZERO] * self.dims[g]

    def basis(self, g: int, i: int) -> list:
        return unit_vector(self.dims[g], i)

    def one(self) -> list:
        return list(self.unit)

    def _terms(self, g: int, h: int):
        key = (g, h)
        t = self._sparse.get(key)
        if t is None:
            m = self.mult[key]
            dh = self.dims[h]
            t = {}
            for k, row in enumerate(m.data):
                for c, v in enumerate(row):
                    if v:
                        t.setdefault(divmod(c, dh), []).append((k, v))
            t = list(t.items())
            self._sparse[key] = t
        return t

    def mul(self, g: int, x: Sequence, h: int, y: Sequence) -> list:
        """Product of x in A_g and y in A_h, a vector in A_gh."""
        out = [ZERO] * self.dims[self.group.mul(g, h)]
        for (i, j), ks in self._terms(g, h):
            a = x[i]
            if a:
                b = y[j]
                if b:
                    ab = a * b
                    for k, c in ks:
                        out[k] = out[k] + ab * c
        return out

    def left_matrix(self, g: int, x: Sequence, h: int) -> Matrix:
        """Matrix of y |-> x y on A_h."""
        cols = [self.mul(g, x, h, self.basis(h, j)) for j in range(self.dims[h])]
        return Matrix.from_columns(cols, self.dims[self.group.mul(g, h)])

    def right_matrix(self, h: int, y: Sequence, g: int) -> Matrix:
        """Matrix of x |-> x y on A_g."""
        cols = [self.mul(g, self.basis(g, i), h, y) for i in range(self.dims[g])]
        return Matrix.from_columns(cols, self.dims[self.group.mul(g, h)])

    def mul_tensor(self, g: int, h: int, t: Sequence) -> list:
        """Apply the product to a tensor in A_g (x) A_h."""
        return self.mult[(g, h)].apply(t)

    def to_json(self) -> dict:
        G = self.group
        triples = []
        for (g, h), m in sorted(self.mult.items()):
            dh = self.dims[h]
            for k, row in enumerate(m.data):
                for c, v in enumerate(row):
                    if v:
                        i, j = divmod(c, dh)
                        triples.append([[G.name(g), i], [G.name(h), j], [G.name(G.mul(g, h)), k],
                                        format_scalar(v)])
        return {"dims": {G.name(g): self.dims[g] for g in G.elements},
                "mult": triples, "unit": [format_scalar(x) for x in self.unit]}


def _assoc_witness(A: GradedAlgebra, g: int, h: int, l: int, col: int) -> tuple:
    dh, dl = A.dims[h], A.dims[l]
    i, rest = divmod(col, dh * dl)
    j, k = divmod(rest, dl)
    return ((g, i), (h, j), (l, k))


def validate(A: GradedAlgebra) -> GradedAlgebra:
    """Check shapes, associativity on all basis triples and the unit laws."""
    G = A.group
    n = G.order
    if len(A.dims) != n:
        raise GradingViolated("one dimension per group element is required")
    for g in G.elements:
        for h in G.elements:
            m = A.mult.get((g, h))
            gh = G.mul(g, h)
            if m is None or m.shape != (A.dims[gh], A.dims[g] * A.dims[h]):
                raise GradingViolated(f"product A_{g} x A_{h} must land in A_{gh}")
    if len(A.unit) != A.dims[G.e]:
        raise UnitFails(("shape",))
    ident = {g: Matrix.identity(A.dims[g]) for g in G.elements}
    for g in G.elements:
        for h in G.elements:
            gh = G.mul(g, h)
            mgh = A.mult[(g, h)]
            for l in G.elements:
                hl = G.mul(h, l)
                lhs = A.mult[(gh, l)] @ kron(mgh, ident[l])
                rhs = A.mult[(g, hl)] @ kron(ident[g], A.mult[(h, l)])
                if lhs != rhs:
                    bad = next(c for c in range(lhs.cols) if lhs.col(c) != rhs.col(c))
                    raise NotAssociative(_assoc_witness(A, g, h, l, bad))
    u = Matrix.column(A.unit)
    e = G.e
    for g in G.elements:
        if A.mult[(e, g)] @ kron(u, ident[g]) != ident[g]:
            raise UnitFails(("left", g))
        if A.mult[(g, e)] @ kron(ident[g], u) != ident[g]:
            raise UnitFails(("right", g))
    return A


def build(group: GroupTable, dims: Sequence[int], mult, unit: Sequence) -> GradedAlgebra:
    """Validated algebra from per-pair matrices or sparse triples.

    ``mult`` is either a mapping (g, h) -> Matrix or an iterable of triples
    ((g, i), (h, j), (k, l), value) meaning b^g_i b^h_j has coefficient value
    on b^k_l; k must equal gh.
    """
    dims = tuple(int(d) for d in dims)
    if isinstance(mult, Mapping):
        mats = {k: v for k, v in mult.items()}
    else:
        mats = {(g, h): Matrix.zeros(dims[group.mul(g, h)], dims[g] * dims[h])
                for g in group.elements for h in group.elements}
        for (g, i), (h, j), (k, l), v in mult:
            if k != group.mul(g, h):
                raise GradingViolated(f"product of degrees {g}, {h} given in degree {k}")
            if not (0 <= i < dims[g] and 0 <= j < dims[h] and 0 <= l < dims[k]):
                raise GradingViolated(f"basis index out of range in {((g, i), (h, j), (k, l))}")
            row = mats[(g, h)].data[l]
            row[i * dims[h] + j] = row[i * dims[h] + j] + to_scalar(v)
    return validate(GradedAlgebra(group, dims, mats, [to_scalar(x) for x in unit]))


def group_algebra(group: GroupTable) -> GradedAlgebra:
    mats = {(g, h): Matrix([[ONE]]) for g in group.elements for h in group.elements}
    return validate(GradedAlgebra(group, [1] * group.order, mats, [ONE]))


def opposite(A: GradedAlgebra) -> GradedAlgebra:
    """A^op with (A^op)_g = A_{g^-1} and reversed product."""
    G = A.group
    dims = [A.dims[G.inv[g]] for g in G.elements]
    mats = {}
    for g in G.elements:
        for h in G.elements:
            gi, hi = G.inv[g], G.inv[h]
            # x in A_{g^-1}, y in A_{h^-1}: x *op y = y x
            mats[(g, h)] = A.mult[(hi, gi)] @ swap_matrix(A.dims[gi], A.dims[hi])
    return validate(GradedAlgebra(G, dims, mats, A.unit))


@dataclass
class StrongGrading:
    ok: bool
    failing: tuple[int, int] | None
    splittings: dict[int, list]

    def __bool__(self) -> bool:
        return self.ok


def is_strongly_graded(A: GradedAlgebra) -> StrongGrading:
    """A_g A_h = A_gh for all pairs; on success also a unit splitting per g.

    The splitting for g is a tensor sum_j b_j (x) b'_j in A_g (x) A_{g^-1} with
    sum_j b_j b'_j = 1.
    """
    G = A.group
    for g in G.elements:
        for h in G.elements:
            if rank(A.mult[(g, h)]) != A.dims[G.mul(g, h)]:
                return StrongGrading(False, (g, h), {})
    split = {}
    for g in G.elements:
        x = solve(A.mult[(g, G.inv[g])], Matrix.column(A.unit))
        if x is None:
            return StrongGrading(False, (g, G.inv[g]), {})
        split[g] = x.col(0)
    return StrongGrading(True, None, split)


# ---------------------------------------------------------------------------
# matrix models


def _perm_compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    return tuple(p[q[i]] for i in range(len(q)))


def check_model_data(group: GroupTable, blocks: Sequence[int], tau, sigma, r=None) -> None:
    """Raise unless (tau, sigma, r) is admissible data for a matrix model.

    ``sigma[g]`` is a permutation of block indices, ``tau(g, h)`` a tuple of n
    nonzero scalars. Block j of A_g maps V_j to V_{sigma[g][j]}.
    """
    G = group
    n = len(blocks)
    ident = tuple(range(n))
    if len(sigma) != G.order or any(sorted(s) != list(ident) for s in sigma):
        raise NotAHomomorphism("sigma must assign a permutation of the blocks to every element")
    if tuple(sigma[G.e]) != ident:
        raise NotAHomomorphism("sigma(e) is not the identity")
    for g in G.elements:
        for h in G.elements:
            if tuple(sigma[G.mul(g, h)]) != _perm_compose(sigma[g], sigma[h]):
                raise NotAHomomorphism(f"sigma({g}{h}) != sigma({g}) sigma({h})")
    for g in G.elements:
        for j in range(n):
            if blocks[sigma[g][j]] != blocks[j]:
                raise StabViolated(f"sigma({g}) moves block {j} to a block of different size")
            if r is not None and r[sigma[g][j]] != r[j]:
                raise StabViolated(f"sigma({g}) does not fix r")
    for g in G.elements:
        for h in G.elements:
            t = tau(g, h)
            if len(t) != n or any(not x for x in t):
                raise CocycleInvalid(f"tau({g},{h}) must be {n} nonzero scalars")
    for g in G.elements:
        if any(x != ONE for x in tau(G.e, g)) or any(x != ONE for x in tau(g, G.e)):
            raise CocycleInvalid(f"tau is not normalized at {g}")
    for a in G.elements:
        for b in G.elements:
            for c in G.elements:
                ab, bc = G.mul(a, b), G.mul(b, c)
                t_ab, t_abc1, t_abc2, t_bc = tau(a, b), tau(ab, c), tau(a, bc), tau(b, c)
                for j in range(n):
                    if t_ab[sigma[c][j]] * t_abc1[j] != t_abc2[j] * t_bc[j]:
                        raise CocycleInvalid(f"cocycle identity fails at ({a},{b},{c}), block {j}")


def _model_index(blocks: Sequence[int]) -> list[int]:
    off, acc = [], 0
    for k in blocks:
        off.append(acc)
        acc += k * k
    return off


def matrix_model(group: GroupTable, blocks: Sequence[int], tau=None, sigma=None, r=None) -> GradedAlgebra:
    """The algebra (+)_g l_g A_e with A_e a product of full matrix blocks.

    Basis of A_g: (block j, row a, col b) = l_g E^j_ab, a map V_j -> V_{sigma_g(j)}.
    Products: (f f')_j = tau(g, h)_j * f_{sigma_h(j)} f'_j for f in A_g, f' in A_h.
    ``tau`` is a callable or mapping (g, h) -> n-tuple; defaults are trivial.
    """
    G = group
    n = len(blocks)
    if sigma is None:
        sigma = [tuple(range(n))] * G.order
    sigma = [tuple(s) for s in sigma]
    if tau is None:
        tau_f: Callable = lambda g, h: (ONE,) * n
    elif callable(tau):
        tau_f = lambda g, h: tuple(to_scalar(x) for x in tau(g, h))
    else:
        tau_f = lambda g, h: tuple(to_scalar(x) for x in tau[(g, h)])
    if r is not None:
        r = [to_scalar(x) for x in r]
    check_model_data(G, blocks, tau_f, sigma, r)
    off = _model_index(blocks)
    dim = off[-1] + blocks[-1] ** 2 if n else 0
    mats = {}
    for g in G.elements:
        for h in G.elements:
            t = tau_f(g, h)
            m = Matrix.zeros(dim, dim * dim)
            for j2 in range(n):
                j1 = sigma[h][j2]
                k = blocks[j2]
                for a1 in range(k):
                    for b1 in range(k):
                        i = off[j1] + a1 * k + b1
                        # E_{a1 b1} E_{a2 b2} = delta(b1, a2) E_{a1 b2}
                        for b2 in range(k):
                            jcol = off[j2] + b1 * k + b2
                            out = off[j2] + a1 * k + b2
                            m.data[out][i * dim + jcol] = t[j2]
            mats[(g, h)] = m
    unit = [ZERO] * dim
    for j, k in enumerate(blocks):
        for a in range(k):
            unit[off[j] + a * k + a] = ONE
    return validate(GradedAlgebra(G, [dim] * G.order, mats, unit))


def model_trace(blocks: Sequence[int], r: Sequence) -> list:
    """Trace on A_e = prod M_{k_j}: sum_j r_j k_j Tr(A_j)."""
    off = _model_index(blocks)
    dim = off[-1] + blocks[-1] ** 2
    lam = [ZERO] * dim
    for j, k in enumerate(blocks):
        for a in range(k):
            lam[off[j] + a * k + a] = to_scalar(r[j]) * k
    return lam


def model_element(blocks: Sequence[int], mats: Sequence[Sequence[Sequence]]) -> list:
    """Coordinates of a block tuple (A_1, ..., A_n) in the (block, row, col) basis."""
    out = []
    for k, a in zip(blocks, mats):
        for i in range(k):
            for j in range(k):
                out.append(to_scalar(a[i][j]))
    return out


def load_json(group: GroupTable, data: dict, conductor: int = 1) -> GradedAlgebra:
    """Algebra from the sparse-triple JSON dialect (degrees by name or index)."""
    try:
        dspec = data["dims"]
        if isinstance(dspec, dict):
            dims = [0] * group.order
            for k, v in dspec.items():
                dims[group.index(k)] = int(v)
        else:
            dims = [int(x) for x in dspec]
        triples = []
        for (g, i), (h, j), (k, l), v in data["mult"]:
            triples.append(((group.index(g), int(i)), (group.index(h), int(j)),
                            (group.index(k), int(l)), parse_scalar(str(v), conductor)))
        unit = [parse_scalar(str(x), conductor) for x in data["unit"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError(f"malformed algebra spec: {exc}") from exc
    return build(group, dims, triples, unit)
