"""Graded bimodules, relative tensor products and graded Morita contexts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .frob import FrobeniusPackage, Report, dot
from .galg import GradedAlgebra, opposite, unit_vector, vkron
from .groups import GroupTable
from .scalars import ONE, ZERO, Matrix, Scalar, cokernel, format_scalar, inverse, rank, solve, to_scalar


class BimoduleError(ValueError):
    pass


class AlgebraMismatch(BimoduleError):
    pass


class NotBalanced(BimoduleError):
    pass


class ContextInvalid(BimoduleError):
    pass


class ShapeMismatch(BimoduleError):
    pass


def _add(u: list, v: Sequence) -> list:
    return [a + b for a, b in zip(u, v)]


def _scale(c: Scalar, v: Sequence) -> list:
    return [c * x if x else ZERO for x in v]


class GradedBimodule:
    """An (L, K)-bimodule U = (+)_g U_g.

    ``lact[(g, h)]``: L_g (x) U_h -> U_gh and ``ract[(h, g)]``: U_h (x) K_g -> U_hg,
    both stored as dims[target] x (product of source dims) matrices.
    """

    def __init__(self, left: GradedAlgebra, right: GradedAlgebra, dims: Sequence[int],
                 lact: dict, ract: dict):
        if left.group != right.group:
            raise AlgebraMismatch("left and right algebras are graded by different groups")
        self.left = left
        self.right = right
        self.dims = tuple(dims)
        self.lact = dict(lact)
        self.ract = dict(ract)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedBimodule) and self.dims == other.dims
                and self.left == other.left and self.right == other.right
                and all(self.lact[k] == other.lact[k] for k in self.lact)
                and all(self.ract[k] == other.ract[k] for k in self.ract))

    def __hash__(self):
        return hash(self.dims)

    def __repr__(self):
        return f"GradedBimodule(dims={self.dims})"

    @property
    def group(self) -> GroupTable:
        return self.left.group

    def basis(self, g: int, i: int) -> list:
        return unit_vector(self.dims[g], i)

    def zero(self, g: int) -> list:
        return [ZERO] * self.dims[g]

    def act_left(self, g: int, x: Sequence, h: int, u: Sequence) -> list:
        return self.lact[(g, h)].apply(vkron(x, u))

    def act_right(self, h: int, u: Sequence, g: int, k: Sequence) -> list:
        return self.ract[(h, g)].apply(vkron(u, k))


def validate_bimodule(M: GradedBimodule) -> Report:
    """Module axioms on all basis triples, unit actions, and commuting actions."""
    rep = Report()
    L, K, G = M.left, M.right, M.group
    e = G.e
    E = G.elements
    bad = None
    for h in E:
        for i in range(M.dims[h]):
            u = M.basis(h, i)
            if M.act_left(e, L.one(), h, u) != u or M.act_right(h, u, e, K.one()) != u:
                bad = ["unit", h, i]
                break
        if bad:
            break
    rep.add("unit", bad is None, bad)
    bad = None
    for g in E:
        for g2 in E:
            for h in E:
                for a in range(L.dims[g]):
                    for b in range(L.dims[g2]):
                        x, y = L.basis(g, a), L.basis(g2, b)
                        xy = L.mul(g, x, g2, y)
                        for i in range(M.dims[h]):
                            u = M.basis(h, i)
                            lhs = M.act_left(G.mul(g, g2), xy, h, u)
                            rhs = M.act_left(g, x, G.mul(g2, h), M.act_left(g2, y, h, u))
                            if lhs != rhs:
                                bad = ["left", g, a, g2, b, h, i]
                                break
                        if bad:
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("left-module", bad is None, bad)
    bad = None
    for h in E:
        for g in E:
            for g2 in E:
                for a in range(K.dims[g]):
                    for b in range(K.dims[g2]):
                        x, y = K.basis(g, a), K.basis(g2, b)
                        xy = K.mul(g, x, g2, y)
                        for i in range(M.dims[h]):
                            u = M.basis(h, i)
                            lhs = M.act_right(h, u, G.mul(g, g2), xy)
                            rhs = M.act_right(G.mul(h, g), M.act_right(h, u, g, x), g2, y)
                            if lhs != rhs:
                                bad = ["right", h, i, g, a, g2, b]
                                break
                        if bad:
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("right-module", bad is None, bad)
    bad = None
    for g in E:
        for h in E:
            for g2 in E:
                for a in range(L.dims[g]):
                    x = L.basis(g, a)
                    for b in range(K.dims[g2]):
                        y = K.basis(g2, b)
                        for i in range(M.dims[h]):
                            u = M.basis(h, i)
                            lhs = M.act_right(G.mul(g, h), M.act_left(g, x, h, u), g2, y)
                            rhs = M.act_left(g, x, G.mul(h, g2), M.act_right(h, u, g2, y))
                            if lhs != rhs:
                                bad = ["commute", g, a, h, i, g2, b]
                                break
                        if bad:
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("bimodule", bad is None, bad)
    return rep


def regular(A: GradedAlgebra) -> GradedBimodule:
    """A as an (A, A)-bimodule."""
    G = A.group
    mult = {(g, h): A.mult[(g, h)] for g in G.elements for h in G.elements}
    return GradedBimodule(A, A, A.dims, mult, mult)


def twisted_regular(L: GradedAlgebra, K: GradedAlgebra, psi: dict, side: str) -> GradedBimodule:
    """L as an (L, K)-bimodule (side 'right') or (K, L)-bimodule (side 'left').

    ``psi[g]`` is the matrix of an algebra map K_g -> L_g through which K acts.
    """
    G = L.group
    E = G.elements
    own = {(g, h): L.mult[(g, h)] for g in E for h in E}
    from .scalars import kron
    if side == "right":
        via = {(h, g): L.mult[(h, g)] @ kron(Matrix.identity(L.dims[h]), psi[g]) for h in E for g in E}
        return GradedBimodule(L, K, L.dims, own, via)
    via = {(g, h): L.mult[(g, h)] @ kron(psi[g], Matrix.identity(L.dims[h])) for g in E for h in E}
    return GradedBimodule(K, L, L.dims, via, own)


# ---------------------------------------------------------------------------
# relative tensor products


@dataclass(eq=False)
class Tensor:
    """M (x)_A N with its canonical cokernel bases.

    For each total degree g the raw space is (+)_{h h' = g} M_h (x) N_h',
    laid out in group order of h; ``proj[g]`` and ``sect[g]`` relate it to
    the quotient T_g.
    """
    M: GradedBimodule
    A: GradedAlgebra
    N: GradedBimodule
    module: GradedBimodule
    proj: dict
    sect: dict
    relations: dict
    layout: dict

    def raw_dim(self, g: int) -> int:
        return sum(n for _, _, _, n in self.layout[g])

    def offset(self, g: int, h: int) -> int:
        for h1, _, off, _ in self.layout[g]:
            if h1 == h:
                return off
        raise KeyError(h)

    def embed(self, h: int, m: Sequence, h2: int, n: Sequence) -> list:
        """Raw vector of m (x) n for m in M_h, n in N_h2."""
        G = self.M.group
        g = G.mul(h, h2)
        out = [ZERO] * self.raw_dim(g)
        off = self.offset(g, h)
        for k, v in enumerate(vkron(m, n)):
            if v:
                out[off + k] = v
        return out

    def cls(self, h: int, m: Sequence, h2: int, n: Sequence) -> list:
        """Class of m (x) n in T_{h h2}."""
        g = self.M.group.mul(h, h2)
        return self.proj[g].apply(self.embed(h, m, h2, n))

    def pieces(self, g: int, raw: Sequence):
        """Yield (h, h2, block) with block the M_h (x) N_h2 coordinates of raw."""
        for h, h2, off, n in self.layout[g]:
            yield h, h2, list(raw[off:off + n])


def _layout(G: GroupTable, dm: Sequence[int], dn: Sequence[int]) -> dict:
    out = {}
    for g in G.elements:
        comps, off = [], 0
        for h in G.elements:
            h2 = G.mul(G.inv[h], g)
            n = dm[h] * dn[h2]
            comps.append((h, h2, off, n))
            off += n
        out[g] = comps
    return out


def _raw_map(G: GroupTable, layout_src: dict, layout_dst: dict, g_src: int, g_dst: int,
             block: Callable[[int, int], tuple[int, int, Matrix]]) -> Matrix:
    """Assemble a map between raw spaces from per-component blocks.

    ``block(h, h2)`` returns (h', h2', matrix) sending the (h, h2) component
    into the (h', h2') component of the target.
    """
    rows = sum(n for *_, n in layout_dst[g_dst])
    cols = sum(n for *_, n in layout_src[g_src])
    out = Matrix.zeros(rows, cols)
    doff = {h: off for h, _, off, _ in layout_dst[g_dst]}
    for h, h2, off, n in layout_src[g_src]:
        if n == 0:
            continue
        th, _, m = block(h, h2)
        t0 = doff[th]
        for i, row in enumerate(m.data):
            dst = out.data[t0 + i]
            for j, v in enumerate(row):
                if v:
                    dst[off + j] = dst[off + j] + v
    return out


def _cokernel(rel: Matrix, n: int) -> tuple[Matrix, Matrix]:
    if rel.cols == 0 or rel.is_zero():
        return Matrix.identity(n), Matrix.identity(n)
    return cokernel(rel)


def tensor_over(M: GradedBimodule, A: GradedAlgebra, N: GradedBimodule) -> Tensor:
    """M (x)_A N as the cokernel of the balancing map, degree by degree."""
    if M.right != A or N.left != A:
        raise AlgebraMismatch("modules are not over the given algebra")
    G = A.group
    E = G.elements
    lay = _layout(G, M.dims, N.dims)
    proj, sect, rels = {}, {}, {}
    for g in E:
        raw = sum(n for *_, n in lay[g])
        off = {h: o for h, _, o, _ in lay[g]}
        cols = []
        for h in E:
            for k in E:
                hk = G.mul(h, k)
                h2 = G.mul(G.inv[hk], g)
                kh2 = G.mul(k, h2)
                for i in range(M.dims[h]):
                    for a in range(A.dims[k]):
                        ma = M.ract[(h, k)].col(i * A.dims[k] + a)
                        for j in range(N.dims[h2]):
                            an = N.lact[(k, h2)].col(a * N.dims[h2] + j)
                            col = [ZERO] * raw
                            o1 = off[hk]
                            for p, v in enumerate(ma):
                                if v:
                                    col[o1 + p * N.dims[h2] + j] += v
                            o2 = off[h]
                            for q, v in enumerate(an):
                                if v:
                                    col[o2 + i * N.dims[kh2] + q] -= v
                            if any(col):
                                cols.append(col)
        rel = Matrix.from_columns(cols, raw)
        rels[g] = rel
        proj[g], sect[g] = _cokernel(rel, raw)
    dims = [proj[g].rows for g in E]
    X, Y = M.left, N.right
    lact, ract = {}, {}
    for k in E:
        for g in E:
            kg = G.mul(k, g)
            cols = []
            for a in range(X.dims[k]):
                x = X.basis(k, a)
                raw_map = _raw_map(G, lay, lay, g, kg,
                                   lambda h, h2: (G.mul(k, h), h2, _left_block(M, k, x, h, N.dims[h2])))
                img = proj[kg] @ raw_map @ sect[g]
                cols.append(img)
            lact[(k, g)] = _interleave(cols, dims[kg], dims[g])
    for g in E:
        for k in E:
            gk = G.mul(g, k)
            cols = []
            for a in range(Y.dims[k]):
                y = Y.basis(k, a)
                raw_map = _raw_map(G, lay, lay, g, gk,
                                   lambda h, h2: (h, G.mul(h2, k), _right_block(N, h2, y, k, M.dims[h])))
                cols.append(proj[gk] @ raw_map @ sect[g])
            ract[(g, k)] = _interleave_right(cols, dims[gk], dims[g])
    T = GradedBimodule(X, Y, dims, lact, ract)
    return Tensor(M, A, N, T, proj, sect, rels, lay)


def _left_block(M: GradedBimodule, k: int, x: list, h: int, dn: int) -> Matrix:
    from .scalars import kron
    lm = Matrix.from_columns([M.act_left(k, x, h, M.basis(h, i)) for i in range(M.dims[h])],
                             M.dims[M.group.mul(k, h)])
    return kron(lm, Matrix.identity(dn))


def _right_block(N: GradedBimodule, h2: int, y: list, k: int, dm: int) -> Matrix:
    from .scalars import kron
    rm = Matrix.from_columns([N.act_right(h2, N.basis(h2, j), k, y) for j in range(N.dims[h2])],
                             N.dims[N.group.mul(h2, k)])
    return kron(Matrix.identity(dm), rm)


def _interleave(mats: list[Matrix], rows: int, dt: int) -> Matrix:
    """Columns indexed (a, t) from per-a matrices of shape rows x dt."""
    cols = []
    for m in mats:
        for t in range(dt):
            cols.append(m.col(t))
    return Matrix.from_columns(cols, rows)


def _interleave_right(mats: list[Matrix], rows: int, dt: int) -> Matrix:
    """Columns indexed (t, a) from per-a matrices of shape rows x dt."""
    cols = []
    for t in range(dt):
        for m in mats:
            cols.append(m.col(t))
    return Matrix.from_columns(cols, rows)


def induced_map(f: dict, g: dict, src: Tensor, dst: Tensor) -> dict:
    """The map src -> dst induced by f: M -> M' and g: N -> N' (per-degree matrices)."""
    from .scalars import kron
    G = src.A.group
    out = {}
    for d in G.elements:
        raw = _raw_map(G, src.layout, dst.layout, d, d,
                       lambda h, h2: (h, h2, kron(f[h], g[h2])))
        if src.relations[d].cols and not (dst.proj[d] @ raw @ src.relations[d]).is_zero():
            raise NotBalanced(f"induced map does not respect balancing relations in degree {d}")
        out[d] = dst.proj[d] @ raw @ src.sect[d]
    return out


def identity_map(M: GradedBimodule) -> dict:
    return {g: Matrix.identity(M.dims[g]) for g in M.group.elements}


def scaled_map(M: GradedBimodule, c: Scalar) -> dict:
    return {g: Matrix.identity(M.dims[g]).scale(c) for g in M.group.elements}


def left_multiplication_map(M: GradedBimodule, x: Sequence) -> dict:
    """u |-> x u for x in L_e."""
    e = M.group.e
    return {g: Matrix.from_columns([M.act_left(e, x, g, M.basis(g, i)) for i in range(M.dims[g])],
                                   M.dims[g]) for g in M.group.elements}


def right_multiplication_map(M: GradedBimodule, x: Sequence) -> dict:
    """u |-> u x for x in K_e."""
    e = M.group.e
    return {g: Matrix.from_columns([M.act_right(g, M.basis(g, i), e, x) for i in range(M.dims[g])],
                                   M.dims[g]) for g in M.group.elements}


def is_bimodule_map(f: dict, M: GradedBimodule, N: GradedBimodule) -> object:
    """None if f commutes with both actions on all basis elements, else a witness."""
    G = M.group
    E = G.elements
    for k in E:
        for h in E:
            for a in range(M.left.dims[k]):
                x = M.left.basis(k, a)
                for i in range(M.dims[h]):
                    u = M.basis(h, i)
                    lhs = f[G.mul(k, h)].apply(M.act_left(k, x, h, u))
                    rhs = N.act_left(k, x, h, f[h].apply(u))
                    if lhs != rhs:
                        return ["left", k, a, h, i]
            for a in range(M.right.dims[k]):
                y = M.right.basis(k, a)
                for i in range(M.dims[h]):
                    u = M.basis(h, i)
                    lhs = f[G.mul(h, k)].apply(M.act_right(h, u, k, y))
                    rhs = N.act_right(h, f[h].apply(u), k, y)
                    if lhs != rhs:
                        return ["right", h, i, k, a]
    return None


# ---------------------------------------------------------------------------
# Morita contexts


@dataclass(eq=False)
class MoritaContext:
    """(U, V, tau, mu) between L and K.

    U is an (L, K)-bimodule, V a (K, L)-bimodule, ``tau[g]``: K_g -> (V (x)_L U)_g
    and ``mu[g]``: (U (x)_K V)_g -> L_g.
    """
    L: GradedAlgebra
    K: GradedAlgebra
    U: GradedBimodule
    V: GradedBimodule
    tau: dict
    mu: dict
    VU: Tensor = None
    UV: Tensor = None

    def __post_init__(self):
        if self.VU is None:
            self.VU = tensor_over(self.V, self.L, self.U)
        if self.UV is None:
            self.UV = tensor_over(self.U, self.K, self.V)

    @property
    def group(self) -> GroupTable:
        return self.K.group

    def mu_raw(self, h: int, u: Sequence, h2: int, v: Sequence) -> list:
        """mu of the class of u (x) v."""
        return self.mu[self.group.mul(h, h2)].apply(self.UV.cls(h, u, h2, v))

    def tau_one(self) -> list:
        """A raw representative of tau(1) in (+)_h V_h (x) U_{h^-1}."""
        e = self.group.e
        return self.VU.sect[e].apply(self.tau[e].apply(self.K.one()))


def _module_map_matrix(T: GradedBimodule, f: dict, A: GradedAlgebra, side: str):
    """Witness that f: A -> T (or T -> A) is a bimodule map, or None."""
    reg = regular(A)
    if side == "from":
        return is_bimodule_map(f, reg, T)
    return is_bimodule_map(f, T, reg)


def zigzag_u(c: MoritaContext) -> dict:
    """u |-> sum_j mu(u (x) v_j) u_j with tau(1) = sum_j v_j (x) u_j."""
    G = c.group
    t1 = c.tau_one()
    out = {}
    for g in G.elements:
        cols = []
        for i in range(c.U.dims[g]):
            u = c.U.basis(g, i)
            acc = c.U.zero(g)
            for h, h2, block in c.VU.pieces(G.e, t1):
                for (a, b), coef in _nonzero_pairs(block, c.U.dims[h2]):
                    v = c.V.basis(h, a)
                    l = c.mu_raw(g, u, h, v)
                    acc = _add(acc, _scale(coef, c.U.act_left(G.mul(g, h), l, h2, c.U.basis(h2, b))))
            cols.append(acc)
        out[g] = Matrix.from_columns(cols, c.U.dims[g])
    return out


def zigzag_v(c: MoritaContext) -> dict:
    """v |-> sum_j v_j mu(u_j (x) v)."""
    G = c.group
    t1 = c.tau_one()
    out = {}
    for g in G.elements:
        cols = []
        for i in range(c.V.dims[g]):
            v = c.V.basis(g, i)
            acc = c.V.zero(g)
            for h, h2, block in c.VU.pieces(G.e, t1):
                for (a, b), coef in _nonzero_pairs(block, c.U.dims[h2]):
                    l = c.mu_raw(h2, c.U.basis(h2, b), g, v)
                    acc = _add(acc, _scale(coef, c.V.act_right(h, c.V.basis(h, a), G.mul(h2, g), l)))
            cols.append(acc)
        out[g] = Matrix.from_columns(cols, c.V.dims[g])
    return out


def _nonzero_pairs(block: Sequence, d2: int):
    for k, v in enumerate(block):
        if v:
            yield divmod(k, d2), v


def validate_context(c: MoritaContext) -> Report:
    rep = Report()
    G = c.group
    for name, M in (("U", c.U), ("V", c.V)):
        r = validate_bimodule(M)
        rep.add(f"{name}-bimodule", r.ok, r.failures() or None)
    shapes = all(c.tau[g].shape == (c.VU.module.dims[g], c.K.dims[g]) and
                 c.mu[g].shape == (c.L.dims[g], c.UV.module.dims[g]) for g in G.elements)
    rep.add("shapes", shapes, None if shapes else "tau or mu has the wrong shape")
    if not shapes:
        return rep
    w = _module_map_matrix(c.VU.module, c.tau, c.K, "from")
    rep.add("tau-bimodule-map", w is None, w)
    w = _module_map_matrix(c.UV.module, c.mu, c.L, "to")
    rep.add("mu-bimodule-map", w is None, w)
    zu, zv = zigzag_u(c), zigzag_v(c)
    bad = next((g for g in G.elements if zu[g] != Matrix.identity(c.U.dims[g])), None)
    rep.add("zigzag-U", bad is None, None if bad is None else ["degree", bad])
    bad = next((g for g in G.elements if zv[g] != Matrix.identity(c.V.dims[g])), None)
    rep.add("zigzag-V", bad is None, None if bad is None else ["degree", bad])
    bad = next((g for g in G.elements
                if c.tau[g].rows != c.tau[g].cols or rank(c.tau[g]) != c.tau[g].rows), None)
    rep.add("tau-invertible", bad is None, None if bad is None else ["degree", bad])
    bad = next((g for g in G.elements
                if c.mu[g].rows != c.mu[g].cols or rank(c.mu[g]) != c.mu[g].rows), None)
    rep.add("mu-invertible", bad is None, None if bad is None else ["degree", bad])
    return rep


def context_from_iso(K: GradedAlgebra, L: GradedAlgebra, psi: dict | None = None) -> MoritaContext:
    """Context induced by an algebra isomorphism psi: K -> L (identity when None).

    U = L with K acting on the right through psi, V = L with K acting on the
    left through psi; tau(k) = [psi(k) (x) 1] and mu([u (x) v]) = u v.
    """
    G = K.group
    E = G.elements
    e = G.e
    if psi is None:
        psi = {g: Matrix.identity(K.dims[g]) for g in E}
    U = twisted_regular(L, K, psi, "right")
    V = twisted_regular(L, K, psi, "left")
    VU = tensor_over(V, L, U)
    UV = tensor_over(U, K, V)
    tau, mu = {}, {}
    one = L.one()
    for g in E:
        cols = [VU.cls(g, psi[g].apply(K.basis(g, i)), e, one) for i in range(K.dims[g])]
        tau[g] = Matrix.from_columns(cols, VU.module.dims[g])
        raw_to_l = _raw_map(G, UV.layout, {g: [(g, e, 0, L.dims[g])]}, g, g,
                            lambda h, h2: (g, e, L.mult[(h, h2)]))
        mu[g] = raw_to_l @ UV.sect[g]
    return MoritaContext(L, K, U, V, tau, mu, VU, UV)


def identity_context(A: GradedAlgebra) -> MoritaContext:
    return context_from_iso(A, A)


def reverse(c: MoritaContext) -> MoritaContext:
    """The same context read from K to L: (V, U, mu^-1, tau^-1)."""
    G = c.group
    tau = {g: inverse(c.mu[g]) for g in G.elements}
    mu = {g: inverse(c.tau[g]) for g in G.elements}
    return MoritaContext(c.K, c.L, c.V, c.U, tau, mu, c.UV, c.VU)


def with_maps(c: MoritaContext, tau: dict | None = None, mu: dict | None = None) -> MoritaContext:
    return MoritaContext(c.L, c.K, c.U, c.V, tau or c.tau, mu or c.mu, c.VU, c.UV)


def _flip_raw(G: GroupTable, src: Tensor, dst: Tensor, g: int, g_dst: int) -> Matrix:
    """Raw map m (x) n -> n (x) m between the two layouts."""
    from .galg import swap_matrix
    return _raw_map(G, src.layout, dst.layout, g, g_dst,
                    lambda h, h2: (h2, h, swap_matrix(src.M.dims[h], src.N.dims[h2])))


def transfer_trace(c: MoritaContext, lam_k: Sequence) -> list:
    """Lambda_L(l) = Lambda_K(tau^-1([v (x) u])) with mu^-1(l) = [u (x) v]."""
    G = c.group
    e = G.e
    if not validate_context(c).ok:
        raise ContextInvalid("context fails validation")
    flip = _flip_raw(G, c.UV, c.VU, e, e)
    m = inverse(c.tau[e]) @ c.VU.proj[e] @ flip @ c.UV.sect[e] @ inverse(c.mu[e])
    lam = [dot(lam_k, m.col(j)) for j in range(c.L.dims[e])]
    L = c.L
    for g in G.elements:
        gi = G.inv[g]
        for a in range(L.dims[g]):
            for b in range(L.dims[gi]):
                x, y = L.basis(g, a), L.basis(gi, b)
                if dot(lam, L.mul(g, x, gi, y)) != dot(lam, L.mul(gi, y, g, x)):
                    raise ContextInvalid(f"transferred trace is not symmetric at degree {g}")
    return lam


def _unit_rep(c: MoritaContext) -> list:
    """sum_c u_c (x) v_c in U_e (x) V_e representing mu^-1(1_L)."""
    G = c.group
    e = G.e
    target = inverse(c.mu[e]).apply(c.L.one())
    off = c.UV.offset(e, e)
    n = c.U.dims[e] * c.V.dims[e]
    block = c.UV.proj[e].submatrix(range(c.UV.proj[e].rows), range(off, off + n))
    x = solve(block, Matrix.column(target))
    if x is None:
        raise ContextInvalid("mu^-1(1) has no representative in U_e (x) V_e")
    return x.col(0)


def transfer_ipe(c: MoritaContext, fK: FrobeniusPackage, g: int) -> list:
    """sum_{i,c,d} mu(u_c p_i v_d) (x) mu(u_d q_i v_c) in L_g (x) L_{g^-1}."""
    G = c.group
    e = G.e
    gi = G.inv[g]
    L, U, V = c.L, c.U, c.V
    rep = _unit_rep(c)
    terms = list(_nonzero_pairs(rep, V.dims[e]))
    out = [ZERO] * (L.dims[g] * L.dims[gi])
    for p, q in fK.pairs[g]:
        for (uc, vc), a in terms:
            for (ud, vd), b in terms:
                left = c.mu_raw(g, U.act_right(e, U.basis(e, uc), g, p), e, V.basis(e, vd))
                right = c.mu_raw(gi, U.act_right(e, U.basis(e, ud), gi, q), e, V.basis(e, vc))
                out = _add(out, _scale(a * b, vkron(left, right)))
    return out


def is_compatible(c: MoritaContext, fK: FrobeniusPackage, fL: FrobeniusPackage) -> Report:
    rep = Report()
    lam = transfer_trace(c, fK.trace)
    ok = list(lam) == list(fL.trace)
    rep.add("trace", ok, None if ok else [format_scalar(x) for x in lam])
    bad = None
    for g in c.group.elements:
        if transfer_ipe(c, fK, g) != list(fL.ipe[g]):
            bad = ["degree", g]
            break
    rep.add("inner-product-elements", bad is None, bad)
    return rep


def equivalent_contexts(xi: dict, rho: dict, c1: MoritaContext, c2: MoritaContext) -> bool:
    """mu1 = mu2 o (xi (x) rho) and tau2 = (rho (x) xi) o tau1."""
    G = c1.group
    try:
        xr = induced_map(xi, rho, c1.UV, c2.UV)
        rx = induced_map(rho, xi, c1.VU, c2.VU)
    except NotBalanced:
        return False
    for g in G.elements:
        if c1.mu[g] != c2.mu[g] @ xr[g]:
            return False
        if c2.tau[g] != rx[g] @ c1.tau[g]:
            return False
    return True


# ---------------------------------------------------------------------------
# conjugation


def conjugate(M: GradedBimodule, strict: bool = True) -> GradedBimodule:
    """For an (X, Y)-bimodule: the (Y^op, X^op)-bimodule with conj_g = M_{g^-1}.

    y^op . m-bar = (m y)-bar and m-bar . x^op = (x m)-bar. With ``strict`` the
    shape X = Y^op is required, so that the conjugate is again an (X, Y)-bimodule.
    """
    from .galg import swap_matrix
    X, Y = M.left, M.right
    if strict and X != opposite(Y):
        raise ShapeMismatch("conjugation needs a bimodule over (K^op, K)")
    G = M.group
    E = G.elements
    inv = G.inv
    dims = [M.dims[inv[g]] for g in E]
    Yo, Xo = opposite(Y), opposite(X)
    lact, ract = {}, {}
    for k in E:
        for h in E:
            # y in Y_{k^-1}, m in M_{h^-1}: m y in M_{h^-1 k^-1}
            lact[(k, h)] = M.ract[(inv[h], inv[k])] @ swap_matrix(Y.dims[inv[k]], M.dims[inv[h]])
            # x in X_{k^-1}: x m in M_{k^-1 h^-1}
            ract[(h, k)] = M.lact[(inv[k], inv[h])] @ swap_matrix(M.dims[inv[h]], X.dims[inv[k]])
    return GradedBimodule(Yo, Xo, dims, lact, ract)


def conjugate_context(c: MoritaContext, strict: bool = True) -> MoritaContext:
    """Context between K^op and L^op built from the conjugate modules.

    tau-bar = F o mu^-1 and mu-bar = tau^-1 o F'^-1, where F, F' flip the
    tensor factors of conjugated tensor products. With ``strict`` the shape
    L = K^op is required and the result is again a context between L and K.
    """
    G = c.group
    E = G.elements
    inv = G.inv
    Ub, Vb = conjugate(c.U, strict=False), conjugate(c.V, strict=False)
    if strict and (Ub.left != c.L or Ub.right != c.K):
        raise ShapeMismatch("conjugate context needs L = K^op")
    Lb, Kb = Ub.left, Ub.right
    VbUb = tensor_over(Vb, Lb, Ub)
    UbVb = tensor_over(Ub, Kb, Vb)
    tau, mu = {}, {}
    for g in E:
        gi = inv[g]
        # K_g = L_{g^-1} as spaces; mu^-1 lands in (U (x) V)_{g^-1}; flip u (x) v -> v-bar (x) u-bar
        flip = _raw_map(G, c.UV.layout, VbUb.layout, gi, g,
                        lambda h, h2: (inv[h2], inv[h], _swap(c.U.dims[h], c.V.dims[h2])))
        tau[g] = VbUb.proj[g] @ flip @ c.UV.sect[gi] @ inverse(c.mu[gi])
        back = _raw_map(G, UbVb.layout, c.VU.layout, g, gi,
                        lambda h, h2: (inv[h2], inv[h], _swap(Ub.dims[h], Vb.dims[h2])))
        mu[g] = inverse(c.tau[gi]) @ c.VU.proj[gi] @ back @ UbVb.sect[g]
    if strict:
        return MoritaContext(c.L, c.K, Ub, Vb, tau, mu, VbUb, UbVb)
    return MoritaContext(Lb, Kb, Ub, Vb, tau, mu, VbUb, UbVb)


def _swap(m: int, n: int) -> Matrix:
    from .galg import swap_matrix
    return swap_matrix(m, n)


# ---------------------------------------------------------------------------
# explicit contexts


def column_row_context(K: GradedAlgebra, L: GradedAlgebra) -> MoritaContext:
    """Context between L = M_2 (x) K-grading (one 2x2 block) and K = k[G].

    U_g = columns (x) l_g, V_g = rows (x) l_g, mu(c (x) g, r (x) h) = l_gh (c r)
    and tau(1) = [e_1^T (x) e_1].
    """
    G = K.group
    E = G.elements
    e = G.e
    if any(K.dims[g] != 1 for g in E) or any(L.dims[g] != 4 for g in E):
        raise ShapeMismatch("column/row context needs k[G] and a single 2x2 block")
    # L basis per degree: E_ab at index 2a + b, times l_g
    lact, ract, lactv, ractv = {}, {}, {}, {}
    for g in E:
        for h in E:
            # L_g (x) U_h -> U_gh: (l_g E) (l_h c) = l_gh (E c) times the scalar
            # l_g l_h = s l_gh read off from L's own product
            s = _ell_scalar(L, g, h)
            m = Matrix.zeros(2, 8)
            for a in range(2):
                for b in range(2):
                    for i in range(2):
                        if b == i:
                            m.data[a][(2 * a + b) * 2 + i] = s
            lact[(g, h)] = m
            ract[(h, g)] = Matrix.identity(2)        # U_h (x) k_g
            lactv[(g, h)] = Matrix.identity(2)       # k_g (x) V_h
            m = Matrix.zeros(2, 8)
            for i in range(2):
                for a in range(2):
                    for b in range(2):
                        if i == a:
                            m.data[b][i * 4 + 2 * a + b] = s
            ractv[(h, g)] = m
    U = GradedBimodule(L, K, [2] * G.order, lact, ract)
    V = GradedBimodule(K, L, [2] * G.order, lactv, ractv)
    VU = tensor_over(V, L, U)
    UV = tensor_over(U, K, V)
    tau, mu = {}, {}
    for g in E:
        tau[g] = Matrix.column(VU.cls(g, [ONE, ZERO], e, [ONE, ZERO]))
        cols = []
        for k in range(UV.module.dims[g]):
            raw = UV.sect[g].col(k)
            acc = [ZERO] * 4
            for h, h2, block in UV.pieces(g, raw):
                s = _ell_scalar(L, h, h2)
                for (i, j), v in _nonzero_pairs(block, 2):
                    acc[2 * i + j] += s * v
            cols.append(acc)
        mu[g] = Matrix.from_columns(cols, 4)
    return MoritaContext(L, K, U, V, tau, mu, VU, UV)


def _ell_scalar(L: GradedAlgebra, g: int, h: int) -> Scalar:
    """s with l_g l_h = s l_gh in a single-block model (read from E_11 E_11)."""
    x = unit_vector(4, 0)
    return L.mul(g, x, h, x)[0]


# ---------------------------------------------------------------------------
# composition and equivalence search


def expand(T: Tensor, g: int, x: Sequence):
    """Yield (coef, h, i, h2, j): x in T_g as sum coef [m_i (x) n_j], m_i in M_h, n_j in N_h2."""
    raw = T.sect[g].apply(list(x))
    for h, h2, block in T.pieces(g, raw):
        for (i, j), v in _nonzero_pairs(block, T.N.dims[h2]):
            yield v, h, i, h2, j


def compose_contexts(c2: MoritaContext, c1: MoritaContext) -> MoritaContext:
    """c2 o c1 for c1 between M and K and c2 between P and M.

    U = U2 (x)_M U1, V = V1 (x)_M V2, tau inserts tau2(1) between the factors
    of tau1 and mu contracts the inner pair with mu1 before applying mu2.
    The two tensors are kept on the result as ``factors``.
    """
    if c1.L != c2.K:
        raise AlgebraMismatch("contexts do not share the middle algebra")
    G = c1.group
    E = G.elements
    e = G.e
    TU = tensor_over(c2.U, c1.L, c1.U)
    TV = tensor_over(c1.V, c1.L, c2.V)
    U, V = TU.module, TV.module
    VU = tensor_over(V, c2.L, U)
    UV = tensor_over(U, c1.K, V)
    t2 = list(expand(c2.VU, e, c2.tau[e].apply(c1.L.one())))
    tau, mu = {}, {}
    for g in E:
        cols = []
        for k in range(c1.K.dims[g]):
            acc = [ZERO] * VU.module.dims[g]
            for a, h, i, h2, j in expand(c1.VU, g, c1.tau[g].col(k)):
                v1, u1 = c1.V.basis(h, i), c1.U.basis(h2, j)
                for b, p, r, p2, s in t2:
                    v = TV.cls(h, v1, p, c2.V.basis(p, r))
                    u = TU.cls(p2, c2.U.basis(p2, s), h2, u1)
                    acc = _add(acc, _scale(a * b, VU.cls(G.mul(h, p), v, G.mul(p2, h2), u)))
            cols.append(acc)
        tau[g] = Matrix.from_columns(cols, VU.module.dims[g])
        cols = []
        for k in range(UV.module.dims[g]):
            acc = [ZERO] * c2.L.dims[g]
            for a, h, i, h2, j in expand(UV, g, unit_vector(UV.module.dims[g], k)):
                for b, p, r, p2, s in expand(TU, h, U.basis(h, i)):
                    for c, q, t, q2, w in expand(TV, h2, V.basis(h2, j)):
                        m = c1.mu_raw(p2, c1.U.basis(p2, s), q, c1.V.basis(q, t))
                        u2 = c2.U.act_right(p, c2.U.basis(p, r), G.mul(p2, q), m)
                        l = c2.mu_raw(G.mul(p, G.mul(p2, q)), u2, q2, c2.V.basis(q2, w))
                        acc = _add(acc, _scale(a * b * c, l))
            cols.append(acc)
        mu[g] = Matrix.from_columns(cols, c2.L.dims[g])
    out = MoritaContext(c2.L, c1.K, U, V, tau, mu, VU, UV)
    out.factors = (TU, TV)
    return out


def bimodule_homs(M: GradedBimodule, N: GradedBimodule) -> list[dict]:
    """A basis of the graded bimodule maps M -> N, each as per-degree matrices."""
    from .scalars import kernel
    G = M.group
    E = G.elements
    slots, n = {}, 0
    for g in E:
        slots[g] = n
        n += N.dims[g] * M.dims[g]

    def var(g, r, c):
        return slots[g] + r * M.dims[g] + c

    rows = []
    for k in E:
        for h in E:
            kh, hk = G.mul(k, h), G.mul(h, k)
            for a in range(M.left.dims[k]):
                x = M.left.basis(k, a)
                act_n = [N.act_left(k, x, h, N.basis(h, rr)) for rr in range(N.dims[h])]
                for i in range(M.dims[h]):
                    lhs = M.act_left(k, x, h, M.basis(h, i))
                    for r in range(N.dims[kh]):
                        row = [ZERO] * n
                        for c, v in enumerate(lhs):
                            if v:
                                row[var(kh, r, c)] += v
                        for rr in range(N.dims[h]):
                            w = act_n[rr][r]
                            if w:
                                row[var(h, rr, i)] -= w
                        rows.append(row)
            for a in range(M.right.dims[k]):
                y = M.right.basis(k, a)
                act_n = [N.act_right(h, N.basis(h, rr), k, y) for rr in range(N.dims[h])]
                for i in range(M.dims[h]):
                    lhs = M.act_right(h, M.basis(h, i), k, y)
                    for r in range(N.dims[hk]):
                        row = [ZERO] * n
                        for c, v in enumerate(lhs):
                            if v:
                                row[var(hk, r, c)] += v
                        for rr in range(N.dims[h]):
                            w = act_n[rr][r]
                            if w:
                                row[var(h, rr, i)] -= w
                        rows.append(row)
    basis = kernel(Matrix(rows, n)) if rows else Matrix.identity(n)
    out = []
    for col in basis.columns():
        f = {}
        for g in E:
            d, m = N.dims[g], M.dims[g]
            f[g] = Matrix([[col[var(g, r, c)] for c in range(m)] for r in range(d)], m)
        out.append(f)
    return out


def _combine(maps: list[dict], coeffs: Sequence, E) -> dict:
    out = {}
    for g in E:
        acc = None
        for m, c in zip(maps, coeffs):
            if c:
                term = m[g].scale(c)
                acc = term if acc is None else acc + term
        out[g] = acc if acc is not None else maps[0][g].scale(ZERO)
    return out


def find_equivalence(c1: MoritaContext, c2: MoritaContext, tries: int = 64):
    """An equivalence (xi, rho) from c1 to c2, or None if none is found.

    xi runs over deterministic combinations of a basis of bimodule maps
    U1 -> U2; for each, rho is solved linearly from tau2 = (rho (x) xi) tau1
    and the pair is accepted when the mu equation also holds. The search is
    complete when the bimodule maps U1 -> U2 form a one-dimensional space.
    """
    import itertools
    G = c1.group
    E = G.elements
    if c1.K != c2.K or c1.L != c2.L:
        return None
    xs = bimodule_homs(c1.U, c2.U)
    ys = bimodule_homs(c1.V, c2.V)
    if not xs or not ys:
        return None
    combos = [tuple(1 if i == j else 0 for i in range(len(xs))) for j in range(len(xs))]
    combos.insert(0, tuple([1] * len(xs)))
    for vals in itertools.product(range(-2, 3), repeat=len(xs)):
        if len(combos) >= tries:
            break
        if any(vals) and vals not in combos:
            combos.append(vals)
    for coeffs in combos:
        xi = _combine(xs, [to_scalar(c) for c in coeffs], E)
        rho = _solve_rho(c1, c2, xi, ys)
        if rho is not None and equivalent_contexts(xi, rho, c1, c2):
            return xi, rho
    return None


def _solve_rho(c1: MoritaContext, c2: MoritaContext, xi: dict, ys: list[dict]):
    """Coefficients b with tau2 = (sum b_k ys_k (x) xi) tau1, as a map dict, or None."""
    G = c1.group
    E = G.elements
    blocks = []
    for y in ys:
        try:
            rx = induced_map(y, xi, c1.VU, c2.VU)
        except NotBalanced:
            return None
        vec = []
        for g in E:
            for row in (rx[g] @ c1.tau[g]).data:
                vec.extend(row)
        blocks.append(vec)
    target = []
    for g in E:
        for row in c2.tau[g].data:
            target.extend(row)
    if not target:
        return None
    A = Matrix.from_columns(blocks, len(target))
    sol = solve(A, Matrix.column(target))
    if sol is None:
        return None
    return _combine(ys, sol.col(0), E)
