"""The G-center of a quasi-biangular algebra and the crossed Frobenius verifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .frob import FrobeniusPackage, dot, is_quasi_biangular, sandwich_matrix, z_inverse
from .groups import GroupTable
from .scalars import ZERO, Matrix, Scalar, format_scalar, kernel, rref


class NotQuasiBiangular(ValueError):
    pass


def psi(f: FrobeniusPackage, a: Sequence, g: int | None = None) -> list:
    """sum_i p_i^e a q_i^e, degreewise.

    ``a`` is either a homogeneous vector of degree ``g`` or, with ``g`` None,
    a dict mapping degrees to vectors.
    """
    A = f.algebra
    e = A.e
    if g is not None:
        return sandwich_matrix(f, e, g).apply(list(a))
    return {h: sandwich_matrix(f, e, h).apply(list(v)) for h, v in a.items()}


@dataclass(eq=False)
class CrossedPackage:
    """A crossed Frobenius G-algebra in coordinates.

    ``mult[(g, h)]``: Z_g (x) Z_h -> Z_gh; ``phi[(h, g)]``: Z_g -> Z_{h g h^-1};
    ``counit`` is a functional on Z_e and eta(a, b) = counit(a b).
    ``embed[g]`` has the center basis of degree g as columns in A_g coordinates.
    """
    group: GroupTable
    dims: tuple
    mult: dict
    unit: tuple
    phi: dict
    counit: tuple
    source: FrobeniusPackage | None = None
    embed: dict = field(default_factory=dict)
    defects: list = field(default_factory=list)

    def mul(self, g: int, x: Sequence, h: int, y: Sequence) -> list:
        from .galg import vkron
        return self.mult[(g, h)].apply(vkron(x, y))

    def eta(self, g: int, x: Sequence, h: int, y: Sequence) -> Scalar:
        if self.group.mul(g, h) != self.group.e:
            return ZERO
        return dot(self.counit, self.mul(g, x, h, y))

    def basis(self, g: int, i: int) -> list:
        from .galg import unit_vector
        return unit_vector(self.dims[g], i)

    def gram(self, g: int) -> Matrix:
        gi = self.group.inv[g]
        return Matrix([[self.eta(g, self.basis(g, i), gi, self.basis(gi, j))
                        for j in range(self.dims[gi])] for i in range(self.dims[g])], self.dims[gi])

    def to_vector(self, g: int, x: Sequence) -> list:
        """A-coordinates of a center element (requires ``embed``)."""
        return self.embed[g].apply(list(x))


def _coords(basis_rows: Matrix, pivots: list[int], v: list) -> list | None:
    """Coordinates of v in the span of RREF rows, or None if outside."""
    c = [v[p] for p in pivots]
    recon = [ZERO] * basis_rows.cols
    for k, row in zip(c, basis_rows.data):
        if k:
            recon = [a + k * b for a, b in zip(recon, row)]
    return c if recon == list(v) else None


def center_basis(f: FrobeniusPackage, g: int) -> tuple[Matrix, list[int]]:
    """Canonical basis of Psi(A_g): RREF rows of the image."""
    s = sandwich_matrix(f, f.algebra.e, g)
    rk, piv, red = rref(s.T)
    return Matrix(red.data[:rk], s.rows), piv


def centralizer(f: FrobeniusPackage, g: int) -> Matrix:
    """Columns span {b in A_g : a b = b a for all a in A_e}."""
    A = f.algebra
    e = A.e
    rows = []
    for k in range(A.dims[e]):
        a = A.basis(e, k)
        rows.extend((A.left_matrix(e, a, g) - A.right_matrix(g, a, e)).data)
    return kernel(Matrix(rows, A.dims[g]))


def g_center(f: FrobeniusPackage) -> CrossedPackage:
    """Z_G = (+)_g Psi(A_g) with product Psi(a) Psi(b) z^-1 and phi_h(a) = sum p^h a z q^h."""
    A = f.algebra
    G = A.group
    e = G.e
    if f.z is None or not is_quasi_biangular(f):
        raise NotQuasiBiangular("the package has no certified quasi-biangular structure")
    z = list(f.z)
    zinv = z_inverse(f)
    bases, pivs = {}, {}
    for g in G.elements:
        bases[g], pivs[g] = center_basis(f, g)
    dims = tuple(bases[g].rows for g in G.elements)
    embed = {g: bases[g].T for g in G.elements}
    defects: list = []
    mult = {}
    for g in G.elements:
        for h in G.elements:
            gh = G.mul(g, h)
            cols = []
            for i in range(dims[g]):
                for j in range(dims[h]):
                    prod = A.mul(gh, A.mul(g, bases[g].data[i], h, bases[h].data[j]), e, zinv)
                    c = _coords(bases[gh], pivs[gh], prod)
                    if c is None:
                        defects.append(("closure", g, h, i, j))
                        c = [ZERO] * dims[gh]
                    cols.append(c)
            mult[(g, h)] = Matrix.from_columns(cols, dims[gh])
    unit = _coords(bases[e], pivs[e], z)
    if unit is None:
        raise NotQuasiBiangular("z does not lie in Psi(A_e)")
    phi = {}
    for h in G.elements:
        for g in G.elements:
            tgt = G.conj(h, g)
            s = sandwich_matrix(f, h, g)
            cols = []
            for i in range(dims[g]):
                img = s.apply(A.mul(g, bases[g].data[i], e, z))
                c = _coords(bases[tgt], pivs[tgt], img)
                if c is None:
                    defects.append(("phi", h, g, i))
                    c = [ZERO] * dims[tgt]
                cols.append(c)
            phi[(h, g)] = Matrix.from_columns(cols, dims[tgt])
    counit = tuple(dot(f.trace, bases[e].data[i]) for i in range(dims[e]))
    return CrossedPackage(G, dims, mult, tuple(unit), phi, counit, f, embed, defects)


# ---------------------------------------------------------------------------
# verifier


def _w(*xs):
    return [x if isinstance(x, (int, str)) else format_scalar(x) for x in xs]


def verify_crossed(c: CrossedPackage) -> dict:
    """Check every crossed Frobenius axiom; returns a JSON-ready report."""
    G = c.group
    e = G.e
    E = G.elements
    ident = {g: Matrix.identity(c.dims[g]) for g in E}
    results = []

    def record(ident_: str, ok: bool, witness=None):
        entry = {"id": ident_, "pass": bool(ok)}
        if not ok and witness is not None:
            entry["witness"] = witness
        results.append(entry)

    # hom: phi_e = id, phi_g phi_h = phi_gh, each phi_g unital and multiplicative
    bad = None
    for g in E:
        if c.phi[(e, g)] != ident[g]:
            bad = ["phi_e", g]
            break
    if bad is None:
        for g in E:
            for h in E:
                for l in E:
                    lhs = c.phi[(g, G.conj(h, l))] @ c.phi[(h, l)]
                    if lhs != c.phi[(G.mul(g, h), l)]:
                        bad = ["compose", g, h, l]
                        break
                if bad:
                    break
            if bad:
                break
    if bad is None:
        for h in E:
            if c.phi[(h, e)].apply(list(c.unit)) != list(c.unit):
                bad = ["unit", h]
                break
            for g in E:
                for k in E:
                    for i in range(c.dims[g]):
                        for j in range(c.dims[k]):
                            a, b = c.basis(g, i), c.basis(k, j)
                            lhs = c.phi[(h, G.mul(g, k))].apply(c.mul(g, a, k, b))
                            rhs = c.mul(G.conj(h, g), c.phi[(h, g)].apply(a), G.conj(h, k), c.phi[(h, k)].apply(b))
                            if lhs != rhs:
                                bad = ["multiplicative", h, [g, i], [k, j]]
                                break
                        if bad:
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
    record("hom", bad is None, bad)

    # (i) phi_h(Z_g) in Z_{hgh^-1} and phi_h = id on Z_h
    bad = None
    phi_defects = [d for d in c.defects if d[0] == "phi"]
    if phi_defects:
        bad = list(phi_defects[0])
    else:
        for h in E:
            if c.phi[(h, h)] != ident[h]:
                bad = ["fixes-own-degree", h]
                break
    record("(i)", bad is None, bad)

    # (ii) b a = phi_h(a) b for b in Z_h
    bad = None
    for g in E:
        for h in E:
            for i in range(c.dims[g]):
                for j in range(c.dims[h]):
                    a, b = c.basis(g, i), c.basis(h, j)
                    lhs = c.mul(h, b, g, a)
                    rhs = c.mul(G.conj(h, g), c.phi[(h, g)].apply(a), h, b)
                    if lhs != rhs:
                        bad = [[g, i], [h, j]]
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    record("(ii)", bad is None, bad)

    # (iii) Tr(mu_c phi_h on Z_g) = Tr(phi_{g^-1} mu_c on Z_h), c in Z_{g h g^-1 h^-1}
    bad = None
    for g in E:
        for h in E:
            k = G.commutator(g, h)
            gi = G.inv[g]
            for ci in range(c.dims[k]):
                cv = c.basis(k, ci)
                mu1 = _left_mult(c, k, cv, G.conj(h, g))
                t1 = (mu1 @ c.phi[(h, g)]).trace()
                mu2 = _left_mult(c, k, cv, h)
                t2 = (c.phi[(gi, G.mul(k, h))] @ mu2).trace()
                if t1 != t2:
                    bad = _w(g, h, ci, t1, t2)
                    break
            if bad:
                break
        if bad:
            break
    record("(iii)", bad is None, bad)

    # torus form: Tr(phi_h | Z_g) = Tr(phi_{g^-1} | Z_h) for commuting g, h
    bad = None
    for g in E:
        for h in E:
            if G.mul(g, h) == G.mul(h, g):
                t1 = c.phi[(h, g)].trace()
                t2 = c.phi[(G.inv[g], h)].trace()
                if t1 != t2:
                    bad = _w(g, h, t1, t2)
                    break
        if bad:
            break
    record("trace-condition", bad is None, bad)

    # (iv) eta(phi_g a, b) = eta(a, phi_{g^-1} b)
    bad = None
    for g in E:
        gi = G.inv[g]
        for x in E:
            y = G.inv[G.conj(g, x)]
            for i in range(c.dims[x]):
                for j in range(c.dims[y]):
                    a, b = c.basis(x, i), c.basis(y, j)
                    lhs = c.eta(G.conj(g, x), c.phi[(g, x)].apply(a), y, b)
                    rhs = c.eta(x, a, G.conj(gi, y), c.phi[(gi, y)].apply(b))
                    if lhs != rhs:
                        bad = _w(g, x, i, j)
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    record("(iv)", bad is None, bad)

    closure = [d for d in c.defects if d[0] == "closure"]
    if closure:
        record("closure", False, list(closure[0]))
    return {"pass": all(r["pass"] for r in results), "axioms": results}


def _left_mult(c: CrossedPackage, k: int, cv: list, g: int) -> Matrix:
    """Matrix of x |-> c x from Z_g to Z_{kg}."""
    cols = [c.mul(k, cv, g, c.basis(g, i)) for i in range(c.dims[g])]
    return Matrix.from_columns(cols, c.dims[c.group.mul(k, g)])


def with_phi(c: CrossedPackage, phi: dict) -> CrossedPackage:
    """Copy of ``c`` with a replaced action (used to probe the verifier)."""
    return CrossedPackage(c.group, c.dims, c.mult, c.unit, phi, c.counit, c.source, c.embed, c.defects)
