"""Frobenius structures on G-graded algebras.

A package holds the trace on the principal component, the induced pairing
eta(x, y) = trace(x y), its inner product elements, and optionally a central
element z certifying quasi-biangularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .galg import GradedAlgebra, is_strongly_graded, unit_vector, vkron
from .scalars import (ZERO, Matrix, Scalar, inverse, kernel, kron, rank, solve,
                      to_scalar)


class FrobeniusError(ValueError):
    pass


class Degenerate(FrobeniusError):
    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(f"pairing is degenerate in degree {degree}")


class NotSymmetric(FrobeniusError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"pairing is not symmetric at {witness}")


class DegreeMismatch(FrobeniusError):
    pass


@dataclass(eq=False)
class FrobeniusPackage:
    algebra: GradedAlgebra
    trace: tuple
    gram: dict[int, Matrix]
    ipe: dict[int, list]          # tensor sum_i p_i (x) q_i in A_g (x) A_{g^-1}
    pairs: dict[int, list]        # explicit (p_i, q_i) with p_i the basis of A_g
    z: tuple | None = None
    z_freedom: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def group(self):
        return self.algebra.group

    def eta(self, g: int, x: Sequence, h: int, y: Sequence) -> Scalar:
        """eta(x, y) for x in A_g, y in A_h."""
        A = self.algebra
        if A.group.mul(g, h) != A.e:
            return ZERO
        return dot(self.trace, A.mul(g, x, h, y))

    def with_z(self, z: Sequence) -> "FrobeniusPackage":
        z = tuple(to_scalar(x) for x in z)
        if not _z_equations_hold(self, z):
            raise FrobeniusError("supplied z fails centrality or sum_i p_i z q_i = 1")
        return FrobeniusPackage(self.algebra, self.trace, self.gram, self.ipe, self.pairs, z, 0)

    def require_z(self) -> tuple:
        if self.z is None:
            raise FrobeniusError("package has no certified z")
        return self.z


def dot(u: Sequence, v: Sequence) -> Scalar:
    acc: Scalar = ZERO
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def make_frobenius(A: GradedAlgebra, trace: Sequence, z: Sequence | None = None,
                   solve_z: bool = True) -> FrobeniusPackage:
    """Frobenius package of (A, trace); z is verified if given, else solved for."""
    G = A.group
    lam = tuple(to_scalar(x) for x in trace)
    if len(lam) != A.dims[G.e]:
        raise FrobeniusError("trace must be a functional on the principal component")
    gram = {}
    for g in G.elements:
        gi = G.inv[g]
        m = Matrix.zeros(A.dims[g], A.dims[gi])
        prod = A.mult[(g, gi)]
        for i in range(A.dims[g]):
            for j in range(A.dims[gi]):
                m.data[i][j] = dot(lam, prod.col(i * A.dims[gi] + j))
        gram[g] = m
    for g in G.elements:
        gi = G.inv[g]
        for i in range(A.dims[g]):
            for j in range(A.dims[gi]):
                if gram[g][i, j] != gram[gi][j, i]:
                    raise NotSymmetric(((g, i), (gi, j)))
    ipe, pairs = {}, {}
    for g in G.elements:
        gi = G.inv[g]
        if rank(gram[g]) != A.dims[g] or A.dims[g] != A.dims[gi]:
            raise Degenerate(g)
        ginv = inverse(gram[g])
        # q_i = sum_j (gram^-1)_{j i} b'_j
        prs = []
        for i in range(A.dims[g]):
            prs.append((unit_vector(A.dims[g], i), ginv.col(i)))
        pairs[g] = prs
        t = [ZERO] * (A.dims[g] * A.dims[gi])
        for p, q in prs:
            for k, v in enumerate(vkron(p, q)):
                if v:
                    t[k] = t[k] + v
        ipe[g] = t
    f = FrobeniusPackage(A, lam, gram, ipe, pairs)
    if z is not None:
        return f.with_z(z)
    if solve_z:
        found = find_central_z(f)
        if found is not None:
            f.z, f.z_freedom = found
    return f


# ---------------------------------------------------------------------------
# the central element z


def sandwich_matrix(f: FrobeniusPackage, g: int, src: int) -> Matrix:
    """Matrix of x |-> sum_i p_i^g x q_i^g from A_src to A_{g src g^-1}."""
    key = ("sandwich", g, src)
    m = f._cache.get(key)
    if m is None:
        A = f.algebra
        G = A.group
        gi = G.inv[g]
        tgt = G.prod(g, src, gi)
        cols = []
        for k in range(A.dims[src]):
            x = A.basis(src, k)
            acc = [ZERO] * A.dims[tgt]
            for p, q in f.pairs[g]:
                v = A.mul(G.mul(g, src), A.mul(g, p, src, x), gi, q)
                acc = [a + b for a, b in zip(acc, v)]
            cols.append(acc)
        m = Matrix.from_columns(cols, A.dims[tgt])
        f._cache[key] = m
    return m


def _z_equations(f: FrobeniusPackage) -> tuple[Matrix, Matrix]:
    A = f.algebra
    G = A.group
    e = G.e
    d = A.dims[e]
    rows: list = []
    rhs: list = []
    for k in range(d):
        a = A.basis(e, k)
        diff = A.right_matrix(e, a, e) - A.left_matrix(e, a, e)
        rows.extend(diff.data)
        rhs.extend([[ZERO]] * d)
    for g in G.elements:
        s = sandwich_matrix(f, g, e)
        rows.extend(s.data)
        rhs.extend([[x] for x in A.unit])
    return Matrix(rows, d), Matrix(rhs, 1)


def _z_equations_hold(f: FrobeniusPackage, z: Sequence) -> bool:
    lhs, rhs = _z_equations(f)
    return lhs.apply(list(z)) == rhs.col(0)


def find_central_z(f: FrobeniusPackage) -> tuple[tuple, int] | None:
    """Solve for central z in A_e with sum_i p_i^g z q_i^g = 1 for every g.

    Returns (z, dimension of the solution space's direction) or None. The
    returned z is the echelon solution with all free coordinates zero.
    """
    lhs, rhs = _z_equations(f)
    x = solve(lhs, rhs)
    if x is None:
        return None
    z = tuple(x.col(0))
    assert lhs.apply(list(z)) == rhs.col(0)
    return z, kernel(lhs).cols


def z_inverse(f: FrobeniusPackage, g: int | None = None) -> list:
    """sum_i p_i^g q_i^g (default g = e)."""
    A = f.algebra
    G = A.group
    g = G.e if g is None else g
    gi = G.inv[g]
    return A.mult[(g, gi)].apply(f.ipe[g])


@dataclass
class Report:
    checks: dict = field(default_factory=dict)

    def add(self, name: str, ok: bool, witness=None) -> None:
        entry: dict = {"pass": bool(ok)}
        if witness is not None and not ok:
            entry["witness"] = witness
        self.checks[name] = entry

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def __bool__(self) -> bool:
        return self.ok

    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v["pass"]]

    def to_json(self) -> dict:
        return {"pass": self.ok, "checks": self.checks}


def separability_element(f: FrobeniusPackage) -> list:
    """sum_i p_i^e (x) z q_i^e."""
    A = f.algebra
    e = A.e
    z = f.require_z()
    lz = A.left_matrix(e, z, e)
    return kron(Matrix.identity(A.dims[e]), lz).apply(f.ipe[e])


def is_quasi_biangular(f: FrobeniusPackage) -> Report:
    rep = Report()
    A = f.algebra
    G = A.group
    e = G.e
    rep.add("frobenius", True)
    sg = is_strongly_graded(A)
    rep.add("strongly-graded", sg.ok, sg.failing)
    z = f.z
    if z is None:
        found = find_central_z(f)
        z = found[0] if found else None
    rep.add("central-z", z is not None)
    if z is None:
        rep.add("separable", False, "no z")
        return rep
    fz = f if f.z is not None else FrobeniusPackage(A, f.trace, f.gram, f.ipe, f.pairs, z)
    s = separability_element(fz)
    d = A.dims[e]
    ok = A.mult[(e, e)].apply(s) == list(A.unit)
    witness = None
    for k in range(d):
        a = A.basis(e, k)
        left = kron(A.left_matrix(e, a, e), Matrix.identity(d)).apply(s)
        right = kron(Matrix.identity(d), A.right_matrix(e, a, e)).apply(s)
        if left != right:
            ok, witness = False, k
            break
    rep.add("separable", ok, witness)
    return rep


# ---------------------------------------------------------------------------
# shift identity and coproduct


def _homog(f: FrobeniusPackage, b, expected: int, what: str) -> list:
    if isinstance(b, tuple) and len(b) == 2 and isinstance(b[0], int):
        deg, vec = b
        if deg != expected:
            raise DegreeMismatch(f"{what} has degree {deg}, expected {expected}")
    else:
        vec = b
    vec = [to_scalar(x) for x in vec]
    if len(vec) != f.algebra.dims[expected]:
        raise DegreeMismatch(f"{what} has the wrong length for degree {expected}")
    return vec


def shift_identity_check(f: FrobeniusPackage, g: int, h: int, b, zp: Sequence) -> bool:
    """sum_i p_i^h (x) z' q_i^h b = sum_j b p_j^{gh} (x) z' q_j^{gh} for b in A_{g^-1}.

    With the package's z it also checks the conjugation form
    sum_j p_j^g b z q_j^g c = sum_k c p_k^{hg} b z q_k^{hg} for all basis c in A_{h^-1}.
    """
    A = f.algebra
    G = A.group
    e = G.e
    gi, hi = G.inv[g], G.inv[h]
    b = _homog(f, b, gi, "b")
    zp = _homog(f, zp, e, "z'")
    gh = G.mul(g, h)
    tgt2 = G.mul(hi, gi)
    rb = A.right_matrix(gi, b, hi)
    lhs = kron(Matrix.identity(A.dims[h]), A.left_matrix(e, zp, tgt2) @ rb).apply(f.ipe[h])
    lb = A.left_matrix(gi, b, gh)
    lz2 = A.left_matrix(e, zp, G.inv[gh])
    rhs = kron(lb, lz2).apply(f.ipe[gh])
    if lhs != rhs:
        return False
    if f.z is None:
        return True
    z = list(f.z)
    hg = G.mul(h, g)
    left = _conj_apply(f, g, b, gi, z)
    right = _conj_apply(f, hg, b, gi, z)
    for k in range(A.dims[hi]):
        c = A.basis(hi, k)
        l = A.mul(G.prod(g, gi, G.inv[g]), left, hi, c)
        r = A.mul(hi, c, G.prod(hg, gi, G.inv[hg]), right)
        if l != r:
            return False
    return True


def _conj_apply(f: FrobeniusPackage, g: int, b: list, deg: int, z: list) -> list:
    """sum_i p_i^g b z q_i^g."""
    A = f.algebra
    G = A.group
    e = G.e
    bz = A.mul(deg, b, e, z)
    return sandwich_matrix(f, g, deg).apply(bz)


def coproduct(f: FrobeniusPackage, g: int, h: int, v) -> list:
    """Delta_{g,h}(v) in A_g (x) A_h, defined by (id (x) eta)(Delta(v) (x) w) = v w.

    w ranges over A_{h^-1}. The closed form sum_i v q_i^h (x) p_i^h is tried
    first and checked; a linear solve is the fallback.
    """
    A = f.algebra
    G = A.group
    gh = G.mul(g, h)
    hi = G.inv[h]
    v = _homog(f, v, gh, "v")
    # pairs[hi] = (p^{h^-1}, q^{h^-1}); sum_i v q^h (x) p^h uses the h pairs
    guess = [ZERO] * (A.dims[g] * A.dims[h])
    for p, q in f.pairs[h]:
        t = vkron(A.mul(gh, v, hi, q), p)
        guess = [a + c for a, c in zip(guess, t)]
    if _coproduct_ok(f, g, h, v, guess):
        return guess
    return _coproduct_solve(f, g, h, v)


def _coproduct_map(f: FrobeniusPackage, g: int, h: int) -> Matrix:
    """Matrix T -> ((id (x) eta)(T (x) w_k))_k stacked over basis w_k of A_{h^-1}."""
    A = f.algebra
    G = A.group
    hi = G.inv[h]
    dg, dh = A.dims[g], A.dims[h]
    rows = []
    for k in range(A.dims[hi]):
        w = A.basis(hi, k)
        etas = [f.eta(h, A.basis(h, j), hi, w) for j in range(dh)]
        # coordinate a of result: sum_j T[a, j] eta(b_j, w)
        for a in range(dg):
            row = [ZERO] * (dg * dh)
            for j in range(dh):
                row[a * dh + j] = etas[j]
            rows.append(row)
    return Matrix(rows, dg * dh)


def _coproduct_rhs(f: FrobeniusPackage, g: int, h: int, v: list) -> list:
    A = f.algebra
    G = A.group
    hi = G.inv[h]
    gh = G.mul(g, h)
    out = []
    for k in range(A.dims[hi]):
        out.extend(A.mul(gh, v, hi, A.basis(hi, k)))
    return out


def _coproduct_ok(f, g, h, v, t) -> bool:
    return _coproduct_map(f, g, h).apply(t) == _coproduct_rhs(f, g, h, v)


def _coproduct_solve(f, g, h, v) -> list:
    x = solve(_coproduct_map(f, g, h), Matrix.column(_coproduct_rhs(f, g, h, v)))
    if x is None:
        raise FrobeniusError("coproduct equation has no solution")
    return x.col(0)
