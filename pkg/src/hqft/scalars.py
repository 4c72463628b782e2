"""Exact scalars and dense linear algebra.

Rationals are ``gmpy2.mpq``. Elements of a cyclotomic field Q(zeta_m) that are
not rational are ``Cyclotomic`` instances; every arithmetic result that happens
to be rational collapses back to ``mpq`` so equality is structural.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence, Union

from gmpy2 import mpq

__all__ = [
    "mpq", "Cyclotomic", "Scalar", "ZERO", "ONE", "to_scalar", "zeta",
    "conductor", "format_scalar", "parse_scalar",
    "Matrix", "rref", "rank", "kernel", "cokernel", "solve", "kron", "inverse",
]

ZERO = mpq(0)
ONE = mpq(1)


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    # x^m - 1 = prod_{d | m} Phi_d
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_divexact(a: list[int], b: list[int]) -> list[int]:
    a = a[:]
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    assert not any(a), "inexact polynomial division"
    return q


def _reduce(m: int, coeffs: Sequence) -> tuple:
    """Reduce a polynomial in zeta_m modulo x^m - 1 and then Phi_m."""
    acc = [ZERO] * m
    for k, c in enumerate(coeffs):
        if c:
            acc[k % m] += c
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    # phi is monic
    for k in range(m - 1, deg - 1, -1):
        c = acc[k]
        if c:
            acc[k] = ZERO
            for j in range(deg):
                if phi[j]:
                    acc[k - deg + j] -= c * phi[j]
    return tuple(acc[:deg])


class Cyclotomic:
    """Element of Q(zeta_m) in the power basis 1, z, ..., z^(phi(m)-1)."""

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs: Sequence):
        self.m = m
        self.coeffs = tuple(coeffs)
        self._hash = None

    @staticmethod
    def make(m: int, coeffs: Sequence) -> "Scalar":
        """Canonical constructor: reduces and collapses rationals to ``mpq``."""
        red = _reduce(m, [mpq(c) for c in coeffs])
        if not any(red[1:]):
            return red[0] if red else ZERO
        # shrink the conductor when possible so equality stays structural
        for d in _divisors(m):
            if d < m and d > 2:
                sub = _restrict(m, d, red)
                if sub is not None:
                    return Cyclotomic(d, sub)
        return Cyclotomic(m, red)

    def _lift(self, m: int) -> list:
        step = m // self.m
        out = [ZERO] * m
        for k, c in enumerate(self.coeffs):
            out[k * step] = c
        return out

    def __add__(self, other):
        if isinstance(other, Cyclotomic):
            m = _lcm(self.m, other.m)
            return Cyclotomic.make(m, [a + b for a, b in zip(self._lift(m), other._lift(m))])
        o = _as_mpq(other)
        if o is None:
            return NotImplemented
        c = list(self.coeffs)
        c[0] += o
        return Cyclotomic.make(self.m, c)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Cyclotomic):
            m = _lcm(self.m, other.m)
            a, b = self._lift(m), other._lift(m)
            prod = [ZERO] * (2 * m)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        if y:
                            prod[i + j] += x * y
            return Cyclotomic.make(m, prod)
        o = _as_mpq(other)
        if o is None:
            return NotImplemented
        if not o:
            return ZERO
        return Cyclotomic(self.m, tuple(c * o for c in self.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        # solve x * self = 1 in the power basis
        d = len(self.coeffs)
        cols = []
        for k in range(d):
            basis = [ZERO] * d
            basis[k] = ONE
            prod = self * Cyclotomic.make(self.m, basis)
            v = _coords(prod, self.m, d)
            cols.append(v)
        mat = Matrix([[cols[j][i] for j in range(d)] for i in range(d)])
        rhs = Matrix([[ONE]] + [[ZERO]] * (d - 1))
        x = solve(mat, rhs)
        assert x is not None
        return Cyclotomic.make(self.m, [x[i, 0] for i in range(d)])

    def __truediv__(self, other):
        return self * _inv(other)

    def __rtruediv__(self, other):
        return other * self.inverse()

    def __pow__(self, n: int):
        out: Scalar = ONE
        base: Scalar = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self.m == other.m and self.coeffs == other.coeffs
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.m, self.coeffs))
        return self._hash

    def __bool__(self):
        return True

    def __repr__(self):
        return f"Cyclotomic({self.m}, {format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[mpq, Cyclotomic]


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _restrict(m: int, d: int, red: tuple):
    """Coefficients over zeta_d if the element of Q(zeta_m) lies there."""
    x = Cyclotomic(m, red)
    lifted = [ZERO] * d
    # try to express x in the power basis of zeta_d = zeta_m^(m/d)
    deg_d = len(cyclotomic_poly(d)) - 1
    deg_m = len(red)
    step = m // d
    cols = []
    for k in range(deg_d):
        basis = [ZERO] * m
        basis[k * step] = ONE
        cols.append(_reduce(m, basis))
    mat = Matrix([[cols[j][i] for j in range(deg_d)] for i in range(deg_m)])
    rhs = Matrix([[c] for c in x.coeffs])
    sol = solve(mat, rhs)
    if sol is None:
        return None
    for k in range(deg_d):
        lifted[k] = sol[k, 0]
    return _reduce(d, lifted)


def _coords(x, m: int, d: int) -> list:
    if isinstance(x, Cyclotomic):
        full = x._lift(m) if x.m != m else list(x.coeffs)
        if x.m != m:
            full = list(_reduce(m, full))
        return list(full[:d]) + [ZERO] * (d - len(full[:d]))
    return [mpq(x)] + [ZERO] * (d - 1)


def _as_mpq(x):
    if isinstance(x, (int, type(ONE))):
        return mpq(x)
    return None


def _inv(x: Scalar) -> Scalar:
    if isinstance(x, Cyclotomic):
        return x.inverse()
    if not x:
        raise ZeroDivisionError("inverse of zero")
    return ONE / x


def to_scalar(x) -> Scalar:
    """Coerce ints, fractions, strings and scalars to canonical scalars."""
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    return mpq(x)


def zeta(m: int, k: int = 1) -> Scalar:
    """The root of unity zeta_m^k."""
    coeffs = [ZERO] * m
    coeffs[k % m] = ONE
    return Cyclotomic.make(m, coeffs)


def conductor(x: Scalar) -> int:
    return x.m if isinstance(x, Cyclotomic) else 1


def inv(x: Scalar) -> Scalar:
    return _inv(x)


def format_scalar(x: Scalar, m: int | None = None) -> str:
    """Render as "p/q" or "p/q*z^k + ...".

    ``z`` is zeta_m for the declared conductor ``m`` (default: the element's own).
    """
    if not isinstance(x, Cyclotomic):
        return _fmt_q(mpq(x))
    coeffs = x.coeffs
    if m is not None and m != x.m:
        if m % x.m:
            raise ValueError(f"element of Q(zeta_{x.m}) is not in Q(zeta_{m})")
        coeffs = _reduce(m, x._lift(m))
    terms = []
    for k, c in enumerate(coeffs):
        if not c:
            continue
        if k == 0:
            terms.append(_fmt_q(c))
        else:
            terms.append(f"{_fmt_q(c)}*z^{k}")
    return " + ".join(terms)


def _fmt_q(c) -> str:
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


_TERM = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*(?:\*\s*z\^(\d+))?\s*$")


def parse_scalar(text: str, m: int = 1) -> Scalar:
    """Inverse of ``format_scalar`` for a declared conductor ``m``."""
    text = text.strip()
    parts = re.split(r"\s\+\s", text)
    coeffs = [ZERO] * max(m, 1)
    for part in parts:
        mt = _TERM.match(part)
        if not mt:
            raise ValueError(f"bad scalar term {part!r}")
        c = mpq(mt.group(1))
        k = int(mt.group(2) or 0)
        if k and m <= 1:
            raise ValueError(f"power of z in a rational context: {text!r}")
        coeffs[k % max(m, 1)] += c
    if m <= 1:
        return coeffs[0]
    return Cyclotomic.make(m, coeffs)


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense matrix of exact scalars; immutable by convention."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        rows = [list(r) for r in data]
        self.data = rows
        self.rows = len(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        self.cols = cols
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")

    # construction

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls([[ZERO] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.data[i][i] = ONE
        return m

    @classmethod
    def of(cls, data, cols: int | None = None) -> "Matrix":
        return cls([[to_scalar(x) for x in row] for row in data], cols)

    @classmethod
    def column(cls, vec: Sequence) -> "Matrix":
        return cls([[x] for x in vec], 1)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        return cls([[c[i] for c in columns] for i in range(rows)], len(columns))

    # access

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def col(self, j: int) -> list:
        return [r[j] for r in self.data]

    def columns(self) -> list[list]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "Matrix":
        return Matrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def is_zero(self) -> bool:
        return not any(x for r in self.data for x in r)

    def trace(self) -> Scalar:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        t: Scalar = ZERO
        for i in range(self.rows):
            t = t + self.data[i][i]
        return t

    # arithmetic

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __add__(self, other: "Matrix") -> "Matrix":
        _same(self, other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same(self, other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.data], self.cols)

    def scale(self, c: Scalar) -> "Matrix":
        return Matrix([[c * a if a else ZERO for a in r] for r in self.data], self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n = other.cols
        odata = other.data
        out = []
        for r in self.data:
            acc = [ZERO] * n
            for k, a in enumerate(r):
                if a:
                    ok = odata[k]
                    for j in range(n):
                        b = ok[j]
                        if b:
                            acc[j] = acc[j] + a * b
            out.append(acc)
        return Matrix(out, n)

    def apply(self, vec: Sequence) -> list:
        """Matrix times a column given as a flat list."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        nz = [(k, v) for k, v in enumerate(vec) if v]
        out = []
        for r in self.data:
            acc: Scalar = ZERO
            for k, v in nz:
                a = r[k]
                if a:
                    acc = acc + a * v
            out.append(acc)
        return out

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Matrix([r + s for r, s in zip(self.data, other.data)], self.cols + other.cols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return Matrix([list(r) for r in self.data] + [list(r) for r in other.data], self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.data[i][j] for j in cols] for i in rows], len(cols))

    def __repr__(self):
        body = "; ".join(" ".join(format_scalar(x) for x in r) for r in self.data)
        return f"Matrix({self.rows}x{self.cols}: {body})"


def _same(a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def rref(m: Matrix) -> tuple[int, list[int], Matrix]:
    """Reduced row echelon form: (rank, pivot columns, reduced matrix)."""
    rows = [list(r) for r in m.data]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        iv = _inv(piv[c])
        if iv != ONE:
            piv = [x * iv if x else ZERO for x in piv]
            rows[r] = piv
        nzc = [j for j in range(c, m.cols) if piv[j]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    row = rows[i]
                    for j in nzc:
                        row[j] = row[j] - f * piv[j]
        pivots.append(c)
        r += 1
    return r, pivots, Matrix(rows, m.cols)


def rank(m: Matrix) -> int:
    return rref(m)[0]


def kernel(m: Matrix) -> Matrix:
    """Columns form a basis of {x : m x = 0}."""
    rk, pivots, red = rref(m)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -red.data[i][f]
        basis.append(v)
    return Matrix.from_columns(basis, m.cols)


def cokernel(m: Matrix) -> tuple[Matrix, Matrix]:
    """Quotient of the codomain by the image: (projection, section).

    Quotient coordinates are the non-pivot coordinates of the RREF of the
    image, so the section embeds quotient basis vectors as unit vectors.
    """
    n = m.rows
    rk, pivots, red = rref(m.T)
    pset = set(pivots)
    keep = [i for i in range(n) if i not in pset]
    pos = {i: k for k, i in enumerate(keep)}
    proj = Matrix.zeros(len(keep), n)
    for i in keep:
        proj.data[pos[i]][i] = ONE
    for r, p in enumerate(pivots):
        row = red.data[r]
        for i in keep:
            if row[i]:
                proj.data[pos[i]][p] = -row[i]
    sec = Matrix.zeros(n, len(keep))
    for i in keep:
        sec.data[i][pos[i]] = ONE
    return proj, sec


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some x with a x = b, or None when inconsistent."""
    if a.rows != b.rows:
        raise ValueError("row mismatch in solve")
    aug = a.hstack(b)
    rk, pivots, red = rref(aug)
    if any(p >= a.cols for p in pivots):
        return None
    x = Matrix.zeros(a.cols, b.cols)
    for i, p in enumerate(pivots):
        x.data[p] = [red.data[i][a.cols + j] for j in range(b.cols)]
    return x


def inverse(a: Matrix) -> Matrix:
    if a.rows != a.cols:
        raise ValueError("inverse of a non-square matrix")
    x = solve(a, Matrix.identity(a.rows))
    if x is None or rank(a) != a.rows:
        raise ZeroDivisionError("singular matrix")
    return x


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; row (i, j) sits at index i * rows(b) + j."""
    out = []
    for ra in a.data:
        for rb in b.data:
            row = []
            for x in ra:
                if x:
                    row.extend(x * y if y else ZERO for y in rb)
                else:
                    row.extend([ZERO] * b.cols)
            out.append(row)
    return Matrix(out, a.cols * b.cols)
