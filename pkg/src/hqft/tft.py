"""Generator words for the extended theory of a triple (A, B, zeta), their evaluation,
the relation suite and closed-surface invariants.

Boundaries are lists of strands joined by tensor products over the ground field.
A strand is a chain of cells, open or closed; its value is the relative tensor
product of the cells over the principal components (cyclically for closed
chains). Cells are A(g), Bo(g) (a sheet of B^op), M(g) and N(g), where the
context is zeta = (N, M, f1, f2) with f1: A -> M (x)_{B^op} N and f2: N (x)_A M -> B^op.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Sequence

from .bimod import MoritaContext, identity_context, regular, reverse, transfer_ipe
from .frob import FrobeniusPackage, dot, make_frobenius
from .galg import GradedAlgebra, is_strongly_graded, opposite, vkron
from .gcenter import CrossedPackage, NotQuasiBiangular, g_center
from .groups import GroupTable
from .scalars import ZERO, Matrix, Scalar, cokernel, format_scalar, inverse, kron, rank


class TftError(ValueError):
    pass


class Syntax(TftError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        self.line, self.col = line, col
        super().__init__(f"{message} (line {line}, column {col})")


class SignatureMismatch(TftError):
    pass


class PackageIncomplete(TftError):
    pass


class MonodromyInvalid(TftError):
    pass


SIDES = {"A": ("A", "A"), "Bo": ("Bo", "Bo"), "M": ("A", "Bo"), "N": ("Bo", "A")}


@dataclass(frozen=True)
class Strand:
    cells: tuple            # ((kind, degree), ...)
    closed: bool = False

    def __post_init__(self):
        if not self.cells:
            raise SignatureMismatch("a strand needs at least one cell")
        for (k1, _), (k2, _) in zip(self.cells, self.cells[1:]):
            if SIDES[k1][1] != SIDES[k2][0]:
                raise SignatureMismatch(f"cells {k1} and {k2} cannot be adjacent")
        if self.closed and SIDES[self.cells[-1][0]][1] != SIDES[self.cells[0][0]][0]:
            raise SignatureMismatch("closed strand does not close up")


def sheet(g: int) -> Strand:
    return Strand((("A", g),))


def circle(g: int) -> Strand:
    return Strand((("A", g),), True)


# ---------------------------------------------------------------------------
# symbols

CELL_SYMBOLS = {"m", "cm", "mb", "la", "ra", "lb", "rb", "f1", "f2", "f3", "f4", "ue", "ub"}
STRAND_SYMBOLS = {"sx", "sy", "cup", "cap", "tw", "gl", "id"}
ARITY = {"m": 2, "cm": 2, "mb": 2, "la": 2, "ra": 2, "lb": 2, "rb": 2, "f1": 2, "f2": 2,
         "f3": 2, "f4": 2, "ue": 0, "ub": 0, "sx": 1, "sy": 1, "cup": 1, "cap": 1, "tw": 2,
         "gl": 0, "id": 0}


def cell_rule(name: str, labels: tuple, G: GroupTable) -> tuple[tuple, tuple] | None:
    """(input cells, output cells) of a cell-level symbol."""
    if name in ("ue", "ub"):
        return (), ((("A" if name == "ue" else "Bo"), G.e),)
    if name not in CELL_SYMBOLS:
        return None
    g, h = labels
    gh = G.mul(g, h)
    table = {
        "m": ((("A", g), ("A", h)), (("A", gh),)),
        "cm": ((("A", gh),), (("A", g), ("A", h))),
        "mb": ((("Bo", g), ("Bo", h)), (("Bo", gh),)),
        "la": ((("A", g), ("M", h)), (("M", gh),)),
        "rb": ((("M", g), ("Bo", h)), (("M", gh),)),
        "lb": ((("Bo", g), ("N", h)), (("N", gh),)),
        "ra": ((("N", g), ("A", h)), (("N", gh),)),
        "f1": ((("A", gh),), (("M", g), ("N", h))),
        "f4": ((("M", g), ("N", h)), (("A", gh),)),
        "f2": ((("N", g), ("M", h)), (("Bo", gh),)),
        "f3": ((("Bo", gh),), (("N", g), ("M", h))),
    }
    return table[name]


@dataclass(frozen=True)
class Sym:
    name: str
    labels: tuple = ()


@dataclass(frozen=True)
class Piece:
    """A resolved piece of a slice.

    ``op`` is "chain" (cell symbols joined by *), "braid", or a strand-level
    operation: pants, kprod, split, twist, cup, cap, saddle, glue, id.
    """
    op: str
    syms: tuple
    ins: tuple
    outs: tuple


@dataclass(frozen=True)
class GeneratorWord:
    group: GroupTable
    source: tuple
    slices: tuple           # textual order; the last slice is applied first

    @property
    def target(self) -> tuple:
        if not self.slices:
            return self.source
        return tuple(s for p in self.slices[0] for s in p.outs)

    def __eq__(self, other):
        return (isinstance(other, GeneratorWord) and self.source == other.source
                and self.slices == other.slices)

    def __hash__(self):
        return hash((self.source, self.slices))


# ---------------------------------------------------------------------------
# resolution of pieces against a running boundary


def _match_chain(syms: Sequence[Sym], strand: Strand, G: GroupTable):
    """Output cells if the chain of symbols covers exactly the strand's cells."""
    cells = list(strand.cells)
    pos = 0
    out = []
    for s in syms:
        if s.name == "id":
            if pos >= len(cells):
                return None
            out.append(cells[pos])
            pos += 1
            continue
        rule = cell_rule(s.name, s.labels, G)
        if rule is None:
            return None
        ins, outs = rule
        if tuple(cells[pos:pos + len(ins)]) != ins:
            return None
        pos += len(ins)
        out.extend(outs)
    if pos != len(cells):
        return None
    return tuple(out)


def _single(strand: Strand, kind: str = "A") -> int | None:
    if len(strand.cells) == 1 and strand.cells[0][0] == kind:
        return strand.cells[0][1]
    return None


def resolve_piece(syms: tuple, boundary: Sequence[Strand], pos: int, G: GroupTable) -> Piece:
    """Resolve a piece whose input starts at boundary[pos]."""
    nxt = boundary[pos] if pos < len(boundary) else None
    nxt2 = boundary[pos + 1] if pos + 1 < len(boundary) else None
    if len(syms) > 1 or (syms[0].name in CELL_SYMBOLS and syms[0].name != "cm"):
        if all(s.name in ("ue", "ub") for s in syms) and len(syms) == 1:
            outs = cell_rule(syms[0].name, (), G)[1]
            return Piece("chain", syms, (), (Strand(outs),))
        if nxt is not None:
            out = _match_chain(syms, nxt, G)
            if out is not None:
                return Piece("chain", syms, (nxt,), (Strand(out, nxt.closed),))
        if len(syms) == 1:
            return _strand_level(syms[0], nxt, nxt2, G)
        raise SignatureMismatch(f"chain {_fmt_syms(syms, G)} does not fit strand {_fmt_strand(nxt, G)}")
    s = syms[0]
    if s.name == "cm":
        g, h = s.labels
        if nxt is not None and nxt.closed and _single(nxt) == G.mul(g, h):
            return Piece("split", syms, (nxt,), (circle(g), circle(h)))
        if nxt is not None:
            out = _match_chain(syms, nxt, G)
            if out is not None:
                return Piece("chain", syms, (nxt,), (Strand(out, nxt.closed),))
        raise SignatureMismatch(f"cm does not fit strand {_fmt_strand(nxt, G)}")
    return _strand_level(s, nxt, nxt2, G)


def _strand_level(s: Sym, nxt, nxt2, G: GroupTable) -> Piece:
    name = s.name
    if name == "id":
        if nxt is None:
            raise SignatureMismatch("id has no strand to act on")
        return Piece("id", (s,), (nxt,), (nxt,))
    if name == "m":
        g, h = s.labels
        if nxt is not None and nxt2 is not None:
            if nxt.closed and nxt2.closed and _single(nxt) == g and _single(nxt2) == h:
                return Piece("pants", (s,), (nxt, nxt2), (circle(G.mul(g, h)),))
            if not nxt.closed and not nxt2.closed and _single(nxt) == g and _single(nxt2) == h:
                return Piece("kprod", (s,), (nxt, nxt2), (sheet(G.mul(g, h)),))
        raise SignatureMismatch(f"m[{G.name(g)},{G.name(h)}] does not fit the boundary")
    if name == "tw":
        g, h = s.labels
        if nxt is not None and nxt.closed and _single(nxt) == g:
            return Piece("twist", (s,), (nxt,), (circle(G.conj(h, g)),))
        raise SignatureMismatch("tw needs a circle of the labelled degree")
    if name == "cup":
        (g,) = s.labels
        if nxt is not None:
            if nxt.closed and nxt.cells == (("A", g), ("A", G.inv[g])):
                return Piece("cup", (s,), (nxt,), ())
            if g == G.e and _single(nxt) == G.e:
                return Piece("cup", (s,), (nxt,), ())
        raise SignatureMismatch("cup does not fit the boundary")
    if name == "cap":
        (g,) = s.labels
        return Piece("cap", (s,), (), (Strand((("A", g), ("A", G.inv[g])), True),))
    if name in ("sx", "sy"):
        (k,) = s.labels
        if (nxt is not None and nxt2 is not None and not nxt.closed and not nxt2.closed
                and nxt.cells[0][0] == "A" and nxt2.cells[-1][0] == "A"):
            g, h = nxt.cells[0][1], nxt2.cells[-1][1]
            first = Strand((("A", G.prod(g, k, h)),))
            second = Strand(nxt2.cells[:-1] + (("A", G.inv[k]),) + nxt.cells[1:])
            return Piece("saddle", (s,), (nxt, nxt2), (first, second))
        raise SignatureMismatch(f"{name} needs two open strands")
    if name == "gl":
        if nxt is not None and nxt2 is not None and not nxt.closed and not nxt2.closed:
            return Piece("glue", (s,), (nxt, nxt2), (Strand(nxt.cells + nxt2.cells),))
        raise SignatureMismatch("gl needs two open strands")
    raise SignatureMismatch(f"symbol {name} does not fit the boundary")


def _canonical_input(syms: tuple, G: GroupTable) -> tuple:
    """Default input strands of a piece when no source is declared."""
    s = syms[0]
    if len(syms) > 1 or s.name in CELL_SYMBOLS:
        cells = []
        for t in syms:
            if t.name == "id":
                raise SignatureMismatch("cannot infer the source of id; add a 'src:' header")
            cells.extend(cell_rule(t.name, t.labels, G)[0])
        return (Strand(tuple(cells)),) if cells else ()
    if s.name in ("sx", "sy"):
        return (sheet(G.e), sheet(G.e))
    if s.name == "cup":
        g = s.labels[0]
        return (Strand((("A", g), ("A", G.inv[g])), True),)
    if s.name == "cap":
        return ()
    if s.name == "tw":
        return (circle(s.labels[0]),)
    raise SignatureMismatch(f"cannot infer the source of {s.name}; add a 'src:' header")


def resolve_slice(pieces: Sequence[tuple], boundary: Sequence[Strand], G: GroupTable) -> tuple:
    """Resolve one slice; a braid slice is given as (("b", i),)."""
    if len(pieces) == 1 and pieces[0][0] == "b":
        i = pieces[0][1]
        if not 1 <= i < len(boundary):
            raise SignatureMismatch(f"b({i} {i + 1}) needs at least {i + 1} strands")
        outs = list(boundary)
        outs[i - 1], outs[i] = outs[i], outs[i - 1]
        return (Piece("braid", (Sym("b", (i,)),), tuple(boundary), tuple(outs)),)
    out = []
    pos = 0
    for syms in pieces:
        if syms[0] == "b":
            raise SignatureMismatch("a braid must fill its slice")
        p = resolve_piece(syms, boundary, pos, G)
        pos += len(p.ins)
        out.append(p)
    if pos != len(boundary):
        raise SignatureMismatch(f"slice consumes {pos} of {len(boundary)} strands")
    return tuple(out)


def build_word(G: GroupTable, slices: Sequence[Sequence], source: Sequence[Strand] | None = None) -> GeneratorWord:
    """Resolve raw slices (textual order) into a word.

    Each raw slice is a list of pieces; a piece is a tuple of Sym, or ("b", i).
    """
    raw = [list(s) for s in slices]
    if not raw:
        if source is None:
            raise SignatureMismatch("empty word needs a source")
        return GeneratorWord(G, tuple(source), ())
    if source is None:
        last = raw[-1]
        if len(last) == 1 and last[0][0] == "b":
            raise SignatureMismatch("cannot infer the source of a braid; add a 'src:' header")
        source = tuple(s for syms in last for s in _canonical_input(syms, G))
    boundary = tuple(source)
    resolved = []
    for sl in reversed(raw):
        r = resolve_slice(sl, boundary, G)
        resolved.append(r)
        boundary = tuple(s for p in r for s in p.outs)
    return GeneratorWord(G, tuple(source), tuple(reversed(resolved)))


def compose(w1: GeneratorWord, w2: GeneratorWord) -> GeneratorWord:
    """w1 after w2."""
    if w1.source != w2.target:
        raise SignatureMismatch("words are not composable")
    return GeneratorWord(w1.group, w2.source, w1.slices + w2.slices)


# ---------------------------------------------------------------------------
# text form

_TOKEN = re.compile(r"\s*(?:(?P<braid>b\(\s*\d+\s+\d+\s*\))|(?P<tensor>⊗|x(?![A-Za-z0-9\[]))"
                    r"|(?P<sym>[A-Za-z][A-Za-z0-9]*)(?P<lab>\[[^\]]*\])?|(?P<star>\*)|(?P<dot>\.))")


def _label(text: str, G: GroupTable, line: int, col: int) -> int:
    text = text.strip()
    inv = False
    if text.endswith("^-1"):
        text, inv = text[:-3].strip(), True
    try:
        g = G.index(text)
    except KeyError:
        raise Syntax(f"unknown group element {text!r}", line, col) from None
    return G.inv[g] if inv else g


def _parse_strands(text: str, G: GroupTable, line: int) -> tuple:
    text = text.strip()
    if text in ("", "1", "∅"):
        return ()
    out = []
    for part in re.split(r"⊗|\s+x\s+", text):
        part = part.strip()
        closed = part.startswith("[") and part.endswith("]")
        if closed:
            part = part[1:-1]
        cells = []
        for c in part.split("*"):
            m = re.fullmatch(r"\s*(A|Bo|M|N)\(([^)]*)\)\s*", c)
            if not m:
                raise Syntax(f"bad cell {c.strip()!r}", line, 1)
            cells.append((m.group(1), _label(m.group(2), G, line, 1)))
        try:
            out.append(Strand(tuple(cells), closed))
        except SignatureMismatch as exc:
            raise Syntax(str(exc), line, 1) from None
    return tuple(out)


def parse_word(text: str, group: GroupTable) -> GeneratorWord:
    """Parse the word grammar; slices are composed right to left."""
    source = None
    body_lines = []
    for ln, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0]
        if stripped.strip().startswith("src:"):
            if source is not None:
                raise Syntax("duplicate src header", ln, 1)
            source = _parse_strands(stripped.strip()[4:], group, ln)
            continue
        body_lines.append((ln, stripped))
    slices: list = [[]]
    current: list = []
    expect_piece = True
    last_pos = (1, 1)
    for ln, line in body_lines:
        i = 0
        while i < len(line):
            if line[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(line, i)
            if not m or m.end() == i:
                raise Syntax(f"unexpected {line[i]!r}", ln, i + 1)
            col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1
            last_pos = (ln, col)
            if m.group("braid"):
                nums = [int(x) for x in re.findall(r"\d+", m.group("braid"))]
                if nums[1] != nums[0] + 1:
                    raise Syntax("braids act on adjacent strands b(i i+1)", ln, col)
                if not expect_piece or current:
                    raise Syntax("braid must stand alone in its slice", ln, col)
                slices[-1].append(("b", nums[0]))
                expect_piece = False
            elif m.group("sym"):
                name = m.group("sym")
                if name not in ARITY:
                    raise Syntax(f"unknown symbol {name!r}", ln, col)
                labels: tuple = ()
                if m.group("lab"):
                    inner = m.group("lab")[1:-1]
                    labels = tuple(_label(t, group, ln, col) for t in inner.split(",")) if inner.strip() else ()
                if len(labels) != ARITY[name]:
                    raise Syntax(f"{name} takes {ARITY[name]} labels", ln, col)
                if not expect_piece:
                    raise Syntax("missing ⊗, * or . between symbols", ln, col)
                current.append(Sym(name, labels))
                expect_piece = False
            elif m.group("star"):
                if expect_piece or not current:
                    raise Syntax("dangling *", ln, col)
                expect_piece = True
            elif m.group("tensor") or m.group("dot"):
                if expect_piece:
                    raise Syntax("empty piece", ln, col)
                if current:
                    slices[-1].append(tuple(current))
                    current = []
                if m.group("dot"):
                    slices.append([])
                expect_piece = True
            i = m.end()
    if expect_piece:
        if len(slices) == 1 and not slices[0] and not current:
            raise Syntax("empty word", *last_pos)
        raise Syntax("word ends with an operator", *last_pos)
    if current:
        slices[-1].append(tuple(current))
    for sl in slices:
        if any(p[0] == "b" for p in sl) and len(sl) > 1:
            raise Syntax("braid must stand alone in its slice", *last_pos)
    return build_word(group, slices, source)


def _fmt_label(g: int, G: GroupTable) -> str:
    return G.name(g)


def _fmt_syms(syms: Sequence[Sym], G: GroupTable) -> str:
    out = []
    for s in syms:
        if s.labels:
            out.append(f"{s.name}[{','.join(_fmt_label(g, G) for g in s.labels)}]")
        else:
            out.append(s.name)
    return "*".join(out)


def _fmt_strand(s: Strand | None, G: GroupTable) -> str:
    if s is None:
        return "nothing"
    body = "*".join(f"{k}({_fmt_label(g, G)})" for k, g in s.cells)
    return f"[{body}]" if s.closed else body


def format_signature(strands: Sequence[Strand], G: GroupTable) -> str:
    return " ⊗ ".join(_fmt_strand(s, G) for s in strands) if strands else "1"


def format_word(w: GeneratorWord) -> str:
    G = w.group
    slices = []
    for sl in w.slices:
        if len(sl) == 1 and sl[0].op == "braid":
            i = sl[0].syms[0].labels[0]
            slices.append(f"b({i} {i + 1})")
        else:
            slices.append(" ⊗ ".join(_fmt_syms(p.syms, G) for p in sl))
    return f"src: {format_signature(w.source, G)}\n" + " . ".join(slices)


# ---------------------------------------------------------------------------
# theory packages


@dataclass(eq=False)
class TheoryPackage:
    """The triple (A, B, zeta) with zeta a context between A and B^op.

    In the context object, K = A, L = B^op, V = M, U = N, tau = f1 and mu = f2.
    """
    A: FrobeniusPackage
    B: FrobeniusPackage
    zeta: MoritaContext
    Bo: FrobeniusPackage = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.Bo is None:
            self.Bo = make_frobenius(opposite(self.B.algebra), self.B.trace, solve_z=False)
        if self.zeta.K != self.A.algebra or self.zeta.L != self.Bo.algebra:
            raise PackageIncomplete("zeta must be a context between A and B^op")
        if self.A.z is None:
            raise PackageIncomplete("A has no certified z")

    @property
    def group(self) -> GroupTable:
        return self.A.algebra.group

    def module(self, kind: str):
        key = ("module", kind)
        if key not in self._cache:
            self._cache[key] = {"A": lambda: regular(self.A.algebra), "Bo": lambda: regular(self.Bo.algebra),
                                "M": lambda: self.zeta.V, "N": lambda: self.zeta.U}[kind]()
        return self._cache[key]

    def algebra(self, side: str) -> GradedAlgebra:
        return self.A.algebra if side == "A" else self.Bo.algebra

    def cell_dim(self, cell) -> int:
        return self.module(cell[0]).dims[cell[1]]

    @property
    def center(self) -> CrossedPackage:
        if "center" not in self._cache:
            self._cache["center"] = g_center(self.A)
        return self._cache["center"]


def standard_package(fA: FrobeniusPackage) -> TheoryPackage:
    """(A, A^op, identity context) with the trace of A on both sides."""
    A = fA.algebra
    B = opposite(A)
    fB = make_frobenius(B, fA.trace, solve_z=False)
    if opposite(B) != A:
        raise PackageIncomplete("double opposite differs from A")
    return TheoryPackage(fA, fB, identity_context(A))


# chain spaces: successive quotients, one junction at a time

def _right_act(t: TheoryPackage, cell, a: int) -> Matrix:
    """x |-> x a on a cell, a the a-th basis element of the right principal component."""
    M = t.module(cell[0])
    g = cell[1]
    e = t.group.e
    d = M.dims[g]
    dx = M.right.dims[e]
    return Matrix.from_columns([M.ract[(g, e)].col(i * dx + a) for i in range(d)], d)


def _left_act(t: TheoryPackage, cell, a: int) -> Matrix:
    M = t.module(cell[0])
    g = cell[1]
    e = t.group.e
    d = M.dims[g]
    return Matrix.from_columns([M.lact[(e, g)].col(a * d + i) for i in range(d)], d)


def _side_dim(t: TheoryPackage, side: str) -> int:
    return t.algebra(side).dims[t.group.e]


def chain_space(t: TheoryPackage, s: Strand) -> tuple[Matrix, Matrix]:
    """(projection, section) between the raw space (kron of cells) and the strand value."""
    key = ("chain", s)
    if key in t._cache:
        return t._cache[key]
    cells = s.cells
    d0 = t.cell_dim(cells[0])
    proj, sect = Matrix.identity(d0), Matrix.identity(d0)
    for k in range(1, len(cells)):
        prev, cell = cells[k - 1], cells[k]
        dc = t.cell_dim(cell)
        n = proj.rows
        side = SIDES[prev[0]][1]
        ident = Matrix.identity(dc)
        cols = []
        pre = t._cache.setdefault(("lastact", cells[:k]), {})
        for a in range(_side_dim(t, side)):
            ra = pre.get(a)
            if ra is None:
                lift = kron(Matrix.identity(_raw_dim(t, cells[:k - 1])), _right_act(t, prev, a))
                ra = proj @ lift @ sect
                pre[a] = ra
            rel = kron(ra, ident) - kron(Matrix.identity(n), _left_act(t, cell, a))
            cols.extend(rel.columns())
        p, q = _coker_cols(cols, n * dc)
        proj = p @ kron(proj, ident)
        sect = kron(sect, ident) @ q
    if s.closed:
        n = proj.rows
        side = SIDES[cells[-1][0]][1]
        raw = _raw_dim(t, cells)
        cols = []
        for a in range(_side_dim(t, side)):
            r = kron(Matrix.identity(raw // t.cell_dim(cells[-1])), _right_act(t, cells[-1], a))
            lft = kron(_left_act(t, cells[0], a), Matrix.identity(raw // t.cell_dim(cells[0])))
            cols.extend((proj @ (r - lft) @ sect).columns())
        p, q = _coker_cols(cols, n)
        proj = p @ proj
        sect = sect @ q
    t._cache[key] = (proj, sect)
    return proj, sect


def _coker_cols(cols: list, n: int) -> tuple[Matrix, Matrix]:
    cols = [c for c in cols if any(c)]
    if not cols:
        return Matrix.identity(n), Matrix.identity(n)
    return cokernel(Matrix.from_columns(cols, n))


def _raw_dim(t: TheoryPackage, cells: Sequence) -> int:
    out = 1
    for c in cells:
        out *= t.cell_dim(c)
    return out


def strand_dim(t: TheoryPackage, s: Strand) -> int:
    return chain_space(t, s)[0].rows


def boundary_dim(t: TheoryPackage, strands: Sequence[Strand]) -> int:
    out = 1
    for s in strands:
        out *= strand_dim(t, s)
    return out


# ---------------------------------------------------------------------------
# cell maps (raw, out x in over the kron of cells)


def _component_iso(T, g: int, h: int, chain_sect: Matrix) -> Matrix:
    """Chain value of X_g * Y_h -> degree gh of the graded relative tensor."""
    off = T.offset(G_of(T).mul(g, h), g)
    total = T.proj[G_of(T).mul(g, h)]
    n = chain_sect.rows
    block = total.submatrix(range(total.rows), range(off, off + n))
    return block @ chain_sect


def G_of(T) -> GroupTable:
    return T.A.group


def cell_map(t: TheoryPackage, s: Sym) -> Matrix:
    key = ("cell", s)
    if key in t._cache:
        return t._cache[key]
    G = t.group
    A, Bo = t.A.algebra, t.Bo.algebra
    z = t.zeta
    name = s.name
    if name == "ue":
        m = Matrix.column(A.one())
    elif name == "ub":
        m = Matrix.column(Bo.one())
    else:
        g, h = s.labels
        gh = G.mul(g, h)
        if name == "m":
            m = A.mult[(g, h)]
        elif name == "mb":
            m = Bo.mult[(g, h)]
        elif name == "la":
            m = z.V.lact[(g, h)]
        elif name == "rb":
            m = z.V.ract[(g, h)]
        elif name == "lb":
            m = z.U.lact[(g, h)]
        elif name == "ra":
            m = z.U.ract[(g, h)]
        elif name == "cm":
            p, q = chain_space(t, Strand((("A", g), ("A", h))))
            iso = A.mult[(g, h)] @ q
            m = q @ _inv(iso, "A_g (x)_{A_e} A_h -> A_gh")
        elif name == "f4":
            p, q = chain_space(t, Strand((("M", g), ("N", h))))
            m = inverse(z.tau[gh]) @ _component_iso(z.VU, g, h, q) @ p
        elif name == "f1":
            p, q = chain_space(t, Strand((("M", g), ("N", h))))
            m = q @ _inv(_component_iso(z.VU, g, h, q), "M_g (x) N_h -> (M (x) N)_gh") @ z.tau[gh]
        elif name == "f2":
            p, q = chain_space(t, Strand((("N", g), ("M", h))))
            m = z.mu[gh] @ _component_iso(z.UV, g, h, q) @ p
        elif name == "f3":
            p, q = chain_space(t, Strand((("N", g), ("M", h))))
            m = q @ _inv(_component_iso(z.UV, g, h, q), "N_g (x) M_h -> (N (x) M)_gh") @ inverse(z.mu[gh])
        else:
            raise TftError(f"no cell map for {name}")
    t._cache[key] = m
    return m


def _inv(m: Matrix, what: str) -> Matrix:
    if m.rows != m.cols or rank(m) != m.rows:
        raise PackageIncomplete(f"{what} is not invertible")
    return inverse(m)


# ---------------------------------------------------------------------------
# piece matrices


def _kron_all(mats: Sequence[Matrix]) -> Matrix:
    out = Matrix.identity(1)
    for m in mats:
        out = kron(out, m)
    return out


def _pairs(f: FrobeniusPackage, g: int) -> list:
    return f.pairs[g]


def _bilinear_matrix(t: TheoryPackage, dx: int, dy: int, fn, out_dim: int) -> Matrix:
    cols = []
    for i in range(dx):
        for j in range(dy):
            cols.append(fn(i, j))
    return Matrix.from_columns(cols, out_dim)


def _b_pairs(t: TheoryPackage, k: int) -> list:
    """Inner product elements of B^op transported to A through zeta, as (p, q) vectors."""
    key = ("bpairs", k)
    if key not in t._cache:
        G = t.group
        A = t.A.algebra
        tens = transfer_ipe(reverse(t.zeta), t.Bo, k)
        dq = A.dims[G.inv[k]]
        pairs = []
        for i in range(A.dims[k]):
            q = tens[i * dq:(i + 1) * dq]
            if any(q):
                pairs.append((A.basis(k, i), q))
        t._cache[key] = pairs
    return t._cache[key]


def raw_piece(t: TheoryPackage, p: Piece) -> Matrix:
    """Raw map of a piece, from the kron of input cells to the kron of output cells."""
    G = t.group
    A = t.A.algebra
    e = G.e
    if p.op == "chain":
        mats = []
        cells = list(p.ins[0].cells) if p.ins else []
        pos = 0
        for s in p.syms:
            if s.name == "id":
                mats.append(Matrix.identity(t.cell_dim(cells[pos])))
                pos += 1
            else:
                mats.append(cell_map(t, s))
                pos += len(cell_rule(s.name, s.labels, G)[0])
        return _kron_all(mats)
    if p.op in ("id", "glue"):
        return Matrix.identity(_raw_dim(t, [c for s in p.ins for c in s.cells]))
    if p.op == "braid":
        return _braid_raw(t, p)
    if p.op in ("pants", "kprod"):
        g, h = p.syms[0].labels
        if p.op == "kprod":
            return A.mult[(g, h)]
        gh = G.mul(g, h)

        def fn(i, j):
            acc = A.zero(gh)
            for pp, qq in _pairs(t.A, e):
                v = A.mul(g, A.mul(g, A.basis(g, i), e, pp), h, A.basis(h, j))
                v = A.mul(gh, v, e, qq)
                acc = [a + b for a, b in zip(acc, v)]
            return acc
        return _bilinear_matrix(t, A.dims[g], A.dims[h], fn, A.dims[gh])
    if p.op == "split":
        g, h = p.syms[0].labels
        gh = G.mul(g, h)
        hi = G.inv[h]
        cols = []
        for i in range(A.dims[gh]):
            v = A.basis(gh, i)
            acc = [ZERO] * (A.dims[g] * A.dims[h])
            for pp, qq in _pairs(t.A, hi):
                acc = [a + b for a, b in zip(acc, vkron(A.mul(gh, v, hi, pp), qq))]
            cols.append(acc)
        return Matrix.from_columns(cols, A.dims[g] * A.dims[h])
    if p.op == "twist":
        g, h = p.syms[0].labels
        tgt = G.conj(h, g)
        z = list(t.A.z)
        cols = []
        for i in range(A.dims[g]):
            az = A.mul(g, A.basis(g, i), e, z)
            acc = A.zero(tgt)
            for pp, qq in _pairs(t.A, h):
                v = A.mul(G.mul(h, g), A.mul(h, pp, g, az), G.inv[h], qq)
                acc = [a + b for a, b in zip(acc, v)]
            cols.append(acc)
        return Matrix.from_columns(cols, A.dims[tgt])
    if p.op == "cup":
        s = p.ins[0]
        lam = t.A.trace
        if len(s.cells) == 1:
            return Matrix([list(lam)], len(lam))
        g = s.cells[0][1]
        gi = G.inv[g]
        row = [dot(lam, A.mul(g, A.basis(g, i), gi, A.basis(gi, j)))
               for i in range(A.dims[g]) for j in range(A.dims[gi])]
        return Matrix([row], len(row))
    if p.op == "cap":
        (g,) = p.syms[0].labels
        gi = G.inv[g]
        split = is_strongly_graded(A).splittings.get(g)
        if split is None:
            raise PackageIncomplete("A is not strongly graded")
        z = list(t.A.z)
        acc = [ZERO] * (A.dims[g] * A.dims[gi])
        for i in range(A.dims[g]):
            row = split[i * A.dims[gi]:(i + 1) * A.dims[gi]]
            if any(row):
                zb = A.mul(e, z, gi, row)
                acc = [a + b for a, b in zip(acc, vkron(A.basis(g, i), zb))]
        return Matrix.column(acc)
    if p.op == "saddle":
        return _saddle_raw(t, p)
    raise TftError(f"unknown piece {p.op}")


def _saddle_raw(t: TheoryPackage, p: Piece) -> Matrix:
    """(c * R) (x) (L * d) -> (c p d) (x) (L * q * R)."""
    G = t.group
    A = t.A.algebra
    (k,) = p.syms[0].labels
    s1, s2 = p.ins
    c, R = s1.cells[0], s1.cells[1:]
    L, d = s2.cells[:-1], s2.cells[-1]
    pairs = _pairs(t.A, k) if p.syms[0].name == "sx" else _b_pairs(t, k)
    dc, dd = t.cell_dim(c), t.cell_dim(d)
    nR, nL = _raw_dim(t, R), _raw_dim(t, L)
    g, h = c[1], d[1]
    gk = G.mul(g, k)
    out1 = G.prod(g, k, h)
    ki = G.inv[k]
    dq = A.dims[ki]
    d_out1 = A.dims[out1]
    in_dim = dc * nR * nL * dd
    out_dim = d_out1 * nL * dq * nR
    core = {}
    for i in range(dc):
        for j in range(dd):
            acc = [ZERO] * (d_out1 * dq)
            for pp, qq in pairs:
                v = A.mul(gk, A.mul(g, A.basis(g, i), k, pp), h, A.basis(h, j))
                acc = [a + b for a, b in zip(acc, vkron(v, qq))]
            core[(i, j)] = [(idx, val) for idx, val in enumerate(acc) if val]
    out = Matrix.zeros(out_dim, in_dim)
    for i in range(dc):
        for r in range(nR):
            for l in range(nL):
                for j in range(dd):
                    col = ((i * nR + r) * nL + l) * dd + j
                    for idx, val in core[(i, j)]:
                        o1, qi = divmod(idx, dq)
                        row = ((o1 * nL + l) * dq + qi) * nR + r
                        out.data[row][col] += val
    return out


def _braid_raw(t: TheoryPackage, p: Piece) -> Matrix:
    i = p.syms[0].labels[0] - 1
    dims = [_raw_dim(t, s.cells) for s in p.ins]
    pre = 1
    for d in dims[:i]:
        pre *= d
    post = 1
    for d in dims[i + 2:]:
        post *= d
    from .galg import swap_matrix
    return kron(kron(Matrix.identity(pre), swap_matrix(dims[i], dims[i + 1])), Matrix.identity(post))


def piece_matrix(t: TheoryPackage, p: Piece, check: bool = False) -> Matrix:
    key = ("piece", p)
    if key in t._cache and not check:
        return t._cache[key]
    projs = [chain_space(t, s)[0] for s in p.outs]
    sects = [chain_space(t, s)[1] for s in p.ins]
    raw = raw_piece(t, p)
    m = _kron_all(projs) @ (raw @ _kron_all(sects))
    if check:
        _check_well_defined(t, p, raw, _kron_all(projs))
    t._cache[key] = m
    return m


def _check_well_defined(t: TheoryPackage, p: Piece, raw: Matrix, proj_out: Matrix) -> None:
    """Raw map sends every input relation to zero in the output value."""
    ins = p.ins
    dims = [_raw_dim(t, s.cells) for s in ins]
    for k, s in enumerate(ins):
        pr, sc = chain_space(t, s)
        # kernel of the projection = relations; use I - sect proj
        rel = Matrix.identity(pr.cols) - sc @ pr
        pre = 1
        for d in dims[:k]:
            pre *= d
        post = 1
        for d in dims[k + 1:]:
            post *= d
        full = kron(kron(Matrix.identity(pre), rel), Matrix.identity(post))
        if not (proj_out @ raw @ full).is_zero():
            raise TftError(f"piece {p.op} is not well defined on strand {k + 1}")


def slice_matrix(t: TheoryPackage, sl: Sequence[Piece], check: bool = False) -> Matrix:
    if len(sl) == 1 and sl[0].op == "braid":
        return piece_matrix(t, sl[0], check)
    return _kron_all([piece_matrix(t, p, check) for p in sl])


def evaluate(w: GeneratorWord, t: TheoryPackage, check: bool = False) -> Matrix:
    """Matrix of the word; slices compose right to left."""
    if w.group != t.group:
        raise SignatureMismatch("word and package use different groups")
    out = Matrix.identity(boundary_dim(t, w.source))
    for sl in reversed(w.slices):
        out = slice_matrix(t, sl, check) @ out
    return out


# ---------------------------------------------------------------------------
# relation suite


def _w(G: GroupTable, src: Sequence[Strand], *slices) -> GeneratorWord:
    return build_word(G, [_raw_slice(s) for s in slices], tuple(src))


def _raw_slice(spec):
    """Slice shorthand: a braid ("b", i) or a list of pieces, each a Sym or tuple of Sym."""
    if isinstance(spec, tuple) and spec and spec[0] == "b":
        return [spec]
    out = []
    for piece in spec:
        out.append((piece,) if isinstance(piece, Sym) else tuple(piece))
    return out


def S(name: str, *labels: int) -> Sym:
    return Sym(name, tuple(labels))


ID = Sym("id")


def _identity_word(G: GroupTable, src: Sequence[Strand]) -> GeneratorWord:
    return GeneratorWord(G, tuple(src), ())


def _compare(t: TheoryPackage, lhs: GeneratorWord, rhs: GeneratorWord):
    a, b = evaluate(lhs, t), evaluate(rhs, t)
    if a == b:
        return True, None
    for i in range(a.rows):
        for j in range(a.cols):
            if a.data[i][j] != b.data[i][j]:
                return False, {"entry": [i, j], "lhs": format_scalar(a.data[i][j]),
                               "rhs": format_scalar(b.data[i][j])}
    return False, {"shape": [list(a.shape), list(b.shape)]}


def relation_instances(t: TheoryPackage):
    """Yield (family, labels, lhs, rhs) over all group labels."""
    G = t.group
    E = list(G.elements)
    e = G.e
    inv = G.inv
    mul = G.mul
    A = lambda g: ("A", g)
    for g, h, k in itertools.product(E, E, E):
        src = [Strand((A(g), A(h), A(k)))]
        yield ("R1", (g, h, k),
               _w(G, src, [S("m", mul(g, h), k)], [[S("m", g, h), ID]]),
               _w(G, src, [S("m", g, mul(h, k))], [[ID, S("m", h, k)]]))
    for g, h in itertools.product(E, E):
        yield ("R2", (g, h), _w(G, [sheet(mul(g, h))], [S("m", g, h)], [S("cm", g, h)]),
               _identity_word(G, [sheet(mul(g, h))]))
        two = [Strand((A(g), A(h)))]
        yield ("R2", (g, h), _w(G, two, [S("cm", g, h)], [S("m", g, h)]), _identity_word(G, two))
    for g, h in itertools.product(E, E):
        gh = mul(g, h)
        yield ("R3", (g, h), _w(G, [sheet(gh)], [S("f4", g, h)], [S("f1", g, h)]),
               _identity_word(G, [sheet(gh)]))
        mn = [Strand((("M", g), ("N", h)))]
        yield ("R3", (g, h), _w(G, mn, [S("f1", g, h)], [S("f4", g, h)]), _identity_word(G, mn))
        bo = [Strand((("Bo", gh),))]
        yield ("R3", (g, h), _w(G, bo, [S("f2", g, h)], [S("f3", g, h)]), _identity_word(G, bo))
        nm = [Strand((("N", g), ("M", h)))]
        yield ("R3", (g, h), _w(G, nm, [S("f3", g, h)], [S("f2", g, h)]), _identity_word(G, nm))
    for g, h in itertools.product(E, E):
        hi = inv[h]
        n = [Strand((("N", g),))]
        yield ("R4", (g, h),
               _w(G, n, [S("lb", mul(g, h), hi)], [[S("f2", g, h), ID]], [[ID, S("f1", h, hi)]],
                  [[ID, S("ue")]]),
               _identity_word(G, n))
        m = [Strand((("M", g),))]
        yield ("R4", (g, h),
               _w(G, m, [S("rb", h, mul(hi, g))], [[ID, S("f2", hi, g)]], [[S("f1", h, hi), ID]],
                  [[S("ue"), ID]]),
               _identity_word(G, m))
    for g, h, k in itertools.product(E, E, E):
        src = [sheet(g), sheet(h)]
        yield ("R5", (g, h, k), _w(G, src, [S("sx", k)]), _w(G, src, [S("sy", k)]))
    for g in E:
        gi = inv[g]
        src = [sheet(g)]
        yield ("R6", (g,),
               _w(G, src, [S("cup", e), ID], [S("m", g, gi), ID], [ID, S("sx", gi)],
                  [ID, S("ue"), S("ue")]),
               _identity_word(G, src))
        yield ("R6", (g,), _w(G, [circle(g)], [ID, S("cup", e)], [S("cm", g, e)]),
               _identity_word(G, [circle(g)]))
    for g in E:
        src = [circle(g)]
        yield ("R7", (g,),
               _w(G, src, [S("m", g, e)], [ID, S("m", e, e)], [ID, S("cap", e)]),
               _identity_word(G, src))
        yield ("R7", (g,),
               _w(G, src, [S("m", e, g)], [S("m", e, e), ID], [S("cap", e), ID]),
               _identity_word(G, src))
    for k, g in itertools.product(E, E):
        kg = mul(k, g)
        src = [sheet(k)]
        yield ("R8", (k, g),
               _w(G, src, [S("m", k, g), ID], [ID, S("sx", g)], [ID, S("ue"), S("ue")]),
               _w(G, src, [ID, S("m", inv[kg], k)], [S("sx", kg), ID], [S("ue"), S("ue"), ID]))
    for g, h, k in itertools.product(E, E, E):
        ki = inv[k]
        src = [sheet(g), sheet(h)]
        yield ("R9", (g, h, k),
               _w(G, src, [ID, S("m", e, ki)], [S("sx", e)], [[S("m", g, k), ID], ID],
                  [S("gl"), ID], [ID, S("cm", k, ki), ID], [ID, S("ue"), ID]),
               _w(G, src, [S("sx", k)]))
    for g, h in itertools.product(E, E):
        yield ("R10", (g, h), _twist_lhs(G, g, h), None)
    for g, h, k in itertools.product(E, E, E):
        src = [circle(g)]
        yield ("R10", (g, h, k),
               _w(G, src, [S("tw", G.conj(h, g), k)], [S("tw", g, h)]),
               _w(G, src, [S("tw", g, mul(k, h))]))
    for g in E:
        yield ("R10", (g, g), _w(G, [circle(g)], [S("tw", g, g)]), _identity_word(G, [circle(g)]))
    for g, h in itertools.product(E, E):
        src = [circle(g), circle(h)]
        yield ("beta", (g, h), _w(G, src, ("b", 1), ("b", 1)), _identity_word(G, src))
        yield ("beta", (g, h),
               _w(G, src, ("b", 1), [S("tw", g, h), ID]),
               _w(G, src, [ID, S("tw", g, h)], ("b", 1)))
        yield ("beta", (g, h),
               _w(G, src, [S("m", G.conj(g, h), g)], ("b", 1), [ID, S("tw", h, g)]),
               _w(G, src, [S("m", g, h)]))
    for g, h, k in itertools.product(E, E, E):
        src = [circle(g), circle(h), circle(k)]
        yield ("X", (g, h, k),
               _w(G, src, ("b", 1), ("b", 2), ("b", 1)),
               _w(G, src, ("b", 2), ("b", 1), ("b", 2)))
        yield ("X", (g, h, k),
               _w(G, src, ("b", 1), [ID, S("m", h, k)]),
               _w(G, src, [S("m", h, k), ID], ("b", 2), ("b", 1)))


def _twist_lhs(G, g, h):
    return ("center", g, h)


def relation_suite(t: TheoryPackage) -> list[dict]:
    """Every relation instance, as {family, labels, pass, witness?} in canonical order."""
    G = t.group
    out = []
    for fam, labels, lhs, rhs in relation_instances(t):
        names = [G.name(g) for g in labels]
        if isinstance(lhs, tuple) and lhs[0] == "center":
            try:
                ok, wit = _twist_matches_center(t, lhs[1], lhs[2])
            except (NotQuasiBiangular, TftError) as exc:
                ok, wit = False, {"error": str(exc)}
        elif rhs is None:
            continue
        else:
            try:
                ok, wit = _compare(t, lhs, rhs)
            except PackageIncomplete as exc:
                ok, wit = False, {"error": str(exc)}
        entry = {"family": fam, "labels": names, "pass": ok}
        if not ok:
            entry["witness"] = wit
        out.append(entry)
    order = {f: i for i, f in enumerate(["R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10",
                                         "beta", "X"])}
    out.sort(key=lambda r: (order[r["family"]], r["labels"]))
    return out


def suite_passes(report: Sequence[dict]) -> bool:
    return all(r["pass"] for r in report)


def circle_to_center(t: TheoryPackage, g: int) -> Matrix:
    """[y] |-> Psi(y z) from the circle value of degree g to Z_G(A)_g coordinates."""
    from .frob import sandwich_matrix
    A = t.A.algebra
    e = t.group.e
    c = t.center
    proj, sect = chain_space(t, circle(g))
    rz = A.right_matrix(e, list(t.A.z), g)
    m = sandwich_matrix(t.A, e, g) @ rz @ sect
    basis = c.embed[g]
    cols = []
    for j in range(m.cols):
        from .scalars import solve
        x = solve(basis, Matrix.column(m.col(j)))
        if x is None:
            raise TftError("circle value does not land in the G-center")
        cols.append(x.col(0))
    return Matrix.from_columns(cols, c.dims[g])


def center_to_circle(t: TheoryPackage, g: int) -> Matrix:
    """x |-> [x]."""
    proj, _ = chain_space(t, circle(g))
    return proj @ t.center.embed[g]


def _twist_matches_center(t: TheoryPackage, g: int, h: int):
    G = t.group
    tw = evaluate(_w(G, [circle(g)], [S("tw", g, h)]), t)
    lhs = circle_to_center(t, G.conj(h, g)) @ tw @ center_to_circle(t, g)
    rhs = t.center.phi[(h, g)]
    if lhs == rhs:
        return True, None
    return False, {"twist": "circle twist differs from phi on the G-center"}


# ---------------------------------------------------------------------------
# closed surfaces


def check_monodromy(G: GroupTable, monodromy: Sequence[tuple[int, int]]) -> None:
    acc = G.e
    for a, b in monodromy:
        acc = G.mul(acc, G.commutator(a, b))
    if acc != G.e:
        raise MonodromyInvalid(f"product of commutators is {G.name(acc)}, not the identity")


def handle_slices(G: GroupTable, a: int, b: int, x: int, braid_pair: bool = False) -> list:
    """Slices (application order) multiplying the circle of degree x by the handle element H(a, b)."""
    ai = G.inv[a]
    bab = G.conj(b, a)
    ba = G.commutator(b, a)
    out = [
        [S("cap", G.e), ID],
        [S("m", G.e, G.e), ID],
        [S("cm", a, ai), ID],
        [S("tw", a, b), ID, ID],
    ]
    if braid_pair:
        out += [("b", 1), ("b", 1)]
    out += [
        [S("m", bab, ai), ID],
        [S("m", ba, x)],
    ]
    return out


def surface_word(G: GroupTable, genus: int, monodromy: Sequence[tuple[int, int]],
                 cusp_pair: bool = False, braid_pair: bool = False) -> GeneratorWord:
    """cap, one handle block per monodromy pair (applied in order), then cup."""
    if len(monodromy) != genus:
        raise MonodromyInvalid("need one monodromy pair per handle")
    check_monodromy(G, monodromy)
    e = G.e
    steps: list = [[S("cap", e)]]
    if cusp_pair:
        steps += [[[S("f1", e, e), ID]], [[S("f4", e, e), ID]]]
    steps.append([S("m", e, e)])
    x = e
    for a, b in monodromy:
        steps += handle_slices(G, a, b, x, braid_pair)
        x = G.mul(G.commutator(b, a), x)
    steps.append([S("cup", e)])
    return build_word(G, [_raw_slice(s) for s in reversed(steps)], ())


def surface_invariant(t: TheoryPackage, genus: int, monodromy: Sequence[tuple[int, int]],
                      audit: bool = False) -> Scalar:
    G = t.group
    w = surface_word(G, genus, monodromy)
    val = evaluate(w, t).data[0][0]
    if audit and not decomposition_audit(t, genus, monodromy, 4):
        raise TftError("surface invariant depends on the decomposition")
    return val


def alternative_words(G: GroupTable, genus: int, monodromy: Sequence[tuple[int, int]], k: int) -> list:
    """k structurally different words for the same decorated surface."""
    mono = list(monodromy)
    out = []
    variants = []
    if genus > 1:
        for r in range(1, genus):
            variants.append(("rotate", r))
    for c in G.elements:
        if c != G.e:
            variants.append(("conjugate", c))
    variants += [("cusp", None), ("braid", None)]
    i = 0
    while len(out) < k and variants:
        kind, arg = variants[i % len(variants)]
        n = i // len(variants)
        if kind == "rotate":
            m = mono[arg:] + mono[:arg]
            out.append(surface_word(G, genus, m, cusp_pair=n % 2 == 1))
        elif kind == "conjugate":
            m = [(G.conj(arg, a), G.conj(arg, b)) for a, b in mono]
            out.append(surface_word(G, genus, m, cusp_pair=n % 2 == 1))
        elif kind == "cusp":
            out.append(surface_word(G, genus, mono, cusp_pair=True, braid_pair=n % 2 == 1))
        else:
            out.append(surface_word(G, genus, mono, braid_pair=True, cusp_pair=n % 2 == 1))
        i += 1
    return out


def decomposition_audit(t: TheoryPackage, genus: int, monodromy: Sequence[tuple[int, int]], k: int) -> bool:
    G = t.group
    base = evaluate(surface_word(G, genus, monodromy), t).data[0][0]
    return all(evaluate(w, t).data[0][0] == base for w in alternative_words(G, genus, monodromy, k))


def torus_traces(t: TheoryPackage, a: int, b: int) -> tuple[Scalar, Scalar]:
    """(Tr(phi_b | Z_a), Tr(phi_{a^-1} | Z_b)) from the G-center."""
    c = t.center
    return c.phi[(b, a)].trace(), c.phi[(t.group.inv[a], b)].trace()


def battery(G: GroupTable, max_genus: int = 2, per_genus: int | None = None) -> list:
    """Monodromy tuples for genus 0..max_genus in canonical order."""
    out = [(0, ())]
    E = list(G.elements)
    for g in range(1, max_genus + 1):
        found = []
        for tup in itertools.product(E, repeat=2 * g):
            pairs = tuple((tup[2 * i], tup[2 * i + 1]) for i in range(g))
            try:
                check_monodromy(G, pairs)
            except MonodromyInvalid:
                continue
            found.append(pairs)
            if per_genus is not None and len(found) >= per_genus:
                break
        out.extend((g, p) for p in found)
    return out
