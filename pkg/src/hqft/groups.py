"""Finite groups as validated Cayley tables."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence


class NotAGroup(ValueError):
    """A Cayley table failed a group axiom; ``axiom`` names it, ``witness`` shows where."""

    def __init__(self, axiom: str, witness: tuple, message: str = ""):
        self.axiom = axiom
        self.witness = witness
        super().__init__(message or f"{axiom} fails at {witness}")


@dataclass(frozen=True)
class GroupTable:
    order: int
    table: tuple[tuple[int, ...], ...]
    e: int
    inv: tuple[int, ...]
    names: tuple[str, ...] = field(default=(), compare=False)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def prod(self, *gs: int) -> int:
        out = self.e
        for g in gs:
            out = self.table[out][g]
        return out

    def inverse(self, g: int) -> int:
        return self.inv[g]

    def commutator(self, g: int, h: int) -> int:
        """g h g^-1 h^-1."""
        return self.prod(g, h, self.inv[g], self.inv[h])

    def conj(self, h: int, g: int) -> int:
        """h g h^-1."""
        return self.prod(h, g, self.inv[h])

    def is_involutory(self) -> bool:
        return all(self.table[g][g] == self.e for g in range(self.order))

    def is_abelian(self) -> bool:
        return all(self.table[g][h] == self.table[h][g] for g in range(self.order) for h in range(self.order))

    @property
    def elements(self) -> range:
        return range(self.order)

    def name(self, g: int) -> str:
        return self.names[g] if self.names else str(g)

    def index(self, label: str | int) -> int:
        """Resolve an element by name or decimal index."""
        if isinstance(label, int):
            if 0 <= label < self.order:
                return label
            raise KeyError(label)
        if self.names and label in self.names:
            return self.names.index(label)
        if label.isdigit() and int(label) < self.order:
            return int(label)
        raise KeyError(label)

    def to_json(self) -> dict:
        out: dict = {"order": self.order, "table": [list(r) for r in self.table]}
        if self.names:
            out["names"] = list(self.names)
        return out


def from_table(grid: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> GroupTable:
    """Validate a Cayley table and return the group it defines."""
    n = len(grid)
    if n == 0:
        raise NotAGroup("nonempty", ())
    rows = tuple(tuple(int(x) for x in r) for r in grid)
    for i, r in enumerate(rows):
        if len(r) != n:
            raise NotAGroup("square", (i,), f"row {i} has length {len(r)}, expected {n}")
        for j, x in enumerate(r):
            if not 0 <= x < n:
                raise NotAGroup("closure", (i, j), f"entry {x} at ({i},{j}) out of range")
    for i, r in enumerate(rows):
        if len(set(r)) != n:
            raise NotAGroup("latin-square", (i,), f"row {i} repeats an element")
    for j in range(n):
        if len({rows[i][j] for i in range(n)}) != n:
            raise NotAGroup("latin-square", (j,), f"column {j} repeats an element")
    ids = [g for g in range(n) if all(rows[g][h] == h and rows[h][g] == h for h in range(n))]
    if not ids:
        raise NotAGroup("identity", ())
    e = ids[0]
    for a, b, c in itertools.product(range(n), repeat=3):
        if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
            raise NotAGroup("associativity", (a, b, c))
    inv = tuple(next(h for h in range(n) if rows[g][h] == e) for g in range(n))
    if names is not None and len(names) != n:
        raise NotAGroup("names", (len(names),), "name list length differs from order")
    return GroupTable(n, rows, e, inv, tuple(names) if names else ())


def cyclic(n: int) -> GroupTable:
    return from_table([[(i + j) % n for j in range(n)] for i in range(n)],
                      ["e"] + [f"a{k}" if n > 2 else "s" for k in range(1, n)])


def trivial() -> GroupTable:
    return from_table([[0]], ["e"])


def direct_product(a: GroupTable, b: GroupTable) -> GroupTable:
    pairs = list(itertools.product(range(a.order), range(b.order)))
    idx = {p: k for k, p in enumerate(pairs)}
    grid = [[idx[(a.mul(x[0], y[0]), b.mul(x[1], y[1]))] for y in pairs] for x in pairs]
    names = [f"{a.name(x)}{b.name(y)}" if (x, y) != (a.e, b.e) else "e" for x, y in pairs]
    return from_table(grid, names)


def klein() -> GroupTable:
    """Z/2 x Z/2 with elements e, a, b, c = ab."""
    grid = [[g ^ h for h in range(4)] for g in range(4)]
    return from_table(grid, ["e", "a", "b", "c"])


def symmetric(n: int) -> GroupTable:
    """S_n; composition (p q)(i) = p(q(i)); names are one-line notation."""
    perms = list(itertools.permutations(range(n)))
    idx = {p: k for k, p in enumerate(perms)}
    grid = [[idx[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return from_table(grid, ["".join(str(i + 1) for i in p) for p in perms])


def load_json(data: dict | str) -> GroupTable:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "table" not in data:
        raise NotAGroup("schema", (), "group JSON needs a 'table'")
    grid = data["table"]
    if "order" in data and data["order"] != len(grid):
        raise NotAGroup("schema", (data["order"],), "declared order differs from table size")
    return from_table(grid, data.get("names"))
