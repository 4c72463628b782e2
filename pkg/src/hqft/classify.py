"""Classification data of matrix models: twisted 2-cocycles with values in mu_m,
block permutations and scale vectors, up to relabeling and coboundaries.

Cocycle values are stored as exponent vectors mod m: ``tau[(g, h)][j] = k``
stands for zeta_m^k. G acts on (Z/m)^n through sigma by (x^b)_j = x_{sigma_b(j)}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .frob import Report, make_frobenius
from .galg import matrix_model, model_trace
from .groups import GroupTable
from .scalars import format_scalar, to_scalar, zeta


class ClassifyError(ValueError):
    pass


class ValueGroupMismatch(ClassifyError):
    pass


class ModelMismatch(ClassifyError):
    pass


class TooLarge(ClassifyError):
    pass


DEFAULT_BUDGET = 1_000_000


@dataclass(eq=False)
class ModelData:
    group: GroupTable
    blocks: tuple
    tau: dict          # (g, h) -> tuple of exponents mod m
    sigma: tuple       # sigma[g] is a tuple permutation of range(n)
    r: tuple
    m: int = 2

    @property
    def n(self) -> int:
        return len(self.blocks)

    def tau_scalars(self, g: int, h: int) -> tuple:
        return tuple(zeta(self.m, k) for k in self.tau[(g, h)])

    def key(self) -> tuple:
        """Hashable canonical encoding: sigma rows then the tau table in element order."""
        E = self.group.elements
        return (tuple(self.sigma), tuple(self.tau[(g, h)] for g in E for h in E))

    def to_json(self) -> dict:
        E = self.group.elements
        return {"n": self.n, "blocks": list(self.blocks), "value_group_m": self.m,
                "tau": [[list(self.tau[(g, h)]) for h in E] for g in E],
                "sigma": [list(s) for s in self.sigma],
                "r": [format_scalar(x) for x in self.r]}


def trivial_model(G: GroupTable, blocks: Sequence[int], r: Sequence | None = None, m: int = 2) -> ModelData:
    n = len(blocks)
    E = G.elements
    r = tuple(to_scalar(x) for x in (r if r is not None else [1] * n))
    return ModelData(G, tuple(blocks), {(g, h): (0,) * n for g in E for h in E},
                     tuple(tuple(range(n)) for _ in E), r, m)


def model_from_json(G: GroupTable, data: dict) -> ModelData:
    try:
        n = int(data["n"])
        blocks = tuple(int(k) for k in data.get("blocks", [1] * n))
        m = int(data.get("value_group_m", 2))
        E = G.elements
        table = data.get("tau")
        if table is None:
            tau = {(g, h): (0,) * n for g in E for h in E}
        else:
            tau = {(g, h): tuple(int(x) % m for x in table[g][h]) for g in E for h in E}
        sigma = tuple(tuple(int(x) for x in s) for s in data.get("sigma", [list(range(n))] * G.order))
        r = tuple(to_scalar(x) for x in data.get("r", [1] * n))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ClassifyError(f"malformed model: {exc}") from exc
    if len(blocks) != n or len(r) != n or len(sigma) != G.order:
        raise ClassifyError("model fields disagree on n or the group order")
    if any(len(v) != n for v in tau.values()):
        raise ClassifyError("tau entries must have n components")
    return ModelData(G, blocks, tau, sigma, r, m)


# ---------------------------------------------------------------------------
# validation


def _act(x: Sequence[int], perm: Sequence[int]) -> tuple:
    return tuple(x[perm[j]] for j in range(len(x)))


def _cocycle_witness(G: GroupTable, tau: dict, sigma: Sequence, m: int):
    """First (a, b, c) where tau(a,b)^c + tau(ab,c) != tau(a,bc) + tau(b,c), or None."""
    E = G.elements
    n = len(sigma[G.e])
    for a in E:
        for b in E:
            ab = G.mul(a, b)
            for c in E:
                bc = G.mul(b, c)
                lhs = _act(tau[(a, b)], sigma[c])
                t1, t2, t3 = tau[(ab, c)], tau[(a, bc)], tau[(b, c)]
                for j in range(n):
                    if (lhs[j] + t1[j] - t2[j] - t3[j]) % m:
                        return [a, b, c, j]
    return None


def _compose(p: Sequence[int], q: Sequence[int]) -> tuple:
    return tuple(p[q[i]] for i in range(len(q)))


def validate_model(md: ModelData) -> Report:
    rep = Report()
    G = md.group
    E = G.elements
    n = md.n
    ident = tuple(range(n))
    shapes = (len(md.sigma) == G.order and all(sorted(s) == list(ident) for s in md.sigma)
              and all(len(md.tau.get((g, h), ())) == n for g in E for h in E) and len(md.r) == n)
    rep.add("shape", shapes)
    if not shapes:
        return rep
    bad = None
    if tuple(md.sigma[G.e]) != ident:
        bad = ["sigma(e)"]
    for g in E:
        for h in E:
            if bad is None and tuple(md.sigma[G.mul(g, h)]) != _compose(md.sigma[g], md.sigma[h]):
                bad = [g, h]
    rep.add("homomorphism", bad is None, bad)
    bad = None
    for g in E:
        for j in range(n):
            k = md.sigma[g][j]
            if bad is None and (md.r[k] != md.r[j] or md.blocks[k] != md.blocks[j]):
                bad = [g, j]
    rep.add("stabilizer", bad is None, bad)
    bad = None
    for g in E:
        if bad is None and (any(x % md.m for x in md.tau[(G.e, g)]) or any(x % md.m for x in md.tau[(g, G.e)])):
            bad = [g]
    rep.add("normalized", bad is None, bad)
    w = _cocycle_witness(G, md.tau, md.sigma, md.m) if rep.checks["homomorphism"]["pass"] else ["sigma"]
    rep.add("cocycle", w is None, w)
    if any(not x for x in md.r):
        rep.add("r-nonzero", False)
    return rep


def build_package(md: ModelData):
    """(A, B = A^op, identity context) for the model with trace sum_j r_j k_j Tr."""
    from .tft import standard_package
    A = matrix_model(md.group, md.blocks, tau=lambda g, h: md.tau_scalars(g, h), sigma=md.sigma, r=md.r)
    f = make_frobenius(A, model_trace(md.blocks, md.r))
    return standard_package(f)


# ---------------------------------------------------------------------------
# equivalence


def _transport(md: ModelData, pi: Sequence[int]) -> ModelData:
    """Relabel blocks by j -> pi[j]."""
    n = md.n
    inv = [0] * n
    for j, p in enumerate(pi):
        inv[p] = j
    sigma = tuple(tuple(pi[s[inv[k]]] for k in range(n)) for s in md.sigma)
    tau = {key: tuple(v[inv[k]] for k in range(n)) for key, v in md.tau.items()}
    r = tuple(md.r[inv[k]] for k in range(n))
    blocks = tuple(md.blocks[inv[k]] for k in range(n))
    return ModelData(md.group, blocks, tau, sigma, r, md.m)


def coboundary(G: GroupTable, phi: dict, sigma: Sequence, m: int) -> dict:
    """(d phi)(a, b) = phi(a)^b + phi(b) - phi(ab), additively mod m."""
    E = G.elements
    out = {}
    for a in E:
        for b in E:
            x = _act(phi[a], sigma[b])
            out[(a, b)] = tuple((x[j] + phi[b][j] - phi[G.mul(a, b)][j]) % m for j in range(len(x)))
    return out


def twist(md: ModelData, phi: dict) -> ModelData:
    """The model with tau replaced by tau + d phi."""
    d = coboundary(md.group, phi, md.sigma, md.m)
    tau = {k: tuple((x + y) % md.m for x, y in zip(v, d[k])) for k, v in md.tau.items()}
    return ModelData(md.group, md.blocks, tau, md.sigma, md.r, md.m)


def _cochains(G: GroupTable, n: int, m: int, budget: int):
    """Normalized 1-cochains phi: G -> (Z/m)^n, phi(e) = 0."""
    others = [g for g in G.elements if g != G.e]
    total = m ** (n * len(others))
    if total > budget:
        raise TooLarge(f"{total} cochains exceed the budget {budget}")
    for vals in itertools.product(range(m), repeat=n * len(others)):
        phi = {G.e: (0,) * n}
        for k, g in enumerate(others):
            phi[g] = tuple(vals[k * n:(k + 1) * n])
        yield phi


def _check_comparable(m1: ModelData, m2: ModelData) -> None:
    if m1.m != m2.m:
        raise ValueGroupMismatch(f"value groups mu_{m1.m} and mu_{m2.m} differ")
    if m1.group != m2.group:
        raise ModelMismatch("models are graded by different groups")
    if m1.n != m2.n or sorted(m1.blocks) != sorted(m2.blocks):
        raise ModelMismatch("block counts or block sizes differ")


def are_equivalent(m1: ModelData, m2: ModelData, budget: int = DEFAULT_BUDGET) -> tuple[bool, dict | None]:
    """Decide equivalence by searching relabelings pi and coboundaries d phi.

    Returns (True, {"pi", "phi"}) with tau_2 = pi(tau_1) + d phi, or (False, None).
    """
    _check_comparable(m1, m2)
    G = m1.group
    n = m1.n
    for pi in itertools.permutations(range(n)):
        t = _transport(m1, pi)
        if t.blocks != m2.blocks or t.r != m2.r or t.sigma != m2.sigma:
            continue
        target = {k: tuple((y - x) % m1.m for x, y in zip(t.tau[k], m2.tau[k])) for k in t.tau}
        for phi in _cochains(G, n, m1.m, budget):
            if coboundary(G, phi, t.sigma, m1.m) == target:
                return True, {"pi": list(pi), "phi": {g: list(phi[g]) for g in G.elements}}
    return False, None


# ---------------------------------------------------------------------------
# enumeration


def homomorphisms(G: GroupTable, n: int, allowed=None) -> list[tuple]:
    """All homomorphisms G -> S_n (as tuples of permutations), optionally restricted."""
    perms = list(itertools.permutations(range(n)))
    if allowed is not None:
        perms = [p for p in perms if allowed(p)]
    E = G.elements
    out = []
    # assign images element by element, pruning by the homomorphism law on assigned pairs
    ident = tuple(range(n))

    def extend(assign: dict, k: int):
        if k == len(E):
            out.append(tuple(assign[g] for g in E))
            return
        g = E[k]
        choices = [ident] if g == G.e else perms
        for p in choices:
            assign[g] = p
            ok = True
            for a in E[:k + 1]:
                for b in E[:k + 1]:
                    ab = G.mul(a, b)
                    if ab in assign and assign[ab] != _compose(assign[a], assign[b]):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                extend(assign, k + 1)
            del assign[g]

    extend({}, 0)
    return out


def cocycles(G: GroupTable, sigma: Sequence, n: int, m: int, budget: int = DEFAULT_BUDGET) -> list[dict]:
    """All normalized twisted 2-cocycles with values in (Z/m)^n."""
    E = G.elements
    others = [g for g in E if g != G.e]
    slots = [(a, b) for a in others for b in others]
    total = m ** (n * len(slots))
    if total > budget:
        raise TooLarge(f"{total} cochain tables exceed the budget {budget}")
    out = []
    zero = (0,) * n
    for vals in itertools.product(range(m), repeat=n * len(slots)):
        tau = {(a, b): zero for a in E for b in E}
        for k, key in enumerate(slots):
            tau[key] = tuple(vals[k * n:(k + 1) * n])
        if _cocycle_witness(G, tau, sigma, m) is None:
            out.append(tau)
    return out


def enumerate_classes(G: GroupTable, n: int, m: int = 2, r_reps: Sequence[Sequence] | None = None,
                      blocks: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET) -> list[ModelData]:
    """One canonical representative per class, for each scale vector in ``r_reps``.

    Canonical means the least key among all relabelings and coboundary twists.
    """
    blocks = tuple(blocks) if blocks is not None else (1,) * n
    if len(blocks) != n:
        raise ClassifyError("blocks must have n entries")
    reps = r_reps if r_reps is not None else [[1] * n]
    out = []
    for rv in reps:
        r = tuple(to_scalar(x) for x in rv)
        if len(r) != n:
            raise ClassifyError("r must have n entries")
        stab = lambda p: all(r[p[j]] == r[j] and blocks[p[j]] == blocks[j] for j in range(n))
        relabel = [p for p in itertools.permutations(range(n))
                   if all(r[p[j]] == r[j] and blocks[p[j]] == blocks[j] for j in range(n))]
        seen = set()
        found = []
        for sigma in homomorphisms(G, n, stab):
            for tau in cocycles(G, sigma, n, m, budget):
                md = ModelData(G, blocks, tau, sigma, r, m)
                if md.key() in seen:
                    continue
                orbit = _orbit(md, relabel, budget)
                seen.update(orbit)
                rep = min(orbit)
                found.append(_from_key(G, blocks, r, m, rep))
        found.sort(key=lambda x: x.key())
        out.extend(found)
    return out


def _orbit(md: ModelData, relabel: Sequence, budget: int) -> set:
    G = md.group
    keys = set()
    for pi in relabel:
        t = _transport(md, pi)
        for phi in _cochains(G, md.n, md.m, budget):
            keys.add(twist(t, phi).key())
    return keys


def _from_key(G: GroupTable, blocks: tuple, r: tuple, m: int, key: tuple) -> ModelData:
    sigma, table = key
    E = G.elements
    tau = {}
    k = 0
    for g in E:
        for h in E:
            tau[(g, h)] = table[k]
            k += 1
    return ModelData(G, blocks, tau, sigma, r, m)


def brute_force_class_count(G: GroupTable, n: int, m: int, sigma: Sequence | None = None) -> int:
    """|Z^2 / B^2| for one sigma, by counting cocycles and distinct coboundaries."""
    sigma = sigma if sigma is not None else tuple(tuple(range(n)) for _ in G.elements)
    z = len(cocycles(G, sigma, n, m))
    b = {tuple(sorted(coboundary(G, phi, sigma, m).items())) for phi in _cochains(G, n, m, DEFAULT_BUDGET)}
    return z // len(b)


# ---------------------------------------------------------------------------
# cross-validation against surface invariants


def cross_validate(m1: ModelData, m2: ModelData, surfaces: Sequence | None = None) -> dict:
    """Compare are_equivalent with the surface battery.

    Equivalent models must agree on every surface. Differing invariants must
    come with a negative equivalence verdict. Agreement of inequivalent models
    is recorded, not treated as a failure.
    """
    from .tft import battery, surface_invariant
    eq, witness = are_equivalent(m1, m2)
    t1, t2 = build_package(m1), build_package(m2)
    surfaces = surfaces if surfaces is not None else battery(m1.group, 2, 3)
    rows = []
    differ = False
    for genus, mono in surfaces:
        a = surface_invariant(t1, genus, mono)
        b = surface_invariant(t2, genus, mono)
        differ = differ or a != b
        rows.append({"genus": genus, "monodromy": [list(p) for p in mono],
                     "left": format_scalar(a), "right": format_scalar(b), "equal": a == b})
    ok = not (eq and differ)
    return {"pass": ok, "equivalent": eq, "witness": witness, "separated": differ, "surfaces": rows}
