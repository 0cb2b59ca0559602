"""
Finite groups given by multiplication tables, their subgroups and coset
spaces, and the (G, H, c) model of a CM field inside its Galois closure.

Elements are always addressed by index 0..order-1. The element order is
fixed at construction and is part of the input-file contract: coset
coordinates, and everything computed from them, depend on it.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import settings

logger = logging.getLogger(__name__)


class GroupSpecError(ValueError):
    """Raised when a group specification does not describe a finite group"""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


class CmDatumError(ValueError):
    """Raised when (G, H, c) does not model a CM field"""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    mul: Tuple[Tuple[int, ...], ...]
    identity_index: int
    inverse: Tuple[int, ...]
    labels: Tuple[str, ...] = field(default=(), compare=False)
    name: str = field(default="", compare=False)

    def elements(self) -> range:
        return range(self.order)

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def label(self, a: int) -> str:
        if self.labels:
            return self.labels[a]
        return str(a)

    def check_index(self, a: int) -> int:
        if not isinstance(a, (int, np.integer)) or isinstance(a, bool) or not 0 <= a < self.order:
            raise GroupSpecError("IndexOutOfRange", f"{a!r} is not an element index of a group of order {self.order}")
        return int(a)


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self.elements


@dataclass(frozen=True)
class CosetSpace:
    """Left cosets gH, indexed in ascending order of their minimal element."""
    group: FiniteGroup
    subgroup: Subgroup
    coset_count: int
    rep: Tuple[int, ...]
    coset_of: Tuple[int, ...]

    def act(self, g: int, j: int) -> int:
        """Index of the coset g * (coset j)."""
        return self.coset_of[self.group.mul[g][self.rep[j]]]

    def action_permutation(self, g: int) -> Tuple[int, ...]:
        return tuple(self.act(g, j) for j in range(self.coset_count))

    def members(self, j: int) -> Tuple[int, ...]:
        return tuple(g for g in self.group.elements() if self.coset_of[g] == j)


@dataclass(frozen=True)
class CmFieldDatum:
    group: FiniteGroup
    h: Subgroup
    c: int
    sigma: CosetSpace
    g_dim: int

    def conjugate_coset(self, j: int) -> int:
        return self.sigma.act(self.c, j)


def _index_list(value, what: str) -> Tuple[int, ...]:
    if not isinstance(value, (list, tuple)):
        raise GroupSpecError("BadSpec", f"{what} must be a list of integers, got {type(value).__name__}")
    if any(isinstance(x, bool) or not isinstance(x, int) for x in value):
        raise GroupSpecError("BadSpec", f"{what} must contain only integers")
    return tuple(value)


def _inverse_table(mul: Sequence[Sequence[int]], identity: int) -> Tuple[int, ...]:
    inverse = []
    for i, row in enumerate(mul):
        inverse.append(row.index(identity))
    return tuple(inverse)


def _validate_table(table: Sequence[Sequence[int]], order_cap: int) -> Tuple[Tuple[Tuple[int, ...], ...], int]:
    """
    Check that a square table is a group law.

    Returns:
        The normalized table and the identity index.

    Raises:
        GroupSpecError: If the table is not closed, has no identity, is not
            a Latin square, or is not associative.
    """
    n = len(table)
    if n == 0:
        raise GroupSpecError("EmptyTable", "a group needs at least one element")
    if n > order_cap:
        raise GroupSpecError("CapExceeded", f"table order {n} exceeds the order cap {order_cap}")
    rows = []
    for i, row in enumerate(table):
        norm_row = _index_list(row, f"table row {i}")
        if len(norm_row) != n:
            raise GroupSpecError("NotSquare", f"row {i} has length {len(norm_row)}, expected {n}")
        if any(not 0 <= x < n for x in norm_row):
            raise GroupSpecError("NotClosed", f"row {i} has entries outside 0..{n - 1}")
        rows.append(norm_row)

    arr = np.array(rows, dtype=np.int64)
    full = np.arange(n)
    if not all(np.array_equal(np.sort(arr[i]), full) for i in range(n)):
        raise GroupSpecError("NotLatinSquare", "some row is not a permutation of the elements")
    if not all(np.array_equal(np.sort(arr[:, j]), full) for j in range(n)):
        raise GroupSpecError("NotLatinSquare", "some column is not a permutation of the elements")

    identity = None
    for e in range(n):
        if np.array_equal(arr[e], full) and np.array_equal(arr[:, e], full):
            identity = e
            break
    if identity is None:
        raise GroupSpecError("NoIdentity", "no two-sided identity in the table")

    # (ab)c == a(bc) checked one left factor at a time
    for a in range(n):
        if not np.array_equal(arr[arr[a]], arr[a][arr]):
            raise GroupSpecError("NotAssociative", f"associativity fails with left factor {a}")

    return tuple(rows), identity


def _from_table(table, labels=(), name="", order_cap=None) -> FiniteGroup:
    cap = settings.ORDER_CAP if order_cap is None else order_cap
    mul, identity = _validate_table(table, cap)
    inverse = _inverse_table(mul, identity)
    group = FiniteGroup(
        order=len(mul), mul=mul, identity_index=identity, inverse=inverse,
        labels=tuple(labels) if labels else tuple(str(i) for i in range(len(mul))),
        name=name or f"G{len(mul)}",
    )
    logger.debug(f"Built group {group.name} of order {group.order}")
    return group


def cyclic(n: int, order_cap: Optional[int] = None) -> FiniteGroup:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise GroupSpecError("BadCyclic", f"cyclic order must be a positive integer, got {n!r}")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return _from_table(table, name=f"C{n}", order_cap=order_cap)


def direct_product(factors: Sequence[FiniteGroup], order_cap: Optional[int] = None) -> FiniteGroup:
    """Direct product with element tuples packed in lexicographic order."""
    if not factors:
        raise GroupSpecError("EmptyProduct", "a product needs at least one factor")
    cap = settings.ORDER_CAP if order_cap is None else order_cap
    total = int(np.prod([f.order for f in factors]))
    if total > cap:
        raise GroupSpecError("CapExceeded", f"product order {total} exceeds the order cap {cap}")
    tuples = list(itertools.product(*[f.elements() for f in factors]))
    index = {t: i for i, t in enumerate(tuples)}
    table = []
    for x in tuples:
        table.append([
            index[tuple(f.mul[a][b] for f, a, b in zip(factors, x, y))]
            for y in tuples
        ])
    labels = ["(" + ",".join(f.label(a) for f, a in zip(factors, x)) + ")" for x in tuples]
    return _from_table(table, labels=labels, name="x".join(f.name for f in factors), order_cap=cap)


def permutation_group(generators: Sequence[Sequence[int]], name: str = "",
                      order_cap: Optional[int] = None) -> FiniteGroup:
    """
    Closure of permutation generators, elements numbered breadth-first.

    A permutation is its image list; the product p*q applies q first,
    so (p*q)[i] = p[q[i]].
    """
    cap = settings.ORDER_CAP if order_cap is None else order_cap
    gens = [_index_list(g, f"generator {i}") for i, g in enumerate(generators)]
    degree = len(gens[0]) if gens else 0
    for g in gens:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise GroupSpecError("NotPermutation", f"{list(g)} is not a permutation of 0..{degree - 1}")

    identity = tuple(range(degree))
    elements: List[Tuple[int, ...]] = [identity]
    index: Dict[Tuple[int, ...], int] = {identity: 0}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(x[g[i]] for i in range(degree))
            if y not in index:
                if len(elements) >= cap:
                    raise GroupSpecError("CapExceeded", f"permutation closure exceeds the order cap {cap}")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)

    table = [[index[tuple(x[y[i]] for i in range(degree))] for y in elements] for x in elements]
    labels = ["[" + ",".join(str(v) for v in x) + "]" for x in elements]
    return _from_table(table, labels=labels, name=name or f"P{len(elements)}", order_cap=cap)


def dihedral(n: int, order_cap: Optional[int] = None) -> FiniteGroup:
    """Dihedral group of order 2n acting on the vertices of an n-gon."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 3:
        raise GroupSpecError("BadDihedral", f"dihedral n must be an integer >= 3, got {n!r}")
    rotation = [(i + 1) % n for i in range(n)]
    reflection = [(-i) % n for i in range(n)]
    return permutation_group([rotation, reflection], name=f"D{n}", order_cap=order_cap)


def make_group(spec: dict, order_cap: Optional[int] = None) -> FiniteGroup:
    """
    Build a group from a tagged specification.

    Accepted tags: {"cyclic": n}, {"product": [spec, ...]},
    {"perms": [[images], ...]}, {"table": [[...], ...]}, {"dihedral": n}.
    An optional "name" key overrides the generated description.
    """
    if not isinstance(spec, dict):
        raise GroupSpecError("BadSpec", f"group spec must be an object, got {type(spec).__name__}")
    tags = [k for k in ("cyclic", "product", "perms", "table", "dihedral") if k in spec]
    if len(tags) != 1:
        raise GroupSpecError("BadSpec", f"group spec needs exactly one of cyclic/product/perms/table/dihedral, got {sorted(spec)}")
    tag = tags[0]
    value = spec[tag]
    name = spec.get("name", "")

    if tag == "cyclic":
        group = cyclic(value, order_cap=order_cap)
    elif tag == "dihedral":
        group = dihedral(value, order_cap=order_cap)
    elif tag == "product":
        if not isinstance(value, list):
            raise GroupSpecError("BadSpec", "product expects a list of group specs")
        group = direct_product([make_group(f, order_cap=order_cap) for f in value], order_cap=order_cap)
    elif tag == "perms":
        if not isinstance(value, list):
            raise GroupSpecError("BadSpec", "perms expects a list of image lists")
        group = permutation_group(value, order_cap=order_cap)
    else:
        if not isinstance(value, list):
            raise GroupSpecError("BadSpec", "table expects a list of rows")
        group = _from_table(value, order_cap=order_cap)

    if name:
        group = FiniteGroup(group.order, group.mul, group.identity_index, group.inverse, group.labels, name)
    return group


def element_order(group: FiniteGroup, g: int) -> int:
    x, n = g, 1
    while x != group.identity_index:
        x = group.mul[x][g]
        n += 1
    return n


def is_central(group: FiniteGroup, g: int) -> bool:
    return all(group.mul[g][x] == group.mul[x][g] for x in group.elements())


def central_involutions(group: FiniteGroup) -> List[int]:
    return [g for g in group.elements() if element_order(group, g) == 2 and is_central(group, g)]


def subgroup_closure(group: FiniteGroup, seeds: Sequence[int]) -> Subgroup:
    seeds = [group.check_index(s) for s in seeds]
    found = {group.identity_index}
    queue = deque([group.identity_index])
    while queue:
        x = queue.popleft()
        for s in seeds:
            y = group.mul[x][s]
            if y not in found:
                found.add(y)
                queue.append(y)
    return Subgroup(group, tuple(sorted(found)))


def make_subgroup(group: FiniteGroup, elements: Sequence[int]) -> Subgroup:
    members = sorted({group.check_index(e) for e in elements})
    if group.identity_index not in members:
        raise GroupSpecError("NotASubgroup", "the identity is missing")
    member_set = set(members)
    for a in members:
        for b in members:
            if group.mul[a][b] not in member_set:
                raise GroupSpecError("NotASubgroup", f"{a}*{b} = {group.mul[a][b]} is not in the set")
    return Subgroup(group, tuple(members))


def trivial_subgroup(group: FiniteGroup) -> Subgroup:
    return Subgroup(group, (group.identity_index,))


def all_subgroups(group: FiniteGroup) -> List[Subgroup]:
    """Every subgroup, sorted by (order, elements)."""
    start = trivial_subgroup(group)
    found = {start.elements: start}
    queue = deque([start])
    while queue:
        sub = queue.popleft()
        members = set(sub.elements)
        for g in group.elements():
            if g in members:
                continue
            bigger = subgroup_closure(group, list(sub.elements) + [g])
            if bigger.elements not in found:
                found[bigger.elements] = bigger
                queue.append(bigger)
    return sorted(found.values(), key=lambda s: (s.order, s.elements))


@lru_cache(maxsize=1024)
def coset_space(group: FiniteGroup, h: Subgroup) -> CosetSpace:
    coset_of = [-1] * group.order
    rep = []
    for g in group.elements():
        if coset_of[g] != -1:
            continue
        j = len(rep)
        rep.append(g)
        for x in h.elements:
            coset_of[group.mul[g][x]] = j
    return CosetSpace(group, h, len(rep), tuple(rep), tuple(coset_of))


def is_action_homomorphism(space: CosetSpace, check_cap: Optional[int] = None) -> bool:
    """Check g.(h.j) == (gh).j for all g, h, j; skipped (True) above the cap."""
    cap = settings.TABLE_CHECK_CAP if check_cap is None else check_cap
    group = space.group
    if group.order > cap:
        return True
    perms = [space.action_permutation(g) for g in group.elements()]
    for a in group.elements():
        for b in group.elements():
            ab = perms[group.mul[a][b]]
            if any(ab[j] != perms[a][perms[b][j]] for j in range(space.coset_count)):
                return False
    return True


def validate_cm_datum(group: FiniteGroup, h: Subgroup, c: int) -> CmFieldDatum:
    """
    Validate (G, H, c) as a CM field K = k^H with complex conjugation c.

    Raises:
        CmDatumError: NotInvolution, NotCentral, ConjugationFixesField or
            OddCosetCount.
    """
    c = group.check_index(c)
    if element_order(group, c) != 2:
        raise CmDatumError("NotInvolution", f"element {c} has order {element_order(group, c)}")
    if not is_central(group, c):
        raise CmDatumError("NotCentral", f"element {c} does not commute with every element")
    if c in h:
        raise CmDatumError("ConjugationFixesField", f"element {c} lies in H")
    sigma = coset_space(group, h)
    if sigma.coset_count % 2:
        raise CmDatumError("OddCosetCount", f"{sigma.coset_count} embeddings")
    fixed = [j for j in range(sigma.coset_count) if sigma.act(c, j) == j]
    if fixed:
        raise CmDatumError("ConjugationFixesField", f"c fixes the cosets {fixed}")
    return CmFieldDatum(group=group, h=h, c=c, sigma=sigma, g_dim=sigma.coset_count // 2)
