"""
Mumford-Tate lattices of CM types.

Two independent computations of the same subtorus of T^K, both as
saturated sublattices of the cocharacter group:

  - Hodge route: saturation of the span of the Galois orbit of mu.
  - Reflex route: saturated image of N_{Phi_E} o N_{k/E} on X_*(T^k).

Their equality is the main theorem; check_main_theorem reports it together
with the factorization psi = N_{Phi_E} o N_{k/E} and the column identity
psi_*(tau^vee) = tau(mu). Tate twists are tracked by one extra coordinate
for the class counts of V(m, n, r).
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import settings
from cm_structures import (
    CmType,
    CmTypeError,
    ReflexData,
    galois_translate,
    hodge_cocharacter,
    reflex_field_norm,
    reflex_norm_map,
    reflex_type,
    reflex_type_norm,
)
from integer_lattice import (
    IntegerLattice,
    LatticeMap,
    annihilator,
    hnf_canonical,
    lattice_contains,
    lattice_equal,
    pair,
    saturate,
)

logger = logging.getLogger(__name__)

HODGE = "hodge"
TATE = "tate"
ROUTES = (HODGE, TATE)
DEGENERACY_CONVENTION = "mt_rank < g + 1"


class CapExceeded(ValueError):
    """Raised when an enumeration would exceed its configured cap"""
    code = "CapExceeded"

    def __init__(self, detail: str):
        super().__init__(f"CapExceeded: {detail}")


@dataclass(frozen=True)
class MtReport:
    cm_type: CmType
    mt_lattice: IntegerLattice
    t0_lattice: IntegerLattice
    mt_rank: int
    degenerate: bool
    reflex: ReflexData
    theorem_holds: bool
    factorization_holds: bool
    column_violations: Tuple[int, ...] = ()

    def to_dict(self) -> Dict:
        t = self.cm_type
        return {
            "group": t.group.name,
            "order": t.group.order,
            "H": list(t.datum.h.elements),
            "c": t.datum.c,
            "g": t.g_dim,
            "phi": list(t.phi),
            "mt_rank": self.mt_rank,
            "degenerate": self.degenerate,
            "degeneracy_convention": DEGENERACY_CONVENTION,
            "mt_lattice": self.mt_lattice.to_json(),
            "t0_lattice": self.t0_lattice.to_json(),
            "reflex": {
                "h_e": list(self.reflex.h_e.elements),
                "reflex_degree": self.reflex.reflex_degree,
                "phi_e": list(self.reflex.phi_e.phi),
            },
            "theorem_holds": self.theorem_holds,
            "factorization_holds": self.factorization_holds,
            "column_violations": list(self.column_violations),
        }


@dataclass(frozen=True)
class WeightMultiset:
    m: int
    n: int
    r: int
    entries: Tuple[Tuple[Tuple[int, ...], int], ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(k for _, k in self.entries)

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "weights": [{"character": list(w), "multiplicity": k} for w, k in self.entries],
        }


def galois_orbit(t: CmType, v: Sequence[int]) -> List[Tuple[int, ...]]:
    """Distinct translates of v, sorted."""
    return sorted({galois_translate(t, s, v) for s in t.group.elements()})


def mt_lattice(t: CmType) -> IntegerLattice:
    n = t.sigma.coset_count
    orbit = galois_orbit(t, hodge_cocharacter(t))
    lattice = saturate(hnf_canonical(orbit, n))
    logger.debug(f"MT lattice of phi={list(t.phi)} has rank {lattice.rank}")
    return lattice


def reflex_route_map(t: CmType, reflex: Optional[ReflexData] = None) -> LatticeMap:
    """N_{Phi_E} o N_{k/E} as one matrix X_*(T^k) -> X_*(T^K)."""
    reflex = reflex or reflex_type(t)
    return reflex_type_norm(t, reflex).compose(reflex_field_norm(t, reflex))


def _column_span(lmap: LatticeMap) -> IntegerLattice:
    columns = sorted({lmap.column(j) for j in range(lmap.source_rank)})
    return hnf_canonical(columns, lmap.target_rank)


def t0_lattice(t: CmType, reflex: Optional[ReflexData] = None) -> IntegerLattice:
    """Saturated image of the reflex route; never touches galois_translate."""
    return saturate(_column_span(reflex_route_map(t, reflex)))


def check_main_theorem(t: CmType) -> MtReport:
    reflex = reflex_type(t)
    mt = mt_lattice(t)
    t0 = t0_lattice(t, reflex)
    psi = reflex_norm_map(t, reflex)
    composite = reflex_route_map(t, reflex)
    mu = hodge_cocharacter(t)
    violations = tuple(
        tau for tau in t.group.elements()
        if psi.column(tau) != galois_translate(t, tau, mu)
    )
    if violations:
        logger.error(f"psi columns differ from translates of mu at {list(violations)} for phi={list(t.phi)}")
    return MtReport(
        cm_type=t,
        mt_lattice=mt,
        t0_lattice=t0,
        mt_rank=mt.rank,
        degenerate=mt.rank < t.g_dim + 1,
        reflex=reflex,
        theorem_holds=lattice_equal(mt, t0),
        factorization_holds=psi.matrix == composite.matrix,
        column_violations=violations,
    )


def hodge_relations(t: CmType) -> IntegerLattice:
    """Characters of T^K that are trivial on the Mumford-Tate torus."""
    return annihilator(mt_lattice(t))


def is_galois_stable(t: CmType, L: IntegerLattice) -> bool:
    return all(
        lattice_contains(L, galois_translate(t, s, row))
        for s in t.group.elements()
        for row in L.basis
    )


def _check_motive_parameters(t: CmType, m: int, n: int, weight_cap: Optional[int]) -> None:
    for name, value in (("m", m), ("n", n)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
    cap = settings.WEIGHT_CAP if weight_cap is None else weight_cap
    # stop multiplying once past the cap
    total, factors = 1, 0
    while factors < m + n and total <= cap:
        total *= t.sigma.coset_count
        factors += 1
    if total > cap:
        raise CapExceeded(f"(2g)^(m+n) with 2g = {t.sigma.coset_count}, m + n = {m + n} exceeds the weight cap {cap}")


def motive_weights(t: CmType, m: int, n: int, r: int, weight_cap: Optional[int] = None) -> WeightMultiset:
    """
    Weights of V^(x)m (x) dual(V)^(x)n (x) Q(r).

    Each embedding phi contributes the character e_phi to V; the extra last
    coordinate counts Tate twists.
    """
    _check_motive_parameters(t, m, n, weight_cap)
    size = t.sigma.coset_count
    current = Counter({(0,) * size: 1})
    for sign, count in ((1, m), (-1, n)):
        for _ in range(count):
            step = Counter()
            for w, k in current.items():
                for j in range(size):
                    moved = list(w)
                    moved[j] += sign
                    step[tuple(moved)] += k
            current = step
    entries = tuple(sorted((w + (int(r),), k) for w, k in current.items()))
    return WeightMultiset(m, n, int(r), entries)


def extended_generators(t: CmType, route: str) -> List[Tuple[int, ...]]:
    """(cocharacter, 1) for each generator of the chosen route."""
    if route == HODGE:
        mu = hodge_cocharacter(t)
        base = galois_orbit(t, mu)
    elif route == TATE:
        route_map = reflex_route_map(t)
        base = sorted({route_map.column(j) for j in range(route_map.source_rank)})
    else:
        raise ValueError(f"route must be one of {ROUTES}, got {route!r}")
    return [v + (1,) for v in base]


def extended_lattice(t: CmType, route: str) -> IntegerLattice:
    return saturate(hnf_canonical(extended_generators(t, route), t.sigma.coset_count + 1))


def invariant_class_dimension(t: CmType, m: int, n: int, r: int, route: str,
                              weight_cap: Optional[int] = None) -> int:
    """Number of weights of V(m, n, r), with multiplicity, killed by the extended lattice."""
    weights = motive_weights(t, m, n, r, weight_cap=weight_cap)
    lattice = extended_lattice(t, route)
    return sum(
        k for w, k in weights.entries
        if all(pair(w, gamma) == 0 for gamma in lattice.basis)
    )


# CM algebras: products of CM fields sharing one Galois closure and one c

@dataclass(frozen=True)
class CmAlgebraType:
    components: Tuple[CmType, ...]

    @property
    def ambient_rank(self) -> int:
        return sum(t.sigma.coset_count for t in self.components)


@dataclass(frozen=True)
class AlgebraReport:
    algebra: CmAlgebraType
    mt_lattice: IntegerLattice
    t0_lattice: IntegerLattice
    mt_rank: int
    theorem_holds: bool

    def to_dict(self) -> Dict:
        return {
            "components": [
                {"H": list(t.datum.h.elements), "phi": list(t.phi)}
                for t in self.algebra.components
            ],
            "mt_rank": self.mt_rank,
            "mt_lattice": self.mt_lattice.to_json(),
            "t0_lattice": self.t0_lattice.to_json(),
            "theorem_holds": self.theorem_holds,
        }


def make_cm_algebra(components: Sequence[CmType]) -> CmAlgebraType:
    if not components:
        raise CmTypeError("EmptyAlgebra", "a CM algebra needs at least one factor")
    first = components[0].datum
    for t in components[1:]:
        if t.group != first.group or t.datum.c != first.c:
            raise CmTypeError("MixedAlgebra", "all factors must share the group and complex conjugation")
    return CmAlgebraType(tuple(components))


def algebra_mt_lattice(a: CmAlgebraType) -> IntegerLattice:
    mus = [hodge_cocharacter(t) for t in a.components]
    group = a.components[0].group
    orbit = sorted({
        sum((galois_translate(t, s, mu) for t, mu in zip(a.components, mus)), ())
        for s in group.elements()
    })
    return saturate(hnf_canonical(orbit, a.ambient_rank))


def algebra_t0_lattice(a: CmAlgebraType) -> IntegerLattice:
    maps = [reflex_route_map(t) for t in a.components]
    source_rank = maps[0].source_rank
    columns = sorted({sum((lmap.column(j) for lmap in maps), ()) for j in range(source_rank)})
    return saturate(hnf_canonical(columns, a.ambient_rank))


def check_algebra(a: CmAlgebraType) -> AlgebraReport:
    mt = algebra_mt_lattice(a)
    t0 = algebra_t0_lattice(a)
    return AlgebraReport(a, mt, t0, mt.rank, lattice_equal(mt, t0))
