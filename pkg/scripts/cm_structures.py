"""
CM types on a (G, H, c) datum, the Hodge cocharacter, Galois translation
of cocharacters, the reflex subgroup/type and reflex norms as lattice maps.

Cocharacter coordinates are coset coordinates: basis vector j of
X_*(T^K) is phi_j^vee for the j-th coset of G/H, and G acts by left
multiplication on cosets, sigma(phi^vee) = (sigma phi)^vee.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from finite_group import (
    CmFieldDatum,
    CosetSpace,
    FiniteGroup,
    Subgroup,
    coset_space,
    trivial_subgroup,
    validate_cm_datum,
)
from integer_lattice import LatticeError, LatticeMap

logger = logging.getLogger(__name__)


class CmTypeError(ValueError):
    """Raised when a subset of embeddings is not a CM type"""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)


class NotUnionOfCosets(ValueError):
    """Raised when a norm element set is incompatible with its coset spaces"""
    code = "NotUnionOfCosets"


class InternalStabilityViolation(RuntimeError):
    """Raised when Phi_k^-1 is not right stable under H_E, which cannot happen for valid input"""
    code = "InternalStabilityViolation"


@dataclass(frozen=True)
class CmType:
    datum: CmFieldDatum
    phi: Tuple[int, ...]

    @property
    def group(self) -> FiniteGroup:
        return self.datum.group

    @property
    def sigma(self) -> CosetSpace:
        return self.datum.sigma

    @property
    def g_dim(self) -> int:
        return self.datum.g_dim


@dataclass(frozen=True)
class ReflexData:
    h_e: Subgroup
    reflex_degree: int
    phi_e: CmType
    phi_k: Tuple[int, ...]

    def phi_k_inverse(self) -> Tuple[int, ...]:
        group = self.phi_e.group
        return tuple(sorted(group.inverse[g] for g in self.phi_k))


def validate_cm_type(datum: CmFieldDatum, phi: Sequence[int]) -> CmType:
    """
    Check phi and c*phi partition the embeddings.

    Raises:
        CmTypeError: IndexOutOfRange, NotDisjointFromConjugate or
            WrongCardinality.
    """
    count = datum.sigma.coset_count
    if not isinstance(phi, (list, tuple)) or any(isinstance(j, bool) or not isinstance(j, int) for j in phi):
        raise CmTypeError("NotAnIndexList", f"phi must be a list of coset indices, got {phi!r}")
    chosen = sorted(set(phi))
    bad = [j for j in chosen if not 0 <= j < count]
    if bad:
        raise CmTypeError("IndexOutOfRange", f"cosets {bad} outside 0..{count - 1}")
    members = set(chosen)
    for j in chosen:
        if datum.conjugate_coset(j) in members:
            raise CmTypeError("NotDisjointFromConjugate",
                              f"coset {j} and its conjugate {datum.conjugate_coset(j)} are both in phi")
    if len(chosen) != datum.g_dim:
        raise CmTypeError("WrongCardinality", f"|phi| = {len(chosen)}, expected {datum.g_dim}")
    return CmType(datum, tuple(chosen))


def hodge_cocharacter(t: CmType) -> Tuple[int, ...]:
    """mu = sum of phi^vee over phi in Phi."""
    members = set(t.phi)
    return tuple(1 if j in members else 0 for j in range(t.sigma.coset_count))


def translate(space: CosetSpace, tau: int, v: Sequence[int]) -> Tuple[int, ...]:
    if len(v) != space.coset_count:
        raise LatticeError(f"vector of length {len(v)} on {space.coset_count} cosets")
    out = [0] * space.coset_count
    for j, x in enumerate(v):
        out[space.act(tau, j)] = int(x)
    return tuple(out)


def galois_translate(t: CmType, tau: int, v: Sequence[int]) -> Tuple[int, ...]:
    """Move the coefficient of phi^vee to (tau phi)^vee."""
    return translate(t.sigma, t.group.check_index(tau), v)


def reflex_subgroup(t: CmType) -> Subgroup:
    space = t.sigma
    target = set(t.phi)
    stabilizer = tuple(
        s for s in t.group.elements()
        if {space.act(s, j) for j in t.phi} == target
    )
    return Subgroup(t.group, stabilizer)


def reflex_type(t: CmType) -> ReflexData:
    """
    Reflex subgroup H_E, the lift Phi_k and the reflex type Phi_E on G/H_E.

    Raises:
        InternalStabilityViolation: If Phi_k^-1 * H_E != Phi_k^-1.
    """
    group = t.group
    h_e = reflex_subgroup(t)
    members = set(t.phi)
    phi_k = tuple(g for g in group.elements() if t.sigma.coset_of[g] in members)
    phi_k_inv = {group.inverse[g] for g in phi_k}
    for x in sorted(phi_k_inv):
        for h in h_e.elements:
            if group.mul[x][h] not in phi_k_inv:
                raise InternalStabilityViolation(
                    f"{x}*{h} leaves Phi_k^-1 for phi={list(t.phi)}")

    datum_e = validate_cm_datum(group, h_e, t.datum.c)
    phi_e = sorted({datum_e.sigma.coset_of[x] for x in phi_k_inv})
    logger.debug(f"Reflex of phi={list(t.phi)}: |H_E|={h_e.order}, phi_E={phi_e}")
    return ReflexData(
        h_e=h_e,
        reflex_degree=group.order // h_e.order,
        phi_e=validate_cm_type(datum_e, phi_e),
        phi_k=phi_k,
    )


def norm_pushforward(S: Sequence[int], source: CosetSpace, target: CosetSpace) -> LatticeMap:
    """
    Cocharacter map of x -> prod_{sigma in S} sigma(x) from T^source to T^target.

    Source basis vector tau^vee goes to sum_{sigma in S} (tau sigma^-1)^vee,
    read off in target coordinates.

    Raises:
        NotUnionOfCosets: If S is not right stable under the source subgroup
            (the map would depend on coset representatives) or not left
            stable under the target subgroup (the image would leave
            X_*(T^target)).
    """
    group = source.group
    elements = sorted({group.check_index(s) for s in S})
    members = set(elements)
    for s in elements:
        for h in source.subgroup.elements:
            if group.mul[s][h] not in members:
                raise NotUnionOfCosets(f"S is not right stable under the source subgroup: {s}*{h}")
        for h in target.subgroup.elements:
            if group.mul[h][s] not in members:
                raise NotUnionOfCosets(f"S is not left stable under the target subgroup: {h}*{s}")

    matrix = np.zeros((target.coset_count, source.coset_count), dtype=object)
    for j, tau in enumerate(source.rep):
        for s in elements:
            g = group.mul[tau][group.inverse[s]]
            k = target.coset_of[g]
            # the image is constant on target cosets; count each coset once
            if target.rep[k] == g:
                matrix[k, j] += 1
    return LatticeMap(source.coset_count, target.coset_count,
                      tuple(tuple(int(x) for x in row) for row in matrix))


def galois_closure_space(group: FiniteGroup) -> CosetSpace:
    return coset_space(group, trivial_subgroup(group))


def reflex_norm_map(t: CmType, reflex: Optional[ReflexData] = None) -> LatticeMap:
    """psi: T^k -> T^K, the norm over Phi_k^-1."""
    reflex = reflex or reflex_type(t)
    return norm_pushforward(reflex.phi_k_inverse(), galois_closure_space(t.group), t.sigma)


def reflex_field_norm(t: CmType, reflex: Optional[ReflexData] = None) -> LatticeMap:
    """N_{k/E}: T^k -> T^E."""
    reflex = reflex or reflex_type(t)
    return norm_pushforward(reflex.h_e.elements, galois_closure_space(t.group), reflex.phi_e.sigma)


def reflex_type_norm(t: CmType, reflex: Optional[ReflexData] = None) -> LatticeMap:
    """N_{Phi_E}: T^E -> T^K, built from the cosets of Phi_E."""
    reflex = reflex or reflex_type(t)
    space_e = reflex.phi_e.sigma
    chosen = set(reflex.phi_e.phi)
    lift = [g for g in t.group.elements() if space_e.coset_of[g] in chosen]
    return norm_pushforward(lift, space_e, t.sigma)


def fiber_embedding(coarse: CosetSpace, fine: CosetSpace) -> LatticeMap:
    """
    The inclusion X_*(T^K') -> X_*(T^K) for K' inside K, i.e. H inside H'.

    A coarse basis vector goes to the sum of the fine cosets in its fiber.
    """
    if not set(fine.subgroup.elements) <= set(coarse.subgroup.elements):
        raise LatticeError("the fine subgroup must be contained in the coarse subgroup")
    matrix = [[0] * coarse.coset_count for _ in range(fine.coset_count)]
    for j in range(fine.coset_count):
        matrix[j][coarse.coset_of[fine.rep[j]]] = 1
    return LatticeMap(coarse.coset_count, fine.coset_count, tuple(tuple(row) for row in matrix))


def phi_stabilizer(t: CmType) -> Subgroup:
    """Right stabilizer {g : Phi_k g = Phi_k}; contains H and never c."""
    group = t.group
    members = set(t.phi)
    phi_k = [g for g in group.elements() if t.sigma.coset_of[g] in members]
    phi_k_set = set(phi_k)
    return Subgroup(group, tuple(
        g for g in group.elements()
        if all(group.mul[x][g] in phi_k_set for x in phi_k)
    ))


def primitive_descent(t: CmType) -> Optional[Tuple[Subgroup, CmType]]:
    """
    Largest H' containing H such that Phi is a union of fibers of G/H -> G/H'.

    Every such H' stabilizes Phi_k on the right, so the largest one is the
    right stabilizer itself. Returns None when it equals H.
    """
    h_prime = phi_stabilizer(t)
    if h_prime.order == t.datum.h.order:
        return None
    datum = validate_cm_datum(t.group, h_prime, t.datum.c)
    phi = sorted({datum.sigma.coset_of[t.sigma.rep[j]] for j in t.phi})
    return h_prime, validate_cm_type(datum, phi)


def is_primitive(t: CmType) -> bool:
    return primitive_descent(t) is None


def describe_type(t: CmType) -> str:
    return "+".join(str(j) for j in t.phi)


def subgroups_above(group: FiniteGroup, h: Subgroup, subgroups: Sequence[Subgroup]) -> List[Subgroup]:
    base = set(h.elements)
    return [s for s in subgroups if base <= set(s.elements)]
