"""
Sublattices of Z^N in canonical row Hermite normal form.

Matrices are numpy arrays with dtype=object so every entry stays a Python
int; nothing can overflow. Lattice values keep their basis as tuples, so two
lattices are equal exactly when their canonical bases are identical.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class LatticeError(ValueError):
    """Raised on shape or ambient-rank mismatches between lattice arguments"""
    pass


def integer_matrix(rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> np.ndarray:
    """Copy rows into an object array of Python ints, shape (len(rows), ncols)."""
    rows = [list(r) for r in rows]
    if ncols is None:
        if not rows:
            raise LatticeError("ambient rank is required for an empty row list")
        ncols = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != ncols:
            raise LatticeError(f"row {i} has length {len(r)}, expected {ncols}")
    out = np.empty((len(rows), ncols), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if isinstance(x, (float, np.floating)) and x != int(x):
                raise LatticeError(f"non-integral entry {x!r} at ({i}, {j})")
            out[i, j] = int(x)
    return out


def _as_tuples(A: np.ndarray) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in A)


@dataclass(frozen=True)
class IntegerLattice:
    ambient_rank: int
    basis: Tuple[Tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        return integer_matrix(self.basis, self.ambient_rank)

    def pivots(self) -> List[int]:
        return [next(j for j, x in enumerate(row) if x != 0) for row in self.basis]

    def to_json(self) -> List[List[int]]:
        return [list(row) for row in self.basis]


@dataclass(frozen=True)
class LatticeMap:
    """Integer matrix acting on column vectors: Z^source_rank -> Z^target_rank."""
    source_rank: int
    target_rank: int
    matrix: Tuple[Tuple[int, ...], ...]

    @property
    def array(self) -> np.ndarray:
        return integer_matrix(self.matrix, self.source_rank)

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.matrix)

    def apply(self, v: Sequence[int]) -> Tuple[int, ...]:
        if len(v) != self.source_rank:
            raise LatticeError(f"vector of length {len(v)} given to a map from rank {self.source_rank}")
        return tuple(sum(a * int(x) for a, x in zip(row, v)) for row in self.matrix)

    def compose(self, first: "LatticeMap") -> "LatticeMap":
        """self after first."""
        if first.target_rank != self.source_rank:
            raise LatticeError(f"cannot compose rank {first.target_rank} output with rank {self.source_rank} input")
        if self.target_rank and self.source_rank and first.source_rank:
            product = self.array.dot(first.array)
        else:
            product = np.zeros((self.target_rank, first.source_rank), dtype=object)
        return LatticeMap(first.source_rank, self.target_rank, _as_tuples(product))

    def dual(self) -> "LatticeMap":
        """The transpose, acting on characters in the opposite direction."""
        return LatticeMap(self.target_rank, self.source_rank, _as_tuples(self.array.T))

    def image(self) -> IntegerLattice:
        return hnf_canonical(self.array.T, self.target_rank)


def lattice_map(matrix: Sequence[Sequence[int]], source_rank: int, target_rank: int) -> LatticeMap:
    A = integer_matrix(matrix, source_rank)
    if A.shape[0] != target_rank:
        raise LatticeError(f"matrix has {A.shape[0]} rows, expected {target_rank}")
    return LatticeMap(source_rank, target_rank, _as_tuples(A))


def identity_map(n: int) -> LatticeMap:
    return LatticeMap(n, n, _as_tuples(np.eye(n, dtype=object)))


def _hnf_rows(A: np.ndarray) -> np.ndarray:
    A = A.copy()
    m, n = A.shape
    p = 0
    for col in range(n):
        if p == m:
            break
        has_pivot = False
        while True:
            nonzero = [i for i in range(p, m) if A[i, col] != 0]
            if not nonzero:
                break
            has_pivot = True
            k = min(nonzero, key=lambda i: abs(A[i, col]))
            if k != p:
                A[[p, k]] = A[[k, p]]
            clean = True
            for i in range(p + 1, m):
                if A[i, col] != 0:
                    A[i] = A[i] - (A[i, col] // A[p, col]) * A[p]
                    if A[i, col] != 0:
                        clean = False
            if clean:
                break
        if not has_pivot:
            continue
        if A[p, col] < 0:
            A[p] = -A[p]
        for i in range(p):
            q = A[i, col] // A[p, col]
            if q:
                A[i] = A[i] - q * A[p]
        p += 1
    return A[:p]


def hnf_canonical(rows, ambient_rank: Optional[int] = None) -> IntegerLattice:
    """
    Canonical row Hermite normal form of the row span.

    Pivots are positive, entries above each pivot lie in [0, pivot), and
    zero rows are dropped. An empty row list needs ambient_rank.
    """
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        if ambient_rank is not None and rows.shape[1] != ambient_rank:
            raise LatticeError(f"rows have length {rows.shape[1]}, expected {ambient_rank}")
        A = integer_matrix(rows.tolist(), rows.shape[1])
    else:
        A = integer_matrix(rows, ambient_rank)
    n = A.shape[1]
    if A.shape[0] == 0:
        return IntegerLattice(n, ())
    return IntegerLattice(n, _as_tuples(_hnf_rows(A)))


def zero_lattice(n: int) -> IntegerLattice:
    return IntegerLattice(n, ())


def full_lattice(n: int) -> IntegerLattice:
    return hnf_canonical(np.eye(n, dtype=object), n)


def rank(L: IntegerLattice) -> int:
    return L.rank


def smith_normal_form(A) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Smith normal form with transforms.

    Args:
        A: an m x n integer matrix.

    Returns:
        (U, D, V, V_inv) with U @ A @ V == D, U and V unimodular, V @ V_inv
        the identity, D diagonal with nonnegative entries, each dividing the
        next, nonzero entries first.
    """
    D = integer_matrix(A.tolist() if isinstance(A, np.ndarray) else A,
                       A.shape[1] if isinstance(A, np.ndarray) else None)
    m, n = D.shape
    U = np.eye(m, dtype=object)
    V = np.eye(n, dtype=object)
    V_inv = np.eye(n, dtype=object)

    def row_sub(i, t, q):
        # row i -= q * row t
        D[i] = D[i] - q * D[t]
        U[i] = U[i] - q * U[t]

    def col_sub(j, t, q):
        # col j -= q * col t
        D[:, j] = D[:, j] - q * D[:, t]
        V[:, j] = V[:, j] - q * V[:, t]
        V_inv[t] = V_inv[t] + q * V_inv[j]

    def move_to(t, i, j):
        if i != t:
            D[[t, i]] = D[[i, t]]
            U[[t, i]] = U[[i, t]]
        if j != t:
            D[:, [t, j]] = D[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
            V_inv[[t, j]] = V_inv[[j, t]]

    for t in range(min(m, n)):
        exhausted = False
        while True:
            nonzero = [(abs(D[i, j]), i, j) for i in range(t, m) for j in range(t, n) if D[i, j] != 0]
            if not nonzero:
                exhausted = True
                break
            _, i, j = min(nonzero)
            move_to(t, i, j)
            clean = True
            for i in range(t + 1, m):
                if D[i, t] != 0:
                    row_sub(i, t, D[i, t] // D[t, t])
                    clean = clean and D[i, t] == 0
            for j in range(t + 1, n):
                if D[t, j] != 0:
                    col_sub(j, t, D[t, j] // D[t, t])
                    clean = clean and D[t, j] == 0
            if not clean:
                continue
            offender = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                             if D[i, j] % D[t, t] != 0), None)
            if offender is None:
                break
            row_sub(t, offender[0], -1)
        if exhausted:
            break
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
    return U, D, V, V_inv


def elementary_divisors(L: IntegerLattice) -> List[int]:
    if L.rank == 0:
        return []
    _, D, _, _ = smith_normal_form(L.matrix)
    return [int(D[i, i]) for i in range(L.rank)]


def saturation_index(L: IntegerLattice) -> int:
    """Index of L in its saturation, i.e. the order of the torsion of Z^N / L."""
    return int(np.prod(elementary_divisors(L), dtype=object)) if L.rank else 1


def saturate(L: IntegerLattice) -> IntegerLattice:
    """The lattice (L tensor Q) intersected with Z^N."""
    if L.rank == 0:
        return L
    _, _, _, V_inv = smith_normal_form(L.matrix)
    # L = U^-1 D V^-1, so the first rank rows of V^-1 span L tensor Q over Z
    return hnf_canonical(V_inv[:L.rank], L.ambient_rank)


def annihilator(L: IntegerLattice) -> IntegerLattice:
    """All chi with <chi, gamma> = 0 for every gamma in L; always saturated."""
    n = L.ambient_rank
    if L.rank == 0:
        return full_lattice(n)
    _, _, V, _ = smith_normal_form(L.matrix)
    return hnf_canonical(V[:, L.rank:].T, n)


def _check_same_ambient(L1: IntegerLattice, L2: IntegerLattice) -> None:
    if L1.ambient_rank != L2.ambient_rank:
        raise LatticeError(f"ambient ranks differ: {L1.ambient_rank} vs {L2.ambient_rank}")


def lattice_equal(L1: IntegerLattice, L2: IntegerLattice) -> bool:
    _check_same_ambient(L1, L2)
    return L1.basis == L2.basis


def lattice_contains(L: IntegerLattice, v: Sequence[int]) -> bool:
    if len(v) != L.ambient_rank:
        raise LatticeError(f"vector of length {len(v)} tested against ambient rank {L.ambient_rank}")
    residual = [int(x) for x in v]
    for row, p in zip(L.basis, L.pivots()):
        if residual[p] % row[p] != 0:
            return False
        q = residual[p] // row[p]
        if q:
            residual = [a - q * b for a, b in zip(residual, row)]
    return not any(residual)


def lattice_includes(L: IntegerLattice, M: IntegerLattice) -> bool:
    """True when M is a sublattice of L."""
    _check_same_ambient(L, M)
    return all(lattice_contains(L, row) for row in M.basis)


def pair(chi: Sequence[int], gamma: Sequence[int]) -> int:
    """<chi, gamma> for dual coordinates: the dot product."""
    if len(chi) != len(gamma):
        raise LatticeError(f"pairing vectors of lengths {len(chi)} and {len(gamma)}")
    return sum(int(a) * int(b) for a, b in zip(chi, gamma))


def is_equivariant(lmap: LatticeMap,
                   source_perms: Sequence[Sequence[int]],
                   target_perms: Sequence[Sequence[int]]) -> bool:
    """
    Check the map commutes with coordinate permutations.

    source_perms[g][j] is where g sends basis vector j of the source, and
    likewise for the target; both lists are indexed by the same group.
    """
    if len(source_perms) != len(target_perms):
        raise LatticeError("source and target actions must be indexed by the same group")
    for ps, pt in zip(source_perms, target_perms):
        for i in range(lmap.target_rank):
            for j in range(lmap.source_rank):
                if lmap.matrix[pt[i]][ps[j]] != lmap.matrix[i][j]:
                    return False
    return True
