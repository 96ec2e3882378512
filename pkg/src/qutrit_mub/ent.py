"""Entanglement structure of basis vectors and whole bases (two or three qutrits)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cxla import TOL_RANK, singular_values
from .mub import Basis, MubSet

CLASSES = ("fully-separable", "biseparable", "genuinely-entangled")
_RANK = {c: i for i, c in enumerate(CLASSES)}
BIPARTITIONS = {2: ("1|2",), 3: ("1|23", "2|13", "3|12")}


class EntanglementError(ValueError):
    pass


def schmidt_rank(v, dims: tuple[int, int], tol: float = TOL_RANK) -> int:
    v = np.asarray(v, dtype=complex).ravel()
    da, db = dims
    if v.size != da * db:
        raise EntanglementError(f"vector of length {v.size} cannot split as {da}x{db}")
    return int(np.sum(singular_values(v.reshape(da, db)) > tol))


def bipartition_ranks(v, n_qutrits: int) -> tuple[int, ...]:
    """Schmidt rank across each single-qutrit cut, in BIPARTITIONS order."""
    if n_qutrits == 2:
        return (schmidt_rank(v, (3, 3)),)
    t = np.asarray(v, dtype=complex).reshape(3, 3, 3)
    return tuple(
        schmidt_rank(np.moveaxis(t, q, 0).reshape(3, 9), (3, 9)) for q in range(3)
    )


@dataclass(frozen=True)
class VectorClass:
    kind: str
    schmidt_ranks: tuple[int, ...]
    partition: str | None = None  # the separating cut, for biseparable vectors


def classify_vector(v, n_qutrits: int) -> VectorClass:
    if n_qutrits not in (2, 3):
        raise EntanglementError("classification needs 2 or 3 qutrits")
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != 3**n_qutrits:
        raise EntanglementError(f"vector length {v.size} != 3^{n_qutrits}")
    ranks = bipartition_ranks(v, n_qutrits)
    ones = [i for i, r in enumerate(ranks) if r == 1]
    if len(ones) == len(ranks):
        return VectorClass("fully-separable", ranks)
    if not ones:
        return VectorClass("genuinely-entangled", ranks)
    # two product cuts would force the third, so exactly one here
    return VectorClass("biseparable", ranks, BIPARTITIONS[n_qutrits][ones[0]])


@dataclass
class BasisClass:
    label: str
    kind: str
    uniform: bool
    vector_classes: list[VectorClass]
    n_qutrits: int

    def ranks_summary(self) -> dict[str, list[int]]:
        """Distinct Schmidt ranks seen on each cut across the basis."""
        return {
            cut: sorted({vc.schmidt_ranks[i] for vc in self.vector_classes})
            for i, cut in enumerate(BIPARTITIONS[self.n_qutrits])
        }


@dataclass
class StructureCensus:
    n_qutrits: int
    per_basis: list[BasisClass]

    @property
    def counts(self) -> tuple[int, int, int]:
        return tuple(sum(b.kind == c for b in self.per_basis) for c in CLASSES)

    @property
    def paper_tuple(self) -> tuple[int, ...]:
        """(separable, entangled) for two qutrits, (s, b, g) for three."""
        s, b, g = self.counts
        return (s, g) if self.n_qutrits == 2 else (s, b, g)

    @property
    def all_uniform(self) -> bool:
        return all(b.uniform for b in self.per_basis)

    def to_json(self) -> dict:
        return {
            "structure": list(self.counts),
            "per_basis": [
                {"label": b.label, "class": b.kind, "uniform": b.uniform,
                 "ranks_summary": b.ranks_summary()}
                for b in self.per_basis
            ],
        }


def classify_basis(basis: Basis, n_qutrits: int) -> BasisClass:
    vcs = [classify_vector(basis.vectors[:, k], n_qutrits) for k in range(basis.dim)]
    kind = max((vc.kind for vc in vcs), key=_RANK.__getitem__)
    return BasisClass(basis.label, kind, len({vc.kind for vc in vcs}) == 1, vcs, n_qutrits)


def census(bases, n_qutrits: int) -> StructureCensus:
    bases = list(bases.bases if isinstance(bases, MubSet) else bases)
    if n_qutrits not in (2, 3):
        raise EntanglementError("a census needs at least one bipartition (2 or 3 qutrits)")
    dims = {b.dim for b in bases}
    if dims - {3**n_qutrits}:
        raise EntanglementError(f"bases of dimension {sorted(dims)} for {n_qutrits} qutrits")
    return StructureCensus(n_qutrits, [classify_basis(b, n_qutrits) for b in bases])


# the five structures possible for three qutrits
THREE_QUTRIT_STRUCTURES = ((0, 12, 16), (1, 9, 18), (2, 6, 20), (3, 3, 22), (4, 0, 24))
