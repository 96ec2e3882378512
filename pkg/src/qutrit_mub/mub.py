"""Mutually unbiased bases for d = 3, 9, 27 built over GF(3^n).

Vector ``k`` of basis ``r`` has component ``l`` equal to
``omega ** tr(r*l**2 + k*l) / sqrt(d)`` with ``omega = exp(2 pi i / 3)``;
``r``, ``k`` and ``l`` run over the field in its enumeration order.  The
computational basis is prepended, giving d + 1 bases.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gf
from .cxla import TOL_EQ, LinAlgDomainError

# exact cube roots of unity; exponents are always reduced mod 3 first
OMEGA_POWERS = np.array([1.0, complex(-0.5, np.sqrt(3) / 2), complex(-0.5, -np.sqrt(3) / 2)])
OMEGA = OMEGA_POWERS[1]


@dataclass(frozen=True)
class Basis:
    label: str
    vectors: np.ndarray = field(repr=False)  # columns are the basis vectors
    provenance: str = "field-construction"

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k]


@dataclass(frozen=True)
class MubSet:
    dim: int
    bases: tuple[Basis, ...]
    field_spec: gf.FieldSpec | None = None

    def __len__(self):
        return len(self.bases)

    def labels(self) -> list[str]:
        return [b.label for b in self.bases]


def standard_basis(d: int, label: str = "B0", provenance: str = "field-construction") -> Basis:
    return Basis(label, np.eye(d, dtype=complex), provenance)


def phase_exponents(spec: gf.FieldSpec) -> np.ndarray:
    """Integer table ``E[r, k, l] = tr(r*l^2 + k*l)`` over enumeration indices."""
    elems = spec.enumeration
    sq = [e * e for e in elems]
    # tr is additive, so tr(r l^2 + k l) = tr(r l^2) + tr(k l)
    quad = np.array([[gf.trace(r * s) for s in sq] for r in elems], dtype=np.int64)
    lin = np.array([[gf.trace(k * l) for l in elems] for k in elems], dtype=np.int64)
    return (quad[:, None, :] + lin[None, :, :]) % 3


def build_field_mubs(spec: gf.FieldSpec | int) -> MubSet:
    if isinstance(spec, int):
        spec = gf.field_spec(spec)
    if not isinstance(spec, gf.FieldSpec):
        raise gf.FieldError(f"expected a FieldSpec, got {type(spec).__name__}")
    d = spec.order
    exps = phase_exponents(spec)
    bases = [standard_basis(d)]
    for ri in range(d):
        # rows: component l, columns: vector k
        vecs = OMEGA_POWERS[exps[ri].T] / np.sqrt(d)
        bases.append(Basis(f"B{ri + 1}", vecs))
    return MubSet(d, tuple(bases), spec)


@dataclass
class PairResult:
    first: str
    second: str
    passed: bool
    deviation: float


@dataclass
class UnbiasednessReport:
    dim: int
    pairs: list[PairResult]
    within: list[PairResult]  # orthonormality of each basis with itself
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.pairs) and all(p.passed for p in self.within)

    @property
    def pairs_checked(self) -> int:
        return len(self.pairs)

    @property
    def pairs_passed(self) -> int:
        return sum(p.passed for p in self.pairs)

    def failures(self) -> list[PairResult]:
        return [p for p in self.within + self.pairs if not p.passed]


def overlap_deviations(bases) -> np.ndarray:
    """``D[s, r]`` = worst |<a_j^s|a_k^r>|^2 deviation from 1/d (s != r) or delta_jk."""
    bases = list(bases)
    d = bases[0].dim
    stack = np.stack([b.vectors for b in bases])  # (m, d, d)
    gram = np.einsum("sli,rlj->srij", stack.conj(), stack)
    sq = np.abs(gram) ** 2
    target = np.full(sq.shape, 1.0 / d)
    idx = np.arange(len(bases))
    target[idx, idx] = np.eye(d)
    return np.max(np.abs(sq - target), axis=(2, 3))


def verify_unbiased(mubs, tol: float = TOL_EQ) -> UnbiasednessReport:
    """Check every basis pair of ``mubs`` (a MubSet or a sequence of Basis)."""
    bases = list(mubs.bases if isinstance(mubs, MubSet) else mubs)
    if not bases:
        return UnbiasednessReport(0, [], [], 0.0, tol)
    dev = overlap_deviations(bases)
    m = len(bases)
    pairs = [
        PairResult(bases[s].label, bases[r].label, bool(dev[s, r] <= tol), float(dev[s, r]))
        for s in range(m)
        for r in range(s + 1, m)
    ]
    within = [
        PairResult(b.label, b.label, bool(dev[i, i] <= tol), float(dev[i, i]))
        for i, b in enumerate(bases)
    ]
    return UnbiasednessReport(bases[0].dim, pairs, within, float(dev.max()), tol)


def projectors(basis: Basis, tol: float = TOL_EQ) -> list[np.ndarray]:
    v = basis.vectors
    if np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))) > tol:
        raise LinAlgDomainError(f"basis {basis.label} is not orthonormal")
    return [np.outer(v[:, k], v[:, k].conj()) for k in range(v.shape[1])]


def projector_stack(basis: Basis) -> np.ndarray:
    return np.array(projectors(basis))


def match_permutation(a: Basis, b: Basis, tol: float = 1e-8) -> list[int] | None:
    """Column permutation p with b[:, p[k]] ~ a[:, k] up to phase, or None.

    Two bases are the same measurement when the matrix of absolute overlaps
    is a permutation matrix.
    """
    if a.dim != b.dim:
        return None
    absov = np.abs(a.vectors.conj().T @ b.vectors)
    perm = [int(j) for j in np.argmax(absov, axis=1)]
    if sorted(perm) != list(range(a.dim)):
        return None
    pm = np.zeros_like(absov)
    pm[np.arange(a.dim), perm] = 1.0
    if np.max(np.abs(absov - pm)) > tol:
        return None
    return perm


def same_basis(a: Basis, b: Basis, tol: float = 1e-8) -> bool:
    return match_permutation(a, b, tol) is not None


def phase_match_deviation(a: Basis, b: Basis) -> float:
    """Largest |1 - |<a_k|b_p(k)>|| over the best column pairing (inf if none)."""
    absov = np.abs(a.vectors.conj().T @ b.vectors)
    perm = np.argmax(absov, axis=1)
    if len(set(perm.tolist())) != a.dim:
        return float("inf")
    off = absov.copy()
    off[np.arange(a.dim), perm] = 0.0
    return float(max(np.max(np.abs(1.0 - absov[np.arange(a.dim), perm])), np.max(off)))


def single_qutrit_fixtures() -> list[Basis]:
    """The three non-computational qutrit bases written out explicitly."""
    w, wc = OMEGA_POWERS[1], OMEGA_POWERS[2]
    s = 1 / np.sqrt(3)
    raw = {
        "B1": [[1, 1, 1], [1, w, wc], [1, wc, w]],
        "B2": [[w, 1, 1], [1, w, 1], [1, 1, w]],
        "B3": [[wc, 1, 1], [1, wc, 1], [1, 1, wc]],
    }
    return [
        Basis(label, s * np.array(vs, dtype=complex).T, "explicit-fixture")
        for label, vs in raw.items()
    ]


def match_bases(candidates, references, tol: float = 1e-8) -> dict[str, str | None]:
    """For each reference basis, the label of the candidate equal to it (or None)."""
    out = {}
    for ref in references:
        out[ref.label] = next((c.label for c in candidates if same_basis(ref, c, tol)), None)
    return out


def _encode(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in col] for col in m.T]


def _decode(cols) -> np.ndarray:
    arr = np.array(cols, dtype=float)
    return (arr[..., 0] + 1j * arr[..., 1]).T


def to_json(mubs: MubSet) -> dict:
    return {
        "dim": mubs.dim,
        "field": mubs.field_spec.to_dict() if mubs.field_spec else None,
        "bases": [
            {"label": b.label, "provenance": b.provenance, "vectors": _encode(b.vectors)}
            for b in mubs.bases
        ],
    }


def from_json(data: dict) -> MubSet:
    spec = gf.FieldSpec.from_dict(data["field"]) if data.get("field") else None
    bases = tuple(
        Basis(b["label"], _decode(b["vectors"]), b.get("provenance", "field-construction"))
        for b in data["bases"]
    )
    return MubSet(int(data["dim"]), bases, spec)


def save(mubs: MubSet, path) -> None:
    Path(path).write_text(json.dumps(to_json(mubs)) + "\n", encoding="utf-8")


def load(path) -> MubSet:
    return from_json(json.loads(Path(path).read_text(encoding="utf-8")))
