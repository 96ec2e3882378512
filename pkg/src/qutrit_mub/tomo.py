"""Simulated mutually unbiased measurements and state reconstruction.

With the d + 1 bases of a complete MUB set, the exact Born probabilities
``p[r, k] = Tr(P_k^r rho)`` invert linearly:
``rho = sum_r sum_k p[r, k] P_k^r - I``.
The Gell-Mann expectation-value scheme is kept as the baseline.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import cxla
from .cxla import TOL_EIG
from .mub import MubSet, projector_stack


class TomographyError(ValueError):
    pass


@dataclass
class DensityMatrix:
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.matrix = cxla.as_matrix(self.matrix)
        if self.validate:
            check_density(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        return {"dim": self.dim, "matrix": encode_matrix(self.matrix)}

    @classmethod
    def from_json(cls, data: dict) -> DensityMatrix:
        m = decode_matrix(data["matrix"])
        if m.shape != (int(data["dim"]),) * 2:
            raise TomographyError(f"matrix shape {m.shape} does not match dim {data['dim']}")
        return cls(m)


def check_density(m: np.ndarray) -> None:
    """Raise TomographyError naming the first violated density-matrix invariant."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise TomographyError(f"not square: shape {m.shape}")
    if not cxla.is_hermitian(m, TOL_EIG):
        raise TomographyError("not Hermitian within 1e-9")
    tr = np.trace(m).real
    if abs(tr - 1.0) > TOL_EIG:
        raise TomographyError(f"trace is {tr:.12g}, not 1 within 1e-9")
    lo = cxla.hermitian_eig(m)[0][-1]
    if lo < -1e-8:
        raise TomographyError(f"not positive semidefinite: smallest eigenvalue {lo:.3g}")


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    arr = np.array(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise TomographyError("matrix entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def load_state(path) -> DensityMatrix:
    return DensityMatrix.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def save_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(rho.to_json()) + "\n", encoding="utf-8")


def random_density_matrix(d: int, rng: np.random.Generator) -> DensityMatrix:
    """Ginibre state G G^dag / Tr(G G^dag)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def pure_state(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


@dataclass
class ProbabilityTable:
    labels: list[str]
    rows: np.ndarray  # (n_bases, d)
    shots: int | None = None  # None: exact probabilities

    def to_json(self) -> dict:
        return {
            "labels": self.labels,
            "rows": self.rows.tolist(),
            "shots": "exact" if self.shots is None else self.shots,
        }


def probabilities(rho: DensityMatrix, mubs: MubSet) -> ProbabilityTable:
    if rho.dim != mubs.dim:
        raise TomographyError(f"state dim {rho.dim} != basis dim {mubs.dim}")
    # p[r, k] = <a_k^r| rho |a_k^r>
    rows = np.array([
        np.einsum("lk,lm,mk->k", b.vectors.conj(), rho.matrix, b.vectors).real
        for b in mubs.bases
    ])
    return ProbabilityTable(mubs.labels(), rows)


def sample(table: ProbabilityTable, shots_per_basis: int, rng_seed) -> ProbabilityTable:
    """Empirical frequencies from ``shots_per_basis`` draws per basis."""
    if shots_per_basis < 1:
        raise TomographyError("shots_per_basis must be >= 1")
    rng = np.random.default_rng(rng_seed)
    p = np.clip(table.rows, 0.0, None)
    p = p / p.sum(axis=1, keepdims=True)
    counts = rng.multinomial(shots_per_basis, p)
    return ProbabilityTable(list(table.labels), counts / shots_per_basis, shots_per_basis)


def reconstruct_mub(table: ProbabilityTable, mubs: MubSet) -> np.ndarray:
    """Linear estimate sum p P - I; Hermitian with unit trace, not necessarily positive."""
    if table.rows.shape != (len(mubs), mubs.dim) or table.labels != mubs.labels():
        raise TomographyError("probability table does not line up with the basis set")
    if len(mubs) != mubs.dim + 1:
        raise TomographyError(f"need d + 1 = {mubs.dim + 1} bases, got {len(mubs)}")
    est = -np.eye(mubs.dim, dtype=complex)
    for row, basis in zip(table.rows, mubs.bases):
        est += np.einsum("k,kij->ij", row, projector_stack(basis))
    return est


def project_physical(rho_hat) -> np.ndarray:
    """Closest density matrix in the eigenvalue-clipping sense.

    Negative eigenvalues are zeroed and their weight is taken uniformly
    from the remaining ones, smallest first, until none go negative.
    """
    m = cxla.as_matrix(rho_hat)
    w, v = cxla.hermitian_eig(m)  # descending
    if w[-1] >= 0:
        return m
    w = w.copy()
    i = len(w)
    acc = 0.0
    while i > 0 and w[i - 1] + acc / i < 0:
        acc += w[i - 1]
        w[i - 1] = 0.0
        i -= 1
    w[:i] += acc / i
    return (v * w) @ v.conj().T


def gellmann_matrices() -> list[np.ndarray]:
    """lambda_0 = I followed by the eight SU(3) generators, Tr(l_j l_k) = 2 delta_jk."""
    mats = [np.eye(3, dtype=complex)]
    for j, k in ((0, 1), (0, 2), (1, 2)):
        s = np.zeros((3, 3), dtype=complex)
        s[j, k] = s[k, j] = 1
        a = np.zeros((3, 3), dtype=complex)
        a[j, k], a[k, j] = -1j, 1j
        mats += [s, a]
    mats.append(np.diag([1, -1, 0]).astype(complex))
    mats.append(np.diag([1, 1, -2]).astype(complex) / np.sqrt(3))
    # conventional numbering: l1..l3 on the (0,1) block, l4,l5 on (0,2), l6,l7 on (1,2), l8
    return [mats[0], mats[1], mats[2], mats[7], mats[3], mats[4], mats[5], mats[6], mats[8]]


@dataclass
class TomographyResult:
    method: str
    measurement_count: int
    reconstructed: np.ndarray
    projected: np.ndarray | None = None
    probabilities: ProbabilityTable | None = None
    frobenius_error: float | None = None
    pure_state_fidelity: float | None = None
    shots: int | None = None
    seed: int | None = None
    coefficients: np.ndarray | None = field(default=None, repr=False)

    @property
    def estimate(self) -> np.ndarray:
        return self.projected if self.projected is not None else self.reconstructed

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "measurement_count": self.measurement_count,
            "shots": "exact" if self.shots is None else self.shots,
            "seed": self.seed,
            "metrics": {
                "frobenius_error": self.frobenius_error,
                "pure_state_fidelity": self.pure_state_fidelity,
            },
            "raw_estimate": encode_matrix(self.reconstructed),
            "projected_estimate": None if self.projected is None else encode_matrix(self.projected),
            "probabilities": None if self.probabilities is None else self.probabilities.to_json(),
        }


def mub_measurement_count(n_qutrits: int) -> int:
    return 3**n_qutrits + 1


def gellmann_measurement_count(n_qutrits: int) -> int:
    return 3 ** (2 * n_qutrits) - 1


def reconstruct_gellmann(rho: DensityMatrix, n_qutrits: int) -> TomographyResult:
    """Expectation values of every lambda_j (x) ... (x) lambda_k and the rebuilt state.

    The generators have Tr(l^2) = 2, so each non-identity factor carries
    an extra 3/2 when the state is reassembled with the 1/3^n prefactor.
    """
    if n_qutrits not in (1, 2):
        raise TomographyError(f"Gell-Mann baseline supports 1 or 2 qutrits, got {n_qutrits}")
    d = 3**n_qutrits
    if rho.dim != d:
        raise TomographyError(f"state dim {rho.dim} != 3^{n_qutrits}")
    lam = gellmann_matrices()
    est = np.zeros((d, d), dtype=complex)
    coeffs = np.zeros((9,) * n_qutrits)
    for idx in product(range(9), repeat=n_qutrits):
        op = cxla.kron(*(lam[i] for i in idx))
        r = np.trace(rho.matrix @ op).real
        coeffs[idx] = r
        weight = np.prod([1.0 if i == 0 else 1.5 for i in idx])
        est += weight * r * op
    est /= d
    return TomographyResult(
        "gellmann", gellmann_measurement_count(n_qutrits), est,
        frobenius_error=cxla.frobenius(est - rho.matrix), coefficients=coeffs,
    )


def _is_pure(m: np.ndarray) -> bool:
    return abs(np.trace(m @ m).real - 1.0) < TOL_EIG


def run_experiment(rho: DensityMatrix, mubs: MubSet, shots: int | None = None, seed=None,
                   project: bool = False) -> TomographyResult:
    """Probabilities, optional finite-shot sampling, linear inversion, optional projection."""
    table = probabilities(rho, mubs)
    if shots is not None:
        table = sample(table, shots, seed)
    raw = reconstruct_mub(table, mubs)
    projected = project_physical(raw) if project else None
    est = projected if projected is not None else raw
    fidelity = None
    if _is_pure(rho.matrix):
        w, v = cxla.hermitian_eig(rho.matrix)
        psi = v[:, 0]
        fidelity = float((psi.conj() @ est @ psi).real)
    return TomographyResult(
        "mub", len(mubs), raw, projected, table,
        frobenius_error=cxla.frobenius(est - rho.matrix),
        pure_state_fidelity=fidelity, shots=shots, seed=seed,
    )


def trial_seed(master_seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, trial])


def error_trials(mubs: MubSet, shots: int, trials: int, master_seed: int = 0,
                 project: bool = False) -> np.ndarray:
    """Frobenius errors of ``trials`` independent runs, each on its own Ginibre state.

    Trial ``t`` draws its state and its samples from seeds derived from
    ``(master_seed, t)`` only, so results do not depend on run order.
    """
    errs = np.empty(trials)
    for t in range(trials):
        state_seq, sample_seq = trial_seed(master_seed, t).spawn(2)
        rho = random_density_matrix(mubs.dim, np.random.default_rng(state_seq))
        errs[t] = run_experiment(rho, mubs, shots, sample_seq, project).frobenius_error
    return errs
