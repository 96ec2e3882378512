import numpy as np
import pytest

from qutrit_mub import tomo
from qutrit_mub.mub import build_field_mubs
from qutrit_mub.tomo import DensityMatrix, TomographyError


@pytest.fixture(scope="module")
def sets():
    return {d: build_field_mubs(d) for d in (3, 9, 27)}


def ginibre(d, seed):
    return tomo.random_density_matrix(d, np.random.default_rng(seed))


def test_probabilities_examples(sets):
    t = tomo.probabilities(DensityMatrix(np.eye(3) / 3), sets[3])
    assert np.allclose(t.rows, 1 / 3, atol=1e-15)
    t = tomo.probabilities(tomo.pure_state([1, 0, 0]), sets[3])
    assert np.allclose(t.rows[0], [1, 0, 0])
    assert np.allclose(t.rows[1:], 1 / 3, atol=1e-15)
    for d, s in sets.items():
        rows = tomo.probabilities(ginibre(d, d), s).rows
        assert np.max(np.abs(rows.sum(axis=1) - 1)) < 1e-10
        assert rows.min() >= -1e-12
    with pytest.raises(TomographyError):
        tomo.probabilities(ginibre(9, 0), sets[3])


def test_sample_examples():
    table = tomo.ProbabilityTable(["a", "b"], np.array([[1.0, 0, 0], [0.2, 0.3, 0.5]]))
    s = tomo.sample(table, 7, 1)
    assert s.shots == 7
    assert np.allclose(s.rows * 7, np.round(s.rows * 7))
    assert np.array_equal(s.rows[0], [1, 0, 0])
    assert np.array_equal(tomo.sample(table, 7, 1).rows, s.rows)
    with pytest.raises(TomographyError):
        tomo.sample(table, 0, 1)


def test_sample_million_shots(sets):
    # binomial sd at p = 1/3, N = 1e6 is 4.7e-4; 0.005 is over 10 sd
    table = tomo.probabilities(DensityMatrix(np.eye(3) / 3), sets[3])
    s = tomo.sample(table, 10**6, 123)
    assert np.max(np.abs(s.rows - 1 / 3)) < 0.005


def test_reconstruct_trivial_states(sets):
    for d, s in sets.items():
        for rho in (np.eye(d) / d, np.diag(np.eye(d)[0]).astype(complex)):
            est = tomo.reconstruct_mub(tomo.probabilities(DensityMatrix(rho), s), s)
            assert np.max(np.abs(est - rho)) < 1e-12


@pytest.mark.parametrize("d", [3, 9, 27])
def test_round_trip_random(sets, d):
    for seed in range(10):
        rho = ginibre(d, seed)
        est = tomo.reconstruct_mub(tomo.probabilities(rho, sets[d]), sets[d])
        assert np.linalg.norm(est - rho.matrix) < 1e-10


def test_linear_estimate_hermitian_unit_trace(sets):
    table = tomo.sample(tomo.probabilities(ginibre(9, 3), sets[9]), 20, 5)
    est = tomo.reconstruct_mub(table, sets[9])
    assert np.max(np.abs(est - est.conj().T)) < 1e-12
    assert abs(np.trace(est) - 1) < 1e-12


def test_reconstruct_rejects_misaligned(sets):
    table = tomo.probabilities(ginibre(3, 0), sets[3])
    table.labels = table.labels[::-1]
    with pytest.raises(TomographyError):
        tomo.reconstruct_mub(table, sets[3])


def test_project_physical():
    rho = ginibre(3, 11).matrix
    assert np.max(np.abs(tomo.project_physical(rho) - rho)) < 1e-10
    # clip -0.2, then take it out of the only remaining positive eigenvalue
    assert np.allclose(tomo.project_physical(np.diag([1.2, -0.2, 0.0])), np.diag([1, 0, 0]))
    # clip -0.3; 0.05 cannot absorb its share (-0.15) so it is zeroed too, 1.25 takes all
    assert np.allclose(tomo.project_physical(np.diag([1.25, 0.05, -0.3])), np.diag([1, 0, 0]))
    # -0.1 shared over 0.6 and 0.5
    assert np.allclose(tomo.project_physical(np.diag([0.6, 0.5, -0.1])), np.diag([0.55, 0.45, 0]))


def test_project_physical_on_noisy_estimates(sets):
    for seed in range(20):
        table = tomo.sample(tomo.probabilities(tomo.pure_state(np.eye(9)[seed % 9]), sets[9]), 10, seed)
        raw = tomo.reconstruct_mub(table, sets[9])
        p = tomo.project_physical(raw)
        w = np.linalg.eigvalsh(p)
        assert w.min() >= -1e-10 and abs(np.trace(p) - 1) < 1e-10
        assert np.max(np.abs(tomo.project_physical(p) - p)) < 1e-10


def test_gellmann_matrices():
    lam = tomo.gellmann_matrices()
    assert np.array_equal(lam[0], np.eye(3))
    for j in range(1, 9):
        assert abs(np.trace(lam[j])) < 1e-15
        assert np.allclose(lam[j], lam[j].conj().T)
        for k in range(1, 9):
            assert abs(np.trace(lam[j] @ lam[k]) - 2 * (j == k)) < 1e-12


def test_gellmann_baseline():
    r1 = tomo.reconstruct_gellmann(ginibre(3, 0), 1)
    assert r1.measurement_count == 8 and r1.frobenius_error < 1e-10
    r2 = tomo.reconstruct_gellmann(ginibre(9, 0), 2)
    assert r2.measurement_count == 80 and r2.frobenius_error < 1e-10
    mixed = tomo.reconstruct_gellmann(DensityMatrix(np.eye(9) / 9), 2)
    c = mixed.coefficients.copy()
    assert c[0, 0] == pytest.approx(1.0)
    c[0, 0] = 0
    assert np.max(np.abs(c)) < 1e-15
    with pytest.raises(TomographyError):
        tomo.reconstruct_gellmann(ginibre(27, 0), 3)


def test_gellmann_agrees_with_mub(sets):
    for n, d in ((1, 3), (2, 9)):
        rho = ginibre(d, 42)
        g = tomo.reconstruct_gellmann(rho, n).reconstructed
        m = tomo.reconstruct_mub(tomo.probabilities(rho, sets[d]), sets[d])
        assert np.max(np.abs(g - m)) < 1e-9


def test_run_experiment(sets):
    rho = ginibre(9, 4)
    r = tomo.run_experiment(rho, sets[9])
    assert r.measurement_count == 10 and r.frobenius_error < 1e-10
    assert r.pure_state_fidelity is None
    psi = tomo.pure_state(sets[3].bases[2].vectors[:, 1])
    r = tomo.run_experiment(psi, sets[3])
    assert r.measurement_count == 4
    assert r.pure_state_fidelity == pytest.approx(1.0, abs=1e-12)
    r = tomo.run_experiment(psi, sets[3], shots=50, seed=3, project=True)
    assert r.projected is not None and r.shots == 50
    assert np.linalg.eigvalsh(r.projected).min() >= -1e-10
    again = tomo.run_experiment(psi, sets[3], shots=50, seed=3, project=True)
    assert np.array_equal(r.reconstructed, again.reconstructed)


def test_error_trials_schedule_independent(sets):
    a = tomo.error_trials(sets[3], 100, 6, master_seed=9)
    b = tomo.error_trials(sets[3], 100, 3, master_seed=9)
    assert np.array_equal(a[:3], b)


def test_density_validation():
    with pytest.raises(TomographyError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(TomographyError, match="trace"):
        DensityMatrix(np.eye(3))
    with pytest.raises(TomographyError, match="positive"):
        DensityMatrix(np.diag([1.5, -0.5, 0]))


def test_state_file_round_trip(tmp_path):
    rho = ginibre(9, 8)
    path = tmp_path / "rho.json"
    tomo.save_state(rho, path)
    back = tomo.load_state(path)
    assert np.array_equal(back.matrix, rho.matrix)
    path.write_text('{"dim": 3, "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[1,0]]]}')
    with pytest.raises(TomographyError, match="trace"):
        tomo.load_state(path)
