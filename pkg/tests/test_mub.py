import json

import numpy as np
import pytest

from qutrit_mub import mub
from qutrit_mub.gf import FieldError, field_spec
from qutrit_mub.mub import OMEGA, Basis, build_field_mubs, verify_unbiased


@pytest.fixture(scope="module")
def sets():
    return {d: build_field_mubs(field_spec(d)) for d in (3, 9, 27)}


def test_counts(sets):
    assert [len(sets[d]) for d in (3, 9, 27)] == [4, 10, 28]


def test_first_exponential_basis_d3(sets):
    w, wc = OMEGA, OMEGA.conjugate()
    b = sets[3].bases[1]
    expect = np.array([[1, 1, 1], [1, w, wc], [1, wc, w]]).T / np.sqrt(3)
    assert np.max(np.abs(b.vectors - expect)) < 1e-15


def test_matches_explicit_fixtures_up_to_phase(sets):
    found = mub.match_bases(sets[3].bases[1:], mub.single_qutrit_fixtures(), tol=1e-12)
    assert None not in found.values()
    assert sorted(found.values()) == ["B1", "B2", "B3"]


def _unbiased_by_loops(bases):
    """Oracle: plain double loop over basis pairs and vector pairs."""
    d = bases[0].dim
    worst = 0.0
    for s in range(len(bases)):
        for r in range(len(bases)):
            for j in range(d):
                for k in range(d):
                    ip = abs(np.vdot(bases[s].vectors[:, j], bases[r].vectors[:, k])) ** 2
                    target = (1.0 if j == k else 0.0) if s == r else 1.0 / d
                    worst = max(worst, abs(ip - target))
    return worst


@pytest.mark.parametrize("d", [3, 9])
def test_verify_unbiased_matches_loop_oracle(sets, d):
    rep = verify_unbiased(sets[d])
    assert rep.passed
    assert rep.pairs_checked == (d + 1) * d // 2
    assert abs(rep.max_deviation - _unbiased_by_loops(list(sets[d].bases))) < 1e-15
    assert rep.max_deviation < 1e-12


def test_verify_unbiased_full_sweep_d27(sets):
    rep = verify_unbiased(sets[27])
    assert rep.passed and rep.pairs_checked == 378 and rep.max_deviation < 1e-10


def test_duplicate_basis_fails():
    std = mub.standard_basis(3)
    rep = verify_unbiased([std, std, build_field_mubs(3).bases[1]])
    bad = rep.failures()
    assert len(bad) == 1 and (bad[0].first, bad[0].second) == ("B0", "B0")
    assert bad[0].deviation == pytest.approx(1 - 1 / 3)


def test_projectors(sets):
    p = mub.projectors(mub.standard_basis(3))
    for k in range(3):
        assert np.array_equal(p[k], np.diag(np.eye(3)[k]).astype(complex))
    for pk in mub.projectors(sets[3].bases[1]):
        assert np.allclose(np.diag(pk), 1 / 3, atol=1e-15)
    for d, s in sets.items():
        for b in s.bases:
            assert np.max(np.abs(sum(mub.projectors(b)) - np.eye(d))) < 1e-12
    with pytest.raises(ValueError):
        mub.projectors(Basis("bad", np.ones((3, 3), dtype=complex)))


def test_cross_basis_projector_traces(sets):
    s = sets[9]
    a = mub.projector_stack(s.bases[2])
    b = mub.projector_stack(s.bases[5])
    tr = np.einsum("jab,kba->jk", a, b).real
    assert np.max(np.abs(tr - 1 / 9)) < 1e-12


def test_deterministic_and_json_round_trip(sets, tmp_path):
    again = build_field_mubs(field_spec(9))
    for a, b in zip(sets[9].bases, again.bases):
        assert np.array_equal(a.vectors, b.vectors)
    path = tmp_path / "m.json"
    mub.save(sets[9], path)
    data = json.loads(path.read_text())
    assert data["dim"] == 9 and len(data["bases"]) == 10
    assert data["field"]["modulus"] == [2, 1, 1]
    back = mub.load(path)
    assert back.field_spec == sets[9].field_spec
    for a, b in zip(sets[9].bases, back.bases):
        assert np.array_equal(a.vectors, b.vectors)


def test_invalid_spec():
    with pytest.raises(FieldError):
        build_field_mubs("nine")
    with pytest.raises(FieldError):
        build_field_mubs(5)


def test_same_basis_permutation_and_phase():
    b = build_field_mubs(9).bases[4]
    perm = [3, 1, 0, 8, 2, 5, 4, 7, 6]
    phases = np.exp(1j * np.arange(9))
    other = Basis("x", b.vectors[:, perm] * phases)
    assert mub.same_basis(b, other)
    assert not mub.same_basis(b, build_field_mubs(9).bases[5])
