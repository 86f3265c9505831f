import itertools
import json
import math

import numpy as np
import pytest

from l0lab import (
    Identity,
    Instance,
    InvalidInputError,
    Power,
    ResourceLimitError,
    ShiftedPower,
    SquaredHinge,
    level_representatives,
    levels,
    load_instance,
    numerical_rank,
    residual_staircase,
)
from l0lab.datasets import noisy_recovery_truth

from oracles import literal_levels, l1_vertex_scan, support_fits

BUNDLED_RHO = [0.0, 1.4487, 3.3363, 4.0502, 21.2106]


def test_bundled_staircase(bundled):
    st = residual_staircase(bundled)
    np.testing.assert_allclose(st.best_r, [21.2106, 4.0502, 3.3363, 1.4487, 0.0, 0.0], atol=1e-4)
    assert st.best_r[0] == pytest.approx(np.linalg.norm(bundled.b))
    assert st.rank == 4


def test_bundled_identity_levels(bundled):
    seq = levels(residual_staircase(bundled))
    assert seq.L == 4
    assert seq.s.tolist() == [4, 3, 2, 1, 0]
    np.testing.assert_allclose(seq.rho, BUNDLED_RHO, atol=2e-4)


def test_bundled_hinge_levels(bundled):
    seq = levels(residual_staircase(bundled), SquaredHinge(3.6))
    assert seq.s.tolist() == [2, 1, 0]
    assert seq.rho[0] == 0.0
    assert seq.rho[1] == pytest.approx(0.1013, abs=5e-4)
    assert seq.rho[2] == pytest.approx(155.0666, abs=5e-2)


def test_bundled_true_support_is_a_level_two_representative(bundled):
    seq = levels(residual_staircase(bundled))
    reps = dict(level_representatives(seq, 2))
    fits = support_fits(bundled.A, bundled.b, 2)
    pairs = [S for S in fits if len(S) == 2]
    best = min(pairs, key=lambda S: fits[S][0])
    x_true, _ = noisy_recovery_truth()
    assert best == tuple(np.flatnonzero(x_true))
    assert best in reps
    np.testing.assert_allclose(reps[best], fits[best][1], atol=1e-10)


def test_zero_rhs_is_degenerate():
    inst = Instance(np.array([[1.0, 2.0], [3.0, 4.0]]), np.zeros(2))
    st = residual_staircase(inst)
    assert np.all(st.best_r == 0)
    for phi in (Identity(), Power(2), SquaredHinge(1.0)):
        seq = levels(st, phi)
        assert seq.L == 0 and seq.s.tolist() == [0] and seq.rho.tolist() == [0.0]
        (S, x), = level_representatives(seq, 0)
        assert S == () and not x.any()


def test_terminal_level_is_zero_vector(bundled):
    seq = levels(residual_staircase(bundled))
    (S, x), = level_representatives(seq, seq.L)
    assert S == () and not x.any()
    with pytest.raises(InvalidInputError):
        level_representatives(seq, seq.L + 1)


def test_p1_staircase_matches_power_set_scan():
    rng = np.random.default_rng(5)
    A = rng.integers(-5, 6, size=(3, 4)).astype(float)
    b = rng.integers(-5, 6, size=3).astype(float)
    st = residual_staircase(Instance(A, b, p=1))
    for k in range(5):
        exact = min(l1_vertex_scan(A[:, S], b) if S else np.abs(b).sum() for S in itertools.combinations(range(4), k))
        assert st.exact_r[k] == pytest.approx(exact, abs=1e-10)


def test_staircase_invariants(ensemble):
    for inst in ensemble:
        st = residual_staircase(inst)
        r = numerical_rank(inst.A)
        assert np.all(np.diff(st.best_r) <= 1e-12)
        assert st.best_r[0] == pytest.approx(np.linalg.norm(inst.b, ord=inst.p))
        np.testing.assert_allclose(st.best_r[r:], st.best_r[r], atol=1e-9 * max(1, st.best_r[0]))


@pytest.mark.parametrize("which", range(0, 100, 7))
def test_matches_literal_loop(ensemble, which):
    inst = ensemble[which]
    st = residual_staircase(inst)
    fits = support_fits(inst.A, inst.b, inst.p)
    sigma = 0.5 * (st.best_r[-1] + st.best_r[0])
    for phi in (Identity(), Power(inst.p), SquaredHinge(sigma), ShiftedPower(sigma, inst.p)):
        seq = levels(st, phi)
        ref = literal_levels(inst.A, inst.b, inst.p, phi, fits=fits)
        assert seq.s.tolist() == [s for s, _ in ref]
        np.testing.assert_allclose(seq.rho, [r for _, r in ref], rtol=1e-8, atol=1e-8)


def test_structure_independent_of_strictly_increasing_phi(ensemble):
    for inst in ensemble[:40]:
        st = residual_staircase(inst)
        a, b = levels(st, Identity()), levels(st, Power(inst.p))
        assert a.s.tolist() == b.s.tolist()
        assert [lv.supports for lv in a.levels] == [lv.supports for lv in b.levels]


def test_representatives_have_full_rank_supports(ensemble):
    for inst in ensemble:
        seq = levels(residual_staircase(inst), Power(inst.p))
        for lv in seq.levels:
            for S, x in zip(lv.supports, lv.representatives):
                assert not S or numerical_rank(inst.A[:, list(S)]) == len(S)
                assert np.count_nonzero(x) == lv.s


def test_resource_limit_names_binomial():
    inst = Instance(np.ones((2, 6)), np.ones(2), max_enumeration_cols=5)
    with pytest.raises(ResourceLimitError, match=r"C\(6,"):
        residual_staircase(inst)


def test_support_budget_env(monkeypatch):
    monkeypatch.setenv("L0LAB_MAX_SUPPORTS", "16")
    with pytest.raises(ResourceLimitError):
        residual_staircase(Instance(np.ones((2, 5)), np.ones(2)))
    residual_staircase(Instance(np.ones((2, 4)), np.ones(2)))


def test_instance_validation():
    with pytest.raises(InvalidInputError):
        Instance(np.ones((2, 2)), np.ones(3))
    with pytest.raises(InvalidInputError):
        Instance(np.ones((2, 2)), np.ones(2), p=3)
    with pytest.raises(InvalidInputError):
        Instance(np.array([[np.nan, 1.0]]), np.ones(1))


def test_instance_json_round_trip(tmp_path, bundled):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(bundled.to_dict()))
    again = load_instance(path)
    np.testing.assert_array_equal(again.A, bundled.A)
    np.testing.assert_array_equal(again.b, bundled.b)
    assert again.p == bundled.p


def test_malformed_json_reports_location(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"A": [[1, 2]], "b": [1,, 2]}')
    with pytest.raises(InvalidInputError, match="line 1 column"):
        load_instance(path)


def test_levels_serialize(bundled):
    d = levels(residual_staircase(bundled)).to_dict()
    assert d["L"] == 4 and len(d["levels"]) == 5
    assert math.isclose(d["rho"][2], 3.3363, abs_tol=1e-4)
