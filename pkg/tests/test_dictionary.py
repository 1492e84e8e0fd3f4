import json
import math

import numpy as np
import pytest

from sillkoop.dictionary import (
    ConjLogistic,
    ScalarLogisticParams,
    SillDictionary,
    check_total_order,
    conj_values,
    dominates,
    eval_conjunctive,
    eval_scalar_logistic,
    grad_conjunctive,
    join_completion,
    join_params,
    lift,
    lift_jacobian,
    load_dictionary,
    save_dictionary,
)


def test_scalar_logistic_center_value():
    assert eval_scalar_logistic(0.0, ScalarLogisticParams(0.0, 5.0)) == pytest.approx(0.5)


def test_scalar_logistic_ln3_value():
    # exp(-ln 3) = 1/3 forces 1 / (1 + 1/3) = 0.75
    p = ScalarLogisticParams(0.0, math.log(3.0))
    assert eval_scalar_logistic(1.0, p) == pytest.approx(0.75, rel=1e-14)


def test_scalar_logistic_deep_saturation_no_overflow():
    v = eval_scalar_logistic(-200.0, ScalarLogisticParams(0.0, 10.0))
    assert np.isfinite(v)
    assert 0.0 <= v <= 1e-300


def test_scalar_logistic_huge_positive_argument():
    v = eval_scalar_logistic(500.0, ScalarLogisticParams(0.0, 10.0))
    assert v == 1.0 or (0.0 < v <= 1.0)
    assert np.isfinite(v)


def test_scalar_logistic_monotone_increasing():
    p = ScalarLogisticParams(0.3, 2.0)
    ys = np.linspace(-4, 4, 101)
    vals = eval_scalar_logistic(ys, p)
    assert np.all(np.diff(vals) > 0)


def test_scalar_params_allow_negative_alpha():
    # the sampling-statistics code constructs these with either sign
    v = eval_scalar_logistic(1.0, ScalarLogisticParams(0.0, -2.0))
    assert 0.0 < v < 0.5


def test_conjunctive_center_is_quarter():
    f = ConjLogistic([0.5, -1.0], [3.0, 7.0])
    assert eval_conjunctive(f.mu, f) == pytest.approx(0.25, rel=1e-14)


def test_conjunctive_center_m5():
    f = ConjLogistic(np.arange(5.0), np.full(5, 2.0))
    assert eval_conjunctive(f.mu, f) == pytest.approx(1.0 / 32.0, rel=1e-14)


def test_conjunctive_hand_product():
    f = ConjLogistic([0.0, 0.0], [math.log(3.0), math.log(3.0)])
    got = eval_conjunctive([1.0, -1.0], f)
    assert got == pytest.approx(0.75 * 0.25, rel=1e-14)


def test_conjunctive_range_and_batch():
    rng = np.random.default_rng(7)
    f = ConjLogistic(rng.uniform(-5, 5, 3), rng.uniform(0.5, 10, 3))
    pts = rng.uniform(-5, 5, size=(64, 3))
    vals = eval_conjunctive(pts, f)
    assert vals.shape == (64,)
    assert np.all(vals > 0) and np.all(vals < 1)


def test_conjunctive_dimension_mismatch():
    f = ConjLogistic([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        eval_conjunctive([0.0, 0.0, 0.0], f)


def test_conjlogistic_rejects_nonpositive_alpha():
    with pytest.raises(ValueError):
        ConjLogistic([0.0], [0.0])
    with pytest.raises(ValueError):
        ConjLogistic([0.0, 1.0], [1.0, -2.0])


def test_conjlogistic_rejects_length_mismatch():
    with pytest.raises(ValueError):
        ConjLogistic([0.0, 1.0], [1.0])


def _small_dictionary():
    return SillDictionary(
        2,
        (
            ConjLogistic([0.0, 0.5], [2.0, 3.0]),
            ConjLogistic([1.0, -0.5], [4.0, 1.5]),
        ),
    )


def test_lift_center_value_m1():
    f = ConjLogistic([0.7], [5.0])
    d = SillDictionary(1, (f,))
    np.testing.assert_allclose(lift([0.7], d), [1.0, 0.7, 0.5], rtol=1e-14)


def test_lift_layout():
    d = _small_dictionary()
    assert d.size == 5
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, size=(10, 2))
    z = lift(pts, d)
    assert z.shape == (10, 5)
    assert np.all(z[:, 0] == 1.0)
    np.testing.assert_array_equal(z[:, 1:3], pts)
    np.testing.assert_allclose(z[:, 3:], conj_values(pts, d))


def test_dictionary_requires_logistics():
    with pytest.raises(ValueError):
        SillDictionary(2, ())


def test_grad_center_symmetry():
    f = ConjLogistic([0.0], [4.0])
    np.testing.assert_allclose(grad_conjunctive([0.0], f), [1.0], rtol=1e-14)


def test_grad_saturates_to_zero():
    f = ConjLogistic([0.0, 0.0], [5.0, 5.0])
    g = grad_conjunctive([40.0, 40.0], f)
    assert np.all(np.abs(g) < 1e-60)


def _central_difference(fun, y, h=1e-6):
    y = np.asarray(y, dtype=float)
    out = np.empty(y.size)
    for i in range(y.size):
        up = y.copy()
        dn = y.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (fun(up) - fun(dn)) / (2.0 * h)
    return out


def test_grad_matches_finite_differences():
    # 100 random draws; atol floors the components where central
    # differencing bottoms out in roundoff (saturated coordinates)
    rng = np.random.default_rng(42)
    for _ in range(100):
        m = int(rng.integers(1, 4))
        f = ConjLogistic(rng.uniform(-5, 5, m), rng.uniform(0.5, 10, m))
        y = rng.uniform(-5, 5, m)
        fd = _central_difference(lambda p: eval_conjunctive(p, f), y)
        np.testing.assert_allclose(grad_conjunctive(y, f), fd, rtol=1e-5, atol=1e-9)


def test_lift_jacobian_structure():
    d = _small_dictionary()
    y = np.array([0.3, -0.2])
    jac = lift_jacobian(y, d)
    assert jac.shape == (5, 2)
    assert np.all(jac[0] == 0.0)
    np.testing.assert_array_equal(jac[1:3], np.eye(2))


def test_lift_jacobian_matches_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(25):
        m = int(rng.integers(1, 4))
        fs = tuple(
            ConjLogistic(rng.uniform(-5, 5, m), rng.uniform(0.5, 10, m))
            for _ in range(int(rng.integers(1, 4)))
        )
        d = SillDictionary(m, fs)
        y = rng.uniform(-5, 5, m)
        jac = lift_jacobian(y, d)
        h = 1e-6
        for i in range(m):
            up = y.copy()
            dn = y.copy()
            up[i] += h
            dn[i] -= h
            fd = (lift(up, d) - lift(dn, d)) / (2.0 * h)
            np.testing.assert_allclose(jac[:, i], fd, rtol=1e-5, atol=1e-9)


def test_dominates_examples():
    f = ConjLogistic([1.0, 2.0], [1.0, 1.0])
    g = ConjLogistic([3.0, 4.0], [1.0, 1.0])
    assert dominates(f, g)
    assert not dominates(g, f)


def test_dominates_incomparable_pair():
    f = ConjLogistic([1.0, 5.0], [1.0, 1.0])
    g = ConjLogistic([3.0, 2.0], [1.0, 1.0])
    assert not dominates(f, g)
    assert not dominates(g, f)


def test_dominates_reflexive_on_ties():
    f = ConjLogistic([1.0, 5.0], [1.0, 1.0])
    assert dominates(f, f)


def test_dominates_order_properties():
    # reflexive, antisymmetric up to equal centers, transitive
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = int(rng.integers(1, 4))
        fs = [
            ConjLogistic(rng.integers(-2, 3, m).astype(float), rng.uniform(1, 2, m))
            for _ in range(3)
        ]
        for f in fs:
            assert dominates(f, f)
        a, b, c = fs
        if dominates(a, b) and dominates(b, a):
            assert np.array_equal(a.mu, b.mu)
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)


def test_check_total_order_chain():
    d = SillDictionary(
        1,
        tuple(ConjLogistic([float(k)], [1.0]) for k in range(3)),
    )
    res = check_total_order(d)
    assert res.totally_ordered
    assert res.incomparable_pairs == ()


def test_check_total_order_incomparable():
    d = SillDictionary(
        2,
        (
            ConjLogistic([1.0, 5.0], [1.0, 1.0]),
            ConjLogistic([3.0, 2.0], [1.0, 1.0]),
        ),
    )
    res = check_total_order(d)
    assert not res.totally_ordered
    assert res.incomparable_pairs == ((0, 1),)


def test_check_total_order_single_function():
    d = SillDictionary(2, (ConjLogistic([0.0, 0.0], [1.0, 1.0]),))
    assert check_total_order(d).totally_ordered


def test_join_params_componentwise():
    f = ConjLogistic([1.0, 5.0], [2.0, 7.0])
    g = ConjLogistic([3.0, 2.0], [4.0, 9.0])
    j = join_params(f, g)
    np.testing.assert_array_equal(j.mu, [3.0, 5.0])
    np.testing.assert_array_equal(j.alpha, [4.0, 7.0])


def test_join_params_dominated_pair_is_upper_function():
    f = ConjLogistic([0.0, 0.0], [1.0, 2.0])
    g = ConjLogistic([1.0, 3.0], [5.0, 6.0])
    assert dominates(f, g)
    assert join_params(f, g) == g


def test_join_params_idempotent():
    f = ConjLogistic([0.5, -2.0], [1.0, 2.0])
    assert join_params(f, f) == f


def test_join_params_tie_takes_larger_alpha():
    f = ConjLogistic([1.0], [2.0])
    g = ConjLogistic([1.0], [5.0])
    assert join_params(f, g).alpha[0] == 5.0


def test_join_algebra_properties():
    # commutative, associative, idempotent; exact since max is exact
    rng = np.random.default_rng(17)
    for _ in range(200):
        m = int(rng.integers(1, 4))
        a, b, c = (
            ConjLogistic(rng.uniform(-3, 3, m), rng.uniform(0.5, 5, m))
            for _ in range(3)
        )
        assert join_params(a, b) == join_params(b, a)
        assert join_params(join_params(a, b), c) == join_params(a, join_params(b, c))
        assert join_params(a, a) == a


def test_join_completion_hand_case():
    d = SillDictionary(
        2,
        (
            ConjLogistic([1.0, 5.0], [2.0, 7.0]),
            ConjLogistic([3.0, 2.0], [4.0, 9.0]),
        ),
    )
    out = join_completion(d)
    assert out.n_logistic == 3
    assert out.logistics[:2] == d.logistics
    j = out.logistics[2]
    np.testing.assert_array_equal(j.mu, [3.0, 5.0])
    np.testing.assert_array_equal(j.alpha, [4.0, 7.0])


def test_join_completion_chain_unchanged():
    d = SillDictionary(
        2,
        (
            ConjLogistic([0.0, 0.0], [1.0, 1.0]),
            ConjLogistic([1.0, 2.0], [2.0, 2.0]),
            ConjLogistic([3.0, 4.0], [3.0, 3.0]),
        ),
    )
    out = join_completion(d)
    assert out.logistics == d.logistics


def test_join_completion_single_function_unchanged():
    d = SillDictionary(1, (ConjLogistic([0.0], [1.0]),))
    assert join_completion(d).logistics == d.logistics


def test_join_completion_closed_under_join():
    rng = np.random.default_rng(23)
    for _ in range(20):
        m = int(rng.integers(1, 3))
        fs = tuple(
            ConjLogistic(rng.uniform(-2, 2, m), rng.uniform(0.5, 5, m))
            for _ in range(int(rng.integers(2, 5)))
        )
        out = join_completion(SillDictionary(m, fs))
        have = set(out.logistics)
        for a in out.logistics:
            for b in out.logistics:
                assert join_params(a, b) in have


def test_join_completion_terminates_on_larger_sets():
    # closure size is capped by the grid of original center coordinates
    rng = np.random.default_rng(29)
    for _ in range(5):
        fs = tuple(
            ConjLogistic(rng.uniform(-2, 2, 3), rng.uniform(0.5, 5, 3))
            for _ in range(5)
        )
        out = join_completion(SillDictionary(3, fs))
        assert out.n_logistic <= 5**3
        have = set(out.logistics)
        for a in out.logistics:
            for b in out.logistics:
                assert join_params(a, b) in have


def test_dictionary_json_roundtrip(tmp_path):
    d = _small_dictionary()
    path = tmp_path / "dict.json"
    save_dictionary(d, path)
    loaded = load_dictionary(path)
    assert loaded.m == d.m
    assert loaded.logistics == d.logistics
    # schema shape: {"m": int, "logistics": [{"mu": [...], "alpha": [...]}]}
    obj = json.loads(path.read_text())
    assert set(obj) == {"m", "logistics"}
    assert all(set(e) == {"mu", "alpha"} for e in obj["logistics"])


def test_dictionary_from_dict_missing_fields():
    with pytest.raises(ValueError):
        SillDictionary.from_dict({"m": 2})
    with pytest.raises(ValueError):
        SillDictionary.from_dict({"logistics": []})
