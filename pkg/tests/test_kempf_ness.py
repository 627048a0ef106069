import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torstab.kempf_ness import (
    CONVERGED,
    DIVERGING,
    FLAT_DIRECTIONS,
    KNProblem,
    conjugation_gradient_pairing,
    kn_conjugation_eval,
    kn_eval,
    kn_minimize,
    moment_map,
    moment_map_conjugation,
)
from torstab.stability import classify
from torstab.torus_rep import RepVector, WeightLine


def problem(weights, norms2=None):
    ws = [tuple(w) for w in weights]
    if norms2 is None:
        norms2 = [1.0] * len(ws)
    return KNProblem(tuple(ws), tuple(float(n) for n in norms2))


# ---------------------------------------------------------------------------
# finite-difference oracles


def fd_gradient(p, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (kn_eval(p, x + e)[0] - kn_eval(p, x - e)[0]) / (2 * h)
    return g


def fd_hessian(p, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    n = len(x)
    hess = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        hess[:, i] = (fd_gradient(p, x + e) - fd_gradient(p, x - e)) / (2 * h)
    return hess


def fd_conjugation_pairing(phi, g, v, h=1e-6):
    from torstab.kempf_ness import kn_conjugation_eval as ev

    plus = ev(phi, g + h * v)[0]
    minus = ev(phi, g - h * v)[0]
    return (plus - minus) / (2 * h)


# ---------------------------------------------------------------------------
# kn_eval


def test_kn_eval_spec_examples():
    p = problem([(1,), (-1,)])
    value, grad, hess = kn_eval(p, [0.0])
    assert value == pytest.approx(2.0)
    assert grad[0] == pytest.approx(0.0)
    assert hess[0, 0] == pytest.approx(8.0)

    p2 = problem([(1,), (-1,)], norms2=[4.0, 1.0])
    x = -math.log(2) / 2
    value, grad, _ = kn_eval(p2, [x])
    assert value == pytest.approx(4.0, abs=1e-12)
    assert grad[0] == pytest.approx(0.0, abs=1e-12)


def test_kn_eval_weight_zero_constant():
    p = problem([(0, 0)])
    for x in ([0.0, 0.0], [3.0, -2.0]):
        value, grad, _ = kn_eval(p, x)
        assert value == pytest.approx(1.0)
        assert np.allclose(grad, 0.0)


def test_kn_eval_hessian_psd():
    rng = np.random.default_rng(0)
    p = problem([(1, 2), (-1, 0), (0, -3)], norms2=[1.0, 2.0, 0.5])
    for _ in range(20):
        x = rng.normal(size=2)
        _, _, hess = kn_eval(p, x)
        assert np.linalg.eigvalsh(hess).min() >= -1e-9


def test_kn_eval_matches_finite_differences():
    rng = np.random.default_rng(1)
    p = problem([(1, 2), (-1, 0), (0, -3), (2, -1)], norms2=[1.0, 2.0, 0.5, 1.5])
    for _ in range(100):
        x = rng.uniform(-1.5, 1.5, size=2)
        _, grad, hess = kn_eval(p, x)
        gref = fd_gradient(p, x)
        href = fd_hessian(p, x)
        assert np.linalg.norm(grad - gref) < 1e-6 * max(1.0, np.linalg.norm(gref))
        assert np.linalg.norm(hess - href) < 1e-5 * max(1.0, np.linalg.norm(href))


# ---------------------------------------------------------------------------
# kn_minimize


def test_kn_minimize_closed_form():
    p = problem([(1,), (-1,)], norms2=[4.0, 1.0])
    res = kn_minimize(p)
    assert res.status == CONVERGED
    assert res.minimizer[0] == pytest.approx(-math.log(2) / 2, abs=1e-8)
    assert res.value == pytest.approx(4.0, abs=1e-8)


def test_kn_minimize_symmetric():
    res = kn_minimize(problem([(1,), (-1,)]))
    assert res.status == CONVERGED
    assert res.minimizer[0] == pytest.approx(0.0, abs=1e-9)
    assert res.value == pytest.approx(2.0, abs=1e-12)


def test_kn_minimize_diverging_with_ray():
    res = kn_minimize(problem([(1,), (2,)]))
    assert res.status == DIVERGING
    ray = np.array(res.descent_ray, dtype=float)
    # the functional strictly decreases along the certified ray
    vals = [kn_eval(problem([(1,), (2,)]), t * ray)[0] for t in (0.0, 1.0, 2.0, 5.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_kn_minimize_flat_directions():
    p = problem([(1, 0), (-1, 0)])
    res = kn_minimize(p)
    assert res.status == FLAT_DIRECTIONS
    assert res.flat_space is not None and res.flat_space.rank == 1
    # value is invariant along the flat lattice
    d = np.array(res.flat_space.basis[0], dtype=float)
    v0 = kn_eval(p, res.minimizer)[0]
    for t in np.linspace(-2, 2, 10):
        vt = kn_eval(p, res.minimizer + t * d)[0]
        assert abs(vt - v0) <= 1e-10 * max(1.0, v0)


def test_kn_minimize_moment_map_small_at_minimizer():
    p = problem([(1, 1), (-1, 0), (0, -1)], norms2=[1.0, 2.0, 3.0])
    res = kn_minimize(p)
    assert res.status == CONVERGED
    assert np.linalg.norm(moment_map(p, res.minimizer)) < 1e-9


def test_kn_minimize_rejects_bad_tol():
    with pytest.raises(ValueError):
        kn_minimize(problem([(1,), (-1,)]), tol=0.0)


weight2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


@settings(max_examples=60, deadline=None)
@given(st.lists(weight2, min_size=1, max_size=6, unique=True))
def test_kn_minimize_status_matches_classify(ws):
    lines = tuple(WeightLine(f"l{i}", w) for i, w in enumerate(ws))
    v = RepVector(lines, {ln.label: 1.0 for ln in lines})
    cls = classify(v).stability
    res = kn_minimize(KNProblem.from_vector(v))
    expected = {
        "Stable": CONVERGED,
        "PolystableNotStable": FLAT_DIRECTIONS,
        "SemistableNotPolystable": DIVERGING,
        "Unstable": DIVERGING,
    }[cls]
    assert res.status == expected


# ---------------------------------------------------------------------------
# conjugation case


def hermitian_traceless(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (a + a.conj().T) / 2
    return h - np.trace(h) / n * np.eye(n)


def test_moment_map_conjugation_examples():
    assert np.allclose(moment_map_conjugation(np.diag([1.0, -1.0])), 0.0)
    nil = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(moment_map_conjugation(nil), np.diag([1.0, -1.0]))
    rng = np.random.default_rng(2)
    for _ in range(10):
        phi = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert abs(np.trace(moment_map_conjugation(phi))) < 1e-12


def test_conjugation_gradient_zero_for_normal():
    phi = np.diag([1.0 + 2j, -1.0 - 2j])
    _, grad = kn_conjugation_eval(phi, np.zeros((2, 2)))
    assert np.allclose(grad, 0.0, atol=1e-12)


def test_conjugation_nilpotent_pairing():
    nil = np.array([[0.0, 1.0], [0.0, 0.0]])
    v = np.diag([1.0, -1.0])
    pairing = conjugation_gradient_pairing(nil, np.zeros((2, 2)), v)
    assert pairing == pytest.approx(4.0)


def test_conjugation_gradient_at_zero_is_commutator():
    rng = np.random.default_rng(3)
    for _ in range(10):
        phi = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        phi -= np.trace(phi) / 3 * np.eye(3)
        _, grad = kn_conjugation_eval(phi, np.zeros((3, 3)))
        assert np.allclose(grad, 2.0 * moment_map_conjugation(phi), atol=1e-10)


def test_conjugation_problem_coefficients():
    from torstab.kempf_ness import ConjugationProblem

    nil = np.array([[0.0, 1.0], [0.0, 0.0]])
    prob = ConjugationProblem.make(nil)
    coeffs = prob.gradient_coefficients(np.zeros((2, 2)))
    # the diagonal direction diag(1,-1) pairs to 4; off-diagonal ones vanish
    assert coeffs[0] == pytest.approx(4.0)
    assert np.allclose(coeffs[1:], 0.0, atol=1e-12)
    with pytest.raises(ValueError):
        ConjugationProblem.make(np.eye(2))  # not traceless


def test_conjugation_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = rng.integers(2, 4)
        phi = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        phi -= np.trace(phi) / n * np.eye(n)
        g = 0.4 * hermitian_traceless(rng, n)
        v = hermitian_traceless(rng, n)
        ref = fd_conjugation_pairing(phi, g, v)
        got = conjugation_gradient_pairing(phi, g, v)
        assert abs(got - ref) < 1e-6 * max(1.0, abs(ref))
