import json
from fractions import Fraction

import numpy as np
import pytest

from torstab.errors import NotStableError, ZeroVectorError
from torstab.kempf_ness import CONVERGED, FLAT_DIRECTIONS
from torstab.stability import STABLE, classify
from torstab.stratify import (
    StratifyOptions,
    stage_kn_minimizers,
    stratify,
    verify_decomposition,
)
from torstab.torus_rep import RepVector, Subtorus, WeightLine


def graded(spec, amps=None):
    """spec: list of (label, weight tuple, rho)."""
    lines = tuple(WeightLine(lab, tuple(w), rho=r) for lab, w, r in spec)
    if amps is None:
        amps = {ln.label: 1.0 for ln in lines}
    return RepVector(lines, amps)


def two_line_example():
    return graded([("a", (1,), 1), ("b", (-1,), 2)])


def three_line_example():
    return graded([("z", (0,), 1), ("a", (1,), 1), ("b", (-1,), 3)])


# ---------------------------------------------------------------------------
# worked examples (hand-computed, cross-checked by one_ps_exponents)


def test_worked_example_rank1():
    res = stratify(two_line_example())
    assert res.num_stages == 1
    st = res.stages[0]
    assert st.c == Fraction(3, 2)
    assert st.x_stage == (Fraction(1, 2),)
    assert res.sigma == 2
    assert res.x == (1,)
    assert st.d == 3
    assert res.residual_labels == ()
    assert res.exponents == {"a": 3, "b": 3}
    # exponents re-derived from the one-parameter subgroup itself
    assert two_line_example().one_ps_exponents(res.x, res.sigma) == res.exponents


def test_worked_example_three_lines():
    res = stratify(three_line_example())
    assert res.num_stages == 1
    st = res.stages[0]
    assert st.c == Fraction(2)
    assert res.sigma == 1
    assert res.x == (1,)
    assert st.d == 2
    assert st.nu_labels == ("z",)
    assert res.exponents["z"] == 1  # nu exponent sits below d_0 = 2
    assert res.exponents["a"] == 2 and res.exponents["b"] == 2
    assert res.residual_labels == ()


def test_trivial_torus_degenerate():
    u = graded([("a", (), 2), ("b", (), 3)])
    res = stratify(u)
    assert res.num_stages == 0
    assert res.x == ()
    assert res.sigma == 1
    assert res.residual_labels == ("a", "b")
    assert res.exponents == {"a": 2, "b": 3}


def test_trivial_subtorus_of_positive_rank():
    u = graded([("a", (1,), 2), ("b", (2,), 3)])
    res = stratify(u, torus=Subtorus.trivial(1))
    assert res.num_stages == 0
    assert res.x == (0,)
    assert res.exponents == {"a": 2, "b": 3}


# ---------------------------------------------------------------------------
# preconditions and failure reporting


def test_rejects_zero_vector():
    u = graded([("a", (1,), 1)], amps={"a": 0.0})
    with pytest.raises(ZeroVectorError):
        stratify(u)


def test_rejects_unstable_with_certificate():
    u = graded([("a", (1,), 1), ("b", (2,), 1)])
    with pytest.raises(NotStableError) as exc:
        stratify(u)
    assert exc.value.result is not None
    assert exc.value.result.verify()


def test_rejects_rho_below_one():
    u = graded([("a", (1,), 0), ("b", (-1,), 1)])
    with pytest.raises(ValueError, match="rho"):
        stratify(u)


def test_rejects_ungraded():
    u = RepVector((WeightLine("a", (1,)),), {"a": 1.0})
    with pytest.raises(ValueError):
        stratify(u)


# ---------------------------------------------------------------------------
# verification and determinism


def test_verify_decomposition_passes_on_worked_example():
    u = two_line_example()
    rep = verify_decomposition(stratify(u), u)
    assert rep.all_ok, rep.failures()


def test_verify_decomposition_catches_tampering():
    u = two_line_example()
    res = stratify(u)
    bad_stage = res.stages[0].__class__(
        **{**res.stages[0].__dict__, "d": res.stages[0].d - 1}
    )
    tampered = res.__class__(**{**res.__dict__, "stages": (bad_stage,)})
    rep = verify_decomposition(tampered, u)
    assert not rep.all_ok
    assert any("projection-exponent" in name for name, _ in rep.failures())


def _result_fingerprint(res):
    return json.dumps(
        {
            "x": res.x,
            "sigma": res.sigma,
            "stages": [
                {
                    "c": str(st.c),
                    "x": [str(v) for v in st.x_stage],
                    "nu": st.nu_labels,
                    "s": st.s_labels,
                    "d": st.d,
                }
                for st in res.stages
            ],
            "residual": res.residual_labels,
            "exponents": res.exponents,
        },
        sort_keys=True,
    )


def test_stratify_deterministic():
    u = graded(
        [("a", (1, 0), 1), ("b", (-1, 0), 2), ("c", (0, 1), 1),
         ("d", (0, -1), 3), ("e", (1, 1), 2)]
    )
    assert _result_fingerprint(stratify(u)) == _result_fingerprint(stratify(u))


def test_equal_dim_stop_gives_zero_residual():
    res = stratify(two_line_example())
    st = res.stages[-1]
    assert st.dim_hull == st.dim_projected_hull
    assert res.residual_labels == ()


def test_sigma_multiple_option():
    res = stratify(two_line_example(), options=StratifyOptions(sigma_multiple=3))
    assert res.sigma == 6
    assert res.x == (3,)
    assert res.stages[0].d == 9


def test_two_stage_chain_hand_checked():
    # four axis lines in rank 2: the rho-axis slice of the first hull is
    # [1, 3/2], so S_0 = the first weight pair at c_0 = 1; the slack rule
    # pins x_0 = (0, 1/2) inside the strict window (0, 1); after shearing,
    # the second pair sits level at c_1 = 3/2, so sigma = 2 and d = (2, 3)
    u = graded(
        [
            ("l0", (1, 0), 1),
            ("l1", (-1, 0), 1),
            ("l2", (0, 1), 1),
            ("l3", (0, -1), 2),
        ]
    )
    res = stratify(u)
    assert res.num_stages == 2
    assert res.sigma == 2
    assert res.x == (0, 1)
    assert res.d_ladder == (2, 3)
    s0, s1 = res.stages
    assert s0.c == 1 and s0.s_labels == ("l0", "l1") and s0.nu_labels == ()
    assert s0.x_stage == (Fraction(0), Fraction(1, 2))
    assert s1.c == Fraction(3, 2) and s1.s_labels == ("l2", "l3")
    assert s1.x_stage == (Fraction(0), Fraction(0))
    assert [t.dim for t in res.tori] == [2, 1, 0]
    # the intermediate torus is the second coordinate axis
    assert s1.torus.basis in (((0, 1),), ((0, -1),))
    assert res.exponents == {"l0": 2, "l1": 2, "l2": 3, "l3": 3}
    assert res.residual_labels == ()
    assert verify_decomposition(res, u).all_ok


# ---------------------------------------------------------------------------
# randomized postconditions


def random_stable_graded(rng, rank, n_lines):
    """Rejection-sample a G-stable graded vector with rho in [1, 4]."""
    while True:
        lines = []
        for i in range(n_lines):
            w = tuple(int(rng.integers(-3, 4)) for _ in range(rank))
            lines.append(WeightLine(f"l{i}", w, rho=int(rng.integers(1, 5))))
        labels = {ln.label for ln in lines}
        if len({(ln.weight, ln.rho) for ln in lines}) < len(lines):
            continue
        amps = {ln.label: complex(rng.normal(), rng.normal()) for ln in lines}
        v = RepVector(tuple(lines), amps)
        if classify(v.restrict(Subtorus.full(rank))).stability == STABLE:
            return v


@pytest.mark.parametrize("rank", [1, 2])
def test_random_inputs_pass_verification(rank):
    rng = np.random.default_rng(7 + rank)
    for _ in range(25):
        u = random_stable_graded(rng, rank, int(rng.integers(rank + 1, 7)))
        res = stratify(u)
        rep = verify_decomposition(res, u)
        assert rep.all_ok, (u, rep.failures())
        assert res.num_stages <= rank + 1


def test_stage_kn_minimizers_worked_example():
    u = graded([("a", (1,), 1), ("b", (-1,), 2)],
               amps={"a": 2.0, "b": 1.0})
    res = stratify(u)
    [(kn, rescaled)] = stage_kn_minimizers(res)
    # closed form: minimize 4 e^{2x} + e^{-2x}
    assert kn.status == CONVERGED
    assert kn.minimizer[0] == pytest.approx(-np.log(2) / 2, abs=1e-8)
    assert set(rescaled) == {"a", "b"}


def test_stage_kn_minimizers_symmetric_zero():
    res = stratify(two_line_example())
    [(kn, _)] = stage_kn_minimizers(res)
    assert kn.status == CONVERGED
    assert abs(kn.minimizer[0]) < 1e-9


def test_stage_kn_minimizers_flat_stage():
    # two weight-zero-sum pairs on orthogonal axes: stage projections can be
    # polystable-not-stable under the stage torus
    u = graded(
        [("a", (1, 0), 1), ("b", (-1, 0), 1), ("c", (0, 1), 1), ("d", (0, -1), 2)]
    )
    res = stratify(u)
    outs = stage_kn_minimizers(res)
    assert all(kn.status in (CONVERGED, FLAT_DIRECTIONS) for kn, _ in outs)
