"""The noncommutative setting: upper-triangular 2x2 matrices over R.

Basis 1, e, f with e*e = e, e*f = f, f*e = 0, f*f = 0 (e = a corner
idempotent, f = the strictly upper corner).  A is free of rank 3 over the
central R, so the whole pipeline applies; only duality emits its left/right
warning, and minimal resolutions reject the input because A_0 is larger
than the base field."""

import pytest

from mcmrep.algebra import (
    AlgebraError,
    AlgebraInput,
    algebra_as_module,
    build_truncated_algebra,
)
from mcmrep.graded import GradedDims, WeightedPolyRing
from mcmrep.mcmtools import is_simple_search, module_stats
from mcmrep.repscheme import evaluate_point, generate_equations
from mcmrep.resolve import dualize
from mcmrep.tangent import four_term_report

P = 32003


@pytest.fixture(scope="module")
def triangular():
    R = WeightedPolyRing.make([1], ["t"])
    one = {(0,): 1}
    g = 3

    def unit_row(j):
        return tuple(dict(one) if l == j else {} for l in range(g))

    zero = ({}, {}, {})
    sc = (
        (unit_row(0), unit_row(1), unit_row(2)),
        (unit_row(1), ({}, one, {}), ({}, {}, one)),
        (unit_row(2), zero, zero),
    )
    inp = AlgebraInput(
        ring=R, p=P, gen_shifts=(0, 0, 0), structure_constants=sc,
        commutative=False,
    )
    return build_truncated_algebra(inp)


def test_builds_and_is_disconnected(triangular):
    rep = triangular.check_connected_finite()
    assert not rep["connected"]
    assert rep["dim_A0"] == 3
    assert triangular.alpha == 0


def test_commutative_flag_would_reject(triangular):
    inp = triangular.input
    with pytest.raises(AlgebraError, match="asymmetric"):
        build_truncated_algebra(
            AlgebraInput(
                ring=inp.ring, p=P, gen_shifts=inp.gen_shifts,
                structure_constants=inp.structure_constants, commutative=True,
            )
        )


def test_regular_module_and_tangent(triangular):
    Am = algebra_as_module(triangular, name="A")
    E = generate_equations(triangular, Am.V)
    assert evaluate_point(E, Am).ok
    rep = four_term_report(E, Am)
    assert rep.euler_identity_holds()
    assert rep.exactness_verified
    st = module_stats(Am)
    assert st.rank == 3 and st.width == 0


def test_simplicity_search_runs(triangular):
    Am = algebra_as_module(triangular, name="A")
    v = is_simple_search(Am)
    # the regular module has proper quotients; the bounded search must not
    # certify completeness via the commutative-only dual route
    assert not v.simple or not v.complete


def test_dualize_warns(triangular):
    Am = algebra_as_module(triangular)
    with pytest.warns(UserWarning, match="noncommutative"):
        dualize(Am)


def test_resolution_requires_connected(triangular):
    from mcmrep.resolve import minimal_resolution

    Am = algebra_as_module(triangular)
    with pytest.raises(AlgebraError, match="connected"):
        minimal_resolution(Am, length=2)
