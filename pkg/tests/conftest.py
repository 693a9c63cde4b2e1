import numpy as np
import pytest

from mcmrep.algebra import (
    AlgebraInput,
    algebra_from_quotient,
    build_truncated_algebra,
    make_framed_module,
)
from mcmrep.graded import GradedDims, WeightedPolyRing
from mcmrep.polys import parse_poly

P = 32003


@pytest.fixture(scope="session")
def nodal():
    """k[x,y]/(xy) over R = k[t], t = x + y: generators 1 and x, x*x = t*x."""
    R = WeightedPolyRing.make([1], ["t"])
    t = parse_poly("t", R, P)
    one = {(0,): 1}
    sc = (((one, {}), ({}, one)), (({}, one), ({}, t)))
    inp = AlgebraInput(
        ring=R, p=P, gen_shifts=(0, -1), structure_constants=sc,
        commutative=True, isolated_singularity=True,
    )
    return build_truncated_algebra(inp)


@pytest.fixture(scope="session")
def nodal_modules(nodal):
    R = nodal.ring
    t = parse_poly("t", R, P)
    V = GradedDims.make({0: 1})
    MX = make_framed_module(nodal, V, {1: [[t]]}, name="MX")
    MY = make_framed_module(nodal, V, {1: [[{}]]}, name="MY")
    return MX, MY


@pytest.fixture(scope="session")
def nodal_quotient():
    """The same algebra through the hypersurface converter (keeps the
    matrix-factorization context)."""
    S = WeightedPolyRing.make([1, 1], ["x", "y"])
    f = parse_poly("x*y", S, P)
    t = parse_poly("x + y", S, P)
    return algebra_from_quotient(S, [f], [t], P, isolated_singularity=True)


@pytest.fixture(scope="session")
def cusp():
    """A_2 curve x^3 + y^2 over R = k[x]."""
    from mcmrep.mfgen import ade_algebra

    return ade_algebra("A", 2, P)


@pytest.fixture(scope="session")
def a3_curve():
    from mcmrep.mfgen import ade_algebra

    return ade_algebra("A", 3, P)


@pytest.fixture(scope="session")
def regular():
    """A = R = k[t]: the degenerate suite."""
    R = WeightedPolyRing.make([1], ["t"])
    one = {(0,): 1}
    inp = AlgebraInput(ring=R, p=P, gen_shifts=(0,), structure_constants=(((one,),),))
    return build_truncated_algebra(inp)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240809)
