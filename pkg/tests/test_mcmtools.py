import numpy as np
import pytest

from mcmrep.algebra import (
    algebra_as_module,
    conjugate_module,
    direct_sum,
    make_framed_module,
    random_group_element,
    shift_module,
)
from mcmrep.graded import GradedDims
from mcmrep.mcmtools import (
    bounds_ledger,
    classify_rigid,
    estimate_beta,
    find_gap_and_split,
    is_indecomposable,
    is_simple_search,
    isomorphic,
    module_stats,
    simple_width_bound,
    sum_point_source,
    verify_width_bounds,
)
from mcmrep.mfgen import catalog_modules
from mcmrep.repscheme import evaluate_point, generate_equations

P = 32003


def test_module_stats(nodal, nodal_modules):
    MX, MY = nodal_modules
    Am = algebra_as_module(nodal)
    st = module_stats(Am)
    assert (st.g_min, st.g_max, st.width, st.rank) == (0, 1, 1, 2)
    stx = module_stats(MX)
    assert (stx.g_min, stx.g_max, stx.width, stx.rank) == (0, 0, 0, 1)
    st3 = module_stats(shift_module(MX, -3))
    assert (st3.g_min, st3.g_max, st3.width) == (3, 3, 0)
    with pytest.raises(ValueError):
        module_stats(make_framed_module(nodal, GradedDims.make({}), {}))


def test_gap_split_with_shifted_sum(nodal, nodal_modules):
    MX, MY = nodal_modules
    M = direct_sum(MX, shift_module(MY, -3))
    res = find_gap_and_split(M)
    assert res is not None
    assert res.gap_position == 0
    assert res.A_stable
    assert res.submodule.V.to_dict() == {0: 1}
    assert res.quotient.V.to_dict() == {3: 1}
    assert res.ext_obstruction_dim == 0
    assert res.splitting_map is not None and res.split_verified
    # both pieces are genuine points of their representation spaces
    for piece in (res.submodule, res.quotient):
        E = generate_equations(nodal, piece.V)
        assert evaluate_point(E, piece).ok


def test_gap_split_on_conjugated_sum(nodal, nodal_modules, rng):
    """The splitting intertwiner is recovered even when the direct-sum block
    structure has been hidden by a change of basis."""
    MX, MY = nodal_modules
    M = direct_sum(shift_module(MX, -4), MY)
    g = random_group_element(M, rng=rng)
    MC = conjugate_module(M, g)
    res = find_gap_and_split(MC)
    assert res is not None and res.A_stable
    assert res.split_verified


def test_no_gap_cases(nodal, nodal_modules):
    MX, MY = nodal_modules
    assert find_gap_and_split(direct_sum(MX, MY)) is None
    assert find_gap_and_split(algebra_as_module(nodal)) is None


def test_simplicity(nodal, nodal_modules):
    MX, MY = nodal_modules
    assert is_simple_search(MX).simple
    v = is_simple_search(algebra_as_module(nodal))
    assert not v.simple
    assert v.certificate is not None
    assert v.certificate.V.rank() == 1
    v2 = is_simple_search(direct_sum(MX, MX))
    assert not v2.simple and v2.complete


def test_simplicity_certificate_is_quotient(nodal):
    """The certificate really is a quotient: a degree-0 surjection exists."""
    from mcmrep.resolve import hom_zero

    Am = algebra_as_module(nodal)
    v = is_simple_search(Am)
    Q = v.certificate
    homs = hom_zero(Am, Q)
    assert homs, "no degree-0 maps onto the certificate"
    # surjectivity at framing level: constant blocks of some map have full rank
    from mcmrep import linalg

    zero_mono = (0,) * nodal.ring.num_vars
    found = False
    for psi in homs:
        blk = np.array(
            [[psi[t][q].get(zero_mono, 0) for q in range(len(Am.slots))]
             for t in range(len(Q.slots))],
            dtype=np.int64,
        )
        if linalg.rank(blk, P) == len(Q.slots):
            found = True
            break
    assert found


def test_width_bound_verification(nodal, nodal_modules, cusp):
    MX, MY = nodal_modules
    report = verify_width_bounds([MX, MY, algebra_as_module(nodal)])
    assert report["violations"] == []
    assert simple_width_bound(1, nodal.alpha) == 2
    A2, ctx2 = cusp
    report2 = verify_width_bounds(catalog_modules("A", 2, A2, ctx2))
    assert report2["violations"] == []


def test_indecomposability(nodal, nodal_modules):
    MX, MY = nodal_modules
    assert is_indecomposable(MX).indecomposable
    r = is_indecomposable(direct_sum(MX, MY))
    assert not r.indecomposable
    assert r.idempotent is not None
    r2 = is_indecomposable(direct_sum(MX, MX))
    assert not r2.indecomposable and r2.idempotent is not None
    # idempotent certificate squares to itself
    from mcmrep.polys import pm_mul, pm_eq

    assert pm_eq(pm_mul(r.idempotent, r.idempotent, P), r.idempotent)


def test_indecomposable_sums_always_detected(nodal, nodal_modules, cusp):
    MX, MY = nodal_modules
    A2, ctx2 = cusp
    mods = catalog_modules("A", 2, A2, ctx2)
    pairs = [(MX, MY), (MX, shift_module(MX, -2))]
    pairs += [(mods[0], mods[1])]
    for M, N in pairs:
        if M.algebra is N.algebra:
            assert not is_indecomposable(direct_sum(M, N)).indecomposable


def test_isomorphism(nodal, nodal_modules, rng):
    MX, MY = nodal_modules
    assert not isomorphic(MX, MY).isomorphic
    assert isomorphic(MX, MX).isomorphic
    M = direct_sum(MX, MY)
    MC = conjugate_module(M, random_group_element(M, rng=rng))
    r = isomorphic(M, MC, rng=rng)
    assert r.isomorphic and r.intertwiner is not None
    assert not isomorphic(direct_sum(MX, MX), M, rng=rng).isomorphic
    # different framings are never isomorphic as framed modules
    assert not isomorphic(MX, shift_module(MX, -1)).isomorphic


def test_beta_estimate(nodal, nodal_modules, regular):
    MX, MY = nodal_modules
    # Ext^1(MX, MY) lives in degree -1: candidate g_min + d - g_max = -1 -> 0
    assert estimate_beta(nodal, [MX, MY], 1, 1) == 0
    # shifted source raises the candidate: Ext^1(MX(2), MY)_{-3} says
    # g_min(MX(2)) = -2, so candidate -2 + (-3) - 0 < 0 still clamps at 0;
    # shifting the target down instead gives a positive witness
    shifted = [MX, shift_module(MY, 3)]
    assert estimate_beta(nodal, shifted, 1, 1) >= 0
    from mcmrep.algebra import make_framed_module

    free = make_framed_module(regular, GradedDims.make({0: 1}), {}, name="R")
    with pytest.warns(UserWarning, match="isolated singularity"):
        assert estimate_beta(regular, [free], 1, 1) == 0


def test_beta_monotone_ledger(nodal, nodal_modules):
    MX, MY = nodal_modules
    led = bounds_ledger(nodal, [MX, MY, algebra_as_module(nodal)], 3)
    assert led.alpha == 1
    assert led.delta == {1: 2, 2: 3, 3: 4}
    for r in range(1, 4):
        for s in range(1, 4):
            if r > 1:
                assert led.beta_hat[(r, s)] >= led.beta_hat[(r - 1, s)]
            if s > 1:
                assert led.beta_hat[(r, s)] >= led.beta_hat[(r, s - 1)]
    assert all(led.alpha_r_hat[r] >= r * led.alpha + 1 for r in range(1, 4))


def test_classify_nodal_rank1(nodal, nodal_modules, rng):
    MX, MY = nodal_modules
    V = GradedDims.make({0: 1})
    classes = classify_rigid(nodal, V, sum_point_source([MX, MY], V, rng), rng=rng)
    assert len(classes) == 2
    assert all(c.indecomposable for c in classes)
    assert all(c.rigid_all_window for c in classes)


def test_classify_nodal_rank2(nodal, nodal_modules, rng):
    MX, MY = nodal_modules
    V = GradedDims.make({0: 2})
    classes = classify_rigid(nodal, V, sum_point_source([MX, MY], V, rng), rng=rng)
    assert len(classes) == 3
    assert all(not c.indecomposable for c in classes)
    # the mixed class is rigid only in degree zero
    assert sorted(c.rigid_all_window for c in classes) == [False, True, True]


def test_classify_seed_stability(nodal, nodal_modules):
    MX, MY = nodal_modules
    V = GradedDims.make({0: 2})
    reference = None
    for seed in range(4):
        rng = np.random.default_rng(seed)
        classes = classify_rigid(nodal, V, sum_point_source([MX, MY], V, rng), rng=rng)
        if reference is None:
            reference = classes
        else:
            assert len(classes) == len(reference)
            match_rng = np.random.default_rng(99)
            for c in classes:
                assert any(
                    isomorphic(c.representative, r.representative, rng=match_rng).isomorphic
                    for r in reference
                )


def test_indecomposable_width_within_estimated_bound(nodal, nodal_modules, cusp):
    """Empirical main-theorem shape: every indecomposable catalog module has
    width below r * max(alpha, beta_hat) + 1 computed from the catalog."""
    MX, MY = nodal_modules
    catalogs = [
        (nodal, [MX, MY, algebra_as_module(nodal, name="A")]),
        (cusp[0], catalog_modules("A", 2, *cusp)),
    ]
    for A, mods in catalogs:
        led = bounds_ledger(A, mods, max(m.V.rank() for m in mods))
        for M in mods:
            if is_indecomposable(M).indecomposable:
                st = module_stats(M)
                assert st.width < led.alpha_r_hat[st.rank], (M.name, st.width)


def test_classify_order_invariance(nodal, nodal_modules):
    """The class set does not depend on the order in which points arrive."""
    MX, MY = nodal_modules
    V = GradedDims.make({0: 2})
    rng = np.random.default_rng(5)
    pts = sum_point_source([MX, MY], V, rng)
    classes_fwd = classify_rigid(nodal, V, pts, rng=np.random.default_rng(1))
    classes_rev = classify_rigid(nodal, V, pts[::-1], rng=np.random.default_rng(1))
    assert len(classes_fwd) == len(classes_rev) == 3
    match_rng = np.random.default_rng(2)
    for c in classes_fwd:
        assert any(
            isomorphic(c.representative, d.representative, rng=match_rng).isomorphic
            for d in classes_rev
        )


def test_classify_regular(regular, rng):
    free1 = make_framed_module(regular, GradedDims.make({0: 1}), {}, name="R")
    V = GradedDims.make({0: 2})
    pts = sum_point_source([free1], V, rng)
    classes = classify_rigid(regular, V, pts, rng=rng)
    assert len(classes) == 1
    assert not classes[0].indecomposable
