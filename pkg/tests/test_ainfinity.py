"""Higher-operation layer: Stasheff gate, deformations, tensors, twists."""

import random

import pytest

from glcat.ainfinity import (
    AInfCat,
    Cofunctor,
    DeformError,
    MCElement,
    MCError,
    WorkCapExceeded,
    _all_composable_tuples,
    _candidate_tuples,
    check_stasheff,
    deform,
    from_dg,
    mc_pushforward,
    tensor_dg,
    tw_category,
    tw_cofunctor_check,
)
from glcat.category import (
    GradedLinCat,
    regular_bimodule,
    tensor_bimodule,
    tensor_linear,
    trivial_extension,
    validate,
)
from glcat.fields import QQ, PrimeField
from glcat.hochschild import HochCochain, cup_one, random_cocycle, random_noncocycle
from glcat.presets import dual_numbers, random_monomial_category, upper_triangular


def htrunc(field):
    """One object; 1, h (deg 1), x (deg 2); h∘h = x, d(h) = -x.
    Leibniz holds: d(h∘h) = dh∘h - h∘dh = -xh + hx = 0 = d(x)."""
    c = GradedLinCat(field, "htrunc")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "h", 1)
    c.add_morphism("*", "*", "x", 2)
    c.set_unit("*", "one")
    c.set_compose("h", "h", {"x": field.one})
    c.mark_dg()
    c.set_d("h", {"x": field.neg(field.one)})
    return c


def toy_ainf(field):
    """Honest arity-3 structure: u (deg 1) with u∘u = v and
    b_3(su, su, su) = sv; u itself is then Maurer-Cartan since the
    quadratic and cubic terms cancel."""
    base = GradedLinCat(field, "toy")
    base.add_object("*")
    base.add_morphism("*", "*", "one", 0)
    base.add_morphism("*", "*", "u", 1)
    base.add_morphism("*", "*", "v", 2)
    base.set_unit("*", "one")
    a = AInfCat(base, 3)
    a.set_b(("u", "u"), {"v": field.neg(field.one)})
    a.set_b(("u", "u", "u"), {"v": field.one})
    return a


def eta3(field):
    """Arity-3 cocycle on the dual numbers with regular coefficients:
    eta(x,x,x) = x.  Closed because x·x = 0 kills both end terms."""
    a = dual_numbers(field)
    M = regular_bimodule(a)
    eta = HochCochain(a, M, 3)
    eta.set_value(("x", "x", "x"), {("reg", "x"): field.one})
    return a, M, eta


def rename_tables(tables, ren):
    out = {}
    for m, tab in tables.items():
        out[m] = {
            tuple(ren(f) for f in key): {ren(r): c for r, c in vec.items()}
            for key, vec in tab.items()
        }
    return out


# ---------------------------------------------------------------------------
# DG embedding and the gate

def test_from_dg_gate_and_round_trip():
    c = htrunc(QQ)
    assert validate(c).ok
    a = from_dg(c)
    assert a.tables[1] == {("h",): {"x": QQ.one}}
    assert a.tables[2][("h", "h")] == {"x": QQ.neg(QQ.one)}
    for exhaustive in (False, True):
        rep = check_stasheff(a, 4, exhaustive=exhaustive)
        assert rep.ok, rep
    back = a.to_dg()
    assert back.mul == c.mul
    assert back.diff == c.diff
    assert validate(back).ok


def test_toy_higher_structure_passes_gate():
    a = toy_ainf(QQ)
    rep_s = check_stasheff(a, 6)
    rep_e = check_stasheff(a, 6, exhaustive=True)
    assert rep_s.ok and rep_e.ok
    # every arity got real coverage in exhaustive mode
    assert all(rep_e.tuples_checked[m] > 0 for m in range(1, 7))


def test_set_b_validation():
    a = toy_ainf(QQ)
    with pytest.raises(ValueError):
        a.set_b(("u",), {"u": QQ.one})  # degree 1, want 2
    with pytest.raises(ValueError):
        a.set_b(("one", "u"), {"v": QQ.one})
    with pytest.raises(WorkCapExceeded):
        a.set_b(("u", "u", "u", "u"), {})
    two = GradedLinCat(QQ, "two")
    two.add_object("A")
    two.add_object("B")
    two.add_morphism("A", "A", "1A", 0)
    two.add_morphism("B", "B", "1B", 0)
    two.add_morphism("A", "B", "f", 0)
    two.set_unit("A", "1A")
    two.set_unit("B", "1B")
    b = AInfCat(two, 2)
    with pytest.raises(ValueError):
        b.set_b(("f", "f"), {})  # not composable


def test_check_stasheff_work_cap():
    a = toy_ainf(QQ)
    with pytest.raises(WorkCapExceeded):
        check_stasheff(a, 6, exhaustive=True, work_cap=5)
    with pytest.raises(ValueError):
        check_stasheff(a, 7)  # beyond 2 * arity_bound


# ---------------------------------------------------------------------------
# deformations

def test_deform_cocycle_passes_gate():
    a, M, eta = eta3(QQ)
    ae = deform(a, M, eta)
    # table content: sign (-1)^{3*2/2} = -1 on the only key
    assert ae.tables[3] == {("x", "x", "x"): {("m", ("reg", "x")): QQ.neg(QQ.one)}}
    assert 1 not in ae.tables
    rep = check_stasheff(ae, 4)
    assert rep.ok, rep
    assert check_stasheff(ae, 4, exhaustive=True).ok
    # with b_1 = 0 the cohomology category is the square-zero extension:
    # same graded Homs, same induced composition
    tilde = trivial_extension(a, M, shift=-1)
    assert ae.tables[2] == from_dg(tilde).tables[2]
    for (A, B), sp in tilde.homs.items():
        assert sorted(sp.basis, key=repr) == sorted(ae.hom(A, B).basis, key=repr)
    assert ae.deform_data[3] == 3


def test_deform_noncocycle_fails_at_arity_4():
    field = QQ
    a = dual_numbers(field)
    M = regular_bimodule(a)
    psi = HochCochain(a, M, 3)
    psi.set_value(("x", "x", "x"), {("reg", "one"): field.one})
    with pytest.raises(DeformError):
        deform(a, M, psi)
    ae = deform(a, M, psi, check_cocycle=False)
    rep = check_stasheff(ae, 4)
    assert not rep.ok
    assert rep.first_failing_arity() == 4
    m, key, defect = rep.witness()
    assert key == ("x", "x", "x", "x")
    # the defect is the alternating-sum differential of the cochain:
    # d(psi)(x,x,x,x) = x·1 + 1·x = 2x
    assert defect == {("m", ("reg", "x")): field.of(2)}


def test_candidate_enumeration_matches_exhaustive():
    """Soundness of the structural tuple enumeration: every composable
    tuple with nonzero defect is produced as a candidate, on a category
    with failures (non-cocycle deformation) and on one without (toy)."""
    field = QQ
    a = dual_numbers(field)
    M = regular_bimodule(a)
    psi = HochCochain(a, M, 3)
    psi.set_value(("x", "x", "x"), {("reg", "one"): field.one})
    bad = deform(a, M, psi, check_cocycle=False)
    for cat in (bad, toy_ainf(QQ)):
        for m in range(1, 7):
            if m > 2 * cat.arity_bound:
                break
            cands = _candidate_tuples(cat, m, 10 ** 6)
            for key in _all_composable_tuples(cat, m, 10 ** 6):
                if cat.stasheff_defect(key):
                    assert key in cands, (m, key)


def test_deform_random_cocycles_prime_field():
    """Every cocycle deformation passes the gate; every verified
    non-cocycle fails it at exactly arity n + 1."""
    F = PrimeField(7)
    rng = random.Random(20260815)
    passed = failed = 0
    for _ in range(6):
        cat = random_monomial_category(F, rng)
        M = regular_bimodule(cat)
        z = random_cocycle(rng, cat, M, 3)
        if z is not None:
            ae = deform(cat, M, z)
            assert check_stasheff(ae, 4).ok
            passed += 1
        w = random_noncocycle(rng, cat, M, 3)
        if w is not None:
            ae = deform(cat, M, w, check_cocycle=False)
            rep = check_stasheff(ae, 4)
            assert not rep.ok and rep.first_failing_arity() == 4
            failed += 1
    assert passed >= 2 and failed >= 2


def test_deform_input_validation():
    field = QQ
    a = dual_numbers(field)
    M = regular_bimodule(a)
    with pytest.raises(DeformError):
        deform(a, M, HochCochain(a, M, 2))
    c = htrunc(field)
    Mc = regular_bimodule(c)
    with pytest.raises(DeformError):
        deform(c, Mc, HochCochain(c, Mc, 3))


# ---------------------------------------------------------------------------
# cofunctors: the isomorphism witness between cohomologous deformations

def _iso_setup(field):
    """n = 4: eta(x,x,x,x) = 1 is closed (x·1 - 1·x); xi(x,x,x) = 1 has
    d(xi)(x,x,x,x) = x·1 + 1·x = 2x, so eta' = eta + d(xi) deforms to an
    isomorphic structure."""
    a = dual_numbers(field)
    M = regular_bimodule(a)
    eta = HochCochain(a, M, 4)
    eta.set_value(("x",) * 4, {("reg", "one"): field.one})
    etap = HochCochain(a, M, 4)
    etap.set_value(
        ("x",) * 4, {("reg", "one"): field.one, ("reg", "x"): field.of(2)}
    )
    return a, M, eta, etap


def _strict_plus_f3(src, tgt, c3, field):
    f = Cofunctor(src, tgt, {"*": "*"}, name="w")
    for nm in src.nonunit_names():
        f.set_f((nm,), {nm: field.one})
    f.set_f(("x", "x", "x"), {("m", ("reg", "one")): c3})
    return f


def test_iso_witness_between_cohomologous_deformations():
    field = QQ
    a, M, eta, etap = _iso_setup(field)
    ae = deform(a, M, eta)
    aep = deform(a, M, etap)
    assert check_stasheff(ae, 6).ok and check_stasheff(aep, 6).ok
    # f_1 = id, f_3 = (-1)^n * suspended xi; the quartic tables only
    # store pure base keys, so the equation is vacuous past arity 6
    f = _strict_plus_f3(ae, aep, field.neg(field.one), field)
    ok, fails = f.functor_report(6)
    assert ok, fails
    # wrong sign on f_3 breaks the equation exactly at arity n
    g = _strict_plus_f3(ae, aep, field.one, field)
    ok, fails = g.functor_report(6)
    assert not ok and fails[0][0] == 4
    # and no twist at all cannot connect different cocycles
    h = Cofunctor(ae, aep, {"*": "*"})
    for nm in ae.nonunit_names():
        h.set_f((nm,), {nm: field.one})
    ok, fails = h.functor_report(6)
    assert not ok and fails[0][0] == 4


# ---------------------------------------------------------------------------
# tensoring

def test_tensor_dg_of_dg_is_dg():
    c = htrunc(QQ)
    a = from_dg(c)
    t = tensor_dg(a, c)
    assert t.is_dg()
    rep = check_stasheff(t, 4, exhaustive=True)
    assert rep.ok, rep
    back = t.to_dg()
    assert validate(back).ok
    # classical Leibniz: d(h(x)h) = dh(x)h + (-1)^{deg h} h(x)dh
    #                             = -x(x)h + h(x)x
    assert back.d_of({("h", "h"): QQ.one}) == {
        ("x", "h"): QQ.neg(QQ.one),
        ("h", "x"): QQ.one,
    }


def test_tensor_deform_matches_cup():
    """Deforming then tensoring with a degree-0 category equals
    deforming the tensor along the cup of the cocycle with the unit:
    identical tables under the evident renaming."""
    field = QQ
    a, M, eta = eta3(field)
    gamma = upper_triangular(field)
    left = tensor_dg(deform(a, M, eta), gamma)

    tcat = tensor_linear(a, gamma)
    tbim = tensor_bimodule(M, gamma, tcat)
    cup = cup_one(eta, gamma, tensored=(tcat, tbim))
    right = deform(tcat, tbim, cup)

    def ren(nm):
        x, g = nm
        if isinstance(x, tuple) and x and x[0] == "m":
            return ("m", (x[1], g))
        return (x, g)

    assert set(left.tables) == set(right.tables) == {2, 3}
    renamed = rename_tables(left.tables, ren)
    assert renamed[3] == right.tables[3]
    assert renamed[2] == right.tables[2]
    # matching graded Homs as well
    for (A, B), sp in left.base.homs.items():
        want = sorted((ren(n), d) for n, d in sp.basis)
        got = sorted(right.hom(A, B).basis)
        assert want == got
    assert check_stasheff(right, 4).ok


# ---------------------------------------------------------------------------
# twists

def test_tw_of_dg_recovers_twisted_differential():
    field = QQ
    c = htrunc(field)
    a = from_dg(c)
    zero = MCElement(a, "*", {}, label="0")
    dh = MCElement(a, "*", {"h": field.one}, label="h")
    assert dh.is_mc()
    tw = tw_category(a, [zero, dh])
    assert tw.is_dg()
    assert check_stasheff(tw, 4, exhaustive=True).ok
    back = tw.to_dg()
    assert validate(back).ok
    deltas = {0: {}, 1: {"h": field.one}}
    for i in (0, 1):
        for j in (0, 1):
            for nm in ("one", "h", "x"):
                t = ("tw", i, j, nm)
                if back.is_unit(t):
                    continue
                # d(f) + delta_tgt o f - (-1)^{deg f} f o delta_src
                want = c.d_of({nm: field.one})
                want = _vadd(field, want, c.compose(deltas[j], {nm: field.one}))
                sgn = field.one if c.deg(nm) % 2 == 0 else field.neg(field.one)
                want = _vadd(
                    field,
                    want,
                    _vscale(field, field.neg(sgn), c.compose({nm: field.one}, deltas[i])),
                )
                got = back.d_of({t: field.one})
                assert got == {("tw", i, j, r): cv for r, cv in want.items()}, t
    # composition is untouched by the twist
    g = ("tw", 0, 1, "h")
    f = ("tw", 1, 0, "h")
    assert back.compose_basis(g, f) == {("tw", 1, 1, "x"): field.one}


def _vadd(field, u, v):
    from glcat.linalg import vec_add

    return vec_add(field, u, v)


def _vscale(field, c, v):
    from glcat.linalg import vec_scale

    return vec_scale(field, c, v)


def test_tw_higher_structure_and_mc_guard():
    field = QQ
    a = toy_ainf(field)
    u = MCElement(a, "*", {"u": field.one})
    assert u.is_mc()
    bad = MCElement(a, "*", {"u": field.of(2)})
    assert bad.residual() == {"v": field.of(4)}
    with pytest.raises(MCError) as err:
        tw_category(a, [bad])
    assert err.value.residual == {"v": field.of(4)}
    tw = tw_category(a, [MCElement(a, "*", {}), u])
    rep = check_stasheff(tw, 6)
    assert rep.ok, rep
    # hom spaces are copies of the originals
    for i in (0, 1):
        for j in (0, 1):
            assert len(tw.hom(("tw", i), ("tw", j)).basis) == 3


def test_mc_pushforward_and_tw_cofunctor_check():
    field = QQ
    c = htrunc(field)
    a = from_dg(c)
    ident = Cofunctor(a, a, {"*": "*"}, name="id")
    for nm in a.nonunit_names():
        ident.set_f((nm,), {nm: field.one})
    h = MCElement(a, "*", {"h": field.one})
    pushed = mc_pushforward(ident, h)
    assert pushed.vec == {"h": field.one} and pushed.is_mc()

    broken = Cofunctor(a, a, {"*": "*"}, name="scale")
    broken.set_f(("h",), {"h": field.of(2)})
    broken.set_f(("x",), {"x": field.of(4)})
    # composition survives the scaling but the differential does not
    ok, fails = broken.functor_report(2)
    assert not ok and fails[0][0] == 1
    with pytest.raises(ValueError):
        mc_pushforward(broken, h)

    zero = MCElement(a, "*", {})
    morphs = [(0, 1, {"one": field.one})]
    ok, wits = tw_cofunctor_check(ident, [zero, h], morphs)
    assert ok and not wits
    ok, wits = tw_cofunctor_check(broken, [zero, h], morphs)
    assert not ok
    assert wits[0][0] == "twist-string"
