"""Obstruction ladder for lifting graded functors to A-infinity functors.

The target is either minimal (no differential) or an honest DG category;
its cohomology H* is the graded category the input functor lands in.  The
ladder extends an A_2 completion one arity at a time.  At each level the
failure to extend is a Hochschild class o_{i+1} in HH^{i+1} of the source
with coefficients in the pulled-back H* bimodule, and the step succeeds
exactly when that class vanishes.

Frozen facts exercised below, all over small truncated polynomial rings:

* for the square-zero extension by a cocycle eta of arity n, the ladder
  is unobstructed below n and o_n equals the class of eta itself;
* replacing eta by a coboundary d(xi) makes the whole ladder solvable and
  the solver returns the correction -xi at arity n-1;
* precomposing with x -> 2x scales o_4 by 2^4 = 16;
* re-choosing the lower homotopies does not move the obstruction class;
* a DG target whose cohomology is k[y]/(y^2) forces a nonzero
  multiplication homotopy f_2(x,x) = t with dt = f(x)^2.
"""

import random

import pytest

from glcat.ainfinity import deform, from_dg
from glcat.category import GradedFunctor, GradedLinCat, regular_bimodule, validate
from glcat.fields import PrimeField, RationalField
from glcat.hochschild import HochCochain, d_hoch, hh, random_cocycle
from glcat.obstruction import (
    AnFunctor,
    ObstructionClass,
    a2_completion,
    construct_tilde_f,
    extend_step,
    hstar_target,
    lift_functor,
    perturb_choice,
)
from glcat.presets import dual_numbers, random_monomial_category, truncated_poly

QQ = RationalField()
F5 = PrimeField(5)


def eta_arity(field, a, M, n, value):
    out = HochCochain(a, M, n)
    out.set_value(("x",) * n, {("reg", value): field.one})
    return out


def identity_into_h(c, h, name="j"):
    return GradedFunctor(c, h, {A: A for A in c.objects},
                         {m: {m: c.field.one} for m in c.nonunit_names()},
                         name=name)


def dual_setup():
    a = dual_numbers(QQ)
    M = regular_bimodule(a)
    eta4 = eta_arity(QQ, a, M, 4, "one")
    aet = deform(a, M, eta4)
    h, proj = hstar_target(aet)
    assert proj is None
    return a, M, eta4, aet, h


def test_ladder_obstructs_at_eta_arity():
    a, M, eta4, aet, h = dual_setup()
    out = lift_functor(identity_into_h(a, h), aet)
    assert isinstance(out, tuple)
    lvl, obs = out
    assert lvl == 4
    assert [(o.level, o.is_zero()) for o in obs.ladder] == [(3, True)]

    # o_4(j) is the class of eta embedded in the deformation stratum
    emb = HochCochain(a, obs.cochain.bimod, 4)
    for key, vec in eta4.vals.items():
        emb.set_value(key, {("*", "*", ("m", el)): cv for el, cv in vec.items()})
    assert obs.coh.class_of(emb) == obs.coords
    assert obs.coords == [QQ.zero, QQ.one]

    rerun = lift_functor(identity_into_h(a, h), aet)
    assert rerun[0] == lvl and rerun[1].coords == obs.coords


def test_ladder_clears_coboundary_deformation():
    a = dual_numbers(QQ)
    M = regular_bimodule(a)
    xi = HochCochain(a, M, 3)
    xi.set_value(("x", "x", "x"), {("reg", "one"): QQ.one})
    eta = d_hoch(xi)
    assert not eta.is_zero()
    aet = deform(a, M, eta)
    h, _ = hstar_target(aet)

    fn = lift_functor(identity_into_h(a, h), aet)
    assert isinstance(fn, AnFunctor) and fn.full and fn.level == 4
    assert [o.level for o in fn.ladder] == [3, 4]
    assert all(o.is_zero() for o in fn.ladder)

    # the solver recovers the primitive: the arity-3 correction is -xi
    assert fn.functor.coeffs[3] == {
        ("x", "x", "x"): {("m", ("reg", "one")): QQ.of(-1)}}
    ok, fails = fn.functor.functor_report(6)
    assert ok and not fails


def test_scaling_naturality():
    a, M, eta4, aet, h = dual_setup()
    g = GradedFunctor(a, h, {"*": "*"}, {"x": {"x": QQ.of(2)}}, name="jg")
    lvl, obs = lift_functor(g, aet)
    assert lvl == 4

    # transport eta along x -> 2x by hand: one 4-slot, factor 2^4
    emb = HochCochain(a, obs.cochain.bimod, 4)
    emb.set_value(("x",) * 4, {("*", "*", ("m", ("reg", "one"))): QQ.of(16)})
    assert obs.coh.class_of(emb) == obs.coords
    assert obs.coords == [QQ.zero, QQ.of(16)]


def test_choice_independence():
    a, M, eta4, aet, h = dual_setup()
    fn = extend_step(a2_completion(identity_into_h(a, h), aet))
    assert isinstance(fn, AnFunctor) and fn.level == 3
    base = extend_step(fn)
    assert isinstance(base, ObstructionClass)

    rng = random.Random(20260815)
    mnames = [("m", ("reg", "one")), ("m", ("reg", "x"))]
    for _ in range(3):
        table = {("x", "x", "x"):
                 {nm: QQ.of(rng.randint(-3, 3)) for nm in mnames}}
        out = extend_step(perturb_choice(fn, 3, table))
        assert isinstance(out, ObstructionClass)
        assert out.coords == base.coords


def four_dim_dg():
    # span{1, a, b, t} with a*a = b, dt = b, everything else zero
    dg = GradedLinCat(QQ, "E")
    dg.add_object("*")
    for nm, d in (("one", 0), ("a", 0), ("b", 0), ("t", -1)):
        dg.add_morphism("*", "*", nm, d)
    dg.set_unit("*", "one")
    dg.set_compose("a", "a", {"b": QQ.one})
    dg.mark_dg()
    dg.set_d("t", {"b": QQ.one})
    assert validate(dg).ok
    return dg


def test_dg_target_needs_multiplication_homotopy():
    ct = from_dg(four_dim_dg(), 2)
    h, proj = hstar_target(ct)
    assert proj is not None
    assert {n: h.deg(n) for n in h.all_names()} == {
        ("H", "*", "*", 0, 0): 0, ("H", "*", "*", 0, 1): 0}

    c = truncated_poly(QQ, 2)
    cls = [n for n in h.nonunit_names() if h.deg(n) == 0]
    f = GradedFunctor(c, h, {"*": "*"}, {"x": {cls[0]: QQ.one}}, name="fd")
    fn = lift_functor(f, ct)
    assert isinstance(fn, AnFunctor) and fn.full and fn.level == 3
    assert fn.functor.coeffs == {
        1: {("x",): {"a": QQ.one}},
        2: {("x", "x"): {"t": QQ.one}}}
    ok, fails = fn.functor.functor_report(4)
    assert ok and not fails


def test_mixed_targets_rejected():
    a3 = truncated_poly(QQ, 3)
    M3 = regular_bimodule(a3)
    xi = HochCochain(a3, M3, 2)
    xi.set_value(("x", "x2"), {("reg", "one"): QQ.one})
    aet3 = deform(a3, M3, d_hoch(xi))
    # graft a differential onto a target that keeps its higher operations
    aet3.set_b((("m", ("reg", "x")),), {"x": QQ.one})
    assert 1 in aet3.tables and not aet3.is_dg()
    with pytest.raises(ValueError):
        hstar_target(aet3)


def test_tilde_f_trivial_sources():
    a, M, eta4, aet, h = dual_setup()

    triv = GradedLinCat(QQ, "k")
    triv.add_object("*")
    triv.add_morphism("*", "*", "e", 0)
    triv.set_unit("*", "e")
    fk = GradedFunctor(triv, a, {"*": "*"}, {}, name="u")
    fn = construct_tilde_f(fk, aet)
    assert isinstance(fn, AnFunctor) and not fn.functor.coeffs

    cy = truncated_poly(QQ, 2, name="kyy")
    f0 = GradedFunctor(cy, a, {"*": "*"}, {"x": {}}, name="z")
    fn = construct_tilde_f(f0, aet)
    assert isinstance(fn, AnFunctor)
    assert all(ar == 1 for ar in fn.functor.coeffs)


def test_tilde_f_identity_refusal():
    a, M, eta4, aet, h = dual_setup()
    fid = GradedFunctor(a, a, {"*": "*"},
                        {"x": {"x": QQ.one}}, name="id")
    out = construct_tilde_f(fid, aet)
    assert isinstance(out, ObstructionClass)
    assert not out.is_zero()
    assert out.coords == [QQ.one]
    assert "refusal" in out.provenance


def test_tilde_f_coboundary_correction():
    a3 = truncated_poly(QQ, 3)
    M3 = regular_bimodule(a3)
    xi = HochCochain(a3, M3, 2)
    xi.set_value(("x", "x2"), {("reg", "one"): QQ.one})
    aet3 = deform(a3, M3, d_hoch(xi))
    fid = GradedFunctor(a3, a3, {"*": "*"},
                        {m: {m: QQ.one} for m in a3.nonunit_names()},
                        name="id")
    fn = construct_tilde_f(fid, aet3)
    assert isinstance(fn, AnFunctor)
    # base arity stays the identity, the deformation adds one M-valued slot
    assert fn.functor.coeffs[1] == {
        ("x",): {"x": QQ.one}, ("x2",): {"x2": QQ.one}}
    assert fn.functor.coeffs[2] == {
        ("x", "x2"): {("m", ("reg", "one")): QQ.one}}
    ok, _ = fn.functor.functor_report(4)
    assert ok


def test_ladder_cap_below_stabilization():
    a, M, eta4, aet, h = dual_setup()
    with pytest.raises(ValueError):
        lift_functor(identity_into_h(a, h), aet, max_arity=3)


def test_bidirectional_soundness_random():
    rng = random.Random(20260815)
    hit = {True: 0, False: 0}
    trials = 0
    while trials < 10:
        c = random_monomial_category(F5, rng, max_objects=2, max_arrows=2,
                                     path_cap=2)
        if len(c.nonunit_names()) > 5 or not c.nonunit_names():
            continue
        Mc = regular_bimodule(c)
        eta = random_cocycle(rng, c, Mc, 3)
        if eta is None or eta.is_zero():
            continue
        trials += 1
        aetc = deform(c, Mc, eta)
        hc, _ = hstar_target(aetc)
        out = lift_functor(identity_into_h(c, hc), aetc)
        lifted = isinstance(out, AnFunctor)
        assert lifted == hh(c, Mc, 3).is_coboundary(eta)
        hit[lifted] += 1
        if lifted:
            ok, _ = out.functor.functor_report(4)
            assert ok
    assert hit[True] >= 1 and hit[False] >= 1
