"""Graded/DG category layer: axiom validation, H^0, truncation."""

from glcat.fields import QQ, PrimeField
from glcat.category import (
    GradedLinCat,
    GradedFunctor,
    ModuleOverCat,
    cohomology_category,
    h0_functor,
    regular_bimodule,
    tau_le0,
    validate,
)


def dual_numbers_cat(field):
    c = GradedLinCat(field, "k[x]/(x^2)")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "x", 0)
    c.set_unit("*", "one")
    c.set_compose("x", "x", {})
    return c


def test_dual_numbers_valid():
    rep = validate(dual_numbers_cat(QQ))
    assert rep.ok, rep.summary()


def test_corrupted_associativity_names_triple():
    c = GradedLinCat(QQ, "bad")
    c.add_object("*")
    for n in ("one", "x", "y"):
        c.add_morphism("*", "*", n, 0)
    c.set_unit("*", "one")
    c.set_compose("x", "x", {"y": QQ.one})
    c.set_compose("x", "y", {})
    c.set_compose("y", "x", {"x": QQ.one})  # breaks (x,x,x)
    c.set_compose("y", "y", {})
    rep = validate(c)
    assert not rep.ok
    assoc = [d for k, d in rep.findings if k == "associativity"]
    assert any("'x'" in d for d in assoc)


def test_degree_discipline_flagged():
    c = GradedLinCat(QQ, "bad-deg")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "a", -1)
    c.set_unit("*", "one")
    c.set_compose("a", "a", {"a": QQ.one})  # degree -2 result claimed in degree -1
    rep = validate(c)
    assert any(k == "mul-degree" for k, _ in rep.findings)


def coboundary_cat(field):
    """1, x in degree 0, h in degree -1, d(h) = x; all products of
    non-units vanish."""
    c = GradedLinCat(field, "cobound")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "x", 0)
    c.add_morphism("*", "*", "h", -1)
    c.set_unit("*", "one")
    for g in ("x", "h"):
        for f in ("x", "h"):
            c.set_compose(g, f, {})
    c.set_d("h", {"x": field.one})
    return c


def test_coboundary_cat_valid():
    rep = validate(coboundary_cat(QQ))
    assert rep.ok, rep.summary()


def test_leibniz_failure_flagged():
    c = coboundary_cat(QQ)
    c.set_compose("x", "h", {"h": QQ.one})
    rep = validate(c)
    assert any(k == "leibniz" for k, _ in rep.findings)


def test_h0_zero_differential_is_degree_zero_part():
    c = GradedLinCat(QQ, "two-obj")
    c.add_object("A")
    c.add_object("B")
    c.add_morphism("A", "A", "1A", 0)
    c.add_morphism("B", "B", "1B", 0)
    c.add_morphism("A", "B", "f", 0)
    c.add_morphism("A", "B", "g", -1)
    c.set_unit("A", "1A")
    c.set_unit("B", "1B")
    assert validate(c).ok
    H0, G, _ = h0_functor(c)
    assert validate(H0).ok
    assert H0.hom("A", "B").dim == 1
    assert H0.hom("A", "A").dim == 1
    assert G.on_basis("g") == {}
    assert len(G.on_basis("f")) == 1
    assert G.validate().ok


def test_h0_kills_coboundary():
    c = coboundary_cat(QQ)
    H0, G, _ = h0_functor(c)
    # [x] = [d(h)] = 0, so H^0 is spanned by the unit class alone
    assert H0.hom("*", "*").dim == 1
    assert G.on_basis("x") == {}
    assert G.validate().ok
    rep = validate(H0)
    assert rep.ok, rep.summary()


def test_h0_functor_respects_composition_on_basis_pairs():
    f5 = PrimeField(5)
    c = GradedLinCat(f5, "comp")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "x", 0)
    c.add_morphism("*", "*", "y", 0)
    c.set_unit("*", "one")
    # k[x]/(x^3) with y = x^2
    c.set_compose("x", "x", {"y": f5.one})
    c.set_compose("x", "y", {})
    c.set_compose("y", "x", {})
    c.set_compose("y", "y", {})
    assert validate(c).ok
    H0, G, _ = h0_functor(c)
    for g in c.all_names():
        for f in c.all_names():
            lhs = G.on_vec(c.compose_basis(g, f))
            rhs = H0.compose(G.on_basis(g), G.on_basis(f))
            assert lhs == rhs, (g, f)


def endo_complex_cat(field):
    """1, b in degree 0, a in degree -1 with d(a) = b."""
    c = GradedLinCat(field, "endo")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "b", 0)
    c.add_morphism("*", "*", "a", -1)
    c.set_unit("*", "one")
    for g in ("a", "b"):
        for f in ("a", "b"):
            c.set_compose(g, f, {})
    c.set_d("a", {"b": field.one})
    return c


def hom_cohomology_dims(c):
    H, _ = cohomology_category(c)
    out = {}
    for n in H.all_names():
        key = (H.src(n), H.tgt(n), H.deg(n))
        out[key] = out.get(key, 0) + 1
    return out


def test_tau_fixed_point_without_differential():
    c = GradedLinCat(QQ, "fix")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "x", 0)
    c.add_morphism("*", "*", "h", -2)
    c.set_unit("*", "one")
    c.set_compose("x", "x", {"x": QQ.one})
    c.set_compose("x", "h", {"h": QQ.one})
    c.set_compose("h", "x", {"h": QQ.one})
    c.set_compose("h", "h", {})
    assert validate(c).ok
    t = tau_le0(c)
    assert validate(t).ok
    sp0 = c.hom("*", "*")
    sp1 = t.hom("*", "*")
    for q in (-2, 0):
        assert len(sp0.names_in_degree(q)) == len(sp1.names_in_degree(q))
    # x is idempotent; its truncated incarnation must stay idempotent
    xs = [n for n in t.all_names() if not t.is_unit(n) and t.deg(n) == 0]
    assert len(xs) == 1
    x = xs[0]
    assert t.compose_basis(x, x) == {x: t.field.one}


def test_tau_drops_positive_degree_and_non_cocycles():
    c = GradedLinCat(QQ, "plus")
    c.add_object("*")
    c.add_morphism("*", "*", "one", 0)
    c.add_morphism("*", "*", "x", 0)
    c.add_morphism("*", "*", "u", 1)
    c.set_unit("*", "one")
    for g, f in (("x", "x"), ("x", "u"), ("u", "x"), ("u", "u")):
        c.set_compose(g, f, {})
    c.set_d("x", {"u": QQ.one})
    assert validate(c).ok, validate(c).summary()
    t = tau_le0(c)
    assert validate(t).ok
    # x is not a cocycle and u has positive degree: only the unit survives
    assert t.hom("*", "*").dim == 1
    assert t.is_unit(t.all_names()[0])


def test_tau_preserves_nonpositive_cohomology():
    c = endo_complex_cat(QQ)
    assert validate(c).ok
    t = tau_le0(c)
    assert validate(t).ok
    dims_c = hom_cohomology_dims(c)
    dims_t = hom_cohomology_dims(t)
    for q in (0, -1, -2):
        assert dims_c.get(("*", "*", q), 0) == dims_t.get(("*", "*", q), 0)


def test_cohomology_category_unit_is_basis_class():
    c = endo_complex_cat(QQ)
    H, projdata = cohomology_category(c)
    assert validate(H).ok
    u = H.unit_of("*")
    assert H.deg(u) == 0
    # the unit's class coordinates are the first unit vector
    coords = projdata.project_vec("*", "*", {"one": QQ.one})
    assert coords == {u: QQ.one}
    # [b] = [d(a)] = 0
    assert projdata.project_vec("*", "*", {"b": QQ.one}) == {}


def test_regular_bimodule_valid():
    c = dual_numbers_cat(QQ)
    M = regular_bimodule(c)
    rep = M.validate()
    assert rep.ok, rep.summary()
    x = M.element_of("x")
    # x·x = 0 on both sides
    assert M.lact_basis("x", x) == {}
    assert M.ract_basis(x, "x") == {}


def test_functor_validation_catches_broken_map():
    c = dual_numbers_cat(QQ)
    F = GradedFunctor(c, c, {"*": "*"}, {"x": {"one": QQ.one}})
    rep = F.validate()
    assert any(k == "composition" for k, _ in rep.findings)
    G = GradedFunctor(c, c, {"*": "*"}, {"x": {"x": QQ.one}})
    assert G.validate().ok


def test_module_over_cat_validation():
    c = dual_numbers_cat(QQ)
    U = ModuleOverCat(c, "U")
    U.add_element("*", "u1")
    U.add_element("*", "ux")
    U.set_act("x", "u1", {"ux": QQ.one})
    U.set_act("x", "ux", {})
    assert U.validate().ok
    U.set_act("x", "ux", {"u1": QQ.one})
    rep = U.validate()
    assert any(k == "module-assoc" for k, _ in rep.findings)
