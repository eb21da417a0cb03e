"""Finite graded and DG linear categories, bimodules, functors, modules.

Conventions used across the whole engine:

* hom(A, B) holds morphisms A -> B; compose(g, f) is g∘f for f: A -> B
  and g: B -> C.  Structure constants are stored sparsely for non-unit
  pairs only; units compose by definition.
* A bimodule M has spaces M(X, Y) ("elements from X to Y"); the left
  category acts by post-composition on Y, the right category by
  pre-composition on X.  The regular bimodule of a category is its own
  hom spaces with both actions given by composition.
* An optional differential d has degree +1, satisfies d∘d = 0, kills
  units and obeys the graded Leibniz rule d(g∘f) = d(g)∘f +
  (-1)^{|g|} g∘d(f).

Basis names must be unique across one category (or bimodule, or module);
this is what lets sparse tables key on bare names.
"""

from .linalg import (
    GradedSpace,
    SparseMap,
    Reducer,
    cohomology_of_space,
    vec_add,
    vec_addmul,
    vec_clean,
    vec_is_zero,
    vec_scale,
    vec_sub,
)

__all__ = [
    "GradedLinCat",
    "Bimodule",
    "GradedFunctor",
    "ModuleOverCat",
    "ValidationReport",
    "validate",
    "h0_functor",
    "tau_le0",
    "cohomology_category",
    "regular_bimodule",
    "tensor_linear",
    "tensor_bimodule",
    "trivial_extension",
    "opposite_cat",
]


class ValidationReport:
    """Accumulates axiom violations; empty means valid."""

    __slots__ = ("findings",)

    def __init__(self):
        self.findings = []

    def fail(self, kind, detail):
        self.findings.append((kind, detail))

    @property
    def ok(self):
        return not self.findings

    def summary(self):
        if self.ok:
            return "valid"
        return "; ".join("%s: %s" % (k, d) for k, d in self.findings)

    def __repr__(self):
        return "ValidationReport(%s)" % self.summary()


class GradedLinCat:
    def __init__(self, field, name="c"):
        self.field = field
        self.name = name
        self.objects = []
        self.homs = {}        # (A, B) -> GradedSpace
        self.units = {}       # A -> basis name
        self.mul = {}         # (g, f) -> vector, g∘f, non-unit pairs only
        self.diff = {}        # basis name -> vector (degree +1); empty = no d
        self.has_diff = False
        self._loc = {}        # basis name -> (A, B)
        self._deg = {}        # basis name -> degree

    # -- construction ------------------------------------------------------

    def add_object(self, A):
        if A in self.objects:
            raise ValueError("duplicate object %r" % (A,))
        self.objects.append(A)

    def add_morphism(self, A, B, name, degree):
        if name in self._loc:
            raise ValueError("duplicate basis name %r" % (name,))
        key = (A, B)
        sp = self.homs.get(key)
        basis = (sp.basis if sp else []) + [(name, degree)]
        self.homs[key] = GradedSpace(basis)
        self._loc[name] = key
        self._deg[name] = degree

    def set_unit(self, A, name):
        if self._loc.get(name) != (A, A):
            raise ValueError("unit %r must lie in hom(%r, %r)" % (name, A, A))
        self.units[A] = name

    def set_compose(self, g, f, vec):
        """Declare g∘f = vec.  Unit factors are implied; don't store them."""
        if self.is_unit(g) or self.is_unit(f):
            raise ValueError("unit compositions are implied")
        if self.src(g) != self.tgt(f):
            raise ValueError("(%r, %r) not composable" % (g, f))
        vec = vec_clean(self.field, vec)
        if vec:
            self.mul[(g, f)] = vec
        else:
            self.mul.pop((g, f), None)

    def set_d(self, name, vec):
        vec = vec_clean(self.field, vec)
        if vec:
            self.diff[name] = vec
            self.has_diff = True
        else:
            self.diff.pop(name, None)

    def mark_dg(self):
        # a category can be DG with d = 0; callers flag it explicitly
        self.has_diff = True

    # -- lookups -----------------------------------------------------------

    def hom(self, A, B):
        sp = self.homs.get((A, B))
        return sp if sp is not None else GradedSpace([])

    def src(self, name):
        return self._loc[name][0]

    def tgt(self, name):
        return self._loc[name][1]

    def deg(self, name):
        return self._deg[name]

    def is_unit(self, name):
        A = self._loc[name][0]
        return self.units.get(A) == name and self._loc[name][1] == A

    def unit_of(self, A):
        return self.units[A]

    def all_names(self):
        return list(self._loc)

    def nonunit_names(self, A=None, B=None):
        out = []
        for n, (x, y) in self._loc.items():
            if A is not None and x != A:
                continue
            if B is not None and y != B:
                continue
            if not self.is_unit(n):
                out.append(n)
        return out

    # -- composition -------------------------------------------------------

    def compose_basis(self, g, f):
        """g∘f for basis names; units implied."""
        if self.tgt(f) != self.src(g):
            raise ValueError("not composable: %r after %r" % (g, f))
        if self.is_unit(g):
            return {f: self.field.one}
        if self.is_unit(f):
            return {g: self.field.one}
        return dict(self.mul.get((g, f), {}))

    def compose(self, gvec, fvec):
        """Bilinear extension of compose_basis."""
        fld = self.field
        out = {}
        for g, cg in gvec.items():
            for f, cf in fvec.items():
                c = fld.mul(cg, cf)
                if fld.is_zero(c):
                    continue
                for h, ch in self.compose_basis(g, f).items():
                    s = fld.add(out.get(h, fld.zero), fld.mul(c, ch))
                    if fld.is_zero(s):
                        out.pop(h, None)
                    else:
                        out[h] = s
        return out

    def d_of(self, vec):
        fld = self.field
        out = {}
        for n, c in vec.items():
            for m, cm in self.diff.get(n, {}).items():
                s = fld.add(out.get(m, fld.zero), fld.mul(c, cm))
                if fld.is_zero(s):
                    out.pop(m, None)
                else:
                    out[m] = s
        return out

    def hom_diff_map(self, A, B):
        """The differential of hom(A,B) as a SparseMap of degree +1."""
        sp = self.hom(A, B)
        m = SparseMap(self.field, sp, sp, 1)
        for n, _ in sp.basis:
            for r, c in self.diff.get(n, {}).items():
                m.add_entry(r, n, c)
        return m

    def __repr__(self):
        return "GradedLinCat(%r, %d objects)" % (self.name, len(self.objects))


def validate(c):
    """Check every category axiom; the report lists each violation."""
    rep = ValidationReport()
    fld = c.field
    for A in c.objects:
        u = c.units.get(A)
        if u is None:
            rep.fail("unit-missing", "object %r has no unit" % (A,))
        elif c.deg(u) != 0:
            rep.fail("unit-degree", "unit of %r has degree %d" % (A, c.deg(u)))
    # structure constants: degree and location discipline
    for (g, f), vec in c.mul.items():
        A, B = c.src(f), c.tgt(f)
        C = c.tgt(g)
        if c.src(g) != B:
            rep.fail("mul-composability", "(%r, %r)" % (g, f))
            continue
        want = c.deg(g) + c.deg(f)
        for h, _ in vec.items():
            if c._loc[h] != (A, C):
                rep.fail("mul-location", "(%r∘%r) hits %r" % (g, f, h))
            elif c.deg(h) != want:
                rep.fail("mul-degree", "(%r∘%r) degree %d != %d" % (g, f, c.deg(h), want))
    # associativity on non-unit triples
    for h in c.all_names():
        if c.is_unit(h):
            continue
        for g in c.nonunit_names(B=c.src(h)):
            gh = c.compose_basis(h, g)
            for f in c.nonunit_names(B=c.src(g)):
                left = c.compose({h: fld.one}, c.compose_basis(g, f))
                right = c.compose(gh, {f: fld.one})
                if vec_clean(fld, vec_sub(fld, left, right)):
                    rep.fail("associativity", "(%r, %r, %r)" % (h, g, f))
    # differential axioms
    if c.diff:
        for n, vec in c.diff.items():
            loc = c._loc[n]
            for m in vec:
                if c._loc[m] != loc:
                    rep.fail("d-location", "%r -> %r" % (n, m))
                elif c.deg(m) != c.deg(n) + 1:
                    rep.fail("d-degree", "%r -> %r" % (n, m))
            if c.is_unit(n) and vec:
                rep.fail("d-unit", "d(unit %r) != 0" % (n,))
            if vec_clean(fld, c.d_of(vec)):
                rep.fail("d-squared", "d²(%r) != 0" % (n,))
        for g in c.all_names():
            for f in c.all_names():
                if c.src(g) != c.tgt(f) or (c.is_unit(g) and c.is_unit(f)):
                    continue
                lhs = c.d_of(c.compose_basis(g, f))
                rhs = c.compose(c.diff.get(g, {}), {f: fld.one})
                sgn = fld.one if c.deg(g) % 2 == 0 else fld.neg(fld.one)
                rhs = vec_add(fld, rhs, vec_scale(fld, sgn, c.compose({g: fld.one}, c.diff.get(f, {}))))
                if vec_clean(fld, vec_sub(fld, lhs, rhs)):
                    rep.fail("leibniz", "(%r, %r)" % (g, f))
    return rep


# ---------------------------------------------------------------------------
# bimodules

class Bimodule:
    """(left_cat, right_cat)-bimodule; M(X, Y) are elements from X to Y."""

    def __init__(self, left_cat, right_cat, name="M"):
        if left_cat.field != right_cat.field:
            raise ValueError("field mismatch")
        self.field = left_cat.field
        self.left_cat = left_cat
        self.right_cat = right_cat
        self.name = name
        self.spaces = {}   # (X, Y) -> GradedSpace
        self.lact = {}     # (a_name, m_name) -> vector   a·m, post-composition
        self.ract = {}     # (m_name, b_name) -> vector   m·b, pre-composition
        self.diff = {}
        self._loc = {}
        self._deg = {}

    def add_element(self, X, Y, name, degree):
        if name in self._loc:
            raise ValueError("duplicate element %r" % (name,))
        key = (X, Y)
        sp = self.spaces.get(key)
        self.spaces[key] = GradedSpace((sp.basis if sp else []) + [(name, degree)])
        self._loc[name] = key
        self._deg[name] = degree

    def space(self, X, Y):
        sp = self.spaces.get((X, Y))
        return sp if sp is not None else GradedSpace([])

    def loc(self, name):
        return self._loc[name]

    def deg(self, name):
        return self._deg[name]

    def all_names(self):
        return list(self._loc)

    def set_lact(self, a, m, vec):
        if self.left_cat.is_unit(a):
            raise ValueError("unit actions are implied")
        vec = vec_clean(self.field, vec)
        if vec:
            self.lact[(a, m)] = vec
        else:
            self.lact.pop((a, m), None)

    def set_ract(self, m, b, vec):
        if self.right_cat.is_unit(b):
            raise ValueError("unit actions are implied")
        vec = vec_clean(self.field, vec)
        if vec:
            self.ract[(m, b)] = vec
        else:
            self.ract.pop((m, b), None)

    def set_d(self, m, vec):
        vec = vec_clean(self.field, vec)
        if vec:
            self.diff[m] = vec
        else:
            self.diff.pop(m, None)

    def lact_basis(self, a, m):
        # a ∈ left_cat(Y, Y'), m ∈ M(X, Y) -> M(X, Y')
        X, Y = self._loc[m]
        if self.left_cat.src(a) != Y:
            raise ValueError("left action not composable")
        if self.left_cat.is_unit(a):
            return {m: self.field.one}
        return dict(self.lact.get((a, m), {}))

    def ract_basis(self, m, b):
        # m ∈ M(X, Y), b ∈ right_cat(X', X) -> M(X', Y)
        X, Y = self._loc[m]
        if self.right_cat.tgt(b) != X:
            raise ValueError("right action not composable")
        if self.right_cat.is_unit(b):
            return {m: self.field.one}
        return dict(self.ract.get((m, b), {}))

    def lact_vec(self, avec, mvec):
        fld = self.field
        out = {}
        for a, ca in avec.items():
            for m, cm in mvec.items():
                c = fld.mul(ca, cm)
                if fld.is_zero(c):
                    continue
                for r, cr in self.lact_basis(a, m).items():
                    s = fld.add(out.get(r, fld.zero), fld.mul(c, cr))
                    if fld.is_zero(s):
                        out.pop(r, None)
                    else:
                        out[r] = s
        return out

    def ract_vec(self, mvec, bvec):
        fld = self.field
        out = {}
        for m, cm in mvec.items():
            for b, cb in bvec.items():
                c = fld.mul(cm, cb)
                if fld.is_zero(c):
                    continue
                for r, cr in self.ract_basis(m, b).items():
                    s = fld.add(out.get(r, fld.zero), fld.mul(c, cr))
                    if fld.is_zero(s):
                        out.pop(r, None)
                    else:
                        out[r] = s
        return out

    def d_of(self, vec):
        fld = self.field
        out = {}
        for n, c in vec.items():
            for m, cm in self.diff.get(n, {}).items():
                out[m] = fld.add(out.get(m, fld.zero), fld.mul(c, cm))
        return vec_clean(fld, out)

    def validate(self):
        rep = ValidationReport()
        fld = self.field
        lc, rc = self.left_cat, self.right_cat
        # left associativity: (a1∘a2)·m = a1·(a2·m)
        for m in self.all_names():
            X, Y = self._loc[m]
            for a2 in lc.nonunit_names(A=Y):
                a2m = self.lact_basis(a2, m)
                for a1 in lc.nonunit_names(A=lc.tgt(a2)):
                    left = self.lact_vec(lc.compose_basis(a1, a2), {m: fld.one})
                    right = self.lact_vec({a1: fld.one}, a2m)
                    if vec_clean(fld, vec_sub(fld, left, right)):
                        rep.fail("left-assoc", "(%r, %r, %r)" % (a1, a2, m))
            for b1 in rc.nonunit_names(B=X):
                mb1 = self.ract_basis(m, b1)
                for b2 in rc.nonunit_names(B=rc.src(b1)):
                    left = self.ract_vec({m: fld.one}, rc.compose_basis(b1, b2))
                    right = self.ract_vec(mb1, {b2: fld.one})
                    if vec_clean(fld, vec_sub(fld, left, right)):
                        rep.fail("right-assoc", "(%r, %r, %r)" % (m, b1, b2))
            # commuting actions
            for a in lc.nonunit_names(A=Y):
                am = self.lact_basis(a, m)
                for b in rc.nonunit_names(B=X):
                    left = self.ract_vec(am, {b: fld.one})
                    right = self.lact_vec({a: fld.one}, self.ract_basis(m, b))
                    if vec_clean(fld, vec_sub(fld, left, right)):
                        rep.fail("bimodule-commute", "(%r, %r, %r)" % (a, m, b))
        # degree discipline
        for (a, m), vec in self.lact.items():
            want = lc.deg(a) + self.deg(m)
            for r in vec:
                if self.deg(r) != want:
                    rep.fail("lact-degree", "(%r·%r)" % (a, m))
        for (m, b), vec in self.ract.items():
            want = self.deg(m) + rc.deg(b)
            for r in vec:
                if self.deg(r) != want:
                    rep.fail("ract-degree", "(%r·%r)" % (m, b))
        return rep


def regular_bimodule(c, name=None):
    """The category as a bimodule over itself (actions = composition)."""
    M = Bimodule(c, c, name or (c.name + ":reg"))
    ren = {}  # category basis name -> bimodule element name
    for (A, B), sp in c.homs.items():
        for n, d in sp.basis:
            el = ("reg", n)
            M.add_element(A, B, el, d)
            ren[n] = el
    for n in c.all_names():
        A, B = c._loc[n]
        for a in c.nonunit_names(A=B):
            vec = c.compose_basis(a, n)
            M.set_lact(a, ren[n], {ren[r]: cv for r, cv in vec.items()})
        for b in c.nonunit_names(B=A):
            vec = c.compose_basis(n, b)
            M.set_ract(ren[n], b, {ren[r]: cv for r, cv in vec.items()})
        if n in c.diff:
            M.set_d(ren[n], {ren[r]: cv for r, cv in c.diff[n].items()})
    M.element_of = lambda cat_name: ren[cat_name]
    return M


def tensor_linear(a, b, name=None):
    """Componentwise tensor product of two degree-0 linear categories.

    Objects are pairs (A, P); hom((A,P),(B,Q)) has basis (x, g) for basis
    x of a(A,B) and g of b(P,Q); (x,g)∘(x',g') = (x∘x')⊗(g∘g').  In
    degree 0 the Koszul signs are all +1.
    """
    if a.field != b.field:
        raise ValueError("field mismatch")
    for c in (a, b):
        for n in c.all_names():
            if c.deg(n) != 0:
                raise ValueError("tensor_linear requires degree-0 categories")
        if c.diff:
            raise ValueError("tensor_linear requires zero differential")
    t = GradedLinCat(a.field, name or ("%s(x)%s" % (a.name, b.name)))
    for A in a.objects:
        for P in b.objects:
            t.add_object((A, P))
    for x in a.all_names():
        XA, XB = a.src(x), a.tgt(x)
        for g in b.all_names():
            GP, GQ = b.src(g), b.tgt(g)
            t.add_morphism((XA, GP), (XB, GQ), (x, g), 0)
    for A in a.objects:
        for P in b.objects:
            t.set_unit((A, P), (a.unit_of(A), b.unit_of(P)))
    fld = a.field
    for (x, g) in t.all_names():
        if t.is_unit((x, g)):
            continue
        for (x2, g2) in t.all_names():
            if t.is_unit((x2, g2)) or t.src((x, g)) != t.tgt((x2, g2)):
                continue
            xprod = a.compose_basis(x, x2)
            gprod = b.compose_basis(g, g2)
            vec = {}
            for xr, cx in xprod.items():
                for gr, cg in gprod.items():
                    vec[(xr, gr)] = fld.mul(cx, cg)
            t.set_compose((x, g), (x2, g2), vec)
    return t


def tensor_bimodule(M, b, tcat, name=None):
    """M⊗b over tensor_linear(a, b): elements (m, g), actions
    componentwise.  b must be degree 0; M may be graded."""
    fld = M.field
    out = Bimodule(tcat, tcat, name or (M.name + "(x)" + b.name))
    for (X, Y), sp in M.spaces.items():
        for P in b.objects:
            for Q in b.objects:
                for g, _dg in b.hom(P, Q).basis:
                    for m, dm in sp.basis:
                        out.add_element((X, P), (Y, Q), (m, g), dm)
    for (m, g) in out.all_names():
        (X, P), (Y, Q) = out.loc((m, g))
        for (x, h) in tcat.all_names():
            if tcat.is_unit((x, h)):
                continue
            if tcat.src((x, h)) == (Y, Q):
                mv = M.lact_basis(x, m)
                gv = b.compose_basis(h, g)
                vec = {}
                for mr, cm in mv.items():
                    for gr, cg in gv.items():
                        vec[(mr, gr)] = fld.mul(cm, cg)
                out.set_lact((x, h), (m, g), vec)
            if tcat.tgt((x, h)) == (X, P):
                mv = M.ract_basis(m, x)
                gv = b.compose_basis(g, h)
                vec = {}
                for mr, cm in mv.items():
                    for gr, cg in gv.items():
                        vec[(mr, gr)] = fld.mul(cm, cg)
                out.set_ract((m, g), (x, h), vec)
    return out


def trivial_extension(a, M, shift=0, name=None):
    """Square-zero extension of a by a degree-shifted copy of M.

    The M-part lands in degree deg_M + shift; composition is a's
    composition, the two actions, and zero on M∘M.  Morphism names:
    a-names kept, M-part elements become ("m", element).  Zero
    differential.
    """
    out = GradedLinCat(a.field, name or ("%s(+)%s" % (a.name, M.name)))
    for A in a.objects:
        out.add_object(A)
    for (A, B), sp in a.homs.items():
        for n, d in sp.basis:
            out.add_morphism(A, B, n, d)
    for (X, Y), sp in M.spaces.items():
        for el, d in sp.basis:
            out.add_morphism(X, Y, ("m", el), d + shift)
    for A, u in a.units.items():
        out.set_unit(A, u)
    for (g, f), vec in a.mul.items():
        out.set_compose(g, f, vec)
    for el in M.all_names():
        X, Y = M.loc(el)
        for g in a.nonunit_names(A=Y):
            vec = M.lact_basis(g, el)
            out.set_compose(g, ("m", el), {("m", r): c for r, c in vec.items()})
        for f in a.nonunit_names(B=X):
            vec = M.ract_basis(el, f)
            out.set_compose(("m", el), f, {("m", r): c for r, c in vec.items()})
        # M∘M = 0: simply not stored
    return out


def opposite_cat(c, name=None):
    """Reverse all arrows; structure constants transposed (no signs: the
    callers use this for degree-0 categories only)."""
    for n in c.all_names():
        if c.deg(n) != 0:
            raise ValueError("opposite_cat implemented for degree-0 categories")
    op = GradedLinCat(c.field, name or (c.name + "^op"))
    for A in c.objects:
        op.add_object(A)
    for n in c.all_names():
        op.add_morphism(c.tgt(n), c.src(n), n, 0)
    for A, u in c.units.items():
        op.set_unit(A, u)
    for (g, f), vec in c.mul.items():
        op.set_compose(f, g, vec)
    return op


# ---------------------------------------------------------------------------
# functors and one-sided modules

class GradedFunctor:
    """Degree-0 functor between graded linear categories."""

    def __init__(self, source, target, obj_map, mor_map, name="F"):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.mor_map = {k: vec_clean(target.field, v) for k, v in mor_map.items()}
        self.name = name

    def on_obj(self, A):
        return self.obj_map[A]

    def on_basis(self, n):
        if self.source.is_unit(n):
            A = self.source.src(n)
            return {self.target.unit_of(self.obj_map[A]): self.target.field.one}
        return dict(self.mor_map.get(n, {}))

    def on_vec(self, vec):
        fld = self.target.field
        out = {}
        for n, c in vec.items():
            for m, cm in self.on_basis(n).items():
                s = fld.add(out.get(m, fld.zero), fld.mul(c, cm))
                if fld.is_zero(s):
                    out.pop(m, None)
                else:
                    out[m] = s
        return out

    def validate(self):
        rep = ValidationReport()
        s, t = self.source, self.target
        fld = t.field
        for A in s.objects:
            if A not in self.obj_map or self.obj_map[A] not in t.objects:
                rep.fail("object-map", repr(A))
        for n in s.all_names():
            img = self.on_basis(n)
            A, B = s.src(n), s.tgt(n)
            for m in img:
                if t._loc[m] != (self.obj_map[A], self.obj_map[B]):
                    rep.fail("morphism-location", repr(n))
                elif t.deg(m) != s.deg(n):
                    rep.fail("degree", repr(n))
        for g in s.all_names():
            for f in s.all_names():
                if s.src(g) != s.tgt(f):
                    continue
                lhs = self.on_vec(s.compose_basis(g, f))
                rhs = t.compose(self.on_basis(g), self.on_basis(f))
                if vec_clean(fld, vec_sub(fld, lhs, rhs)):
                    rep.fail("composition", "(%r, %r)" % (g, f))
        return rep


class ModuleOverCat:
    """Left module over a category: a covariant linear functor to spaces.

    act(f, u) for f: A -> B sends U(A) to U(B); unit actions implied.
    """

    def __init__(self, cat, name="U"):
        self.cat = cat
        self.field = cat.field
        self.name = name
        self.spaces = {}  # A -> GradedSpace
        self.act = {}     # (f_name, u_name) -> vector
        self._loc = {}
        self._deg = {}

    def add_element(self, A, name, degree=0):
        if name in self._loc:
            raise ValueError("duplicate element %r" % (name,))
        sp = self.spaces.get(A)
        self.spaces[A] = GradedSpace((sp.basis if sp else []) + [(name, degree)])
        self._loc[name] = A
        self._deg[name] = degree

    def space(self, A):
        sp = self.spaces.get(A)
        return sp if sp is not None else GradedSpace([])

    def loc(self, name):
        return self._loc[name]

    def deg(self, name):
        return self._deg[name]

    def all_names(self):
        return list(self._loc)

    def set_act(self, f, u, vec):
        if self.cat.is_unit(f):
            raise ValueError("unit actions are implied")
        vec = vec_clean(self.field, vec)
        if vec:
            self.act[(f, u)] = vec
        else:
            self.act.pop((f, u), None)

    def act_basis(self, f, u):
        if self.cat.src(f) != self._loc[u]:
            raise ValueError("action not composable")
        if self.cat.is_unit(f):
            return {u: self.field.one}
        return dict(self.act.get((f, u), {}))

    def act_vec(self, fvec, uvec):
        fld = self.field
        out = {}
        for f, cf in fvec.items():
            for u, cu in uvec.items():
                c = fld.mul(cf, cu)
                if fld.is_zero(c):
                    continue
                for r, cr in self.act_basis(f, u).items():
                    s = fld.add(out.get(r, fld.zero), fld.mul(c, cr))
                    if fld.is_zero(s):
                        out.pop(r, None)
                    else:
                        out[r] = s
        return out

    def validate(self):
        rep = ValidationReport()
        fld = self.field
        c = self.cat
        for u in self.all_names():
            A = self._loc[u]
            for g in c.nonunit_names(A=A):
                gu = self.act_basis(g, u)
                for f in c.nonunit_names(A=c.tgt(g)):
                    left = self.act_vec(c.compose_basis(f, g), {u: fld.one})
                    right = self.act_vec({f: fld.one}, gu)
                    if vec_clean(fld, vec_sub(fld, left, right)):
                        rep.fail("module-assoc", "(%r, %r, %r)" % (f, g, u))
        for (f, u), vec in self.act.items():
            want = c.deg(f) + self.deg(u)
            B = c.tgt(f)
            for r in vec:
                if self._loc[r] != B:
                    rep.fail("act-location", "(%r·%r)" % (f, u))
                elif self.deg(r) != want:
                    rep.fail("act-degree", "(%r·%r)" % (f, u))
        return rep


# ---------------------------------------------------------------------------
# H^0, truncation, cohomology category

def cohomology_category(c, name=None):
    """H*(c) as a graded linear category, plus per-pair projection data.

    Works for any validated DG category.  Units are inserted as preferred
    class representatives so each H-object keeps an honest unit basis
    element.  Returns (H, proj) where proj[(A, B)] maps degree q to the
    Cohomology object of hom(A,B) in degree q; producers use it to send
    cocycles to class coordinates.
    """
    fld = c.field
    H = GradedLinCat(fld, name or ("H*(%s)" % c.name))
    for A in c.objects:
        H.add_object(A)
    proj = {}
    lifts = {}   # H-basis name -> cocycle vector in c
    for A in c.objects:
        for B in c.objects:
            sp = c.hom(A, B)
            if sp.dim == 0:
                continue
            for q in sp.degrees_present():
                sub = GradedSpace([(n, q) for n in sp.names_in_degree(q)])
                d_out = _degree_block(fld, c, A, B, q)
                d_in = _degree_block(fld, c, A, B, q - 1)
                preferred = ()
                if A == B and q == 0:
                    preferred = ({c.unit_of(A): fld.one},)
                coh = cohomology_of_space(fld, sub, d_in, d_out, preferred)
                proj[(A, B, q)] = coh
                for i in range(coh.dim):
                    hname = ("H", A, B, q, i)
                    H.add_morphism(A, B, hname, q)
                    lifts[hname] = coh.lifts[i]
    # by the preferred insertion the unit's class, when nonzero, is lift 0
    for A in c.objects:
        coh = proj.get((A, A, 0))
        if coh is None or coh.dim == 0:
            raise ValueError("object %r has no identity class in H*" % (A,))
        first = coh.lifts[0]
        if vec_clean(fld, vec_sub(fld, first, {c.unit_of(A): fld.one})):
            raise ValueError("unit class of %r collapsed in cohomology" % (A,))
        H.set_unit(A, ("H", A, A, 0, 0))
    # composition constants: compose lifts, project
    for g, gl in lifts.items():
        if H.is_unit(g):
            continue
        _, GA, GB, gq, _ = g
        for f, flv in lifts.items():
            if H.is_unit(f):
                continue
            _, FA, FB, fq, _ = f
            if FB != GA:
                continue
            prod = c.compose(gl, flv)
            if not prod:
                continue
            coh = proj.get((FA, GB, gq + fq))
            if coh is None:
                if not vec_is_zero(fld, prod):
                    raise ValueError("composite escapes recorded degrees")
                continue
            coords = coh.project(prod)
            vec = {}
            for i, cval in enumerate(coords):
                if not fld.is_zero(cval):
                    vec[("H", FA, GB, gq + fq, i)] = cval
            if vec:
                H.set_compose(g, f, vec)
    return H, _CohProjection(c, H, proj, lifts)


class _CohProjection:
    """Maps cocycles of c to coordinates in the fixed H*(c) class basis."""

    __slots__ = ("c", "H", "proj", "lifts")

    def __init__(self, c, H, proj, lifts):
        self.c = c
        self.H = H
        self.proj = proj
        self.lifts = lifts

    def project_vec(self, A, B, vec):
        """Homogeneous cocycle in c.hom(A,B) -> vector over H-basis."""
        fld = self.c.field
        vec = vec_clean(fld, vec)
        if not vec:
            return {}
        q = self.c.hom(A, B).vector_degree(vec)
        coh = self.proj.get((A, B, q))
        if coh is None:
            raise ValueError("no classes recorded in degree %d" % q)
        coords = coh.project(vec)
        return vec_clean(fld, {
            ("H", A, B, q, i): cv for i, cv in enumerate(coords)
        })

    def lift_vec(self, hvec):
        fld = self.c.field
        out = {}
        for hname, cv in hvec.items():
            out = vec_addmul(fld, out, cv, self.lifts[hname])
        return out


def _degree_block(field, c, A, B, q):
    """d: hom(A,B)^q -> hom(A,B)^{q+1} as a SparseMap (None when empty)."""
    sp = c.hom(A, B)
    dom_names = sp.names_in_degree(q)
    cod_names = sp.names_in_degree(q + 1)
    if not dom_names:
        return None
    dom = GradedSpace([(n, q) for n in dom_names])
    cod = GradedSpace([(n, q + 1) for n in cod_names])
    m = SparseMap(field, dom, cod, 1)
    for n in dom_names:
        for r, cv in c.diff.get(n, {}).items():
            m.add_entry(r, n, cv)
    return m


def h0_functor(c):
    """(H^0(c), G) for a DG category concentrated in degrees <= 0.

    G is the degree-0 projection functor: degree-0 basis elements map to
    their class, everything else to zero.
    """
    for n in c.all_names():
        if c.deg(n) > 0:
            raise ValueError("positive-degree morphism %r present" % (n,))
    H, projdata = cohomology_category(c, name="H0(%s)" % c.name)
    # restrict to degree 0
    H0 = GradedLinCat(c.field, "H0(%s)" % c.name)
    for A in c.objects:
        H0.add_object(A)
    keep = set()
    for n in H.all_names():
        if H.deg(n) == 0:
            A, B = H.src(n), H.tgt(n)
            H0.add_morphism(A, B, n, 0)
            keep.add(n)
    for A in c.objects:
        H0.set_unit(A, H.unit_of(A))
    for (g, f), vec in H.mul.items():
        if g in keep and f in keep:
            H0.set_compose(g, f, {k: v for k, v in vec.items() if k in keep})
    mor_map = {}
    for n in c.all_names():
        if c.is_unit(n):
            continue
        if c.deg(n) == 0:
            mor_map[n] = projdata.project_vec(c.src(n), c.tgt(n), {n: c.field.one})
        else:
            mor_map[n] = {}
    G = GradedFunctor(c, H0, {A: A for A in c.objects}, mor_map, name="G")
    return H0, G, projdata


def tau_le0(c):
    """Smart truncation: degrees < 0 kept, degree 0 replaced by cocycles,
    positive degrees dropped.  Composition and d are induced."""
    fld = c.field
    out = GradedLinCat(fld, "tau<=0(%s)" % c.name)
    for A in c.objects:
        out.add_object(A)
    # new basis: old names in degrees < 0; kernel-echelon names in degree 0
    expand = {}        # new name -> vector in c
    by_slot = {}       # (A, B, degree) -> [new names]
    for (A, B), sp in c.homs.items():
        for n, d in sp.basis:
            if d < 0:
                out.add_morphism(A, B, n, d)
                expand[n] = {n: fld.one}
                by_slot.setdefault((A, B, d), []).append(n)
        for i, v in enumerate(_degree_zero_cocycles(fld, c, A, B)):
            nm = ("z0", A, B, i)
            out.add_morphism(A, B, nm, 0)
            expand[nm] = v
            by_slot.setdefault((A, B, 0), []).append(nm)
    recoord = _Recoordinatizer(fld, c, expand, by_slot)
    # the unit is a degree-0 cocycle; it must be a basis element on the nose
    for A in c.objects:
        uvec = recoord.express(A, A, {c.unit_of(A): fld.one}, 0)
        uname = _single_name(fld, uvec)
        if uname is None:
            raise ValueError("unit of %r is not a truncation basis element" % (A,))
        out.set_unit(A, uname)
    for g in out.all_names():
        if out.is_unit(g):
            continue
        gv = expand[g]
        for f in out.all_names():
            if out.is_unit(f) or out.src(g) != out.tgt(f):
                continue
            prod = c.compose(gv, expand[f])
            vec = recoord.express(out.src(f), out.tgt(g), prod, out.deg(g) + out.deg(f))
            if vec:
                out.set_compose(g, f, vec)
    if c.diff:
        out.mark_dg()
        for n in out.all_names():
            dv = c.d_of(expand[n])
            if not dv:
                continue
            out.set_d(n, recoord.express(out.src(n), out.tgt(n), dv, out.deg(n) + 1))
    return out


def _degree_zero_cocycles(field, c, A, B):
    """Echelon basis of ker(d) in hom(A,B)^0, unit first when A == B."""
    sp = c.hom(A, B)
    names0 = sp.names_in_degree(0)
    if not names0:
        return []
    d_out = _degree_block(field, c, A, B, 0)
    if d_out is None or d_out.is_zero():
        kernel = [{n: field.one} for n in names0]
    else:
        from .linalg import LinearSolver
        kernel = LinearSolver(d_out).kernel()
    if A == B:
        unit = {c.unit_of(A): field.one}
        red = Reducer(field, sp)
        chosen = []
        for v in [unit] + kernel:
            lead, _, _ = red.insert(v, {})
            if lead is not None:
                chosen.append(v)
        return chosen
    return kernel


class _Recoordinatizer:
    """Express vectors of c in a chosen new basis, per hom pair and degree."""

    def __init__(self, field, c, expand, by_slot):
        self.field = field
        self.c = c
        self.expand = expand
        self.by_slot = by_slot
        self._solvers = {}

    def express(self, A, B, vec, degree):
        from .linalg import LinearSolver
        fld = self.field
        vec = vec_clean(fld, vec)
        if not vec:
            return {}
        key = (A, B, degree)
        solver = self._solvers.get(key)
        if solver is None:
            news = self.by_slot.get(key, [])
            dom = GradedSpace([(n, degree) for n in news])
            cod = self.c.hom(A, B)
            m = SparseMap(fld, dom, cod, 0)
            for n in news:
                m.set_col(n, self.expand[n])
            solver = LinearSolver(m)
            self._solvers[key] = solver
        x = solver.solve(vec)
        if x is None:
            raise ValueError("vector escapes the truncated basis")
        return x


def _single_name(field, vec):
    vec = vec_clean(field, vec)
    if len(vec) != 1:
        return None
    (name, cv), = vec.items()
    if not field.is_zero(field.sub(cv, field.one)):
        return None
    return name
