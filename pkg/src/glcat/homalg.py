"""Module theory over finite linear categories.

Representable and free modules, covers, stepwise projective
resolutions, Ext groups, tensor and Hom constructions against a
bimodule, and the characteristic class of a module along a degree-0
cohomology class, with the lift certificate for one-operation
deformations.

Everything here works with left modules: a module U assigns a finite
graded space U(X) to each object and a degree-preserving action
U(X) -> U(Y) to each f: X -> Y.
"""

from .ainfinity import Cofunctor, from_dg, suspended_cochain_table
from .category import Bimodule, GradedLinCat, ModuleOverCat, opposite_cat
from .hochschild import (
    HochCochain,
    cochain_space,
    cochain_to_vec,
    d_hoch_map,
    hh,
)
from .linalg import (
    GradedSpace,
    LinearSolver,
    SparseMap,
    cohomology_of_space,
    vec_addmul,
    vec_clean,
    vec_sub,
)

__all__ = [
    "CharClass",
    "LiftResult",
    "ModuleMap",
    "char_cochain",
    "char_map",
    "ext_dims",
    "free_cover",
    "free_module",
    "hom_k_bimodule",
    "hom_module",
    "is_projective",
    "kernel_module",
    "lift_module",
    "lift_witness_category",
    "matrix_category",
    "representable_module",
    "resolution",
    "tensor_module",
]


# ---------------------------------------------------------------------------
# free modules and covers

def representable_module(c, X, name=None):
    """a(X, -): elements of U(Y) are the basis morphisms X -> Y, the
    action is post-composition."""
    return free_module(c, [("y", X, 0)], name or ("%s(%r,-)" % (c.name, X)))


def free_module(c, gens, name="P"):
    """Direct sum of shifted representables.

    gens: list of (label, X, shift); element names are (label, g) for g
    running over the basis of a(X, -), in degree deg g + shift.  The
    generator itself is (label, unit of X).
    """
    P = ModuleOverCat(c, name)
    for lab, X, shift in gens:
        for Y in c.objects:
            for g, d in c.hom(X, Y).basis:
                P.add_element(Y, (lab, g), d + shift)
    for lab, X, _shift in gens:
        for Y in c.objects:
            for g, _d in c.hom(X, Y).basis:
                for f in c.nonunit_names(A=Y):
                    vec = c.compose_basis(f, g)
                    P.set_act(f, (lab, g), {(lab, r): cv for r, cv in vec.items()})
    P.gens = list(gens)
    return P


class ModuleMap:
    """Degree-0 natural map between modules over the same category,
    stored on basis elements."""

    __slots__ = ("dom", "cod", "images")

    def __init__(self, dom, cod, images):
        self.dom = dom
        self.cod = cod
        self.images = {}
        fld = cod.field
        for u, vec in images.items():
            vec = vec_clean(fld, vec)
            A = dom.loc(u)
            for r in vec:
                if cod.loc(r) != A:
                    raise ValueError("image of %r lands at the wrong object" % (u,))
                if cod.deg(r) != dom.deg(u):
                    raise ValueError("image of %r has the wrong degree" % (u,))
            if vec:
                self.images[u] = vec

    def apply(self, vec):
        fld = self.cod.field
        out = {}
        for u, c in vec.items():
            img = self.images.get(u)
            if img:
                out = vec_addmul(fld, out, c, img)
        return out

    def is_natural(self):
        """phi(f.u) == f.phi(u) on every generator pair."""
        fld = self.cod.field
        c = self.dom.cat
        for u in self.dom.all_names():
            for f in c.nonunit_names(A=self.dom.loc(u)):
                left = self.apply(self.dom.act_basis(f, u))
                right = self.cod.act_vec({f: fld.one}, self.apply({u: fld.one}))
                if vec_clean(fld, vec_sub(fld, left, right)):
                    return False
        return True

    def then(self, other):
        """other after self."""
        if other.dom is not self.cod:
            raise ValueError("maps not composable")
        images = {u: other.apply(self.apply({u: self.dom.field.one}))
                  for u in self.dom.all_names()}
        return ModuleMap(self.dom, other.cod, images)

    def is_zero(self):
        return not self.images


def free_cover(U, name=None):
    """A free module surjecting onto U: one generator per basis element,
    cover map (u, g) -> g.u."""
    gens = [(("g", u), U.loc(u), U.deg(u)) for u in U.all_names()]
    P = free_module(U.cat, gens, name or ("F(%s)" % U.name))
    images = {}
    for (lab, g) in P.all_names():
        _tag, u = lab
        images[(lab, g)] = U.act_basis(g, u)
    return P, ModuleMap(P, U, images)


def kernel_module(phi, name=None):
    """Kernel of a module map, with its inclusion.

    Elements ("k", A, i) are echelon kernel vectors of phi at A; each is
    homogeneous since phi preserves degree.  The induced action solves
    against the kernel basis at the target object.
    """
    U, V = phi.dom, phi.cod
    fld = U.field
    c = U.cat
    K = ModuleOverCat(c, name or ("ker(%s->%s)" % (U.name, V.name)))
    incl = {}
    solvers = {}
    for A in c.objects:
        dom_sp = U.space(A)
        if dom_sp.dim == 0:
            continue
        cols = {u: phi.apply({u: fld.one}) for u, _ in dom_sp.basis}
        mat = SparseMap(fld, dom_sp, V.space(A), 0, cols)
        kern = LinearSolver(mat).kernel()
        if not kern:
            continue
        knames = []
        for i, kvec in enumerate(kern):
            nm = ("k", A, i)
            K.add_element(A, nm, dom_sp.vector_degree(kvec))
            incl[nm] = dict(kvec)
            knames.append(nm)
        ksp = GradedSpace([(nm, K.deg(nm)) for nm in knames])
        solvers[A] = LinearSolver(
            SparseMap(fld, ksp, dom_sp, 0, {nm: incl[nm] for nm in knames})
        )
    inclusion = ModuleMap(K, U, incl)
    for nm in K.all_names():
        for f in c.nonunit_names(A=K.loc(nm)):
            moved = U.act_vec({f: fld.one}, incl[nm])
            solver = solvers.get(c.tgt(f))
            if solver is None:
                if vec_clean(fld, moved):
                    raise ValueError("action leaves the kernel; map is not natural")
                continue
            x = solver.solve(moved)
            if x is None:
                raise ValueError("action leaves the kernel; map is not natural")
            K.set_act(f, nm, x)
    return K, inclusion


def resolution(U, length):
    """Free modules P_length -> ... -> P_0 -> U with exact differentials,
    each built as a cover of the previous kernel.

    Returns (frees, maps): maps[0]: P_0 -> U and maps[i]: P_i -> P_{i-1}.
    """
    P0, pi = free_cover(U)
    frees, maps = [P0], [pi]
    for _ in range(length):
        K, incl = kernel_module(maps[-1])
        P, cov = free_cover(K)
        frees.append(P)
        maps.append(cov.then(incl))
    return frees, maps


def _free_hom_space(P, V):
    """Hom(P, V) for free P, coordinatized by generator images: the name
    (lab, v) is the map sending generator lab to v and the others to 0."""
    basis = []
    for lab, X, shift in P.gens:
        for v, dv in V.space(X).basis:
            basis.append(((lab, v), dv - shift))
    return GradedSpace(basis)


def ext_dims(U, V, n_max):
    """dim Ext^i(U, V) for i = 0..n_max, from an explicit free resolution
    of U: the transposed differential is substitution of generator images
    into the resolution differential."""
    fld = U.field
    c = U.cat
    frees, maps = resolution(U, n_max + 1)

    def delta(i):
        dom = _free_hom_space(frees[i], V)
        cod = _free_hom_space(frees[i + 1], V)
        gen_imgs = {
            lab2: maps[i + 1].apply({(lab2, c.unit_of(X2)): fld.one})
            for lab2, X2, _s2 in frees[i + 1].gens
        }
        cols = {}
        for (lab, v), _d in dom.basis:
            col = {}
            for lab2, img in gen_imgs.items():
                for (lab3, g), cg in img.items():
                    if lab3 != lab:
                        continue
                    moved = V.act_vec({g: fld.one}, {v: fld.one})
                    for r, cr in moved.items():
                        col = vec_addmul(fld, col, fld.mul(cg, cr),
                                         {(lab2, r): fld.one})
            cols[(lab, v)] = col
        return SparseMap(fld, dom, cod, 0, cols)

    dmaps = [delta(i) for i in range(n_max + 1)]
    dims = []
    for i in range(n_max + 1):
        d_in = dmaps[i - 1] if i >= 1 else None
        coh = cohomology_of_space(fld, dmaps[i].dom, d_in, dmaps[i])
        dims.append(coh.dim)
    return dims


def is_projective(U):
    """Whether the free cover splits: one linear system for a natural
    section s with pi o s = id."""
    fld = U.field
    c = U.cat
    P, pi = free_cover(U)
    unknowns = []
    for u in U.all_names():
        for p, dp in P.space(U.loc(u)).basis:
            if dp == U.deg(u):
                unknowns.append((u, p))
    rows = []
    for u in U.all_names():
        for r in U.all_names():
            if U.loc(r) == U.loc(u):
                rows.append(("unit", u, r))
        for f in c.nonunit_names(A=U.loc(u)):
            for p, _dp in P.space(c.tgt(f)).basis:
                rows.append(("nat", f, u, p))
    cols = {x: {} for x in unknowns}
    for (u, p) in unknowns:
        col = cols[(u, p)]
        for r, cr in pi.apply({p: fld.one}).items():
            col[("unit", u, r)] = cr
        # -s(u) pushed forward along f
        for f in c.nonunit_names(A=U.loc(u)):
            for q, cq in P.act_basis(f, p).items():
                key = ("nat", f, u, q)
                col[key] = fld.sub(col.get(key, fld.zero), cq)
    # +s(f.u), expanded over the action of f on u
    for u in U.all_names():
        for f in c.nonunit_names(A=U.loc(u)):
            for r, cr in U.act_basis(f, u).items():
                for p, dp in P.space(U.loc(r)).basis:
                    if dp != U.deg(r):
                        continue
                    col = cols[(r, p)]
                    key = ("nat", f, u, p)
                    col[key] = fld.add(col.get(key, fld.zero), cr)
    dom = GradedSpace([(x, 0) for x in unknowns])
    cod = GradedSpace([(r, 0) for r in rows])
    mat = SparseMap(fld, dom, cod, 0,
                    {x: vec_clean(fld, col) for x, col in cols.items()})
    rhs = {("unit", u, u): fld.one for u in U.all_names()}
    return LinearSolver(mat).solve(rhs) is not None


# ---------------------------------------------------------------------------
# bimodule-against-module constructions

def tensor_module(M, U, name=None):
    """M (x)_a U: at each object Y the span of pairs m (x) u over all X
    with m in M(X, Y) and u in U(X), modulo (m.b)(x)u - m(x)(b.u).

    Elements are ("t", Y, i); the attached .insert(m, u) projects a raw
    pair onto the chosen quotient basis.
    """
    c = U.cat
    fld = U.field
    T = ModuleOverCat(c, name or ("%s(x)%s" % (M.name, U.name)))
    quots = {}
    lifts = {}
    for Y in c.objects:
        raw = []
        for X in c.objects:
            for m, dm in M.space(X, Y).basis:
                for u, du in U.space(X).basis:
                    raw.append(((m, u), dm + du))
        if not raw:
            continue
        raw_sp = GradedSpace(raw)
        rels = []
        for b in c.nonunit_names():
            Xp, X = c.src(b), c.tgt(b)
            for m, _dm in M.space(X, Y).basis:
                for u, _du in U.space(Xp).basis:
                    vec = {}
                    for mp, cm in M.ract_basis(m, b).items():
                        vec = vec_addmul(fld, vec, cm, {(mp, u): fld.one})
                    for up, cu in U.act_basis(b, u).items():
                        vec = vec_addmul(fld, vec, fld.neg(cu), {(m, up): fld.one})
                    if vec:
                        rels.append(vec)
        rel_map = None
        if rels:
            rel_sp = GradedSpace(
                [(("r", i), raw_sp.vector_degree(v)) for i, v in enumerate(rels)]
            )
            rel_map = SparseMap(fld, rel_sp, raw_sp, 0,
                                {("r", i): v for i, v in enumerate(rels)})
        coh = cohomology_of_space(fld, raw_sp, rel_map, None)
        quots[Y] = coh
        for i in range(coh.dim):
            T.add_element(Y, ("t", Y, i), raw_sp.vector_degree(coh.lifts[i]))
            lifts[("t", Y, i)] = coh.lifts[i]

    def project(Y, rawvec):
        coh = quots.get(Y)
        if coh is None:
            if vec_clean(fld, rawvec):
                raise ValueError("nonzero vector over an empty fibre")
            return {}
        coords = coh.project(rawvec)
        return {("t", Y, i): cv for i, cv in enumerate(coords)
                if not fld.is_zero(cv)}

    for t in T.all_names():
        for f in c.nonunit_names(A=T.loc(t)):
            moved = {}
            for (m, u), cv in lifts[t].items():
                for mp, cm in M.lact_basis(f, m).items():
                    moved = vec_addmul(fld, moved, fld.mul(cv, cm),
                                       {(mp, u): fld.one})
            T.set_act(f, t, project(c.tgt(f), moved))

    def insert(m, u):
        X, Y = M.loc(m)
        if U.loc(u) != X:
            raise ValueError("pair (%r, %r) does not match at %r" % (m, u, X))
        return project(Y, {(m, u): fld.one})

    T.insert = insert
    return T


def hom_module(M, U, name=None):
    """Hom_a(M, U): at each object X, the natural maps M(X, -) -> U.

    Elements ("h", X, i) are echelon solutions w of the naturality system
    w(a.m) = a.w(m); the module action is (f.w)(m) = w(m.f).  The
    attached .evaluate(wvec, m) applies a Hom element to a bimodule basis
    element.
    """
    c = U.cat
    fld = U.field
    H = ModuleOverCat(c, name or ("Hom(%s,%s)" % (M.name, U.name)))
    comps = {}    # ("h", X, i) -> {(m, u): coeff}, the map m -> sum of u
    solvers = {}
    for X in c.objects:
        raw = []
        for Y in c.objects:
            for m, dm in M.space(X, Y).basis:
                for u, du in U.space(Y).basis:
                    raw.append(((m, u), du - dm))
        if not raw:
            continue
        raw_sp = GradedSpace(raw)
        rows = []
        for a in c.nonunit_names():
            for m, _dm in M.space(X, c.src(a)).basis:
                for up, _du in U.space(c.tgt(a)).basis:
                    rows.append((a, m, up))
        cols = {x: {} for x, _d in raw_sp.basis}
        # -[a.w(m)]_{u'}
        for (m, u), _d in raw_sp.basis:
            col = cols[(m, u)]
            for a in c.nonunit_names(A=U.loc(u)):
                for up, cu in U.act_basis(a, u).items():
                    key = (a, m, up)
                    col[key] = fld.sub(col.get(key, fld.zero), cu)
        # +[w(a.m)]_{u'}: the unknown (m2, u') enters row (a, m, u') with
        # the coefficient of m2 in a.m
        for a in c.nonunit_names():
            for m, _dm in M.space(X, c.src(a)).basis:
                for m2, cm in M.lact_basis(a, m).items():
                    for u2, _du in U.space(c.tgt(a)).basis:
                        col = cols.get((m2, u2))
                        if col is None:
                            continue
                        key = (a, m, u2)
                        col[key] = fld.add(col.get(key, fld.zero), cm)
        cod = GradedSpace([(r, 0) for r in rows])
        mat = SparseMap(fld, raw_sp, cod, 0,
                        {x: vec_clean(fld, col) for x, col in cols.items()})
        kern = LinearSolver(mat).kernel()
        if not kern:
            continue
        hnames = []
        for i, w in enumerate(kern):
            nm = ("h", X, i)
            H.add_element(X, nm, raw_sp.vector_degree(w))
            comps[nm] = dict(w)
            hnames.append(nm)
        hsp = GradedSpace([(nm, H.deg(nm)) for nm in hnames])
        solvers[X] = LinearSolver(
            SparseMap(fld, hsp, raw_sp, 0, {nm: comps[nm] for nm in hnames})
        )
    for nm in H.all_names():
        X = H.loc(nm)
        for f in c.nonunit_names(A=X):
            Xp = c.tgt(f)
            moved = {}
            for Y in c.objects:
                for m, _dm in M.space(Xp, Y).basis:
                    for m2, cm in M.ract_basis(m, f).items():
                        for (m3, u3), cw in comps[nm].items():
                            if m3 == m2:
                                moved = vec_addmul(fld, moved, fld.mul(cm, cw),
                                                   {(m, u3): fld.one})
            solver = solvers.get(Xp)
            if solver is None:
                if vec_clean(fld, moved):
                    raise ValueError("Hom action escaped the solution space")
                continue
            x = solver.solve(moved)
            if x is None:
                raise ValueError("Hom action escaped the solution space")
            H.set_act(f, nm, x)

    def evaluate(wvec, m):
        out = {}
        for nm, cw in wvec.items():
            for (m2, u), cv in comps[nm].items():
                if m2 == m:
                    out = vec_addmul(fld, out, fld.mul(cw, cv), {u: fld.one})
        return out

    H.evaluate = evaluate
    return H


def hom_k_bimodule(S, T, name=None):
    """Hom_k(S, T) as a bimodule: the element ("E", s, t) at (X, Y) is
    the map S(X) -> T(Y) sending basis vector s to t.  The left action
    post-composes with T's action; the right action pre-composes with
    S's, which needs the transposed action table."""
    c = S.cat
    fld = S.field
    E = Bimodule(c, c, name or ("Hom_k(%s,%s)" % (S.name, T.name)))
    for X in c.objects:
        for Y in c.objects:
            for s, ds in S.space(X).basis:
                for t, dt in T.space(Y).basis:
                    E.add_element(X, Y, ("E", s, t), dt - ds)
    for el in E.all_names():
        _tag, s, t = el
        X, Y = E.loc(el)
        for a in c.nonunit_names(A=Y):
            E.set_lact(a, el, {("E", s, r): cv
                               for r, cv in T.act_basis(a, t).items()})
        for b in c.nonunit_names(B=X):
            vec = {}
            for sp, _d in S.space(c.src(b)).basis:
                cv = S.act_basis(b, sp).get(s)
                if cv is not None and not fld.is_zero(cv):
                    vec = vec_addmul(fld, vec, cv, {("E", sp, t): fld.one})
            E.set_ract(el, b, vec)
    return E


# ---------------------------------------------------------------------------
# the characteristic class

class CharClass:
    """Chain-level characteristic cochain of a class acting on a module,
    together with its coordinates in Hom-coefficient cohomology."""

    __slots__ = ("cochain", "coords", "coh", "flavor", "parts")

    def __init__(self, cochain, coords, coh, flavor, parts):
        self.cochain = cochain
        self.coords = coords
        self.coh = coh
        self.flavor = flavor
        self.parts = parts  # (source module, target module)

    def is_zero(self):
        f = self.cochain.bimod.field
        return all(f.is_zero(c) for c in self.coords)

    def __repr__(self):
        return "CharClass(%s, coords=%r)" % (self.flavor, self.coords)


def _require_cocycle(eta):
    from .hochschild import d_hoch

    if not d_hoch(eta).is_zero():
        raise ValueError("characteristic classes are defined on cocycles")


def _right_slice(M, Y):
    """M(-, Y) as a module over the opposite category."""
    c = M.left_cat
    op = opposite_cat(c)
    R = ModuleOverCat(op, "%s(-,%r)" % (M.name, Y))
    for X in c.objects:
        for m, dm in M.space(X, Y).basis:
            R.add_element(X, m, dm)
    for m in R.all_names():
        for b in c.nonunit_names(B=R.loc(m)):
            R.set_act(b, m, M.ract_basis(m, b))
    return R


def _left_slice(M, X):
    """M(X, -) as a module over the category itself."""
    c = M.left_cat
    L = ModuleOverCat(c, "%s(%r,-)" % (M.name, X))
    for Y in c.objects:
        for m, dm in M.space(X, Y).basis:
            L.add_element(Y, m, dm)
    for m in L.all_names():
        for a in c.nonunit_names(A=L.loc(m)):
            L.set_act(a, m, M.lact_basis(a, m))
    return L


def _check_flat_side(M, flavor):
    """The tensor flavor needs every M(-, Y) projective on the right (so
    - (x) U is exact at this finite-dimensional level); the Hom flavor
    needs every M(X, -) projective on the left."""
    c = M.left_cat
    if flavor == "direct":
        for Y in c.objects:
            if not is_projective(_right_slice(M, Y)):
                raise ValueError(
                    "direct flavor needs M(-, %r) projective on the right" % (Y,)
                )
    elif flavor == "dual":
        for X in c.objects:
            if not is_projective(_left_slice(M, X)):
                raise ValueError(
                    "dual flavor needs M(%r, -) projective on the left" % (X,)
                )
    else:
        raise ValueError("flavor must be 'direct' or 'dual'")


def _char_parts(eta, U, flavor):
    """(S, T, corner) with corner(el) giving, per source basis vector s,
    the T-vector the bimodule element el sends s to."""
    M = eta.bimod
    if flavor == "direct":
        T = tensor_module(M, U)

        def corner(el):
            X, _Y = M.loc(el)
            out = {}
            for s, _d in U.space(X).basis:
                img = T.insert(el, s)
                if img:
                    out[s] = img
            return out

        return U, T, corner

    H = hom_module(M, U)
    one = U.field.one

    def corner(el):
        X, _Y = M.loc(el)
        out = {}
        for w, _d in H.space(X).basis:
            img = H.evaluate({w: one}, el)
            if img:
                out[w] = img
        return out

    return H, U, corner


def char_cochain(eta, U, flavor="direct"):
    """The chain-level characteristic cochain in C^n(a, Hom_k(S, T)):
    the direct flavor sends a tuple to (u -> eta(tuple) (x) u), the dual
    one to (w -> w(eta(tuple)))."""
    _check_flat_side(eta.bimod, flavor)
    fld = U.field
    S, T, corner = _char_parts(eta, U, flavor)
    E = hom_k_bimodule(S, T)
    out = HochCochain(eta.cat, E, eta.arity)
    for key, mval in eta.vals.items():
        vec = {}
        for el, cm in mval.items():
            for s, img in corner(el).items():
                for t, ct in img.items():
                    vec = vec_addmul(fld, vec, fld.mul(cm, ct),
                                     {("E", s, t): fld.one})
        out.set_value(key, vec)
    return out, E, S, T


def char_map(eta, U, flavor="direct", arity_cap=8):
    """The class of the characteristic cochain in HH^n(a, Hom_k(S, T)),
    which presents Ext^n(S, T) over a field."""
    _require_cocycle(eta)
    coch, E, S, T = char_cochain(eta, U, flavor)
    res = hh(eta.cat, E, eta.arity, arity_cap=arity_cap)
    return CharClass(coch, res.class_of(coch), res, flavor, (S, T))


# ---------------------------------------------------------------------------
# the witness category and the lift certificate

def matrix_category(field, objects, vspaces, name="Mat"):
    """The DG category (zero differential) of the graded spaces
    vspaces[X], with hom(X, Y) = Hom_k(V(X), V(Y)).

    Basis: elementary matrices ("E", p, q) sending basis vector p to q.
    On endomorphisms the identity must itself be a basis name, so
    ("I", X) replaces the elementary ("E", p0, p0) on the first basis
    vector; the change of basis is unitriangular.  An object with zero
    space keeps a formal unit and no other morphisms touch it, so no
    nonunit composition can reach its unit.  The attached
    .to_matrix/.from_matrix convert between basis vectors and entry
    dictionaries keyed (source vector, target vector).
    """
    c = GradedLinCat(field, name)
    first = {}
    for X in objects:
        c.add_object(X)
        basis = vspaces[X].basis
        first[X] = basis[0][0] if basis else None
    for X in objects:
        for Y in objects:
            for p, dp in vspaces[X].basis:
                for q, dq in vspaces[Y].basis:
                    if X == Y and p == first[X] and q == first[X]:
                        continue
                    c.add_morphism(X, Y, ("E", p, q), dq - dp)
        c.add_morphism(X, X, ("I", X), 0)
        c.set_unit(X, ("I", X))

    def to_matrix(nm):
        if nm[0] == "I":
            return {(p, p): field.one for p, _ in vspaces[nm[1]].basis}
        return {(nm[1], nm[2]): field.one}

    def from_matrix(X, Y, mat):
        mat = {k: v for k, v in mat.items() if not field.is_zero(v)}
        if X != Y:
            return {("E", p, q): cv for (p, q), cv in mat.items()}
        p0 = first[X]
        c00 = mat.pop((p0, p0), field.zero) if p0 is not None else field.zero
        out = {}
        if not field.is_zero(c00):
            out[("I", X)] = c00
            # c00 I overshoots on every other diagonal position
            for p, _d in vspaces[X].basis:
                if p != p0:
                    mat[(p, p)] = field.sub(mat.get((p, p), field.zero), c00)
        for (p, q), cv in mat.items():
            if not field.is_zero(cv):
                out[("E", p, q)] = cv
        return out

    def mul(g_nm, f_nm):
        # g after f
        fm, gm = to_matrix(f_nm), to_matrix(g_nm)
        prod = {}
        for (p, q), cf in fm.items():
            for (q2, r), cg in gm.items():
                if q2 != q:
                    continue
                key = (p, r)
                prod[key] = field.add(prod.get(key, field.zero),
                                      field.mul(cg, cf))
        return prod

    for g in c.nonunit_names():
        for f in c.nonunit_names(B=c.src(g)):
            c.set_compose(g, f, from_matrix(c.src(f), c.tgt(g), mul(g, f)))
    c.mark_dg()
    c.to_matrix = to_matrix
    c.from_matrix = from_matrix
    return c


def lift_witness_category(a, S, T, shift):
    """Matrix category of V(X) = S(X) (+) T(X)[shift], where lifted
    module structures live."""
    vspaces = {}
    for X in a.objects:
        basis = [(("s", s), d) for s, d in S.space(X).basis]
        basis += [(("t", t), d + shift) for t, d in T.space(X).basis]
        vspaces[X] = GradedSpace(basis)
    lam = matrix_category(a.field, list(a.objects), vspaces,
                          name="Mat(%s(+)%s)" % (S.name, T.name))
    lam.vspaces = vspaces
    return lam


class LiftResult:
    __slots__ = ("ok", "xi", "witness", "obstruction", "checked_arity", "flavor")

    def __init__(self, ok, xi, witness, obstruction, checked_arity, flavor):
        self.ok = ok
        self.xi = xi
        self.witness = witness
        self.obstruction = obstruction
        self.checked_arity = checked_arity
        self.flavor = flavor

    def __repr__(self):
        if self.ok:
            return "LiftResult(ok, verified through arity %d)" % self.checked_arity
        return "LiftResult(obstructed: %r)" % (self.obstruction,)


def lift_module(U, a_eta, flavor="direct", work_cap=500000):
    """Lift certificate for a module along a one-operation deformation.

    Solves d(xi) = c_U(eta) in arity n-1.  When unsolvable, reports the
    nonzero obstruction class.  When solvable, assembles the functor
    a_eta -> Mat(S (+) T[2-n]) whose f_1 is the module action plus the
    corner insertion, with f_{n-1} = (-1)^{n-1} xi (suspended), and runs
    the functor-equation checker through arity 2n-2.  Identities past
    2n-2 are structurally zero: the deformed tables store only pure
    base-category keys, so no window and no splitting survives.
    """
    if not hasattr(a_eta, "deform_data"):
        raise ValueError("category does not carry deformation data")
    a, M, eta, n = a_eta.deform_data
    fld = a.field
    coch, E, S, T = char_cochain(eta, U, flavor)
    res = hh(a, E, n)
    obstruction = CharClass(coch, res.class_of(coch), res, flavor, (S, T))

    dom = cochain_space(a, E, n - 1)
    dmap = d_hoch_map(a, E, n - 1, dom=dom)
    x = LinearSolver(dmap).solve(cochain_to_vec(coch))
    if (x is None) == obstruction.is_zero():
        raise RuntimeError("class projection and solver disagree")
    if x is None:
        return LiftResult(False, None, None, obstruction, 0, flavor)
    xi = HochCochain(a, E, n - 1)
    grouped = {}
    for (key, el), cv in x.items():
        grouped.setdefault(key, {})[el] = cv
    for key, vec in grouped.items():
        xi.set_value(key, vec)

    lam = lift_witness_category(a, S, T, 2 - n)
    tgt = from_dg(lam, arity_bound=2)
    f = Cofunctor(a_eta, tgt, {X: X for X in a.objects}, name="lift")
    _, _, corner = _char_parts(eta, U, flavor)
    for g in a.nonunit_names():
        X, Y = a.src(g), a.tgt(g)
        mat = {}
        for s, _d in S.space(X).basis:
            for r, cv in S.act_basis(g, s).items():
                mat[(("s", s), ("s", r))] = cv
        for t, _d in T.space(X).basis:
            for r, cv in T.act_basis(g, t).items():
                mat[(("t", t), ("t", r))] = cv
        f.set_f((g,), lam.from_matrix(X, Y, mat))
    for el in M.all_names():
        X, Y = M.loc(el)
        mat = {}
        for s, img in corner(el).items():
            for t, cv in img.items():
                mat[(("s", s), ("t", t))] = cv
        f.set_f((("m", el),), lam.from_matrix(X, Y, mat))
    eps = fld.one if (n - 1) % 2 == 0 else fld.neg(fld.one)
    for key, vec in suspended_cochain_table(fld, n - 1, xi.vals).items():
        X, Y = a.src(key[-1]), a.tgt(key[0])
        mat_vec = {}
        for enm, cv in vec.items():
            _tag, s, t = enm
            mat_vec = vec_addmul(
                fld, mat_vec, fld.mul(eps, cv),
                lam.from_matrix(X, Y, {(("s", s), ("t", t)): fld.one}),
            )
        f.set_f(key, mat_vec)
    ok, fails = f.functor_report(2 * n - 2, work_cap=work_cap)
    if not ok:
        raise RuntimeError("lift witness failed the functor equation: %r"
                           % (fails[0],))
    return LiftResult(True, xi, f, obstruction, 2 * n - 2, flavor)
