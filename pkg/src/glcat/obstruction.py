"""Extending graded functors to A-infinity functors one arity at a time.

Setup: c is a linear category concentrated in degree 0 and t is an
A-infinity category which is either minimal (no arity-1 operation) or an
honest DG category.  A graded functor f: c -> H*(t) can always be
completed to an A_2-functor into t by choosing cocycle representatives
and multiplication homotopies.  Extending an A_i-functor to arity i+1
is governed by one cohomology class: the arity-(i+1) part of the functor
equation defect is a cocycle valued in H*(t), its class

    o_{i+1}(f)  in  HH^{i+1}(c, H*(t))   (internal degree -i+1)

vanishes exactly when the linear system for the next coefficient, plus a
correction of the current top coefficient, is solvable.  Both directions
are checked on every step: the class is computed by descending the
defect, and the system is solved independently; a mismatch raises.

Targets carrying both a differential and higher operations would need a
minimal model to present their cohomology faithfully; such inputs are
rejected rather than silently mishandled.
"""

from .ainfinity import Cofunctor, WorkCapExceeded, classical_cochain_vals, from_dg
from .category import Bimodule, GradedFunctor, GradedLinCat, cohomology_category
from .hochschild import HochCochain, composable_tuples, hh
from .linalg import (
    GradedSpace,
    LinearSolver,
    SparseMap,
    vec_clean,
    vec_scale,
    vec_sub,
)


def _require_plain(c):
    """Degree 0 and no differential; the source of every ladder."""
    if c.has_diff and c.diff:
        raise ValueError("source category %r carries a differential" % (c.name,))
    for n in c.all_names():
        if c.deg(n) != 0:
            raise ValueError(
                "source category %r is not concentrated in degree 0" % (c.name,)
            )


def hstar_target(ct):
    """(h, proj) with h = H*(ct) as a graded linear category.

    Minimal targets (no arity-1 table) are their own cohomology: h
    mirrors the underlying graded category with composition
    g o f = (-1)^{deg g} b_2(sg, sf), and proj is None.  DG targets go
    through the cohomology category with its fixed class basis; proj
    then sends cocycle vectors to class coordinates.
    """
    fld = ct.field
    if not ct.tables.get(1):
        h = GradedLinCat(fld, "H*(%s)" % ct.name)
        for A in ct.objects:
            h.add_object(A)
        for (A, B), sp in ct.base.homs.items():
            for n, d in sp.basis:
                h.add_morphism(A, B, n, d)
        for A in ct.objects:
            h.set_unit(A, ct.unit_of(A))
        for g in h.nonunit_names():
            for f in h.nonunit_names(B=h.src(g)):
                vec = ct.b_basis((g, f))
                if vec:
                    sgn = fld.one if ct.deg(g) % 2 == 0 else fld.neg(fld.one)
                    h.set_compose(g, f, vec_scale(fld, sgn, vec))
        return h, None
    if ct.is_dg():
        return cohomology_category(ct.to_dg())
    raise ValueError(
        "target %r mixes a differential with higher operations; "
        "present it as a minimal or DG category" % (ct.name,)
    )


def _validate_into(f, h):
    """The caller-supplied functor must land in the cohomology category
    this module computes (same basis names, degrees, composition)."""
    for A in f.source.objects:
        if f.on_obj(A) not in h.objects:
            raise ValueError("functor sends %r outside the target" % (A,))
    for n in f.source.all_names():
        A, B = f.source.src(n), f.source.tgt(n)
        pair = (f.on_obj(A), f.on_obj(B))
        sp = h.hom(*pair)
        for m in f.on_basis(n):
            if m not in sp.names() or h.deg(m) != f.source.deg(n):
                raise ValueError(
                    "image of %r does not match the computed cohomology "
                    "category (name %r)" % (n, m)
                )
    fld = h.field
    for g in f.source.all_names():
        for e in f.source.all_names():
            if f.source.src(g) != f.source.tgt(e):
                continue
            lhs = f.on_vec(f.source.compose_basis(g, e))
            rhs = h.compose(f.on_basis(g), f.on_basis(e))
            if vec_clean(fld, vec_sub(fld, lhs, rhs)):
                raise ValueError(
                    "not a functor into H*: composition fails on (%r, %r)"
                    % (g, e)
                )


def _pullback_category_bimodule(c, h, f):
    """h-homs as a c-bimodule through f; element names (X, Y, hname)."""
    N = Bimodule(c, c, name="f*%s" % h.name)
    for X in c.objects:
        for Y in c.objects:
            sp = h.hom(f.on_obj(X), f.on_obj(Y))
            for hn, d in sp.basis:
                N.add_element(X, Y, (X, Y, hn), d)
    for X in c.objects:
        for Y in c.objects:
            sp = h.hom(f.on_obj(X), f.on_obj(Y))
            for hn, _d in sp.basis:
                for a in c.nonunit_names(A=Y):
                    vec = h.compose(f.on_basis(a), {hn: h.field.one})
                    N.set_lact(a, (X, Y, hn), {
                        (X, c.tgt(a), r): cv for r, cv in vec.items()
                    })
                for b in c.nonunit_names(B=X):
                    vec = h.compose({hn: h.field.one}, f.on_basis(b))
                    N.set_ract((X, Y, hn), b, {
                        (c.src(b), Y, r): cv for r, cv in vec.items()
                    })
    return N


def pullback_bimodule(c, M, f):
    """M(f-, f-) as a c-bimodule for a bimodule M over f's target."""
    N = Bimodule(c, c, name="f*%s" % M.name)
    pairs = {}
    for X in c.objects:
        for Y in c.objects:
            sp = M.space(f.on_obj(X), f.on_obj(Y))
            pairs[(X, Y)] = [el for el, _d in sp.basis]
            for el, d in sp.basis:
                N.add_element(X, Y, (X, Y, el), d)
    for (X, Y), els in pairs.items():
        for el in els:
            for a in c.nonunit_names(A=Y):
                vec = M.lact_vec(f.on_basis(a), {el: M.field.one})
                N.set_lact(a, (X, Y, el), {
                    (X, c.tgt(a), r): cv for r, cv in vec.items()
                })
            for b in c.nonunit_names(B=X):
                vec = M.ract_vec({el: M.field.one}, f.on_basis(b))
                N.set_ract((X, Y, el), b, {
                    (c.src(b), Y, r): cv for r, cv in vec.items()
                })
    return N


class ObstructionClass:
    """The cohomology class blocking one extension step.

    cochain is the descended defect as a Hochschild cochain over the
    pulled-back H*(target) bimodule; coords are its coordinates in the
    fixed class basis of coh.  ladder collects the zero classes of the
    steps that succeeded before this one.
    """

    __slots__ = ("level", "cochain", "coords", "coh", "provenance", "ladder")

    def __init__(self, level, cochain, coords, coh, provenance):
        self.level = level
        self.cochain = cochain
        self.coords = coords
        self.coh = coh
        self.provenance = provenance
        self.ladder = []

    def is_zero(self):
        f = self.cochain.bimod.field
        return all(f.is_zero(c) for c in self.coords)

    def __repr__(self):
        tag = "zero" if self.is_zero() else repr(self.coords)
        return "ObstructionClass(level=%d, %s)" % (self.level, tag)


class AnFunctor:
    """A Cofunctor with coefficients through `level` and a re-checkable
    certificate that the functor equations hold through that arity."""

    __slots__ = (
        "functor", "level", "base", "hcat", "hproj", "hfun", "nbimod",
        "obstruction", "ladder", "full",
    )

    def __init__(self, functor, level, base, hcat, hproj, hfun, nbimod,
                 obstruction=None):
        self.functor = functor
        self.level = level
        self.base = base
        self.hcat = hcat
        self.hproj = hproj
        self.hfun = hfun
        self.nbimod = nbimod
        self.obstruction = obstruction  # the (zero) class of the step made last
        self.ladder = []
        self.full = False

    def certify(self, work_cap=500000):
        return self.functor.functor_report(self.level, work_cap)

    def __repr__(self):
        tag = "full" if self.full else ("level %d" % self.level)
        return "AnFunctor(%r, %s)" % (self.functor.name, tag)


def _slot_targets(F, c, key):
    """Target basis names a coefficient at `key` may hit (location and
    degree forced by the suspended-degree-0 convention)."""
    want = sum(c.deg(x) for x in key) - len(key) + 1
    A = F.obj_map[c.src(key[-1])]
    B = F.obj_map[c.tgt(key[0])]
    return [t for t in F.target.hom(A, B).names_in_degree(want)]


def _copy_cofunctor(F, name=None):
    G = Cofunctor(F.source, F.target, F.obj_map, name=name or F.name)
    for tab in F.coeffs.values():
        for key, vec in tab.items():
            G.set_f(key, dict(vec))
    return G


def _bump(F, key, t, down=False):
    fld = F.target.field
    cur = dict(F.f_basis(key))
    one = fld.neg(fld.one) if down else fld.one
    cur[t] = fld.add(cur.get(t, fld.zero), one)
    F.set_f(key, cur)


def _solve_extension(F, slots, eqkeys, work_cap):
    """Solve for coefficient values making the defect vanish on eqkeys.

    slots: [(key, target_name)] unknowns, added to F's current tables.
    Columns come from probing the engine's own defect, which is exact
    because an unknown can appear at most once in any defect term at
    these arities.  Returns {key: value vec} or None.
    """
    fld = F.target.field
    if len(slots) * len(eqkeys) > work_cap:
        raise WorkCapExceeded(
            "extension system too large: %d slots x %d equations"
            % (len(slots), len(eqkeys))
        )
    cur = {k: F.defect(k) for k in eqkeys}
    dom = GradedSpace([(("s", j), 0) for j in range(len(slots))])
    rows = []
    for k in eqkeys:
        A = F.obj_map[F.source.base.src(k[-1])]
        B = F.obj_map[F.source.base.tgt(k[0])]
        for t in F.target.hom(A, B).names():
            rows.append(((k, t), 0))
    cod = GradedSpace(rows)
    mat = SparseMap(fld, dom, cod, 0)
    for j, (key, t) in enumerate(slots):
        _bump(F, key, t)
        for k in eqkeys:
            if len(k) < len(key):
                continue
            if len(k) == len(key) and k != key:
                continue
            diff = vec_sub(fld, F.defect(k), cur[k])
            for r, cv in vec_clean(fld, diff).items():
                mat.add_entry((k, r), ("s", j), cv)
        _bump(F, key, t, down=True)
    rhs = {}
    for k, dv in cur.items():
        for r, cv in dv.items():
            rhs[(k, r)] = fld.neg(cv)
    x = LinearSolver(mat).solve(rhs)
    if x is None:
        return None
    out = {}
    for j, (key, t) in enumerate(slots):
        cv = x.get(("s", j), fld.zero)
        if not fld.is_zero(cv):
            out.setdefault(key, {})[t] = cv
    return out


def a2_completion(f, ct, work_cap=500000):
    """Complete a graded functor f: c -> H*(ct) to a certified
    A_2-functor into ct.

    Representatives of the classes f(a) come from the fixed cocycle
    lifts; when ct has a differential the multiplication homotopies f_2
    are solved for (they exist because f respects the product of H*).
    """
    c = f.source
    _require_plain(c)
    rep = f.validate()
    if not rep.ok:
        raise ValueError("not a graded functor: %s" % rep.summary())
    h, proj = hstar_target(ct)
    _validate_into(f, h)
    F = Cofunctor(from_dg(c, 2), ct, {A: f.on_obj(A) for A in c.objects},
                  name=f.name)
    for a in c.nonunit_names():
        img = f.on_basis(a)
        if proj is not None:
            img = proj.lift_vec(img)
        F.set_f((a,), img)
    pairs = composable_tuples(c, 2)
    if proj is not None:
        slots = []
        for key in pairs:
            for t in _slot_targets(F, c, key):
                slots.append((key, t))
        sol = _solve_extension(F, slots, pairs, work_cap)
        if sol is None:
            raise RuntimeError(
                "no multiplication homotopies found; target cohomology "
                "does not match the functor"
            )
        for key, vec in sol.items():
            F.set_f(key, vec)
    ok, fails = F.functor_report(2, work_cap)
    if not ok:
        raise RuntimeError("A_2 completion failed its own certificate: %r"
                           % (fails[0],))
    N = _pullback_category_bimodule(c, h, f)
    return AnFunctor(F, 2, c, h, proj, f, N)


def extend_step(fn, work_cap=500000):
    """One rung of the ladder: from a certified A_i-functor either to a
    certified A_{i+1}-functor or to the nonzero obstruction class.

    The class and the linear system are computed independently and must
    agree on solvability; the returned functor carries the step's zero
    class in .obstruction.
    """
    i = fn.level
    F = fn.functor
    c = fn.base
    ct = F.target
    fld = c.field
    keys_hi = composable_tuples(c, i + 1)
    keys_lo = composable_tuples(c, i)

    dtab = {}
    for key in keys_hi:
        dv = F.defect(key)
        if dv:
            dtab[key] = vec_scale(fld, fld.neg(fld.one), dv)
    for key, dv in dtab.items():
        if vec_clean(fld, ct.b_multi([dv])):
            raise RuntimeError(
                "defect value at %r is not closed; corrupted certificate"
                % (key,)
            )

    coch = HochCochain(c, fn.nbimod, i + 1)
    for key, vec in classical_cochain_vals(fld, i + 1, dtab).items():
        X, Y = c.src(key[-1]), c.tgt(key[0])
        if fn.hproj is None:
            hvec = vec
        else:
            try:
                hvec = fn.hproj.project_vec(F.obj_map[X], F.obj_map[Y], vec)
            except ValueError:
                raise RuntimeError(
                    "defect value at %r failed the cocycle law; corrupted "
                    "certificate" % (key,)
                )
        coch.set_value(key, {(X, Y, hn): cv for hn, cv in hvec.items()})
    res = hh(c, fn.nbimod, i + 1, arity_cap=max(8, i + 1))
    try:
        coords = res.class_of(coch)
    except ValueError:
        raise RuntimeError(
            "descended defect is not a Hochschild cocycle; corrupted "
            "certificate"
        )
    obs = ObstructionClass(
        i + 1, coch, coords, res,
        {"functor": F.name, "from_level": i, "source": c.name,
         "target": ct.name},
    )

    G = _copy_cofunctor(F)
    slots = []
    for key in keys_hi + keys_lo:
        for t in _slot_targets(G, c, key):
            slots.append((key, t))
    sol = _solve_extension(G, slots, keys_hi + keys_lo, work_cap)

    if (sol is None) != (not obs.is_zero()):
        raise RuntimeError("obstruction class and extension solver disagree")
    if sol is None:
        return obs
    for key, vec in sol.items():
        base = dict(G.f_basis(key))
        for t, cv in vec.items():
            base[t] = fld.add(base.get(t, fld.zero), cv)
        G.set_f(key, base)
    ok, fails = G.functor_report(i + 1, work_cap)
    if not ok:
        raise RuntimeError("extended functor fails its certificate: %r"
                           % (fails[0],))
    out = AnFunctor(G, i + 1, c, fn.hcat, fn.hproj, fn.hfun, fn.nbimod,
                    obstruction=obs)
    return out


def perturb_choice(fn, arity, table, work_cap=500000):
    """Re-choose homotopies: add a table to the arity-`arity` coefficient
    and re-certify.  Used to confirm that the first live obstruction does
    not depend on the choices made below it."""
    G = _copy_cofunctor(fn.functor)
    fld = G.target.field
    for key, vec in table.items():
        base = dict(G.f_basis(key))
        for t, cv in vec.items():
            base[t] = fld.add(base.get(t, fld.zero), cv)
        G.set_f(key, base)
    ok, fails = G.functor_report(fn.level, work_cap)
    if not ok:
        raise ValueError("perturbation breaks the certificate: %r" % (fails[0],))
    out = AnFunctor(G, fn.level, fn.base, fn.hcat, fn.hproj, fn.hfun,
                    fn.nbimod, obstruction=fn.obstruction)
    out.ladder = list(fn.ladder)
    return out


def degree_floor(ct):
    """Most negative degree present in the target's hom spaces (>= 0
    returned as 0).  Functor equations at arity m take values in degree
    2-m, so everything above floor+2 is vacuous."""
    lo = 0
    for (_A, _B), sp in ct.base.homs.items():
        for _n, d in sp.basis:
            if d < lo:
                lo = d
    return -lo


def lift_functor(f, ct, max_arity=None, work_cap=500000):
    """Iterate extension steps from the A_2 completion of f.

    Returns a full A-infinity functor (certified through the arity where
    the equations become vacuous for degree reasons) or (level, class)
    at the first nonvanishing obstruction.  The functor's .ladder lists
    the zero classes of the successful steps; on failure the class
    carries the same list.
    """
    stop = degree_floor(ct) + 2
    if max_arity is not None and max_arity < stop:
        raise ValueError(
            "equations reach arity %d but max_arity caps at %d; the "
            "ladder cannot stabilize" % (stop, max_arity)
        )
    fn = a2_completion(f, ct, work_cap)
    ladder = []
    while fn.level < stop:
        out = extend_step(fn, work_cap)
        if isinstance(out, ObstructionClass):
            out.ladder = ladder
            return (out.level, out)
        ladder.append(out.obstruction)
        fn = out
    fn.ladder = ladder
    fn.full = True
    return fn


def construct_tilde_f(f, a_eta, work_cap=500000):
    """Fill the triangle: an A-infinity functor c -> a_eta over a given
    additive functor f: c -> a, existing iff the pullback class of eta
    vanishes.

    Returns the full AnFunctor (whose composition with the projection
    a_eta -> a is f on the nose) or the nonzero pullback class as a
    refusal certificate.
    """
    if not hasattr(a_eta, "deform_data"):
        raise ValueError("category does not carry deformation data")
    a, M, eta, n = a_eta.deform_data
    c = f.source
    _require_plain(c)
    rep = f.validate()
    if not rep.ok:
        raise ValueError("not a functor into the base: %s" % rep.summary())

    Nf = pullback_bimodule(c, M, f)
    pull = HochCochain(c, Nf, n)
    for key in composable_tuples(c, n):
        out = {}
        for combo, cv in _expand_images(f, key):
            val = eta.value(combo)
            for el, ev in val.items():
                X, Y = c.src(key[-1]), c.tgt(key[0])
                nm = (X, Y, el)
                s = c.field.add(out.get(nm, c.field.zero),
                                c.field.mul(cv, ev))
                if c.field.is_zero(s):
                    out.pop(nm, None)
                else:
                    out[nm] = s
        if out:
            pull.set_value(key, out)
    res = hh(c, Nf, n, arity_cap=max(8, n))
    coords = res.class_of(pull)
    if not all(c.field.is_zero(cv) for cv in coords):
        return ObstructionClass(
            n, pull, coords, res,
            {"functor": f.name, "refusal": "pullback class is nonzero",
             "source": c.name, "target": a_eta.name},
        )

    h, _proj = hstar_target(a_eta)
    jf = GradedFunctor(c, h, {A: f.on_obj(A) for A in c.objects},
                       {m: f.on_basis(m) for m in c.nonunit_names()},
                       name="%s~" % f.name)
    fn = lift_functor(jf, a_eta, max_arity=None, work_cap=work_cap)
    if isinstance(fn, tuple):
        raise RuntimeError(
            "pullback class vanished but the ladder obstructed at level "
            "%d" % (fn[0],)
        )
    _check_over_base(fn.functor, f, set(a.all_names()))
    return fn


def _expand_images(f, key):
    """Multilinear expansion of (f(key[0]), ..., f(key[-1])) into basis
    tuples of the target with coefficients."""
    fld = f.target.field
    combos = [((), fld.one)]
    for x in key:
        img = f.on_basis(x)
        nxt = []
        for pre, cv in combos:
            for m, mv in img.items():
                nxt.append((pre + (m,), fld.mul(cv, mv)))
        combos = nxt
    return combos


def _check_over_base(F, f, base_names):
    """The lift must project to f strictly: arity-1 coefficients equal f
    with no base-category component added, higher coefficients stay in
    the deformation part."""
    fld = F.target.field
    for (a,), vec in F.coeffs.get(1, {}).items():
        got = {m: cv for m, cv in vec.items() if m in base_names}
        if vec_clean(fld, vec_sub(fld, got, f.on_basis(a))):
            raise RuntimeError(
                "lift does not project to the base functor on %r" % (a,)
            )
    for ar, tab in F.coeffs.items():
        if ar == 1:
            continue
        for key, vec in tab.items():
            for m in vec:
                if m in base_names:
                    raise RuntimeError(
                        "higher coefficient at %r leaks into the base" % (key,)
                    )


class GammaReport:
    """Outcome of lifting an algebra action on a twisted complex."""

    __slots__ = ("top_negative", "auto_through", "choice_free_level",
                 "functor", "level", "obstruction")

    def __init__(self, top_negative, functor, level, obstruction):
        self.top_negative = top_negative
        self.auto_through = top_negative + 1 if top_negative > 0 else None
        self.choice_free_level = top_negative + 2 if top_negative > 0 else None
        self.functor = functor
        self.level = level
        self.obstruction = obstruction

    @property
    def lifted(self):
        return self.functor is not None

    def __repr__(self):
        if self.lifted:
            return "GammaReport(lifted, top_negative=%d)" % self.top_negative
        return "GammaReport(obstructed at %d)" % self.level


def endo_cohomology(T):
    """(g0, h, proj) for a twisted complex T: its endomorphism DG
    category, the cohomology category (negative degrees are the negative
    self-extensions of T), and the class projection."""
    from .twisted import endo_category
    g0 = endo_category(T)
    h, proj = cohomology_category(g0)
    return g0, h, proj


def gamma_obstructions(T, action, max_arity=None, work_cap=500000):
    """Obstruction sequence for extending an algebra action on a twisted
    complex to a coherent A-infinity action.

    action: graded functor from a degree-0 algebra into the degree-0
    part of the endomorphism cohomology of T (built via endo_cohomology).
    Delegates to the functor ladder on the endomorphism DG category; when
    -q is the lowest nonvanishing self-extension degree the first q+1
    levels vanish for degree reasons and level q+2 is choice-free.
    """
    g0, h, _proj = endo_cohomology(T)
    for n in action.source.all_names():
        for m in action.on_basis(n):
            if h.deg(m) != 0:
                raise ValueError("action image of %r is not degree 0" % (n,))
    rep = action.validate()
    if not rep.ok:
        raise ValueError("action is not an algebra map: %s" % rep.summary())
    # -top is the negative self-extension degree closest to zero; levels
    # 3..top+1 have zero coefficient groups, level top+2 is choice-free
    negs = [-d for (_A, _B), sp in h.homs.items() for _n, d in sp.basis if d < 0]
    top = min(negs) if negs else 0
    ct = from_dg(g0, 2)
    out = lift_functor(action, ct, max_arity=max_arity, work_cap=work_cap)
    if isinstance(out, tuple):
        return GammaReport(top, None, out[0], out[1])
    return GammaReport(top, out, out.level, None)
