"""Twisted complexes over a DG category, with filtered refinements.

A twisted complex is a finite formal sum of shifted objects Sigma^s A,
ordered by an integer twist index, together with a strictly
twist-increasing degree-1 matrix delta obeying the Maurer-Cartan
equation d(delta) + delta.delta = 0 exactly.  Morphisms between twisted
complexes are matrices of base morphisms; the differential is the
entrywise one corrected by commutators with the two deltas.

Grading conventions used throughout:

  * (Sigma^s U)^n = U^{n+s}, so a matrix entry r: A_t -> B_u placed in
    block (t, u) has twisted degree deg(r) + s_t - s_u.
  * Matrix composition picks up no signs.
  * The entrywise differential of a block targeting strand u is
    (-1)^{s_u} d(r); with this choice the Leibniz rule holds and the
    Maurer-Cartan equation is exactly "the total differential squares
    to zero".
  * Shifting a twisted complex by n adds n to each strand shift and
    scales delta by (-1)^n.

The second half of the module lifts structures along a chain-level
equivalence L from a category of injectives into the degree-0
cohomology of a nonpositively graded base: staircase completion of a
lifted resolution to a twisted complex, and lifting of filtered
complexes level by level with an explicit isomorphism witness.
"""

from .linalg import (GradedSpace, SparseMap, LinearSolver, cohomology,
                     cohomology_of_space, vec_add, vec_sub, vec_scale,
                     vec_clean)
from .category import GradedLinCat, _degree_block, validate

__all__ = [
    "FreeObject", "TwObject", "single", "shift_tw", "tw_identity",
    "tw_compose", "TwHom", "tw_hom", "tot", "cone",
    "FiltObject", "omega", "gr", "filt_shift", "FiltHom", "filt_hom",
    "exact_seq_check", "LEquiv", "h0_image", "h0_image_filt",
    "moore_object", "lift_filtered", "endo_category",
]


# ---------------------------------------------------------------------------
# flat block arithmetic
#
# A "flat" morphism is a dict {(t, u, r): coeff}: strand t of the source,
# strand u of the target, r a base morphism between the strand objects.
# Strand keys are opaque; composition matches them on the middle slot.

def _compose_flat(base, g, f):
    """Matrix composition g.f of flat morphisms; no signs."""
    fld = base.field
    out = {}
    for (tm, u, rg), cg in g.items():
        for (t, um, rf), cf in f.items():
            if um != tm:
                continue
            c = fld.mul(cg, cf)
            if fld.is_zero(c):
                continue
            for r, cr in base.compose_basis(rg, rf).items():
                key = (t, u, r)
                s = fld.add(out.get(key, fld.zero), fld.mul(c, cr))
                if fld.is_zero(s):
                    out.pop(key, None)
                else:
                    out[key] = s
    return out


def _dhat_flat(base, f, tshift):
    """Entrywise differential of a flat morphism.

    tshift maps a target strand key to its total shift; the block into
    strand u is scaled by (-1)^{s_u}.
    """
    fld = base.field
    out = {}
    for (t, u, r), c in f.items():
        cc = fld.neg(c) if tshift(u) % 2 else c
        for r2, c2 in base.diff.get(r, {}).items():
            key = (t, u, r2)
            s = fld.add(out.get(key, fld.zero), fld.mul(cc, c2))
            if fld.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
    return out


# ---------------------------------------------------------------------------
# objects

class FreeObject:
    """A finite formal sum of shifted objects of the base."""

    __slots__ = ("summands",)

    def __init__(self, summands):
        self.summands = tuple((obj, int(sh)) for obj, sh in summands)

    def __repr__(self):
        return "FreeObject(%r)" % (list(self.summands),)


def _free_summands(free):
    # a list means summand pairs; anything else is a bare object name
    if isinstance(free, FreeObject):
        return list(free.summands)
    if isinstance(free, list):
        return [(obj, int(sh)) for obj, sh in free]
    return [(free, 0)]


class TwObject:
    """A twisted complex over a DG category.

    Stored flat: strands (object names), their total shifts, weakly
    increasing twists, and delta as {(t, u, r): coeff} with
    twist(u) > twist(t) and every entry of twisted degree 1.

    The public constructor takes components [(twist, free)] with free an
    object name, a [(object, shift)] list, or a FreeObject, and delta
    blocks keyed by component-index pairs {(a, b): {(p, q, r): coeff}}.
    from_strands builds from flat data directly.  Either path verifies
    locations, degrees, strict twist ascent, and the exact Maurer-Cartan
    residual.
    """

    __slots__ = ("base", "strands", "shifts", "twists", "delta", "name")

    def __init__(self, base, components, delta=None, name="T"):
        order = sorted(range(len(components)),
                       key=lambda a: (components[a][0], a))
        strands, shifts, twists = [], [], []
        offset = {}
        for a in order:
            twist, free = components[a]
            offset[a] = len(strands)
            for obj, sh in _free_summands(free):
                strands.append(obj)
                shifts.append(sh)
                twists.append(int(twist))
        flat = {}
        for (a, b), block in (delta or {}).items():
            if a not in offset or b not in offset:
                raise ValueError("delta block (%r, %r) references missing "
                                 "components" % (a, b))
            for (p, q, r), c in block.items():
                key = (offset[a] + p, offset[b] + q, r)
                flat[key] = base.field.add(flat.get(key, base.field.zero), c)
        self._init_flat(base, tuple(strands), tuple(shifts), tuple(twists),
                        flat, name)

    @classmethod
    def from_strands(cls, base, strands, shifts, twists, delta=None,
                     name="T"):
        self = object.__new__(cls)
        self._init_flat(base, tuple(strands), tuple(map(int, shifts)),
                        tuple(map(int, twists)), dict(delta or {}), name)
        return self

    def _init_flat(self, base, strands, shifts, twists, delta, name):
        if not (len(strands) == len(shifts) == len(twists)):
            raise ValueError("strand data of unequal lengths")
        if any(twists[i] > twists[i + 1] for i in range(len(twists) - 1)):
            raise ValueError("twists must be weakly increasing")
        self.base = base
        self.strands = strands
        self.shifts = shifts
        self.twists = twists
        self.delta = vec_clean(base.field, delta)
        self.name = name
        self._validate()

    def _validate(self):
        base, n = self.base, len(self.strands)
        for obj in self.strands:
            if obj not in base.objects:
                raise ValueError("unknown base object %r" % (obj,))
        for (t, u, r) in self.delta:
            if not (0 <= t < n and 0 <= u < n):
                raise ValueError("delta block (%d, %d) out of range" % (t, u))
            if self.twists[u] <= self.twists[t]:
                raise ValueError("delta must strictly raise the twist: "
                                 "block (%d, %d)" % (t, u))
            if r not in base.hom(self.strands[t], self.strands[u]):
                raise ValueError("delta entry %r is not a morphism %r -> %r"
                                 % (r, self.strands[t], self.strands[u]))
            if base.deg(r) + self.shifts[t] - self.shifts[u] != 1:
                raise ValueError("delta entry at (%d, %d, %r) is not of "
                                 "twisted degree 1" % (t, u, r))
        res = vec_add(base.field,
                      _dhat_flat(base, self.delta, lambda u: self.shifts[u]),
                      _compose_flat(base, self.delta, self.delta))
        res = vec_clean(base.field, res)
        if res:
            t, u, r = next(iter(sorted(res, key=str)))
            raise ValueError("Maurer-Cartan residual nonzero at block "
                             "(%d, %d), entry %r" % (t, u, r))

    def __eq__(self, other):
        return (isinstance(other, TwObject) and self.base is other.base
                and self.strands == other.strands
                and self.shifts == other.shifts
                and self.twists == other.twists
                and self.delta == other.delta)

    def __repr__(self):
        return "TwObject(%r, %d strands)" % (self.name, len(self.strands))


def single(base, obj, shift=0, name=None):
    """One-strand twisted complex Sigma^shift obj."""
    return TwObject.from_strands(base, [obj], [shift], [0],
                                 name=name or ("S(%r)" % (obj,)))


def shift_tw(T, n, name=None):
    """Sigma^n T: every strand shift grows by n, delta scales by (-1)^n."""
    delta = T.delta
    if n % 2:
        delta = {k: T.base.field.neg(c) for k, c in delta.items()}
    return TwObject.from_strands(T.base, T.strands,
                                 [s + n for s in T.shifts], T.twists, delta,
                                 name=name or ("%s[%d]" % (T.name, n)))


def tw_identity(X):
    return {(t, t, X.base.unit_of(obj)): X.base.field.one
            for t, obj in enumerate(X.strands)}


def tw_compose(base, g, f):
    """Composition of flat morphisms between twisted complexes."""
    return _compose_flat(base, g, f)


# ---------------------------------------------------------------------------
# morphism complexes

class _ComplexOps:
    """Differential-graded helpers over (self.field, self.space, self.d)."""

    __slots__ = ()

    def d_matrix(self, k):
        """The degree k -> k+1 block of the differential (None if empty)."""
        if k in self._mats:
            return self._mats[k]
        dom_names = self.space.names_in_degree(k)
        if not dom_names:
            self._mats[k] = None
            return None
        dom = GradedSpace([(n, k) for n in dom_names])
        cod = GradedSpace([(n, k + 1)
                           for n in self.space.names_in_degree(k + 1)])
        m = SparseMap(self.field, dom, cod, 1)
        for n in dom_names:
            m.set_col(n, self.d({n: self.field.one}))
        self._mats[k] = m
        return m

    def cohomology_at(self, k):
        if k not in self._cohs:
            d_in, d_out = self.d_matrix(k - 1), self.d_matrix(k)
            if d_in is None and d_out is None:
                sp = GradedSpace([(n, k)
                                  for n in self.space.names_in_degree(k)])
                self._cohs[k] = cohomology_of_space(self.field, sp, None,
                                                    None)
            else:
                self._cohs[k] = cohomology(d_in, d_out)
        return self._cohs[k]

    def cohomology_dim(self, k):
        return self.cohomology_at(k).dim

    def is_closed(self, f):
        return not vec_clean(self.field, self.d(f))

    def primitive(self, f):
        """Solve d(h) = f in one degree below; None when f is not exact."""
        f = vec_clean(self.field, f)
        if not f:
            return {}
        k = self.space.vector_degree(f)
        m = self.d_matrix(k - 1)
        if m is None:
            return None
        return LinearSolver(m).solve(f)

    def degrees(self):
        return self.space.degrees_present()


class TwHom(_ComplexOps):
    """The morphism complex between two twisted complexes over one base.

    Basis names are blocks (t, u, r); the differential of a homogeneous
    f of degree k is dhat(f) + delta_Y.f - (-1)^k f.delta_X.
    """

    __slots__ = ("X", "Y", "base", "field", "space", "_mats", "_cohs")

    def __init__(self, X, Y):
        if X.base is not Y.base:
            raise ValueError("twisted complexes over different bases")
        self.X, self.Y, self.base = X, Y, X.base
        self.field = X.base.field
        basis = []
        for t, A in enumerate(X.strands):
            for u, B in enumerate(Y.strands):
                for r, dr in self.base.hom(A, B).basis:
                    basis.append(((t, u, r),
                                  dr + X.shifts[t] - Y.shifts[u]))
        self.space = GradedSpace(basis)
        self._mats = {}
        self._cohs = {}

    def d(self, vec):
        fld = self.field
        parts = {}
        for n, c in vec.items():
            parts.setdefault(self.space.degree(n), {})[n] = c
        out = {}
        for k, f in parts.items():
            out = vec_add(fld, out, self._d_homog(f, k))
        return vec_clean(fld, out)

    def _d_homog(self, f, k):
        fld = self.field
        out = _dhat_flat(self.base, f, lambda u: self.Y.shifts[u])
        out = vec_add(fld, out, _compose_flat(self.base, self.Y.delta, f))
        tail = _compose_flat(self.base, f, self.X.delta)
        if k % 2:
            out = vec_add(fld, out, tail)
        else:
            out = vec_sub(fld, out, tail)
        return out


def tw_hom(X, Y):
    return TwHom(X, Y)


# ---------------------------------------------------------------------------
# totalization and cones

def tot(components, blocks=None, name="Tot"):
    """Flatten a twisted complex of twisted complexes.

    components: list of (outer_twist, outer_shift, TwObject); blocks:
    {(a, b): flat entries} keyed by (strand in a, strand in b, r), each
    of twisted degree 1 in the output.  Strands of component a acquire
    shift n_a = outer_shift - outer_twist; its inner delta scales by
    (-1)^{n_a}; outer entries pass through unchanged.  Output twists
    are dense ranks of (outer twist, inner twist), components in listed
    order breaking ties.
    """
    if not components:
        raise ValueError("tot of no components")
    base = components[0][2].base
    recs = []  # (outer twist, inner twist, comp position, strand, obj, shift)
    for a, (I, N, X) in enumerate(components):
        if X.base is not base:
            raise ValueError("components over different bases")
        n_a = N - I
        for p, obj in enumerate(X.strands):
            recs.append((I, X.twists[p], a, p, obj, X.shifts[p] + n_a))
    recs.sort(key=lambda rec: rec[:4])
    ranks = {pair: i for i, pair in
             enumerate(sorted({(I, tw) for I, tw, _, _, _, _ in recs}))}
    idx = {}
    strands, shifts, twists = [], [], []
    for I, tw, a, p, obj, sh in recs:
        idx[(a, p)] = len(strands)
        strands.append(obj)
        shifts.append(sh)
        twists.append(ranks[(I, tw)])
    fld = base.field
    delta = {}
    for a, (I, N, X) in enumerate(components):
        odd = (N - I) % 2
        for (p, q, r), c in X.delta.items():
            delta[(idx[(a, p)], idx[(a, q)], r)] = fld.neg(c) if odd else c
    for (a, b), block in (blocks or {}).items():
        if components[b][0] <= components[a][0]:
            raise ValueError("outer delta block (%d, %d) does not raise "
                             "the outer twist" % (a, b))
        for (p, q, r), c in block.items():
            key = (idx[(a, p)], idx[(b, q)], r)
            delta[key] = fld.add(delta.get(key, fld.zero), c)
    return TwObject.from_strands(base, strands, shifts, twists, delta,
                                 name=name)


def cone(u, X, Y, name=None):
    """Mapping cone of a closed degree-0 morphism u: X -> Y.

    Returns (C, i, p): the strands of Sigma X precede those of Y with u
    as the connecting block; i: Y -> C and p: C -> Sigma X are the unit
    inclusions/projections, both closed of degree 0.
    """
    hom = TwHom(X, Y)
    u = vec_clean(hom.field, u)
    if u and hom.space.vector_degree(u) != 0:
        raise ValueError("cone input must be of degree 0")
    if not hom.is_closed(u):
        raise ValueError("cone input is not closed")
    C = tot([(0, 1, X), (1, 1, Y)], {(0, 1): u} if u else None,
            name=name or ("C(%s->%s)" % (X.name, Y.name)))
    one = hom.field.one
    nX = len(X.strands)
    i = {(t, nX + t, Y.base.unit_of(obj)): one
         for t, obj in enumerate(Y.strands)}
    p = {(t, t, X.base.unit_of(obj)): one for t, obj in enumerate(X.strands)}
    return C, i, p


# ---------------------------------------------------------------------------
# filtered objects

class FiltObject:
    """A filtered twisted complex: components indexed by integer levels,
    with a connecting delta that strictly lowers the level.

    comps: {level: TwObject}; cross: {(la, lb): flat entries} with
    lb < la, keyed by (strand in comps[la], strand in comps[lb], r) and
    of twisted degree 1.  Validity is checked on omega(J).
    """

    __slots__ = ("base", "comps", "cross", "levels", "name")

    def __init__(self, base, comps, cross=None, name="J"):
        self.base = base
        self.comps = dict(comps)
        self.levels = sorted(self.comps)
        self.name = name
        for l, T in self.comps.items():
            if T.base is not base:
                raise ValueError("component at level %r over a different "
                                 "base" % (l,))
        self.cross = {}
        for (la, lb), block in (cross or {}).items():
            if la not in self.comps or lb not in self.comps:
                raise ValueError("cross block (%r, %r) references missing "
                                 "levels" % (la, lb))
            if lb >= la:
                raise ValueError("cross block (%r, %r) must strictly lower "
                                 "the level" % (la, lb))
            block = vec_clean(base.field, block)
            if block:
                self.cross[(la, lb)] = block
        omega(self)  # full location/degree/MC validation

    def __eq__(self, other):
        return (isinstance(other, FiltObject) and self.base is other.base
                and self.levels == other.levels
                and all(self.comps[l] == other.comps[l] for l in self.levels)
                and self.cross == other.cross)

    def __repr__(self):
        return "FiltObject(%r, levels %r)" % (self.name, self.levels)


def _omega_index(J):
    """Flattening order of strands: by (-level, inner twist), stable."""
    recs = []
    for l in J.levels:
        T = J.comps[l]
        for p in range(len(T.strands)):
            recs.append((-l, T.twists[p], l, p))
    recs.sort(key=lambda rec: (rec[0], rec[1], rec[2], rec[3]))
    ranks = {pair: i for i, pair in
             enumerate(sorted({(nl, tw) for nl, tw, _, _ in recs}))}
    idx = {(l, p): i for i, (_, _, l, p) in enumerate(recs)}
    return recs, ranks, idx


def omega(J, name=None):
    """Forget the filtration: the underlying twisted complex.

    Strand shifts are unchanged; the flattening twist is the dense rank
    of (-level, inner twist), so the connecting blocks strictly raise
    the twist.
    """
    recs, ranks, idx = _omega_index(J)
    strands, shifts, twists = [], [], []
    for nl, tw, l, p in recs:
        T = J.comps[l]
        strands.append(T.strands[p])
        shifts.append(T.shifts[p])
        twists.append(ranks[(nl, tw)])
    delta = {}
    for l in J.levels:
        for (p, q, r), c in J.comps[l].delta.items():
            delta[(idx[(l, p)], idx[(l, q)], r)] = c
    for (la, lb), block in J.cross.items():
        for (p, q, r), c in block.items():
            delta[(idx[(la, p)], idx[(lb, q)], r)] = c
    return TwObject.from_strands(J.base, strands, shifts, twists, delta,
                                 name=name or ("w(%s)" % J.name))


def gr(J):
    """The associated graded: the components, connecting blocks dropped."""
    return dict(J.comps)


def filt_shift(J, k=1, name=None):
    """Relabel levels: the new level l carries the old level l + k."""
    comps = {l - k: T for l, T in J.comps.items()}
    cross = {(la - k, lb - k): dict(v) for (la, lb), v in J.cross.items()}
    return FiltObject(J.base, comps, cross,
                      name=name or ("%s(%d)" % (J.name, k)))


class FiltHom(_ComplexOps):
    """Filtered morphism complex: blocks from level la of J to level lb
    of J2 with la >= lb, named ((la, t), (lb, u), r).

    The differential is the one of the underlying total complexes; it
    preserves the filtered support.
    """

    __slots__ = ("J", "J2", "base", "field", "space", "_tw", "_enc", "_dec",
                 "_mats", "_cohs")

    def __init__(self, J, J2):
        if J.base is not J2.base:
            raise ValueError("filtered objects over different bases")
        self.J, self.J2, self.base = J, J2, J.base
        self.field = J.base.field
        self._tw = TwHom(omega(J), omega(J2))
        _, _, idx1 = _omega_index(J)
        _, _, idx2 = _omega_index(J2)
        back1 = {i: lp for lp, i in idx1.items()}
        back2 = {i: lp for lp, i in idx2.items()}
        self._enc, self._dec = {}, {}
        basis = []
        for (t, u, r), d in self._tw.space.basis:
            (la, p), (lb, q) = back1[t], back2[u]
            if la < lb:
                continue
            nm = ((la, p), (lb, q), r)
            self._enc[nm] = (t, u, r)
            self._dec[(t, u, r)] = nm
            basis.append((nm, d))
        self.space = GradedSpace(basis)
        self._mats = {}
        self._cohs = {}

    def d(self, vec):
        flat = {self._enc[n]: c for n, c in vec.items()}
        out = {}
        for k, c in self._tw.d(flat).items():
            nm = self._dec.get(k)
            if nm is None:
                raise RuntimeError("differential left the filtered support")
            out[nm] = c
        return out


def filt_hom(J, J2):
    return FiltHom(J, J2)


class _GrHom(_ComplexOps):
    """Levelwise morphism complex of the associated gradeds."""

    __slots__ = ("field", "space", "_homs", "_mats", "_cohs")

    def __init__(self, J, J2):
        self.field = J.base.field
        self._homs = {}
        basis = []
        for l in sorted(set(J.levels) & set(J2.levels)):
            h = TwHom(J.comps[l], J2.comps[l])
            self._homs[l] = h
            for (t, u, r), d in h.space.basis:
                basis.append((((l, t), (l, u), r), d))
        self.space = GradedSpace(basis)
        self._mats = {}
        self._cohs = {}

    def d(self, vec):
        parts = {}
        for ((l, t), (_, u), r), c in vec.items():
            parts.setdefault(l, {})[(t, u, r)] = c
        out = {}
        for l, f in parts.items():
            for (t, u, r), c in self._homs[l].d(f).items():
                out[((l, t), (l, u), r)] = c
        return out


def exact_seq_check(J, J2):
    """Exactness of 0 -> filt(J, J2(-1)) -> filt(J, J2) -> gr -> 0.

    The inclusion relabels target levels down by one (strict blocks);
    the projection keeps the level-diagonal blocks.  Checked degreewise:
    dimension additivity, both maps chain maps, and kernel = image via
    ranks on the coordinate maps.  Returns (ok, report).
    """
    fld = J.base.field
    A = FiltHom(J, filt_shift(J2, -1))
    B = FiltHom(J, J2)
    G = _GrHom(J, J2)

    def incl(vec):
        return {((la, p), (lb - 1, q), r): c
                for ((la, p), (lb, q), r), c in vec.items()}

    def proj(vec):
        return {n: c for n, c in vec.items() if n[0][0] == n[1][0]}

    report = {"dims": {}, "incl_chain": True, "proj_chain": True,
              "kernel_image": True}
    degs = sorted(set(A.degrees()) | set(B.degrees()) | set(G.degrees()))
    for k in degs:
        da = len(A.space.names_in_degree(k))
        db = len(B.space.names_in_degree(k))
        dg = len(G.space.names_in_degree(k))
        report["dims"][k] = (da, db, dg)
        if da + dg != db:
            report["kernel_image"] = False
    for n, _ in A.space.basis:
        lhs = B.d(incl({n: fld.one}))
        rhs = incl(A.d({n: fld.one}))
        if vec_clean(fld, vec_sub(fld, lhs, rhs)):
            report["incl_chain"] = False
    for n, _ in B.space.basis:
        lhs = G.d(proj({n: fld.one}))
        rhs = proj(B.d({n: fld.one}))
        if vec_clean(fld, vec_sub(fld, lhs, rhs)):
            report["proj_chain"] = False
    for k in degs:
        doma = GradedSpace([(n, k) for n in A.space.names_in_degree(k)])
        domb = GradedSpace([(n, k) for n in B.space.names_in_degree(k)])
        codg = GradedSpace([(n, k) for n in G.space.names_in_degree(k)])
        mi = SparseMap(fld, doma, domb, 0,
                       {n: incl({n: fld.one}) for n, _ in doma.basis})
        mp = SparseMap(fld, domb, codg, 0,
                       {n: proj({n: fld.one}) for n, _ in domb.basis})
        if not mp.after(mi).is_zero():
            report["kernel_image"] = False
        si, sp = LinearSolver(mi), LinearSolver(mp)
        # im(incl) = ker(proj) iff rank(incl) + rank(proj) = dim and the
        # composite vanishes; injectivity/surjectivity ride along.
        if si.rank != doma.dim or sp.rank != codg.dim:
            report["kernel_image"] = False
        if si.rank + sp.rank != domb.dim:
            report["kernel_image"] = False
    ok = (report["incl_chain"] and report["proj_chain"]
          and report["kernel_image"])
    return ok, report


# ---------------------------------------------------------------------------
# chain-level equivalences and degree-0 projection

def _hdim(c, A, B, q):
    """dim H^q of the hom complex c(A, B)."""
    sp = c.hom(A, B)
    if not sp.names_in_degree(q):
        return 0
    d_in = _degree_block(c.field, c, A, B, q - 1)
    d_out = _degree_block(c.field, c, A, B, q)
    if d_in is None and d_out is None:
        return len(sp.names_in_degree(q))
    return cohomology(d_in, d_out).dim


class LEquiv:
    """A chain-level realization of an equivalence between a degree-0
    category of injectives and the degree-0 cohomology of a base b
    concentrated in degrees <= 0.

    obj_map sends each injective object to a b-object (injectively);
    mor_map sends each nonunit basis morphism to a degree-0 chain in b.
    Construction verifies that classes of mor_map images together with
    the units form a basis of H^0 of every hom pair and that composition
    descends.  g_vec projects a chain to its class read in the injective
    basis (negative degrees die); lift_vec is the chosen section, so
    g_vec(lift_vec(x)) = x exactly.
    """

    __slots__ = ("b", "inj", "obj_map", "mor_map", "name", "_inv_obj",
                 "_cohs", "_expand")

    def __init__(self, b, inj, obj_map, mor_map, name="L"):
        for n in b.all_names():
            if b.deg(n) > 0:
                raise ValueError("base has a positive-degree morphism %r"
                                 % (n,))
        self.b, self.inj = b, inj
        self.obj_map = dict(obj_map)
        self.mor_map = {n: vec_clean(b.field, v) for n, v in mor_map.items()}
        self.name = name
        self._inv_obj = {}
        for A, bA in self.obj_map.items():
            if bA in self._inv_obj:
                raise ValueError("object map is not injective")
            self._inv_obj[bA] = A
        fld = b.field
        for n in inj.nonunit_names():
            if inj.deg(n) != 0:
                raise ValueError("injective side must sit in degree 0")
            vec = self.mor_map.get(n)
            if vec is None:
                raise ValueError("no chain chosen for %r" % (n,))
            bA = self.obj_map[inj.src(n)]
            bB = self.obj_map[inj.tgt(n)]
            sp = b.hom(bA, bB)
            for r in vec:
                if r not in sp or b.deg(r) != 0:
                    raise ValueError("chain for %r is not degree 0 at the "
                                     "right objects" % (n,))
        self._cohs, self._expand = {}, {}
        for A in inj.objects:
            for B in inj.objects:
                self._build_pair(A, B)
        for g in inj.nonunit_names():
            for f in inj.nonunit_names(B=inj.src(g)):
                comp = b.compose(self.mor_map[g], self.mor_map[f])
                got = self.g_vec(inj.src(f), inj.tgt(g), comp)
                want = inj.compose_basis(g, f)
                if vec_clean(fld, vec_sub(fld, got, want)):
                    raise ValueError("composition does not descend for "
                                     "(%r, %r)" % (g, f))

    def _build_pair(self, A, B):
        b, inj, fld = self.b, self.inj, self.b.field
        bA, bB = self.obj_map[A], self.obj_map[B]
        sp = b.hom(bA, bB)
        zero_names = sp.names_in_degree(0)
        dom0 = GradedSpace([(n, 0) for n in zero_names])
        d_in = _degree_block(fld, b, bA, bB, -1)
        preferred = ()
        if A == B:
            preferred = ({b.unit_of(bA): fld.one},)
        coh = cohomology_of_space(fld, dom0, d_in, None, preferred=preferred)
        self._cohs[(A, B)] = coh
        names = list(inj.hom(A, B).names())
        cols = {}
        for n in names:
            if inj.is_unit(n):
                cols[n] = coh.project({b.unit_of(bA): fld.one})
            else:
                cols[n] = coh.project(self.mor_map[n])
        dom = GradedSpace([(n, 0) for n in names])
        cod = GradedSpace([(("H", i), 0) for i in range(coh.dim)])
        mat = SparseMap(fld, dom, cod, 0,
                        {n: {("H", i): c for i, c in enumerate(col)
                             if not fld.is_zero(c)}
                         for n, col in cols.items()})
        solver = LinearSolver(mat)
        if solver.rank != len(names) or coh.dim != len(names):
            raise ValueError("not an equivalence on H^0 at (%r, %r): "
                             "%d classes vs %d morphisms"
                             % (A, B, coh.dim, len(names)))
        self._expand[(A, B)] = solver

    def lift_vec(self, A, B, vec):
        """The chosen degree-0 chain representing an injective-side vec."""
        fld, out = self.b.field, {}
        for n, c in vec.items():
            rep = ({self.b.unit_of(self.obj_map[A]): fld.one}
                   if self.inj.is_unit(n) else self.mor_map[n])
            for r, cr in rep.items():
                s = fld.add(out.get(r, fld.zero), fld.mul(c, cr))
                if fld.is_zero(s):
                    out.pop(r, None)
                else:
                    out[r] = s
        return out

    def g_vec(self, A, B, vec):
        """Class of the degree-0 part of a chain, in the injective basis."""
        fld = self.b.field
        part = {r: c for r, c in vec.items() if self.b.deg(r) == 0}
        if not part:
            return {}
        coords = self._cohs[(A, B)].project(part)
        sol = self._expand[(A, B)].solve(
            {("H", i): c for i, c in enumerate(coords)
             if not fld.is_zero(c)})
        if sol is None:
            raise RuntimeError("class escaped the equivalence image")
        return sol

    def hdim(self, A, B, q):
        """dim H^q of the base hom complex between the images of A, B."""
        return _hdim(self.b, self.obj_map[A], self.obj_map[B], q)


def _g_flat(L, flat, src_atoms, tgt_atoms):
    """Degree-0 class projection of a flat morphism, blockwise."""
    fld = L.b.field
    groups = {}
    for (t, u, r), c in flat.items():
        groups.setdefault((t, u), {})[r] = c
    out = {}
    for (t, u), block in groups.items():
        g = L.g_vec(src_atoms[t], tgt_atoms[u], block)
        for r, c in g.items():
            out[(t, u, r)] = c
    return vec_clean(fld, out)


def h0_image(T, L, name=None):
    """The twisted complex over the injective side obtained by applying
    the degree-0 projection to each block of delta."""
    atoms = tuple(L._inv_obj[obj] for obj in T.strands)
    delta = _g_flat(L, T.delta, atoms, atoms)
    return TwObject.from_strands(L.inj, atoms, T.shifts, T.twists, delta,
                                 name=name or ("G(%s)" % T.name))


def h0_image_filt(J, L, name=None):
    comps = {l: h0_image(T, L) for l, T in J.comps.items()}
    cross = {}
    for (la, lb), block in J.cross.items():
        src = tuple(L._inv_obj[o] for o in J.comps[la].strands)
        tgt = tuple(L._inv_obj[o] for o in J.comps[lb].strands)
        g = _g_flat(L, block, src, tgt)
        if g:
            cross[(la, lb)] = g
    return FiltObject(L.inj, comps, cross, name=name or ("G(%s)" % J.name))


# ---------------------------------------------------------------------------
# staircase completion

def _complete_staircase(L, atoms, shifts, twists, seed, name="M"):
    """Complete a lifted delta to a twisted complex over L.b.

    atoms/shifts/twists describe the strands on the injective side; seed
    is the flat delta over the injective category (all entries degree
    0).  The seed lifts entrywise; corrections are then solved level
    distance by level distance, each block an independent linear system
    in a single degree slice of the base.  Negative-degree obstruction
    slices must vanish (checked, with the blocking degree reported);
    degree-0 solves succeed precisely when the equivalence data is
    consistent.  The degree-0 projection of the result returns the seed
    strictly (verified).
    """
    b, inj, fld = L.b, L.inj, L.b.field
    n = len(atoms)
    strands = tuple(L.obj_map[a] for a in atoms)
    levels = sorted(set(twists))
    lrank = {tw: i for i, tw in enumerate(levels)}
    groups = {}
    for (t, u, r), c in seed.items():
        if inj.deg(r) + shifts[t] - shifts[u] != 1:
            raise ValueError("seed entry at (%d, %d, %r) is not of twisted "
                             "degree 1" % (t, u, r))
        groups.setdefault((t, u), {})[r] = c
    delta = {}
    for (t, u), block in groups.items():
        lifted = L.lift_vec(atoms[t], atoms[u], block)
        for r, c in lifted.items():
            delta[(t, u, r)] = c
    # vanishing gap for every negative obstruction degree that can occur
    for t in range(n):
        for u in range(n):
            if lrank.get(twists[u], 0) - lrank.get(twists[t], 0) < 2:
                continue
            qres = 2 + shifts[u] - shifts[t]
            if qres < 0 and L.hdim(atoms[t], atoms[u], qres):
                raise ValueError("vanishing gap fails: H^%d(%r, %r) != 0"
                                 % (qres, atoms[t], atoms[u]))
    maxdist = len(levels) - 1
    for dist in range(2, maxdist + 1):
        res = vec_add(fld, _dhat_flat(b, delta, lambda u: shifts[u]),
                      _compose_flat(b, delta, delta))
        res = vec_clean(fld, res)
        blocks = {}
        for (t, u, r), c in res.items():
            dd = lrank[twists[u]] - lrank[twists[t]]
            if dd < dist:
                # corrections only touch the active distance and above
                raise RuntimeError("residual below the active distance")
            if dd == dist:
                blocks.setdefault((t, u), {})[r] = c
        for t in range(n):
            for u in range(n):
                if lrank[twists[u]] - lrank[twists[t]] != dist:
                    continue
                rhs = blocks.get((t, u), {})
                if shifts[u] % 2 == 0:
                    rhs = {r: fld.neg(c) for r, c in rhs.items()}
                q = 1 + shifts[u] - shifts[t]
                dmap = _degree_block(fld, b, strands[t], strands[u], q)
                if dmap is None:
                    if rhs:
                        raise ValueError("staircase solve failed at block "
                                         "(%d, %d): inconsistent equivalence "
                                         "data" % (t, u))
                    continue
                nxt = _degree_block(fld, b, strands[t], strands[u], q + 1)
                if nxt is not None and vec_clean(fld, nxt.apply(rhs)):
                    raise RuntimeError("staircase residual is not closed")
                w = LinearSolver(dmap).solve(rhs)
                if w is None:
                    raise ValueError("staircase solve failed at block "
                                     "(%d, %d): inconsistent equivalence "
                                     "data" % (t, u))
                for r, c in w.items():
                    key = (t, u, r)
                    s = fld.add(delta.get(key, fld.zero), c)
                    if fld.is_zero(s):
                        delta.pop(key, None)
                    else:
                        delta[key] = s
    T = TwObject.from_strands(b, strands, shifts, twists, delta, name=name)
    back = h0_image(T, L)
    if back.delta != vec_clean(fld, dict(seed)):
        raise ValueError("degree-0 projection does not return the input; "
                         "the component is not in staircase form")
    return T


def moore_object(L, terms, maps, name="M"):
    """Twisted complex completing a lifted injective resolution.

    terms: list of summand lists of injective objects (term i is a
    formal sum placed at twist i with shift -i); maps: one block matrix
    {(p, q): vec} per consecutive pair, with d.d = 0.  Requires the
    vanishing gap H^{-1..-m} = 0 between all participating objects
    (m the resolution length); the consecutive delta is the entrywise
    chosen lift and higher blocks are solved in staircase order.
    Applying the degree-0 projection returns the input strictly.
    """
    inj, fld = L.inj, L.b.field
    m = len(terms) - 1
    if m < 0:
        raise ValueError("empty resolution")
    if len(maps) != m:
        raise ValueError("expected %d connecting maps, got %d"
                         % (m, len(maps)))
    for i in range(m - 1):
        for p in range(len(terms[i])):
            for s in range(len(terms[i + 2])):
                acc = {}
                for q in range(len(terms[i + 1])):
                    g = maps[i + 1].get((q, s), {})
                    f = maps[i].get((p, q), {})
                    if g and f:
                        acc = vec_add(fld, acc, inj.compose(g, f))
                if vec_clean(fld, acc):
                    raise ValueError("input is not a complex at step %d"
                                     % (i,))
    allatoms = sorted({a for term in terms for a in term}, key=str)
    for A in allatoms:
        for B in allatoms:
            for q in range(1, m + 1):
                if L.hdim(A, B, -q):
                    raise ValueError("vanishing gap fails at degree %d on "
                                     "(%r, %r)" % (-q, A, B))
    atoms, shifts, twists = [], [], []
    idx = {}
    for i, term in enumerate(terms):
        for p, a in enumerate(term):
            idx[(i, p)] = len(atoms)
            atoms.append(a)
            shifts.append(-i)
            twists.append(i)
    seed = {}
    for i, mp in enumerate(maps):
        for (p, q), vec in mp.items():
            for r, c in vec.items():
                seed[(idx[(i, p)], idx[(i + 1, q)], r)] = c
    return _complete_staircase(L, atoms, shifts, twists, seed, name=name)


# ---------------------------------------------------------------------------
# filtered lifting

def _compound_delta(J):
    """The full delta of a filtered object with (level, index) keys."""
    out = {}
    for l, T in J.comps.items():
        for (p, q, r), c in T.delta.items():
            out[((l, p), (l, q), r)] = c
    for (la, lb), block in J.cross.items():
        for (p, q, r), c in block.items():
            out[((la, p), (lb, q), r)] = c
    return out


def _lift_filt(X, L):
    levels = X.levels
    if len(levels) == 1:
        l = levels[0]
        comp = X.comps[l]
        Yc = _complete_staircase(L, comp.strands, comp.shifts, comp.twists,
                                 comp.delta, name="L(%s)" % comp.name)
        return FiltObject(L.b, {l: Yc}, name="L(%s)" % X.name), {}
    b, inj, fld = L.b, L.inj, L.b.field
    i = levels[0]
    X1c = X.comps[i]
    X2 = FiltObject(inj, {l: X.comps[l] for l in levels[1:]},
                    {k: v for k, v in X.cross.items() if k[1] != i},
                    name=X.name + ">%r" % (i,))
    ucross = {k: v for k, v in X.cross.items() if k[1] == i}
    Y1, _ = _lift_filt(FiltObject(inj, {i: X1c}, name=X.name + "@%r" % (i,)),
                       L)
    Y2, phi2 = _lift_filt(X2, L)
    Y1c = Y1.comps[i]
    GY2 = h0_image_filt(Y2, L)
    gdelta2 = _compound_delta(GY2)
    delta2 = _compound_delta(Y2)
    delta1 = {((i, p), (i, q), r): c for (p, q, r), c in Y1c.delta.items()}
    xdelta1 = {((i, p), (i, q), r): c for (p, q, r), c in X1c.delta.items()}
    shift_of = {}
    for l in levels[1:]:
        for t, s in enumerate(Y2.comps[l].shifts):
            shift_of[(l, t)] = s
    for u, s in enumerate(Y1c.shifts):
        shift_of[(i, u)] = s
    # unknowns: w = cross blocks of the lift, k = the witness correction
    cols = {}
    rhs = {}

    def put(col, row, c):
        s = fld.add(col.get(row, fld.zero), c)
        if fld.is_zero(s):
            col.pop(row, None)
        else:
            col[row] = s

    for la in levels[1:]:
        T2, T1 = Y2.comps[la], Y1c
        A2, A1 = X2.comps[la], X1c
        for t in range(len(T2.strands)):
            for u in range(len(T1.strands)):
                qd = 1 + T1.shifts[u] - T2.shifts[t]
                for r in b.hom(T2.strands[t], T1.strands[u]).names():
                    if b.deg(r) != qd:
                        continue
                    var = ("w", la, t, u, r)
                    wv = {((la, t), (i, u), r): fld.one}
                    col = {}
                    mc = vec_add(fld, _dhat_flat(b, wv,
                                                 lambda ku: shift_of[ku]),
                                 vec_add(fld,
                                         _compose_flat(b, delta1, wv),
                                         _compose_flat(b, wv, delta2)))
                    for key, c in vec_clean(fld, mc).items():
                        put(col, ("mc",) + key, c)
                    if b.deg(r) == 0:
                        gw = L.g_vec(A2.strands[t], A1.strands[u],
                                     {r: fld.one})
                        for rj, c in gw.items():
                            put(col, ("g", (la, t), (i, u), rj), c)
                    cols[var] = col
                swap = 0 + T2.shifts[t] - T1.shifts[u]
                if swap != 0:
                    continue
                for r in inj.hom(A2.strands[t], A1.strands[u]).names():
                    var = ("k", la, t, u, r)
                    kv = {((la, t), (i, u), r): fld.one}
                    col = {}
                    for key, c in _compose_flat(inj, kv, gdelta2).items():
                        put(col, ("g",) + key, c)
                    for key, c in _compose_flat(inj, xdelta1, kv).items():
                        put(col, ("g",) + key, fld.neg(c))
                    cols[var] = col
    phi2full = dict(phi2)
    for l in levels[1:]:
        T = X2.comps[l]
        for t, obj in enumerate(T.strands):
            phi2full[((l, t), (l, t), inj.unit_of(obj))] = fld.one
    uflat = {}
    for (la, lb), block in ucross.items():
        for (p, q, r), c in block.items():
            uflat[((la, p), (lb, q), r)] = c
    for key, c in _compose_flat(inj, uflat, phi2full).items():
        rhs[("g",) + key] = c
    rows = set(rhs)
    for col in cols.values():
        rows.update(col)
    dom = GradedSpace([(v, 0) for v in sorted(cols, key=str)])
    cod = GradedSpace([(r, 0) for r in sorted(rows, key=str)])
    mat = SparseMap(fld, dom, cod, 0, cols)
    sol = LinearSolver(mat).solve(rhs)
    if sol is None:
        raise ValueError("filtered lift: no cochain lift of the connecting "
                         "map into level %r" % (i,))
    wblocks, kblocks = {}, {}
    for var, c in sol.items():
        kind, la, t, u, r = var
        store = wblocks if kind == "w" else kblocks
        store.setdefault((la, i), {})[(t, u, r)] = c
    comps = {i: Y1c}
    comps.update(Y2.comps)
    cross = dict(Y2.cross)
    cross.update(wblocks)
    Y = FiltObject(b, comps, cross, name="L(%s)" % X.name)
    phi = dict(phi2)
    for blk, entries in kblocks.items():
        for (t, u, r), c in entries.items():
            phi[((blk[0], t), (blk[1], u), r)] = c
    return Y, phi


def lift_filtered(X, L, name=None):
    """Lift a filtered complex of injectives along the equivalence.

    X: FiltObject over L.inj.  Returns (Y, phi): Y a FiltObject over
    L.b whose components lift the components of X strictly, and phi the
    filtered isomorphism from the degree-0 projection of Y onto X
    (unitriangular: identities on the diagonal), verified to be a chain
    map.  Single levels delegate to the staircase completion; each added
    level solves one linear system for the connecting block and the
    witness correction together.
    """
    if X.base is not L.inj:
        raise ValueError("filtered object is not over the injective side")
    Y, kparts = _lift_filt(X, L)
    if name:
        Y.name = name
    GY = h0_image_filt(Y, L)
    for l in X.levels:
        if GY.comps[l] != X.comps[l]:
            raise RuntimeError("level %r does not project back strictly"
                               % (l,))
    fld = L.b.field
    phi = dict(kparts)
    for l in X.levels:
        T = X.comps[l]
        for t, obj in enumerate(T.strands):
            phi[((l, t), (l, t), L.inj.unit_of(obj))] = fld.one
    fh = FiltHom(GY, X)
    if not fh.is_closed(phi):
        raise RuntimeError("constructed witness is not a chain map")
    return Y, phi


# ---------------------------------------------------------------------------
# endomorphism algebras

def endo_category(T, name=None):
    """The endomorphism DG algebra of a twisted complex, as a one-object
    DG category.

    The identity of End(T) is the sum of the strand units, so the block
    basis is rebased: the first diagonal unit block is replaced by the
    full identity, a unitriangular change of coordinates.  The attached
    .to_names/.from_names convert between flat block morphisms and the
    category's basis.
    """
    E = TwHom(T, T)
    base, fld = T.base, T.base.field
    obj = T.name
    e0 = (0, 0, base.unit_of(T.strands[0]))
    ident = tw_identity(T)
    cat = GradedLinCat(fld, name or ("End(%s)" % T.name))
    cat.add_object(obj)
    unit = ("I", obj)
    cat.add_morphism(obj, obj, unit, 0)
    cat.set_unit(obj, unit)
    names = [nm for nm, _ in E.space.basis if nm != e0]
    for nm in names:
        cat.add_morphism(obj, obj, nm, E.space.degree(nm))

    def from_names(vec):
        out = {}
        for nm, c in vec.items():
            rep = ident if nm == unit else {nm: fld.one}
            for k, ck in rep.items():
                s = fld.add(out.get(k, fld.zero), fld.mul(c, ck))
                if fld.is_zero(s):
                    out.pop(k, None)
                else:
                    out[k] = s
        return out

    def to_names(flat):
        c0 = flat.get(e0, fld.zero)
        out = {} if fld.is_zero(c0) else {unit: c0}
        rest = vec_sub(fld, flat, vec_scale(fld, c0, ident))
        for k, c in vec_clean(fld, rest).items():
            if k == e0:
                raise RuntimeError("rebase failed to clear the pivot block")
            out[k] = c
        return out

    for g in names:
        for f in names:
            cat.set_compose(g, f, to_names(
                _compose_flat(base, {g: fld.one}, {f: fld.one})))
        dv = E.d({g: fld.one})
        if dv:
            cat.set_d(g, to_names(dv))
    cat.mark_dg()
    rep = validate(cat)
    if not rep.ok:
        raise RuntimeError("endomorphism category failed validation: %s"
                           % (rep.findings[:3],))
    cat.to_names = to_names
    cat.from_names = from_names
    return cat
