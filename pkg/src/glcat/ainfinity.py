"""Compact strictly unital A-infinity categories over a fixed field.

Everything lives in the suspended picture: writing |sf| = deg(f) - 1,
the operation b_m eats m composable suspended morphisms and has degree
+1, so a table entry b_m(sf_1, ..., sf_m) = sum c_r * r obeys

    deg(r) = 2 - m + sum_i deg(f_i).

Tuples follow the engine-wide chain convention: (f_1, ..., f_m) with
f_i: A_i -> A_{i-1}, so f_1 carries the final target, f_m the source,
and b_2(sg, sf) = (-1)^{deg g} s(g o f) recovers composition.

Strict unitality is structural.  Tables never store keys containing
identities; the implied values are b_2(s1, sf) = sf and
b_2(sf, s1) = (-1)^{deg f} sf, and every other identity-bearing value
is zero.  Compactness is mandatory: each category declares arity_bound
and operations beyond it are identically zero.
"""

import itertools

from .category import GradedLinCat, trivial_extension
from .linalg import vec_addmul, vec_clean, vec_scale

__all__ = [
    "AInfCat",
    "Cofunctor",
    "DeformError",
    "MCElement",
    "MCError",
    "StasheffReport",
    "WorkCapExceeded",
    "check_stasheff",
    "classical_cochain_vals",
    "deform",
    "from_dg",
    "mc_pushforward",
    "suspended_cochain_table",
    "tensor_dg",
    "tw_category",
    "tw_cofunctor_check",
]


class WorkCapExceeded(RuntimeError):
    """An enumeration would exceed its declared work cap.  Raised loudly,
    never silently truncated."""


class AInfCat:
    """Operations b_m stored sparsely per arity on composable non-identity
    basis tuples; the base GradedLinCat supplies objects, graded Hom
    spaces and identities (its own mul/diff tables are ignored here)."""

    def __init__(self, base, arity_bound, name=None):
        self.base = base
        self.field = base.field
        self.name = name if name is not None else base.name
        self.arity_bound = int(arity_bound)
        if self.arity_bound < 2:
            raise ValueError("arity_bound must be >= 2")
        self.tables = {}  # arity -> {tuple: vec}

    # -- delegation to the underlying graded category -----------------------

    @property
    def objects(self):
        return self.base.objects

    def hom(self, A, B):
        return self.base.hom(A, B)

    def src(self, name):
        return self.base.src(name)

    def tgt(self, name):
        return self.base.tgt(name)

    def deg(self, name):
        return self.base.deg(name)

    def is_unit(self, name):
        return self.base.is_unit(name)

    def unit_of(self, A):
        return self.base.unit_of(A)

    def all_names(self):
        return self.base.all_names()

    def nonunit_names(self, A=None, B=None):
        return self.base.nonunit_names(A, B)

    # -- structure tables ----------------------------------------------------

    def set_b(self, key, vec):
        key = tuple(key)
        m = len(key)
        if m < 1:
            raise ValueError("empty key")
        if m > self.arity_bound:
            raise WorkCapExceeded(
                "operation of arity %d exceeds declared bound %d" % (m, self.arity_bound)
            )
        for f in key:
            if self.is_unit(f):
                raise ValueError("strictly unital: key %r contains an identity" % (key,))
        for g, f in zip(key, key[1:]):
            if self.base.src(g) != self.base.tgt(f):
                raise ValueError("key %r is not composable" % (key,))
        vec = vec_clean(self.field, vec)
        want = 2 - m + sum(self.deg(f) for f in key)
        pair = (self.src(key[-1]), self.tgt(key[0]))
        for r in vec:
            if (self.base.src(r), self.base.tgt(r)) != pair:
                raise ValueError("value of %r lands outside hom%r" % (key, pair))
            if self.deg(r) != want:
                raise ValueError(
                    "value of %r has degree %d, want %d" % (key, self.deg(r), want)
                )
        tab = self.tables.setdefault(m, {})
        if vec:
            tab[key] = vec
        else:
            tab.pop(key, None)
        if not tab:
            self.tables.pop(m, None)

    def b_basis(self, key):
        """b on one basis tuple, identity rules included."""
        key = tuple(key)
        m = len(key)
        units = [self.is_unit(f) for f in key]
        if any(units):
            if m == 2:
                g, f = key
                if units[0]:
                    # covers the double-identity pair too: b_2(s1, s1) = s1
                    return {f: self.field.one}
                c = self.field.one if self.deg(g) % 2 == 0 else self.field.neg(self.field.one)
                return {g: c}
            return {}
        if m > self.arity_bound:
            return {}
        return self.tables.get(m, {}).get(key, {})

    def b_multi(self, slots):
        """b evaluated multilinearly on a list of morphism vectors."""
        fld = self.field
        out = {}
        for combo, c in _expand_slots(fld, slots):
            val = self.b_basis(combo)
            if val:
                out = vec_addmul(fld, out, c, val)
        return out

    def stasheff_defect(self, key):
        """sum_{k,j} (-1)^{|sf_1|+...+|sf_j|} b(sf_1..sf_j, b_k(window), rest)
        on one composable tuple; zero iff the identity holds there."""
        fld = self.field
        m = len(key)
        out = {}
        for k in range(1, m + 1):
            for j in range(0, m - k + 1):
                inner = self.b_basis(key[j: j + k])
                if not inner:
                    continue
                exp = sum(self.deg(key[i]) - 1 for i in range(j))
                sgn = fld.one if exp % 2 == 0 else fld.neg(fld.one)
                slots = (
                    [{f: fld.one} for f in key[:j]]
                    + [inner]
                    + [{f: fld.one} for f in key[j + k:]]
                )
                term = self.b_multi(slots)
                if term:
                    out = vec_addmul(fld, out, sgn, term)
        return vec_clean(fld, out)

    def is_dg(self):
        return all(a <= 2 for a in self.tables)

    def to_dg(self, name=None):
        """Rebuild the honest DG category when b_{>=3} = 0: composition
        g o f = (-1)^{deg g} b_2(sg, sf) and differential d = -b_1."""
        if not self.is_dg():
            raise ValueError("higher operations present; not a DG category")
        fld = self.field
        c = GradedLinCat(fld, name if name is not None else self.name)
        for A in self.objects:
            c.add_object(A)
        for (A, B), sp in self.base.homs.items():
            for n, d in sp.basis:
                c.add_morphism(A, B, n, d)
        for A, u in self.base.units.items():
            c.set_unit(A, u)
        for (g, f), vec in self.tables.get(2, {}).items():
            sgn = fld.one if self.deg(g) % 2 == 0 else fld.neg(fld.one)
            c.set_compose(g, f, vec_scale(fld, sgn, vec))
        c.mark_dg()
        for (f,), vec in self.tables.get(1, {}).items():
            c.set_d(f, vec_scale(fld, fld.neg(fld.one), vec))
        return c

    def __repr__(self):
        return "AInfCat(%r, arities %s, bound %d)" % (
            self.name,
            sorted(self.tables),
            self.arity_bound,
        )


def _expand_slots(fld, slots):
    """Multilinear expansion: yields (basis tuple, coefficient)."""
    items = [list(s.items()) for s in slots]
    for combo in itertools.product(*items):
        c = fld.one
        for _, cv in combo:
            c = fld.mul(c, cv)
        if not fld.is_zero(c):
            yield tuple(n for n, _ in combo), c


def _composable(cat, key):
    return all(cat.src(g) == cat.tgt(f) for g, f in zip(key, key[1:]))


def from_dg(c, arity_bound=2, name=None):
    """b_1 = -s(d.), b_2(sg, sf) = (-1)^{deg g} s(g o f), nothing higher."""
    a = AInfCat(c, arity_bound, name=name)
    fld = c.field
    for f, vec in c.diff.items():
        a.set_b((f,), vec_scale(fld, fld.neg(fld.one), vec))
    for g in c.nonunit_names():
        for f in c.nonunit_names(B=c.src(g)):
            vec = c.compose_basis(g, f)
            if vec:
                sgn = fld.one if c.deg(g) % 2 == 0 else fld.neg(fld.one)
                a.set_b((g, f), vec_scale(fld, sgn, vec))
    return a


AInfCat.from_dg = staticmethod(from_dg)


# ---------------------------------------------------------------------------
# suspension dictionary for cochains with degree-0 arguments
#
# An arity-n cochain phi on a category concentrated in degree 0 induces
# the table phi_s(sf_1,...,sf_n) = (-1)^{n(n-1)/2} phi(f_1,...,f_n): the
# sign is the Koszul cost of threading n desuspensions past n degree -1
# arguments.  It is an involution, so the same map converts back.

def _dict_sign(field, n):
    return field.one if (n * (n - 1) // 2) % 2 == 0 else field.neg(field.one)


def suspended_cochain_table(field, n, vals, rename=None):
    sgn = _dict_sign(field, n)
    out = {}
    for key, vec in vals.items():
        v = vec_scale(field, sgn, vec)
        if rename is not None:
            v = {rename(m): c for m, c in v.items()}
        if v:
            out[tuple(key)] = v
    return out


def classical_cochain_vals(field, n, table, rename=None):
    return suspended_cochain_table(field, n, table, rename)


# ---------------------------------------------------------------------------
# Stasheff checking

class StasheffReport:
    __slots__ = ("ok", "failures", "max_arity", "tuples_checked", "mode")

    def __init__(self, ok, failures, max_arity, tuples_checked, mode):
        self.ok = ok
        self.failures = failures  # list of (arity, tuple, defect vec)
        self.max_arity = max_arity
        self.tuples_checked = tuples_checked  # arity -> count
        self.mode = mode

    def witness(self):
        return self.failures[0] if self.failures else None

    def first_failing_arity(self):
        return self.failures[0][0] if self.failures else None

    def __repr__(self):
        if self.ok:
            return "StasheffReport(ok through arity %d, %d tuples, %s)" % (
                self.max_arity,
                sum(self.tuples_checked.values()),
                self.mode,
            )
        m, key, _ = self.failures[0]
        return "StasheffReport(FAIL at arity %d on %r)" % (m, key)


def _inner_sources(a, k):
    """(key, result support) for every structurally nonzero b_k on basis
    tuples, implied identity pairs included."""
    out = []
    for key, vec in a.tables.get(k, {}).items():
        out.append((key, list(vec)))
    if k == 2:
        for f in a.all_names():
            out.append(((a.unit_of(a.tgt(f)), f), [f]))
            if not a.is_unit(f):
                out.append(((f, a.unit_of(a.src(f))), [f]))
    return out


def _outer_position_index(a, o):
    """name -> [(stored b_o key, position)] over all arity-o keys."""
    idx = {}
    for key in a.tables.get(o, {}):
        for p, f in enumerate(key):
            idx.setdefault(f, []).append((key, p))
    return idx


def _candidate_tuples(a, m, work_cap):
    """Arity-m tuples admitting at least one structurally nonzero Stasheff
    term.  A nonzero term needs a nonzero inner b_k on a window and a
    nonzero outer b_o key hitting some element of the inner result, so
    every such tuple is outer[:p] + inner + outer[p+1:]; outer keys are
    either stored or an implied identity pair at o = 2.  Any tuple not
    produced here has identically zero defect."""
    cands = set()
    work = 0
    for k in range(1, m + 1):
        o = m - k + 1
        stored_outer = o in a.tables
        if not stored_outer and o != 2:
            continue
        idx = _outer_position_index(a, o) if stored_outer else {}
        for inner, results in _inner_sources(a, k):
            for r in results:
                for key, p in idx.get(r, ()):
                    cands.add(key[:p] + inner + key[p + 1:])
                    work += 1
                if o == 2:
                    cands.add((a.unit_of(a.tgt(r)),) + inner)
                    cands.add(inner + (a.unit_of(a.src(r)),))
                    work += 2
                if work > work_cap:
                    raise WorkCapExceeded(
                        "candidate enumeration at arity %d exceeded cap %d" % (m, work_cap)
                    )
    return cands


def _all_composable_tuples(a, m, work_cap):
    by_tgt = {}
    for f in a.all_names():
        by_tgt.setdefault(a.tgt(f), []).append(f)
    chains = [(f,) for f in a.all_names()]
    for _ in range(m - 1):
        nxt = []
        for ch in chains:
            for f in by_tgt.get(a.src(ch[-1]), ()):
                nxt.append(ch + (f,))
                if len(nxt) > work_cap:
                    raise WorkCapExceeded(
                        "exhaustive enumeration at arity %d exceeded cap %d" % (m, work_cap)
                    )
        chains = nxt
    return chains


def check_stasheff(a, max_arity, exhaustive=False, work_cap=500000, all_failures=False):
    """Verify the Stasheff identities through the given arity.

    The default mode checks exactly the tuples with a structurally
    nonzero term; every other tuple vanishes term by term.  `exhaustive`
    sweeps all composable tuples instead and exists to cross-validate
    the candidate enumeration on small inputs.  Stops at the first
    failing tuple unless all_failures is set.
    """
    if max_arity > 2 * a.arity_bound:
        raise ValueError("identities beyond arity 2*arity_bound are vacuous; refusing")
    mode = "exhaustive" if exhaustive else "structural"
    failures = []
    counts = {}
    for m in range(1, max_arity + 1):
        if exhaustive:
            tuples = _all_composable_tuples(a, m, work_cap)
        else:
            tuples = sorted(_candidate_tuples(a, m, work_cap), key=repr)
        counts[m] = len(tuples)
        for key in tuples:
            defect = a.stasheff_defect(key)
            if defect:
                failures.append((m, key, defect))
                if not all_failures:
                    return StasheffReport(False, failures, max_arity, counts, mode)
    return StasheffReport(not failures, failures, max_arity, counts, mode)


# ---------------------------------------------------------------------------
# the deformation along a Hochschild cocycle

class DeformError(ValueError):
    pass


def deform(a, M, eta, check_cocycle=True):
    """The A-infinity category a (+) Sigma^{n-2} M with b_n twisted by the
    arity-n cocycle eta.

    a must be concentrated in degree 0.  The M-part lands in degree
    2 - n under names ("m", element); the table at arity n is the
    suspended eta on pure-a tuples, extended by zero, and nothing else
    is deformed.  Since b_1 = 0, the cohomology category is the square
    zero extension itself.  Pass check_cocycle=False to build the
    structure for a non-cocycle and watch check_stasheff refute it.
    """
    from .hochschild import d_hoch

    n = eta.arity
    if n < 3:
        raise DeformError("deformation arity must be >= 3, got %d" % n)
    for nm in a.all_names():
        if a.deg(nm) != 0:
            raise DeformError("base category must be concentrated in degree 0")
    if check_cocycle and not d_hoch(eta).is_zero():
        raise DeformError("the deforming cochain is not a cocycle")
    tilde = trivial_extension(a, M, shift=2 - n, name="%s[def%d]" % (a.name, n))
    out = from_dg(tilde, arity_bound=n)
    table = suspended_cochain_table(a.field, n, eta.vals, rename=lambda el: ("m", el))
    for key, vec in table.items():
        out.set_b(key, vec)
    out.deform_data = (a, M, eta, n)
    return out


# ---------------------------------------------------------------------------
# tensoring with a DG category

def tensor_dg(a, b, name=None):
    """a (x) b for an A-infinity a and a DG category b.

    Objects are pairs, morphisms x (x) g with deg = deg x + deg g, and

        b_1(s(x(x)g))         = b_1(sx) (x) g + (-1)^{deg x - 1} x (x) d(g)
        b_m(s(x_1(x)g_1), ...) = (-1)^e b_m(sx_1..sx_m) (x) (g_1 o ... o g_m)

    with e = sum_{j<i} (deg x_i - 1) * deg g_j, the Koszul cost of
    pulling each g_j left past the suspended x_{j+1}, ..., x_m.
    """
    if isinstance(b, AInfCat):
        b = b.to_dg()
    fld = a.field
    base = GradedLinCat(fld, name if name is not None else "%s(x)%s" % (a.name, b.name))
    for A in a.objects:
        for P in b.objects:
            base.add_object((A, P))
    for x in a.all_names():
        for g in b.all_names():
            base.add_morphism(
                (a.src(x), b.src(g)),
                (a.tgt(x), b.tgt(g)),
                (x, g),
                a.deg(x) + b.deg(g),
            )
    for A in a.objects:
        for P in b.objects:
            base.set_unit((A, P), (a.unit_of(A), b.unit_of(P)))
    out = AInfCat(base, a.arity_bound, name=base.name)

    def neg_pow(e):
        return fld.one if e % 2 == 0 else fld.neg(fld.one)

    def chain_product(ch):
        prod = {ch[0]: fld.one}
        for g in ch[1:]:
            prod = b.compose(prod, {g: fld.one})
            if not prod:
                break
        return prod

    # arity 1
    for (x, g) in base.all_names():
        if base.is_unit((x, g)):
            continue
        vec = {}
        for r, c in a.b_basis((x,)).items():
            vec = vec_addmul(fld, vec, c, {(r, g): fld.one})
        sgn = neg_pow(a.deg(x) - 1)
        for h, c in b.diff.get(g, {}).items():
            vec = vec_addmul(fld, vec, fld.mul(sgn, c), {(x, h): fld.one})
        if vec:
            out.set_b(((x, g),), vec)

    # arity 2 on all composable non-identity pairs; the x-side b_basis
    # supplies the implied values when an x factor is an identity
    for t1 in base.all_names():
        if base.is_unit(t1):
            continue
        x1, g1 = t1
        for t2 in base.nonunit_names(B=base.src(t1)):
            x2, g2 = t2
            xval = a.b_basis((x1, x2))
            if not xval:
                continue
            gprod = b.compose_basis(g1, g2)
            if not gprod:
                continue
            sgn = neg_pow((a.deg(x2) - 1) * b.deg(g1))
            vec = {}
            for xr, cx in xval.items():
                for gr, cg in gprod.items():
                    vec = vec_addmul(
                        fld, vec, fld.mul(sgn, fld.mul(cx, cg)), {(xr, gr): fld.one}
                    )
            if vec:
                out.set_b((t1, t2), vec)

    # arity >= 3: stored x-keys crossed with composable g-chains
    by_tgt = {}
    for g in b.all_names():
        by_tgt.setdefault(b.tgt(g), []).append(g)
    for m, tab in a.tables.items():
        if m < 3:
            continue
        for key, xval in tab.items():
            chains = [(g,) for g in b.all_names()]
            for _ in range(m - 1):
                chains = [
                    ch + (g,) for ch in chains for g in by_tgt.get(b.src(ch[-1]), ())
                ]
            for ch in chains:
                prod = chain_product(ch)
                if not prod:
                    continue
                exp = 0
                for i in range(1, m):
                    for j in range(i):
                        exp += (a.deg(key[i]) - 1) * b.deg(ch[j])
                sgn = neg_pow(exp)
                vec = {}
                for xr, cx in xval.items():
                    for gr, cg in prod.items():
                        vec = vec_addmul(
                            fld, vec, fld.mul(sgn, fld.mul(cx, cg)), {(xr, gr): fld.one}
                        )
                if vec:
                    out.set_b(tuple(zip(key, ch)), vec)
    return out


# ---------------------------------------------------------------------------
# Maurer-Cartan elements and twisting

class MCElement:
    """delta in hom(A, A) of degree 1 with sum_m b_m(s delta, ..., s delta) = 0."""

    __slots__ = ("cat", "obj", "vec", "label")

    def __init__(self, cat, obj, vec, label=None):
        self.cat = cat
        self.obj = obj
        self.vec = vec_clean(cat.field, vec)
        self.label = label
        for nm in self.vec:
            if (cat.src(nm), cat.tgt(nm)) != (obj, obj) or cat.deg(nm) != 1:
                raise ValueError("a twisting element is a degree-1 endomorphism")

    def residual(self):
        fld = self.cat.field
        out = {}
        for m in range(1, self.cat.arity_bound + 1):
            term = self.cat.b_multi([self.vec] * m)
            if term:
                out = vec_addmul(fld, out, fld.one, term)
        return vec_clean(fld, out)

    def is_mc(self):
        return not self.residual()

    def __repr__(self):
        return "MCElement(%r at %r)" % (
            self.label if self.label is not None else self.vec, self.obj
        )


class MCError(ValueError):
    """Carries the nonzero Maurer-Cartan residual for diagnostics."""

    def __init__(self, msg, residual):
        super().__init__("%s; residual %r" % (msg, residual))
        self.residual = residual


def _insertion_patterns(extra, gaps):
    """All ways to distribute `extra` insertions over `gaps` ordered slots."""
    if gaps == 1:
        yield (extra,)
        return
    for first in range(extra + 1):
        for rest in _insertion_patterns(extra - first, gaps - 1):
            yield (first,) + rest


def tw_category(a, mc_list, name=None):
    """The category of twisted objects (A_i, delta_i).

    Hom spaces are copied from a under names ("tw", i, j, f); the
    operation b_p on a chain is the sum over all ways of inserting
    copies of the source, intermediate and target twists into the p + 1
    gaps (finite by compactness).  Every twist must satisfy
    Maurer-Cartan; violations raise MCError carrying the residual.
    """
    for i, mc in enumerate(mc_list):
        res = mc.residual()
        if res:
            raise MCError("object %d fails the Maurer-Cartan equation" % i, res)
    fld = a.field
    base = GradedLinCat(fld, name if name is not None else "tw(%s)" % a.name)
    for i in range(len(mc_list)):
        base.add_object(("tw", i))
    for i, mi in enumerate(mc_list):
        for j, mj in enumerate(mc_list):
            for f, d in a.hom(mi.obj, mj.obj).basis:
                base.add_morphism(("tw", i), ("tw", j), ("tw", i, j, f), d)
    for i, mi in enumerate(mc_list):
        base.set_unit(("tw", i), ("tw", i, i, a.unit_of(mi.obj)))
    out = AInfCat(base, a.arity_bound, name=base.name)
    out.tw_objects = list(mc_list)

    tw_names = [n for n in base.all_names() if not base.is_unit(n)]
    by_tgt = {}
    for n in tw_names:
        by_tgt.setdefault(base.tgt(n), []).append(n)
    for p in range(1, a.arity_bound + 1):
        chains = [(n,) for n in tw_names]
        for _ in range(p - 1):
            chains = [ch + (n,) for ch in chains for n in by_tgt.get(base.src(ch[-1]), ())]
        for key in chains:
            # twist indices along the chain; key[t]: X_{t+1} -> X_t
            objs = [base.tgt(key[0])[1]] + [base.src(f)[1] for f in key]
            val = {}
            for extra in range(0, a.arity_bound - p + 1):
                for pattern in _insertion_patterns(extra, p + 1):
                    slots = []
                    for t in range(p):
                        slots.extend([mc_list[objs[t]].vec] * pattern[t])
                        slots.append({key[t][3]: fld.one})
                    slots.extend([mc_list[objs[p]].vec] * pattern[p])
                    term = a.b_multi(slots)
                    if term:
                        val = vec_addmul(fld, val, fld.one, term)
            val = vec_clean(fld, val)
            if val:
                i_src, j_tgt = objs[p], objs[0]
                out.set_b(key, {("tw", i_src, j_tgt, r): c for r, c in val.items()})
    return out


# ---------------------------------------------------------------------------
# cofunctors

def _compositions(total, parts):
    """Ordered splittings of `total` into `parts` positive integers."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class Cofunctor:
    """Taylor coefficients f_i: (sA)^{(x)i} -> sB of suspended degree 0,
    so classically deg(value) = sum deg(x_t) - i + 1.

    Strictly unital: f_1 sends identities to identities (implied, never
    stored) and higher coefficients kill identity-bearing tuples.
    """

    __slots__ = ("source", "target", "obj_map", "coeffs", "name")

    def __init__(self, source, target, obj_map, name="f"):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.coeffs = {}  # arity -> {tuple: vec over target names}
        self.name = name

    def set_f(self, key, vec):
        key = tuple(key)
        i = len(key)
        for f in key:
            if self.source.is_unit(f):
                raise ValueError("strictly unital: key %r contains an identity" % (key,))
        for g, f in zip(key, key[1:]):
            if self.source.src(g) != self.source.tgt(f):
                raise ValueError("key %r not composable" % (key,))
        vec = vec_clean(self.target.field, vec)
        want = sum(self.source.deg(f) for f in key) - i + 1
        pair = (
            self.obj_map[self.source.src(key[-1])],
            self.obj_map[self.source.tgt(key[0])],
        )
        for r in vec:
            if (self.target.src(r), self.target.tgt(r)) != pair:
                raise ValueError("value of %r lands outside hom%r" % (key, pair))
            if self.target.deg(r) != want:
                raise ValueError(
                    "value of %r has degree %d, want %d" % (key, self.target.deg(r), want)
                )
        tab = self.coeffs.setdefault(i, {})
        if vec:
            tab[key] = vec
        else:
            tab.pop(key, None)
        if not tab:
            self.coeffs.pop(i, None)

    def max_arity(self):
        return max(self.coeffs, default=1)

    def f_basis(self, key):
        key = tuple(key)
        if len(key) == 1:
            f = key[0]
            if self.source.is_unit(f):
                u = self.target.unit_of(self.obj_map[self.source.src(f)])
                return {u: self.target.field.one}
            return self.coeffs.get(1, {}).get(key, {})
        if any(self.source.is_unit(f) for f in key):
            return {}
        return self.coeffs.get(len(key), {}).get(key, {})

    def f_multi(self, slots):
        fld = self.target.field
        out = {}
        for combo, c in _expand_slots(fld, slots):
            val = self.f_basis(combo)
            if val:
                out = vec_addmul(fld, out, c, val)
        return out

    def defect(self, key):
        """(f o b_src - b_tgt o f) on one composable source tuple.

        The first sum carries the Koszul sign of moving the degree +1
        operation past the leading suspended arguments; the second is
        sign-free because every coefficient has suspended degree 0.
        """
        fld = self.target.field
        m = len(key)
        out = {}
        for k in range(1, m + 1):
            for j in range(0, m - k + 1):
                inner = self.source.b_basis(key[j: j + k])
                if not inner:
                    continue
                exp = sum(self.source.deg(key[i]) - 1 for i in range(j))
                sgn = fld.one if exp % 2 == 0 else fld.neg(fld.one)
                slots = (
                    [{f: fld.one} for f in key[:j]]
                    + [inner]
                    + [{f: fld.one} for f in key[j + k:]]
                )
                term = self.f_multi(slots)
                if term:
                    out = vec_addmul(fld, out, sgn, term)
        for r in range(1, m + 1):
            if r > self.target.arity_bound:
                continue
            for split in _compositions(m, r):
                blocks = []
                pos = 0
                for ln in split:
                    blocks.append(tuple(key[pos: pos + ln]))
                    pos += ln
                vals = [self.f_basis(blk) for blk in blocks]
                if any(not v for v in vals):
                    continue
                term = self.target.b_multi(vals)
                if term:
                    out = vec_addmul(fld, out, fld.neg(fld.one), term)
        return vec_clean(fld, out)

    def defect_on_slots(self, slots):
        """Multilinear extension of defect; non-composable basis combos
        contribute nothing."""
        fld = self.target.field
        out = {}
        for combo, c in _expand_slots(fld, slots):
            if not _composable(self.source, combo):
                continue
            d = self.defect(combo)
            if d:
                out = vec_addmul(fld, out, c, d)
        return vec_clean(fld, out)

    def functor_report(self, max_arity, work_cap=500000):
        """Check the functor equation on every composable identity-free
        tuple through max_arity; identity-bearing tuples hold
        automatically for strictly unital normalized data.  Returns
        (ok, failures) stopping at the first failure."""
        failures = []
        src = self.source
        for m in range(1, max_arity + 1):
            for key in _all_composable_tuples(src, m, work_cap):
                if any(src.is_unit(f) for f in key):
                    continue
                d = self.defect(key)
                if d:
                    failures.append((m, key, d))
                    return False, failures
        return True, failures

    def vacuous_arity(self):
        """Arities strictly above this have identically zero equation:
        the f o b side needs m <= max_f - 1 + source bound, the b o f
        side m <= target bound * max_f."""
        fb = self.max_arity()
        return max(fb - 1 + self.source.arity_bound, self.target.arity_bound * fb)

    def __repr__(self):
        return "Cofunctor(%r: %r -> %r, arities %s)" % (
            self.name, self.source.name, self.target.name, sorted(self.coeffs)
        )


# ---------------------------------------------------------------------------
# tw for cofunctors and Maurer-Cartan pushforward

def tw_cofunctor_check(f, mcs, morphs, max_len=None):
    """Evaluate the functor-equation defect on the argument shapes that
    control the induced functor on twisted objects:

      1. pure twist strings (s delta, ..., s delta), one object at a time;
      2. twist strings around one morphism of degree 0 or -1;
      3. twist strings around two composable degree-0 morphisms.

    mcs: MCElements in f.source.  morphs: triples (i, j, vec) with vec a
    homogeneous morphism vector from mcs[i].obj to mcs[j].obj.  Shapes
    are swept through total length max_len (default: the vacuous arity
    of f).  Returns (ok, witnesses); a witness is (shape, layout,
    defect).
    """
    L = max_len if max_len is not None else f.vacuous_arity()
    witnesses = []

    def probe(shape, layout, slots):
        d = f.defect_on_slots(slots)
        if d:
            witnesses.append((shape, layout, d))

    for idx, mc in enumerate(mcs):
        for ln in range(1, L + 1):
            probe("twist-string", (idx, ln), [mc.vec] * ln)
    for (i, j, vec) in morphs:
        deg = _vec_degree(f.source, vec)
        if deg not in (0, -1):
            raise ValueError("sample morphisms must have degree 0 or -1")
        for total in range(0, L):
            for p in range(total + 1):
                q = total - p
                slots = [mcs[j].vec] * p + [vec] + [mcs[i].vec] * q
                probe("one-morphism", (i, j, p, q), slots)
    for (i, j, u1) in morphs:
        if _vec_degree(f.source, u1) != 0:
            continue
        for (j2, l, u2) in morphs:
            if j2 != j or _vec_degree(f.source, u2) != 0:
                continue
            for total in range(0, max(L - 1, 0)):
                for p in range(total + 1):
                    for q in range(total - p + 1):
                        r = total - p - q
                        slots = (
                            [mcs[l].vec] * p + [u2] + [mcs[j].vec] * q
                            + [u1] + [mcs[i].vec] * r
                        )
                        probe("two-morphisms", (i, j, l, p, q, r), slots)
    return not witnesses, witnesses


def _vec_degree(cat, vec):
    degs = {cat.deg(nm) for nm in vec}
    if len(degs) != 1:
        raise ValueError("sample morphism must be homogeneous")
    return degs.pop()


def mc_pushforward(f, mc, verify_functor=True):
    """delta |-> sum_i f_i(s delta, ..., s delta), checked against the
    target Maurer-Cartan equation."""
    if verify_functor:
        ok, fails = f.functor_report(f.vacuous_arity())
        if not ok:
            m, key, _ = fails[0]
            raise ValueError("not a functor: equation fails at arity %d on %r" % (m, key))
    fld = f.target.field
    out = {}
    for i in range(1, f.max_arity() + 1):
        term = f.f_multi([mc.vec] * i)
        if term:
            out = vec_addmul(fld, out, fld.one, term)
    pushed = MCElement(
        f.target,
        f.obj_map[mc.obj],
        out,
        label=("push", f.name, mc.label),
    )
    res = pushed.residual()
    if res:
        raise MCError("pushforward violates Maurer-Cartan", res)
    return pushed
