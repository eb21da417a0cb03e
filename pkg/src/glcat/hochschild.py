"""Normalized Hochschild cochain complex of a linear category.

A cochain of arity n on a category a with coefficients in an (a,a)-bimodule
M assigns to each composable chain of non-identity basis morphisms

    A_0 <-f_1- A_1 <-f_2- ... <-f_n- A_n

a value in M(A_n, A_0); arity-0 cochains assign to each object A a value
in M(A, A).  Normalization (vanishing on identities) is built into the
representation: identity morphisms simply cannot appear in keys.

The differential is the classical alternating sum

    (dφ)(f_1,...,f_{n+1}) = f_1·φ(f_2,...,f_{n+1})
        + Σ_{i=1..n} (-1)^i φ(f_1,...,f_i∘f_{i+1},...,f_{n+1})
        + (-1)^{n+1} φ(f_1,...,f_n)·f_{n+1}

restricted to non-identity tuples (terms where f_i∘f_{i+1} produces an
identity component are fine: the value of φ is taken on the composite's
expansion in basis morphisms, which never involves identity *keys* since
φ is only stored on non-identity tuples -- unit components of composites
contribute through the stored values of shorter keys).

The base category must be concentrated in degree 0; the bimodule may be
graded (all values of one cochain then share the bimodule degree).
"""

from .category import Bimodule, GradedLinCat
from .linalg import (
    GradedSpace,
    LinearSolver,
    SparseMap,
    cohomology_of_space,
    vec_addmul,
    vec_clean,
    vec_is_zero,
    vec_scale,
    vec_sub,
)

__all__ = [
    "HochCochain",
    "composable_tuples",
    "cochain_space",
    "d_hoch",
    "d_hoch_map",
    "hh",
    "HHResult",
    "cup_one",
    "random_cochain",
    "random_cocycle",
    "random_noncocycle",
]


def _check_degree_zero(cat):
    for n in cat.all_names():
        if cat.deg(n) != 0:
            raise ValueError("base category must be concentrated in degree 0")


class HochCochain:
    """Sparse normalized cochain; keys are composable non-identity tuples
    (or objects, for arity 0), values are vectors over the bimodule."""

    __slots__ = ("cat", "bimod", "arity", "vals")

    def __init__(self, cat, bimod, arity, vals=None):
        self.cat = cat
        self.bimod = bimod
        self.arity = int(arity)
        self.vals = {}
        if vals:
            for k, v in vals.items():
                self.set_value(k, v)

    def set_value(self, key, vec):
        vec = vec_clean(self.bimod.field, vec)
        if self.arity == 0:
            if key not in self.cat.objects:
                raise ValueError("arity-0 key must be an object")
            tgt_pair = (key, key)
        else:
            key = tuple(key)
            if len(key) != self.arity:
                raise ValueError("key length != arity")
            for f in key:
                if self.cat.is_unit(f):
                    raise ValueError("normalized cochain key contains an identity")
            for f, g in zip(key, key[1:]):
                if self.cat.src(f) != self.cat.tgt(g):
                    raise ValueError("key %r is not composable" % (key,))
            tgt_pair = (self.cat.src(key[-1]), self.cat.tgt(key[0]))
        for m in vec:
            if self.bimod.loc(m) != tgt_pair:
                raise ValueError(
                    "value of %r must lie in M%r, got %r in M%r"
                    % (key, tgt_pair, m, self.bimod.loc(m))
                )
        if vec:
            self.vals[key] = vec
        else:
            self.vals.pop(key, None)

    def value(self, key):
        if self.arity > 0:
            key = tuple(key)
        return dict(self.vals.get(key, {}))

    def is_zero(self):
        return not self.vals

    def internal_degree(self):
        """Common degree of all values; None for the zero cochain."""
        degs = {self.bimod.deg(m) for v in self.vals.values() for m in v}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("cochain not homogeneous: value degrees %s" % degs)
        return degs.pop()

    def scaled(self, c):
        f = self.bimod.field
        return HochCochain(
            self.cat, self.bimod, self.arity,
            {k: vec_scale(f, c, v) for k, v in self.vals.items()},
        )

    def plus(self, other):
        assert other.arity == self.arity and other.bimod is self.bimod
        f = self.bimod.field
        out = HochCochain(self.cat, self.bimod, self.arity, self.vals)
        for k, v in other.vals.items():
            out.set_value(k, vec_addmul(f, out.value(k), f.one, v))
        return out

    def minus(self, other):
        return self.plus(other.scaled(self.bimod.field.of(-1)))

    def __repr__(self):
        return "HochCochain(arity=%d, %d keys)" % (self.arity, len(self.vals))


def composable_tuples(cat, n):
    """All length-n chains of non-identity basis morphisms, in the
    deterministic order induced by declaration order."""
    if n == 0:
        return list(cat.objects)
    names = [m for m in cat.all_names() if not cat.is_unit(m)]
    by_tgt = {}
    for m in names:
        by_tgt.setdefault(cat.tgt(m), []).append(m)
    chains = [(m,) for m in names]
    for _ in range(n - 1):
        nxt = []
        for ch in chains:
            for m in by_tgt.get(cat.src(ch[-1]), ()):
                nxt.append(ch + (m,))
        chains = nxt
    return chains


def cochain_space(cat, bimod, n):
    """GradedSpace of the arity-n normalized cochains.

    Basis names are (key, m); the degree is the bimodule degree of m, so
    slicing by degree slices by internal degree.
    """
    basis = []
    if n == 0:
        for A in cat.objects:
            for m, d in bimod.space(A, A).basis:
                basis.append(((A, m), d))
    else:
        for key in composable_tuples(cat, n):
            A_n, A_0 = cat.src(key[-1]), cat.tgt(key[0])
            for m, d in bimod.space(A_n, A_0).basis:
                basis.append(((key, m), d))
    return GradedSpace(basis)


def cochain_to_vec(phi):
    out = {}
    for k, v in phi.vals.items():
        for m, c in v.items():
            out[(k, m)] = c
    return out


def vec_to_cochain(cat, bimod, n, vec):
    field = bimod.field
    vals = {}
    for (k, m), c in vec.items():
        if field.is_zero(c):
            continue
        vals.setdefault(k, {})[m] = c
    return HochCochain(cat, bimod, n, vals)


def d_hoch(phi):
    """The alternating-sum Hochschild differential."""
    cat, M = phi.cat, phi.bimod
    _check_degree_zero(cat)
    f = M.field
    out = HochCochain(cat, M, phi.arity + 1)
    if phi.arity == 0:
        # (dφ)(g) = g·φ(src g) − φ(tgt g)·g
        for g in cat.all_names():
            if cat.is_unit(g):
                continue
            val = M.lact_vec({g: f.one}, phi.value(cat.src(g)))
            val = vec_sub(f, val, M.ract_vec(phi.value(cat.tgt(g)), {g: f.one}))
            out.set_value((g,), val)
        return out
    n = phi.arity
    for key in composable_tuples(cat, n + 1):
        acc = M.lact_vec({key[0]: f.one}, phi.value(key[1:]))
        sign = f.one
        for i in range(1, n + 1):
            sign = f.neg(sign)
            # contract slot i with slot i+1 (1-based)
            comp = cat.compose_basis(key[i - 1], key[i])
            for h, c in comp.items():
                if cat.is_unit(h):
                    # normalized value on a tuple with an identity is zero
                    continue
                inner = key[: i - 1] + (h,) + key[i + 1:]
                acc = vec_addmul(f, acc, f.mul(sign, c), phi.value(inner))
        last_sign = f.one if (n + 1) % 2 == 0 else f.neg(f.one)
        acc = vec_addmul(f, acc, last_sign, M.ract_vec(phi.value(key[:-1]), {key[-1]: f.one}))
        out.set_value(key, acc)
    return out


def d_hoch_map(cat, bimod, n, dom=None, cod=None):
    """The differential C̄^n -> C̄^{n+1} as a SparseMap (degree shift 0 in
    the bimodule grading).  Spaces may be passed in to share them.

    Built row-by-row over the output tuples (one pass, each output key
    contributing n+2 terms) rather than by differentiating unit cochains,
    which would cost dim(C̄^n)·|tuples| evaluations.
    """
    _check_degree_zero(cat)
    dom = dom if dom is not None else cochain_space(cat, bimod, n)
    cod = cod if cod is not None else cochain_space(cat, bimod, n + 1)
    f = bimod.field
    mp = SparseMap(f, dom, cod, 0)
    minus_one = f.neg(f.one)
    if n == 0:
        for (key, mm), _ in cod.basis:
            g = key[0]
            A1, A0 = cat.src(g), cat.tgt(g)
            # row (key, mm); columns are arity-0 keys (object, m)
            for m0, _d in bimod.space(A1, A1).basis:
                c = bimod.lact_basis(g, m0).get(mm)
                if c is not None:
                    mp.add_entry((key, mm), (A1, m0), c)
            for m0, _d in bimod.space(A0, A0).basis:
                c = bimod.ract_basis(m0, g).get(mm)
                if c is not None:
                    mp.add_entry((key, mm), (A0, m0), f.neg(c))
        return mp
    seen = set()
    for (key, _mm), _ in cod.basis:
        if key in seen:
            continue
        seen.add(key)
        rest = key[1:]
        Ah, Al = cat.src(key[-1]), cat.tgt(key[1])
        for m0, _d in bimod.space(Ah, Al).basis:
            for r, c in bimod.lact_basis(key[0], m0).items():
                mp.add_entry((key, r), (rest, m0), c)
        sign = f.one
        for i in range(1, n + 1):
            sign = f.neg(sign)
            for h, c in cat.compose_basis(key[i - 1], key[i]).items():
                if cat.is_unit(h):
                    continue
                inner = key[: i - 1] + (h,) + key[i + 1:]
                Ah2, Al2 = cat.src(inner[-1]), cat.tgt(inner[0])
                for m0, _d in bimod.space(Ah2, Al2).basis:
                    mp.add_entry((key, m0), (inner, m0), f.mul(sign, c))
        front = key[:-1]
        Ah3, Al3 = cat.src(key[-2]), cat.tgt(key[0])
        last_sign = f.one if (n + 1) % 2 == 0 else minus_one
        for m0, _d in bimod.space(Ah3, Al3).basis:
            for r, c in bimod.ract_basis(m0, key[-1]).items():
                mp.add_entry((key, r), (front, m0), f.mul(last_sign, c))
    return mp


class HHResult:
    """Hochschild cohomology in one arity: dimension, class basis, and a
    projection from cocycles to class coordinates."""

    __slots__ = ("cat", "bimod", "arity", "dim", "space", "_coh")

    def __init__(self, cat, bimod, arity, dim, space, coh):
        self.cat = cat
        self.bimod = bimod
        self.arity = arity
        self.dim = dim
        self.space = space
        self._coh = coh

    def class_of(self, phi):
        """Coordinates of a cocycle in the fixed class basis."""
        return self._coh.project(cochain_to_vec(phi))

    def representative(self, i):
        vec = self._coh.lifts[i]
        return vec_to_cochain(self.cat, self.bimod, self.arity, vec)

    def is_coboundary(self, phi):
        f = self.bimod.field
        return all(f.is_zero(c) for c in self.class_of(phi))


def hh(cat, bimod, n, arity_cap=8):
    """dim HH^n(cat, bimod) plus a fixed class basis.

    Works on the normalized complex; n is capped (cochain spaces grow
    geometrically with arity).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > arity_cap:
        raise ValueError("arity %d exceeds cap %d" % (n, arity_cap))
    _check_degree_zero(cat)
    sp_n = cochain_space(cat, bimod, n)
    d_out = d_hoch_map(cat, bimod, n, dom=sp_n)
    d_in = d_hoch_map(cat, bimod, n - 1, cod=sp_n) if n >= 1 else None
    coh = cohomology_of_space(bimod.field, sp_n, d_in, d_out)
    return HHResult(cat, bimod, n, coh.dim, sp_n, coh)


# ---------------------------------------------------------------------------
# cup with the identity of a second (degree-0) category

def cup_one(eta, bcat, tensored=None):
    """η ∪ 1 on the tensor category a⊗b, for b concentrated in degree 0.

    (η∪1)(x_1⊗g_1, ..., x_n⊗g_n) = η(x_1,...,x_n) ⊗ (g_1∘⋯∘g_n); in the
    degree-0 case every Koszul sign is +1.  `tensored` may supply a
    prebuilt (cat, bimod) pair from tensor_linear/tensor_bimodule so the
    output lives over shared objects.
    """
    from .category import tensor_linear, tensor_bimodule

    _check_degree_zero(bcat)
    if bcat.diff:
        raise ValueError("degree-0 category cannot carry a nonzero differential")
    a, M = eta.cat, eta.bimod
    if tensored is None:
        tcat = tensor_linear(a, bcat)
        tmod = tensor_bimodule(M, bcat, tcat)
    else:
        tcat, tmod = tensored
    f = M.field
    n = eta.arity
    out = HochCochain(tcat, tmod, n)
    if n == 0:
        for (A, P) in tcat.objects:
            val = {}
            for m, c in eta.value(A).items():
                val[(m, bcat.unit_of(P))] = c
            out.set_value((A, P), val)
        return out
    bnames = [g for g in bcat.all_names()]
    by_tgt = {}
    for g in bnames:
        by_tgt.setdefault(bcat.tgt(g), []).append(g)
    for key, mval in eta.vals.items():
        # all b-chains (g_1,...,g_n), with units allowed in slots; the
        # tensor morphism x_i⊗g_i is only an identity if both parts are,
        # and x_i never is
        chains = [(g,) for g in bnames]
        for _ in range(n - 1):
            chains = [ch + (g,) for ch in chains for g in by_tgt.get(bcat.src(ch[-1]), ())]
        for ch in chains:
            prod = {ch[0]: f.one}
            for g in ch[1:]:
                prod = bcat.compose(prod, {g: f.one})
                if not prod:
                    break
            if not prod:
                continue
            tkey = tuple((x, g) for x, g in zip(key, ch))
            val = {}
            for m, cm in mval.items():
                for gprod, cg in prod.items():
                    val[(m, gprod)] = f.mul(cm, cg)
            prev = out.value(tkey)
            for kk, vv in val.items():
                prev = vec_addmul(f, prev, f.one, {kk: vv})
            out.set_value(tkey, prev)
    return out


# ---------------------------------------------------------------------------
# the full (non-normalized) complex, used to verify at desk scale that
# the normalized inclusion is a quasi-isomorphism

def full_composable_tuples(cat, n):
    if n == 0:
        return list(cat.objects)
    names = cat.all_names()
    by_tgt = {}
    for m in names:
        by_tgt.setdefault(cat.tgt(m), []).append(m)
    chains = [(m,) for m in names]
    for _ in range(n - 1):
        chains = [ch + (m,) for ch in chains for m in by_tgt.get(cat.src(ch[-1]), ())]
    return chains


def full_cochain_space(cat, bimod, n):
    basis = []
    if n == 0:
        for A in cat.objects:
            for m, d in bimod.space(A, A).basis:
                basis.append(((A, m), d))
        return GradedSpace(basis)
    for key in full_composable_tuples(cat, n):
        A_n, A_0 = cat.src(key[-1]), cat.tgt(key[0])
        for m, d in bimod.space(A_n, A_0).basis:
            basis.append(((key, m), d))
    return GradedSpace(basis)


def d_full_map(cat, bimod, n, dom=None, cod=None):
    """Alternating-sum differential on the full complex (identity slots
    allowed everywhere)."""
    _check_degree_zero(cat)
    dom = dom if dom is not None else full_cochain_space(cat, bimod, n)
    cod = cod if cod is not None else full_cochain_space(cat, bimod, n + 1)
    f = bimod.field
    mp = SparseMap(f, dom, cod, 0)
    minus_one = f.neg(f.one)
    if n == 0:
        for (A, m), _ in dom.basis:
            for g in cat.all_names():
                if cat.src(g) == A:
                    for r, c in bimod.lact_basis(g, m).items():
                        mp.add_entry(((g,), r), (A, m), c)
                if cat.tgt(g) == A:
                    for r, c in bimod.ract_basis(m, g).items():
                        mp.add_entry(((g,), r), (A, m), f.neg(c))
        return mp
    for key in full_composable_tuples(cat, n + 1):
        # column-wise would need a reverse index; build row contributions
        # per output tuple instead: dφ(key) in terms of φ's inputs
        rest = key[1:]
        A_hi = cat.src(key[-1])
        A_lo = cat.tgt(key[1])
        for m, _ in bimod.space(A_hi, A_lo).basis:
            for r, c in bimod.lact_basis(key[0], m).items():
                mp.add_entry((key, r), ((rest, m)), c)
        sign = f.one
        for i in range(1, n + 1):
            sign = f.neg(sign)
            for h, c in cat.compose_basis(key[i - 1], key[i]).items():
                inner = key[: i - 1] + (h,) + key[i + 1:]
                Ah, Al = cat.src(inner[-1]), cat.tgt(inner[0])
                for m, _ in bimod.space(Ah, Al).basis:
                    mp.add_entry((key, m), (inner, m), f.mul(sign, c))
        front = key[:-1]
        A_hi2 = cat.src(key[-2]) if n >= 1 else cat.tgt(key[0])
        A_lo2 = cat.tgt(key[0])
        last_sign = f.one if (n + 1) % 2 == 0 else minus_one
        for m, _ in bimod.space(A_hi2, A_lo2).basis:
            for r, c in bimod.ract_basis(m, key[-1]).items():
                mp.add_entry((key, r), (front, m), f.mul(last_sign, c))
    return mp


def hh_full(cat, bimod, n):
    """Cohomology of the full (non-normalized) complex; dimensions only."""
    sp = full_cochain_space(cat, bimod, n)
    d_out = d_full_map(cat, bimod, n, dom=sp)
    d_in = d_full_map(cat, bimod, n - 1, cod=sp) if n >= 1 else None
    coh = cohomology_of_space(bimod.field, sp, d_in, d_out)
    return coh.dim


# ---------------------------------------------------------------------------
# random cochains for property tests

def random_cochain(rng, cat, bimod, n, degree=None):
    """Random normalized cochain (uniform small coefficients)."""
    f = bimod.field
    phi = HochCochain(cat, bimod, n)
    for key in composable_tuples(cat, n):
        if n == 0:
            names = bimod.space(key, key).names()
        else:
            names = bimod.space(cat.src(key[-1]), cat.tgt(key[0])).names()
        vec = {}
        for m in names:
            if degree is not None and bimod.deg(m) != degree:
                continue
            c = rng.randrange(-3, 4)
            if c:
                vec[m] = f.of(c)
        phi.set_value(key, vec)
    return phi


def random_cocycle(rng, cat, bimod, n, degree=None):
    """Random element of ker(d) in arity n, or None if the kernel is 0."""
    f = bimod.field
    sp = cochain_space(cat, bimod, n)
    dmap = d_hoch_map(cat, bimod, n, dom=sp)
    kern = LinearSolver(dmap).kernel()
    if degree is not None:
        kern = [v for v in kern if all(sp.degree(k) == degree for k in v)]
    if not kern:
        return None
    vec = {}
    for v in kern:
        c = rng.randrange(-2, 3)
        if c:
            vec = vec_addmul(f, vec, f.of(c), v)
    if not vec:
        vec = dict(kern[rng.randrange(len(kern))])
    return vec_to_cochain(cat, bimod, n, vec)


def random_noncocycle(rng, cat, bimod, n, tries=50):
    """Random cochain with d != 0 (verified); None if d_n is zero."""
    for _ in range(tries):
        phi = random_cochain(rng, cat, bimod, n)
        if not d_hoch(phi).is_zero():
            return phi
    return None
