"""Sparse exact linear algebra over graded spaces.

Everything downstream (cohomology of complexes, cocycle solving,
obstruction systems) reduces to the three operations here: solve,
kernel_basis and cohomology.  All elimination is deterministic: pivots
are chosen in ascending declared basis order, so identical input yields
identical basis choices, which is what makes cohomology-class
coordinates reproducible across runs.

A vector over a GradedSpace is a plain dict {basis name: scalar} holding
only (ideally) nonzero entries.  A SparseMap stores its columns sparsely
and carries an integer degree shift; every entry must connect basis
elements whose degrees differ by exactly that shift.
"""

__all__ = [
    "GradedSpace",
    "SparseMap",
    "LinearSolver",
    "Reducer",
    "solve",
    "kernel_basis",
    "rank",
    "cohomology",
    "vec_add",
    "vec_sub",
    "vec_scale",
    "vec_addmul",
    "vec_is_zero",
    "vec_clean",
]


# ---------------------------------------------------------------------------
# vectors

def vec_clean(field, v):
    """Drop explicit zeros."""
    return {k: c for k, c in v.items() if not field.is_zero(c)}


def vec_add(field, u, v):
    out = dict(u)
    for k, c in v.items():
        s = field.add(out.get(k, field.zero), c)
        if field.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def vec_sub(field, u, v):
    out = dict(u)
    for k, c in v.items():
        s = field.sub(out.get(k, field.zero), c)
        if field.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def vec_scale(field, c, v):
    if field.is_zero(c):
        return {}
    return {k: field.mul(c, x) for k, x in v.items()}


def vec_addmul(field, u, c, v):
    """u + c*v, in place on a copy of u."""
    if field.is_zero(c):
        return dict(u)
    out = dict(u)
    for k, x in v.items():
        s = field.add(out.get(k, field.zero), field.mul(c, x))
        if field.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def vec_is_zero(field, v):
    return all(field.is_zero(c) for c in v.values())


# ---------------------------------------------------------------------------
# graded spaces

class GradedSpace:
    """A finite basis, each element carrying an integer degree.

    Basis names may be any hashable value (strings in documents, tuples
    for internally generated spaces).  Order of the basis list is the
    declared order used for deterministic pivoting.
    """

    __slots__ = ("basis", "_degree", "_index")

    def __init__(self, basis):
        # basis: iterable of (name, degree)
        self.basis = [(n, int(d)) for n, d in basis]
        self._degree = {}
        self._index = {}
        for i, (n, d) in enumerate(self.basis):
            if n in self._degree:
                raise ValueError("duplicate basis name %r" % (n,))
            self._degree[n] = d
            self._index[n] = i

    @property
    def dim(self):
        return len(self.basis)

    def names(self):
        return [n for n, _ in self.basis]

    def degree(self, name):
        return self._degree[name]

    def index(self, name):
        return self._index[name]

    def __contains__(self, name):
        return name in self._degree

    def degrees_present(self):
        return sorted(set(self._degree.values()))

    def names_in_degree(self, q):
        return [n for n, d in self.basis if d == q]

    def vector_degree(self, v):
        """Degree of a homogeneous vector, or None for 0; raises if mixed."""
        degs = {self._degree[k] for k in v}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("vector is not homogeneous: degrees %s" % degs)
        return degs.pop()

    def __repr__(self):
        return "GradedSpace(dim=%d)" % self.dim


class SparseMap:
    """A degree-homogeneous linear map stored by columns.

    cols[col_name] = {row_name: scalar}.  Every entry must satisfy
    deg(row) = deg(col) + self.degree.
    """

    __slots__ = ("field", "dom", "cod", "degree", "cols")

    def __init__(self, field, dom, cod, degree, cols=None):
        self.field = field
        self.dom = dom
        self.cod = cod
        self.degree = int(degree)
        self.cols = {}
        if cols:
            for c, col in cols.items():
                self.set_col(c, col)

    def set_col(self, col_name, col):
        col = vec_clean(self.field, col)
        if col:
            self.cols[col_name] = col
        else:
            self.cols.pop(col_name, None)

    def add_entry(self, row_name, col_name, value):
        col = self.cols.setdefault(col_name, {})
        s = self.field.add(col.get(row_name, self.field.zero), value)
        if self.field.is_zero(s):
            col.pop(row_name, None)
            if not col:
                del self.cols[col_name]
        else:
            col[row_name] = s

    def entry(self, row_name, col_name):
        return self.cols.get(col_name, {}).get(row_name, self.field.zero)

    def col(self, col_name):
        return dict(self.cols.get(col_name, {}))

    def validate_degrees(self):
        for c, col in self.cols.items():
            dc = self.dom.degree(c)
            for r in col:
                if self.cod.degree(r) != dc + self.degree:
                    raise ValueError(
                        "entry (%r, %r) violates degree shift %d" % (r, c, self.degree)
                    )

    def apply(self, v):
        f = self.field
        out = {}
        for c, x in v.items():
            col = self.cols.get(c)
            if not col or f.is_zero(x):
                continue
            for r, a in col.items():
                s = f.add(out.get(r, f.zero), f.mul(a, x))
                if f.is_zero(s):
                    out.pop(r, None)
                else:
                    out[r] = s
        return out

    def after(self, other):
        """self ∘ other."""
        assert other.cod is self.dom or other.cod.names() == self.dom.names()
        comp = SparseMap(self.field, other.dom, self.cod, self.degree + other.degree)
        for c in other.cols:
            comp.set_col(c, self.apply(other.col(c)))
        return comp

    def is_zero(self):
        return not self.cols

    def __repr__(self):
        return "SparseMap(%d -> %d, deg %d, nnz cols %d)" % (
            self.dom.dim,
            self.cod.dim,
            self.degree,
            len(self.cols),
        )


# ---------------------------------------------------------------------------
# elimination

class _Reducer:
    """Incremental elimination over an ordered row basis.

    Stores pivot vectors normalized to leading coefficient 1, each with a
    companion payload that is combined by the same row operations, so a
    companion can track preimages (for solving) or coordinates (for
    projections).  Pivot = nonzero entry of least basis index; stored
    vectors are kept reduced against all existing pivots, which makes
    every choice canonical given insertion order.
    """

    __slots__ = ("field", "order", "pivots")

    def __init__(self, field, space):
        self.field = field
        self.order = space._index
        self.pivots = {}  # row_name -> (vector, companion)

    def _leading(self, v):
        lead, best = None, None
        for k in v:
            i = self.order[k]
            if best is None or i < best:
                best, lead = i, k
        return lead

    def reduce(self, v, companion):
        """Eliminate all pivot rows from v; returns (remainder, companion).

        Stored pivots are fully reduced against each other, so clearing a
        pivot row never reintroduces another; one sweep suffices (the
        while guards the invariant anyway).
        """
        f = self.field
        # drop explicit zeros up front: a zero entry on a pivot row would
        # survive every sweep and stall the loop
        v = {k: c for k, c in v.items() if not f.is_zero(c)}
        companion = dict(companion)
        hits = [k for k in v if k in self.pivots]
        while hits:
            for k in hits:
                c = v.get(k)
                if c is None or f.is_zero(c):
                    continue
                pv, pc = self.pivots[k]
                v = vec_addmul(f, v, f.neg(c), pv)
                companion = vec_addmul(f, companion, f.neg(c), pc)
            hits = [k for k in v if k in self.pivots]
        return v, companion

    def insert(self, v, companion):
        """Reduce and, if nonzero, store as a new pivot.

        Returns (pivot_row or None, remainder, companion): None signals v
        was dependent on existing pivots.
        """
        f = self.field
        r, comp = self.reduce(v, companion)
        if not r:
            return None, r, comp
        lead = self._leading(r)
        c = r[lead]
        inv = f.inv(c)
        r = vec_scale(f, inv, r)
        comp = vec_scale(f, inv, comp)
        # Back-substitute into stored pivots so the system stays fully reduced.
        for k, (pv, pc) in list(self.pivots.items()):
            if lead in pv:
                coef = pv[lead]
                self.pivots[k] = (
                    vec_addmul(f, pv, f.neg(coef), r),
                    vec_addmul(f, pc, f.neg(coef), comp),
                )
        self.pivots[lead] = (r, comp)
        return lead, r, comp

    @property
    def rank(self):
        return len(self.pivots)


Reducer = _Reducer  # public name; consumers build custom echelon bases with it


class LinearSolver:
    """Reusable exact solver for A x = b with kernel tracking.

    Elimination happens once; each solve is a single reduction.  The
    particular solution is deterministic (free variables set to zero in
    ascending column order), and kernel vectors come out in echelon form
    over the domain basis.
    """

    __slots__ = ("A", "_red", "_kernel")

    def __init__(self, A):
        self.A = A
        f = A.field
        self._red = _Reducer(f, A.cod)
        self._kernel = []
        for c, _ in A.dom.basis:
            col = A.col(c)
            lead, rem, comp = self._red.insert(col, {c: f.one})
            if lead is None:
                # Pivot invariant: every stored (w, u) satisfies w = A u, so a
                # column reducing to zero leaves A(comp) = 0: comp is a kernel
                # vector, echelon over the domain by insertion order.
                self._kernel.append(vec_clean(f, comp))

    def solve(self, b):
        """Return x with A x = b, or None when inconsistent."""
        f = self.A.field
        rem, comp = self._red.reduce(dict(b), {})
        if rem:
            return None
        # rem = b - A(-comp)?  Track signs: reduce subtracts pivot columns,
        # each pivot (w, u) satisfies w = A u, so b - sum(c_i w_i) = rem and
        # the companion is -sum(c_i u_i); hence A(-comp) = b - rem = b.
        x = {k: f.neg(c) for k, c in comp.items()}
        return vec_clean(f, x)

    def kernel(self):
        return [dict(v) for v in self._kernel]

    @property
    def rank(self):
        return self._red.rank


def solve(A, b):
    """One-shot solve; result verified by substitution."""
    x = LinearSolver(A).solve(b)
    if x is None:
        return None
    f = A.field
    assert vec_is_zero(f, vec_sub(f, A.apply(x), vec_clean(f, b))), "solver broke"
    return x


def kernel_basis(A):
    return LinearSolver(A).kernel()


def rank(A):
    return LinearSolver(A).rank


class Cohomology:
    """ker(d_out)/im(d_in) with a fixed lift basis and projection.

    lifts[i] is a cocycle representing class i; project sends any cocycle
    to its coordinates in that basis (raising if the input is not a
    cocycle); project(lifts[i]) is the i-th unit vector.
    """

    __slots__ = ("field", "space", "dim", "lifts", "_proj", "_dout")

    def __init__(self, field, space, dim, lifts, proj, dout):
        self.field = field
        self.space = space
        self.dim = dim
        self.lifts = lifts
        self._proj = proj
        self._dout = dout

    def project(self, v):
        f = self.field
        if self._dout is not None and not vec_is_zero(f, self._dout.apply(v)):
            raise ValueError("not a cocycle")
        rem, comp = self._proj.reduce(dict(v), {})
        if rem:
            raise ValueError("cocycle failed to reduce against ker basis")
        coords = [f.zero] * self.dim
        for k, c in comp.items():
            if isinstance(k, tuple) and len(k) == 2 and k[0] == "#cls":
                coords[k[1]] = f.neg(c)
        return coords

    def class_of(self, v):
        return self.project(v)


def cohomology(d_in, d_out):
    """Middle cohomology of C_prev --d_in--> C --d_out--> C_next.

    Either map may be None (treated as zero).  Precondition d_out∘d_in = 0
    is verified.  Returns a Cohomology object.
    """
    if d_in is not None and d_out is not None:
        comp = d_out.after(d_in)
        if not comp.is_zero():
            raise ValueError("d_out ∘ d_in != 0; not a complex")
    if d_in is not None:
        field, space = d_in.field, d_in.cod
    elif d_out is not None:
        field, space = d_out.field, d_out.dom
    else:
        raise ValueError("need at least one differential (or use explicit space)")
    return _cohomology_of(field, space, d_in, d_out)


def cohomology_of_space(field, space, d_in, d_out, preferred=()):
    """Like cohomology() but usable when both differentials are zero.

    preferred: cocycles to try as the leading class representatives (used
    so structural elements like units become honest basis classes); any
    that are dependent modulo the image are skipped.
    """
    if d_in is not None and d_out is not None:
        comp = d_out.after(d_in)
        if not comp.is_zero():
            raise ValueError("d_out ∘ d_in != 0; not a complex")
    return _cohomology_of(field, space, d_in, d_out, preferred)


def _cohomology_of(field, space, d_in, d_out, preferred=()):
    # Kernel of d_out (everything if absent).
    if d_out is None:
        kernel = [{n: field.one} for n, _ in space.basis]
    else:
        kernel = LinearSolver(d_out).kernel()
    # Reduce image columns first, then preferred cocycles, then the kernel
    # sweep; survivors become the class lifts, in that order.
    red = _Reducer(field, space)
    proj = _Reducer(field, space)
    if d_in is not None:
        for c, _ in d_in.dom.basis:
            col = d_in.col(c)
            if col:
                red.insert(col, {})
                proj.insert(col, {})
    lifts = []
    for v in list(preferred) + kernel:
        v = vec_clean(field, v)
        if d_out is not None and not vec_is_zero(field, d_out.apply(v)):
            raise ValueError("preferred vector is not a cocycle")
        lead, _, _ = red.insert(v, {})
        if lead is not None:
            idx = len(lifts)
            lifts.append(dict(v))
            proj.insert(v, {("#cls", idx): field.one})
    return Cohomology(field, space, len(lifts), lifts, proj, d_out)
