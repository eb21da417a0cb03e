"""Ready-made categories, bimodules and modules used across the test
suite and the CLI examples: truncated polynomial algebras, the
upper-triangular 2x2 algebra, and randomized path-algebra categories
with monomial relations (associative by construction).
"""

from .category import GradedLinCat, ModuleOverCat

__all__ = [
    "dual_numbers",
    "truncated_poly",
    "upper_triangular",
    "simple_module_at",
    "random_monomial_category",
]


def dual_numbers(field):
    return truncated_poly(field, 2)


def truncated_poly(field, m, name=None):
    """k[x]/(x^m) as a one-object category; basis one, x, x2, ..."""
    if m < 2:
        raise ValueError("need m >= 2")
    c = GradedLinCat(field, name or ("k[x]/(x^%d)" % m))
    c.add_object("*")
    names = ["one"] + ["x" if i == 1 else "x%d" % i for i in range(1, m)]
    for nm in names:
        c.add_morphism("*", "*", nm, 0)
    c.set_unit("*", "one")
    for i in range(1, m):
        for j in range(1, m):
            tot = i + j
            vec = {names[tot]: field.one} if tot < m else {}
            c.set_compose(names[i], names[j], vec)
    return c


def upper_triangular(field):
    """The 3-dimensional algebra of upper-triangular 2x2 matrices as a
    one-object category; basis: the identity, the idempotent e = E_11,
    and the radical element a = E_12 (so ea = a, ae = 0, e^2 = e)."""
    c = GradedLinCat(field, "upper2")
    c.add_object("*")
    for nm in ("one", "e", "a"):
        c.add_morphism("*", "*", nm, 0)
    c.set_unit("*", "one")
    c.set_compose("e", "e", {"e": field.one})
    c.set_compose("e", "a", {"a": field.one})
    c.set_compose("a", "e", {})
    c.set_compose("a", "a", {})
    return c


def simple_module_at(cat, obj, name="k"):
    """One-dimensional module: the unit acts as 1 (implied), every
    non-identity morphism acts as 0.  For local algebras like k[x]/(x^m)
    this is the simple module k."""
    U = ModuleOverCat(cat, name)
    U.add_element(obj, (name, obj))
    for f in cat.nonunit_names():
        if cat.src(f) == obj and cat.tgt(f) == obj:
            U.set_act(f, (name, obj), {})
    return U


def random_monomial_category(field, rng, max_objects=3, max_arrows=4,
                             path_cap=3, kill_prob=0.35):
    """Path algebra of a random quiver modulo monomial relations.

    Surviving paths of length <= path_cap form the basis; a path of
    length >= 2 survives only if it is not explicitly killed and both of
    its maximal proper subpaths survive, which makes the killed set an
    ideal and the category associative by construction.  Morphism names
    are ("p", i1, ..., ik): the arrow indices along the path.
    """
    nv = rng.randrange(1, max_objects + 1)
    vertices = list(range(nv))
    na = rng.randrange(1, max_arrows + 1)
    arrows = []  # (index, src, tgt)
    for i in range(na):
        s = rng.choice(vertices)
        t = rng.choice(vertices)
        arrows.append((i, s, t))
    # paths as tuples of arrow indices, built by increasing length
    surviving = {}  # path tuple -> (src, tgt)
    for i, s, t in arrows:
        surviving[(i,)] = (s, t)
    by_len = {1: list(surviving)}
    for ln in range(2, path_cap + 1):
        by_len[ln] = []
        for p in by_len[ln - 1]:
            ps, pt = surviving[p]
            for i, s, t in arrows:
                if s != pt:
                    continue
                q = p + (i,)
                if q[1:] not in surviving:
                    continue
                if rng.random() < kill_prob:
                    continue
                surviving[q] = (ps, t)
                by_len[ln].append(q)
    c = GradedLinCat(field, "quiver")
    for v in vertices:
        c.add_object(v)
    for v in vertices:
        c.add_morphism(v, v, ("e", v), 0)
        c.set_unit(v, ("e", v))
    for p, (s, t) in surviving.items():
        # arrows compose like functions: the path s->t, read left to
        # right along the walk, is a morphism s -> t
        c.add_morphism(s, t, ("p",) + p, 0)
    for p, (ps, pt) in surviving.items():
        for q, (qs, qt) in surviving.items():
            # ("p",)+p after ("p",)+q: q then p, so q's target feeds p
            if qt != ps:
                continue
            comp = q + p
            if comp in surviving:
                c.set_compose(("p",) + p, ("p",) + q, {("p",) + comp: field.one})
            else:
                c.set_compose(("p",) + p, ("p",) + q, {})
    return c
