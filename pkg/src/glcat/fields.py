"""Exact ground fields: arbitrary-precision rationals and prime fields F_p.

Scalars are plain Python values (Fraction for the rationals, int in
range(p) for F_p); the field object owns the arithmetic.  Nothing here
ever touches floating point.
"""

from fractions import Fraction

__all__ = ["RationalField", "PrimeField", "QQ", "field_from_spec"]


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class RationalField:
    """The field of rational numbers, elements are Fraction values."""

    __slots__ = ()

    name = "QQ"
    characteristic = 0

    def of(self, v):
        """Coerce an int, Fraction or 'a/b' string into the field."""
        if isinstance(v, Fraction):
            return v
        if isinstance(v, str):
            return Fraction(v)
        if isinstance(v, int):
            return Fraction(v)
        raise TypeError("not an exact rational: %r" % (v,))

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return a == 0

    def to_str(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "RationalField()"


class PrimeField:
    """F_p for a prime p; elements are ints reduced into range(p)."""

    __slots__ = ("p", "name")

    characteristic_property = None

    def __init__(self, p):
        if not _is_prime(p):
            raise ValueError("modulus %r is not prime" % (p,))
        self.p = p
        self.name = "F%d" % p

    @property
    def characteristic(self):
        return self.p

    def of(self, v):
        if isinstance(v, int):
            return v % self.p
        if isinstance(v, str):
            if "/" in v:
                num, den = v.split("/", 1)
                return self.div(self.of(int(num)), self.of(int(den)))
            return int(v) % self.p
        if isinstance(v, Fraction):
            # Guard: p must not divide the denominator.
            return self.div(v.numerator % self.p, v.denominator % self.p)
        raise TypeError("cannot coerce %r into F_%d" % (v, self.p))

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.p)
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def to_str(self, a):
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return "PrimeField(%d)" % self.p


QQ = RationalField()


def field_from_spec(spec):
    """Build a field from a short text spec: 'rational'/'QQ' or 'prime 7'/'F7'."""
    s = spec.strip()
    if s in ("rational", "rationals", "QQ", "Q"):
        return QQ
    if s.startswith("prime"):
        return PrimeField(int(s.split()[1]))
    if s.startswith("F") and s[1:].isdigit():
        return PrimeField(int(s[1:]))
    raise ValueError("unknown field spec %r" % (spec,))
