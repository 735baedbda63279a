"""Exact arithmetic in F_{p^k} for primes p >= 5.

Elements are coefficient vectors over a fixed polynomial basis modulo the
lexicographically smallest monic irreducible polynomial of degree k, so the
representation is canonical and every operation is exact. Characteristics 2
and 3 are rejected at construction: the rest of the package divides by 2, 3
and 6 freely.
"""

from __future__ import annotations

import itertools

from .errors import (
    BadParams,
    CharDividesSix,
    DivisionByZero,
    FieldTooLarge,
    MixedFields,
    NotPrime,
)

DEFAULT_MAX_ORDER = 10_000


def _is_prime(m):
    if not isinstance(m, int) or m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_rem(a, b, p):
    """Remainder of a modulo monic b, coefficients ascending."""
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    while da >= db and any(a):
        while da >= 0 and a[da] == 0:
            da -= 1
        if da < db:
            break
        lead = a[da]
        shift = da - db
        for i, bi in enumerate(b):
            a[i + shift] = (a[i + shift] - lead * bi) % p
    return a[:db] if db > 0 else []


class FieldElem:
    """One element of a Field, as a tuple of k residues (ascending degree)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        coeffs = tuple(c % field.p for c in coeffs)
        if len(coeffs) != field.k:
            raise BadParams("coefficient vector has wrong length")
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, int):
            return self.field.embed(other)
        if isinstance(other, FieldElem):
            if other.field is not self.field and other.field.spec() != self.field.spec():
                raise MixedFields(f"{self.field} vs {other.field}")
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElem(self.field, tuple((x + y) % p for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElem(self.field, tuple((x - y) % p for x, y in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        p = self.field.p
        return FieldElem(self.field, tuple(-x % p for x in self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.field._mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        acc = self.field.one
        base = self
        e = exponent
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def inverse(self):
        if not self:
            raise DivisionByZero("inverse of zero")
        # a^(q-2), exact since the multiplicative group has order q-1
        return self ** (self.field.order - 2)

    def frobenius(self, m):
        """a -> a^(p^m); every field automorphism is one of these."""
        if m < 0:
            raise BadParams("frobenius power must be nonnegative")
        m %= self.field.k
        return self ** (self.field.p ** m)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        if self.field.k == 1:
            return str(self.coeffs[0])
        return str(list(self.coeffs))

    def to_json(self):
        return list(self.coeffs)


class Field:
    """F_{p^k} with the lexicographically smallest monic irreducible modulus.

    "Lexicographically smallest" orders monic degree-k candidates by their
    coefficient tuple from degree k-1 down to the constant term. For k = 1
    the modulus is x itself.
    """

    def __init__(self, p, k=1, max_order=DEFAULT_MAX_ORDER):
        if not _is_prime(p):
            raise NotPrime(f"p = {p} is not prime")
        if p in (2, 3):
            raise CharDividesSix(f"characteristic {p} divides 6")
        if not isinstance(k, int) or k < 1:
            raise BadParams(f"extension degree k = {k} must be a positive integer")
        if p ** k > max_order:
            raise FieldTooLarge(f"p^k = {p ** k} exceeds bound {max_order}")
        self.p = p
        self.k = k
        self.order = p ** k
        self.modulus = self._find_modulus()
        self._red = self._reduction_rows()
        self.zero = FieldElem(self, (0,) * k)
        self.one = self.embed(1)
        self._elements = None
        # 6F = F must hold by construction; cheap sanity check
        assert self.embed(6) != self.zero

    def spec(self):
        return (self.p, self.k, self.modulus)

    def _find_modulus(self):
        if self.k == 1:
            return (0, 1)
        p, k = self.p, self.k
        for top in itertools.product(range(p), repeat=k):
            # top is (c_{k-1}, ..., c_0) in lex order
            cand = [top[k - 1 - i] for i in range(k)] + [1]
            if self._irreducible(cand):
                return tuple(cand)
        raise AssertionError("no irreducible polynomial found")  # unreachable

    def _irreducible(self, poly):
        # trial division by every monic polynomial of degree <= k/2
        p = self.p
        k = len(poly) - 1
        for d in range(1, k // 2 + 1):
            for low in itertools.product(range(p), repeat=d):
                g = list(low) + [1]
                if not any(_poly_rem(poly, g, p)):
                    return False
        return True

    def _reduction_rows(self):
        # x^j mod modulus for j in [k, 2k-2], used by _mul
        p, k = self.p, self.k
        rows = {}
        cur = [(-c) % p for c in self.modulus[:k]]  # x^k
        rows[k] = list(cur)
        for j in range(k + 1, 2 * k - 1):
            shifted = [0] + cur[: k - 1]
            lead = cur[k - 1]
            if lead:
                for i in range(k):
                    shifted[i] = (shifted[i] + lead * rows[k][i]) % p
            cur = shifted
            rows[j] = list(cur)
        return rows

    def _mul(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return FieldElem(self, (a.coeffs[0] * b.coeffs[0] % p,))
        prod = _poly_mul(a.coeffs, b.coeffs, p)
        out = list(prod[:k]) + [0] * (k - len(prod[:k]))
        for j in range(k, len(prod)):
            cj = prod[j]
            if cj:
                row = self._red[j]
                for i in range(k):
                    out[i] = (out[i] + cj * row[i]) % p
        return FieldElem(self, out)

    def embed(self, c):
        """The image of the integer c under Z -> F."""
        return FieldElem(self, (c % self.p,) + (0,) * (self.k - 1))

    def from_index(self, i):
        """Element number i in [0, order): base-p digits, ascending degree."""
        if not 0 <= i < self.order:
            raise BadParams(f"index {i} out of range")
        digits = []
        for _ in range(self.k):
            digits.append(i % self.p)
            i //= self.p
        return FieldElem(self, digits)

    def index_of(self, a):
        i = 0
        for c in reversed(a.coeffs):
            i = i * self.p + c
        return i

    def elements(self):
        if self._elements is None:
            self._elements = [self.from_index(i) for i in range(self.order)]
        return self._elements

    def sample(self, rng):
        return self.from_index(rng.randrange(self.order))

    def sample_nonzero(self, rng):
        return self.from_index(rng.randrange(1, self.order))

    def elem_from_json(self, data):
        if isinstance(data, int):
            data = [data]
        if len(data) != self.k:
            raise BadParams("serialized element has wrong length")
        return FieldElem(self, data)

    def spec_json(self):
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())

    def __repr__(self):
        return f"F_{self.order}" if self.k > 1 else f"F_{self.p}"


def field_new(p, k=1, max_order=DEFAULT_MAX_ORDER):
    """Construct F_{p^k} with the canonical modulus."""
    return Field(p, k, max_order)


def arith(a, b, op):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise BadParams(f"unknown op {op!r}")


def inv(a):
    return a.inverse()


def frobenius(a, m):
    return a.frobenius(m)
