"""Matrix realization of Up(2n, F): generators, products, inverses, normal
form, filtration levels, and membership predicates.

A group element is a 2n x 2n unitriangular matrix, symplectic for the fixed
Gram matrix J (signed antidiagonal: +1 in the top half, -1 in the bottom).
Entries live in F_{p^k} and are stored as numpy int64 arrays of shape
(2n, 2n, k), one residue plane per basis coefficient. Products are integer
matmuls followed by exact modular reduction; generator products are row and
column updates. No floats anywhere.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    BadIndices,
    DimensionMismatch,
    NotInGroup,
    ZeroTorusEntry,
)
from .field import FieldElem
from .roots import root_system


class UpMatrix:
    """One element of Up(2n, F). Immutable after construction."""

    __slots__ = ("group", "arr")

    def __init__(self, group, arr):
        arr.setflags(write=False)
        self.group = group
        self.arr = arr

    def entry(self, r, c):
        return FieldElem(self.group.field, tuple(int(v) for v in self.arr[r, c]))

    def __mul__(self, other):
        return self.group.multiply(self, other)

    def inv(self):
        return self.group.invert(self)

    def __eq__(self, other):
        return (
            isinstance(other, UpMatrix)
            and self.group.compatible(other.group)
            and np.array_equal(self.arr, other.arr)
        )

    def __hash__(self):
        return hash(self.arr.tobytes())

    def is_one(self):
        return np.array_equal(self.arr, self.group._id)

    def __repr__(self):
        if self.group.field.k == 1:
            rows = [" ".join(str(int(v)) for v in row[:, 0]) for row in self.arr]
        else:
            rows = [" ".join(str(list(map(int, v))) for v in row) for row in self.arr]
        return "\n".join(rows)

    def to_json(self):
        return [[[int(v) for v in self.arr[r, c]] for c in range(self.group.d)]
                for r in range(self.group.d)]


class RootWord:
    """An ordered product prod x_alpha(xi) of root generators."""

    __slots__ = ("group", "terms")

    def __init__(self, group, terms):
        self.group = group
        self.terms = tuple((r, c) for r, c in terms)

    def is_canonical(self):
        if any(not c for _, c in self.terms):
            return False
        keys = [(r.height, r.pos) for r, _ in self.terms]
        return keys == sorted(keys) and len(set(keys)) == len(keys)

    def coeff(self, root):
        for r, c in self.terms:
            if r == root:
                return c
        return self.group.field.zero

    def support(self):
        return frozenset(r for r, _ in self.terms)

    def matrix(self):
        return self.group.word_to_matrix(self)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return " * ".join(f"x_{r}({c!r})" for r, c in self.terms) or "e"

    def to_json(self):
        return [{"root": r.to_json(), "coeff": c.to_json()} for r, c in self.terms]


class DiagonalTorus:
    """diag(t_1..t_n, t_n^-1..t_1^-1); conjugation scales root coefficients."""

    __slots__ = ("group", "t", "diag")

    def __init__(self, group, t):
        if len(t) != group.n:
            raise DimensionMismatch(f"torus vector needs {group.n} entries")
        if any(not ti for ti in t):
            raise ZeroTorusEntry("torus entries must be invertible")
        self.group = group
        self.t = tuple(t)
        self.diag = tuple(list(t) + [ti.inverse() for ti in reversed(t)])

    def matrix_arr(self):
        g = self.group
        arr = np.zeros((g.d, g.d, g.field.k), dtype=np.int64)
        for r in range(g.d):
            arr[r, r, :] = self.diag[r].coeffs
        return arr

    def conjugate(self, a):
        """t a t^-1: entry (r, c) scales by diag_r * diag_c^-1."""
        g = self.group
        arr = a.arr.copy()
        for r in range(g.d):
            arr[r] = arr[r] @ g.mul_mat(self.diag[r]).T
        arr %= g.field.p
        for c in range(g.d):
            arr[:, c] = arr[:, c] @ g.mul_mat(self.diag[c].inverse()).T
        arr %= g.field.p
        return UpMatrix(g, arr)


class Group:
    """Up(2n, F) for a fixed rank n >= 2 and field F."""

    def __init__(self, n, field):
        self.rs = root_system(n)
        self.n = n
        self.d = 2 * n
        self.field = field
        self._id = np.zeros((self.d, self.d, field.k), dtype=np.int64)
        for r in range(self.d):
            self._id[r, r, 0] = 1
        self._id.setflags(write=False)
        J = np.zeros((self.d, self.d, field.k), dtype=np.int64)
        for r in range(self.d):
            J[r, self.d - 1 - r, 0] = 1 if r < n else field.p - 1
        self._J = J
        self._mul_mats = {}
        self._constants = None

    def compatible(self, other):
        return other is self or (other.n == self.n and other.field.spec() == self.field.spec())

    # field-scalar machinery

    def mul_mat(self, xi):
        """Matrix R with (xi * a).coeffs = R @ a.coeffs, cached per scalar."""
        key = xi.coeffs
        R = self._mul_mats.get(key)
        if R is None:
            k = self.field.k
            R = np.zeros((k, k), dtype=np.int64)
            for j in range(k):
                basis = self.field.from_index(self.field.p ** j)
                R[:, j] = (xi * basis).coeffs
            R.setflags(write=False)
            self._mul_mats[key] = R
        return R

    def _reduce(self, acc):
        """Fold coefficient planes k..2k-2 back through the modulus."""
        k = self.field.k
        out = acc[..., :k].copy()
        for t in range(k, acc.shape[-1]):
            row = self.field._red[t]
            plane = acc[..., t]
            for i in range(k):
                if row[i]:
                    out[..., i] += row[i] * plane
        out %= self.field.p
        return out

    def _matmul(self, A, B):
        p, k = self.field.p, self.field.k
        if k == 1:
            return (A[:, :, 0] @ B[:, :, 0] % p)[:, :, None]
        acc = np.zeros((self.d, self.d, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                acc[:, :, i + j] += A[:, :, i] @ B[:, :, j]
        acc %= p
        return self._reduce(acc)

    def _vecmat(self, v, M):
        """(sum_t v[t] * M[t]) for a field row v: (m, k) and block M: (m, d, k)."""
        p, k = self.field.p, self.field.k
        if k == 1:
            return (v[:, 0] @ M[:, :, 0] % p)[:, None]
        acc = np.zeros((M.shape[1], 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                acc[:, i + j] += v[:, i] @ M[:, :, j]
        acc %= p
        return self._reduce(acc)

    # construction

    def one(self):
        return UpMatrix(self, self._id.copy())

    def elem(self, root, xi):
        """The elementary root unipotent x_root(xi)."""
        if root.n != self.n:
            raise DimensionMismatch("root of wrong rank")
        p = self.field.p
        arr = self._id.copy()
        r, c = root.pos0
        arr[r, c, :] = xi.coeffs
        if not root.is_long:
            mr, mc = root.mirror0
            sign = root.mirror_sign
            arr[mr, mc, :] = [(sign * v) % p for v in xi.coeffs]
        return UpMatrix(self, arr)

    def torus(self, t):
        return DiagonalTorus(self, t)

    # group operations

    def multiply(self, a, b):
        if not (a.group.compatible(self) and b.group.compatible(self)):
            raise DimensionMismatch("operands from different groups")
        return UpMatrix(self, self._matmul(a.arr, b.arr))

    def invert(self, a):
        """Unitriangular inverse by row back-substitution."""
        p = self.field.p
        A = a.arr
        X = np.zeros_like(A)
        X[self.d - 1, self.d - 1, 0] = 1
        for r in range(self.d - 2, -1, -1):
            row = (-self._vecmat(A[r, r + 1:], X[r + 1:])) % p
            row[r, 0] = (row[r, 0] + 1) % p
            X[r] = row
        return UpMatrix(self, X)

    def commutator(self, a, b):
        """[a, b] = a b a^-1 b^-1, computed as (ab)(ba)^-1."""
        ab = self.multiply(a, b)
        ba = self.multiply(b, a)
        return self.multiply(ab, self.invert(ba))

    def conjugate(self, c, a):
        """c a c^-1."""
        return self.multiply(self.multiply(c, a), self.invert(c))

    # generator row/column updates (exact, in place on a writable array)

    def _lmul_gen(self, arr, root, xi):
        """arr <- x_root(xi) @ arr."""
        p = self.field.p
        R = self.mul_mat(xi)
        r, c = root.pos0
        arr[r] = (arr[r] + arr[c] @ R.T) % p
        if not root.is_long:
            mr, mc = root.mirror0
            upd = arr[mc] @ R.T
            arr[mr] = (arr[mr] + root.mirror_sign * upd) % p

    def _rmul_gen(self, arr, root, xi):
        """arr <- arr @ x_root(xi)."""
        p = self.field.p
        R = self.mul_mat(xi)
        r, c = root.pos0
        arr[:, c] = (arr[:, c] + arr[:, r] @ R.T) % p
        if not root.is_long:
            mr, mc = root.mirror0
            upd = arr[:, mr] @ R.T
            arr[:, mc] = (arr[:, mc] + root.mirror_sign * upd) % p

    # validation

    def is_unitriangular(self, arr):
        for r in range(self.d):
            if arr[r, r, 0] != 1 or arr[r, r, 1:].any():
                return False
            if arr[r, :r].any():
                return False
        return True

    def is_symplectic(self, arr):
        At = np.ascontiguousarray(arr.transpose(1, 0, 2))
        return np.array_equal(self._matmul(self._matmul(At, self._J), arr), self._J)

    def validate(self, a):
        if not self.is_unitriangular(a.arr):
            raise NotInGroup("matrix is not unitriangular")
        if not self.is_symplectic(a.arr):
            raise NotInGroup("matrix is not symplectic")

    # normal form and filtration

    def normal_form(self, a, validate=True):
        """Canonical word with word_to_matrix(result) = a, by height peeling."""
        if validate:
            self.validate(a)
        arr = a.arr.copy()
        terms = []
        for h in range(1, self.d):
            found = []
            for root in self.rs.of_height.get(h, ()):
                r, c = root.pos0
                v = arr[r, c]
                if v.any():
                    found.append((root, FieldElem(self.field, tuple(int(x) for x in v))))
            for root, xi in found:
                self._lmul_gen(arr, root, -xi)
            # the peel must clear the full diagonal, mirrors included
            assert not arr.diagonal(h, 0, 1).any(), f"peel failed at height {h}"
            terms.extend(found)
        assert np.array_equal(arr, self._id)
        return RootWord(self, terms)

    def word_to_matrix(self, word):
        arr = self._id.copy()
        for root, xi in word:
            if root.n != self.n:
                raise DimensionMismatch("root of wrong rank in word")
            self._rmul_gen(arr, root, xi)
        return UpMatrix(self, arr)

    def product_of_gens(self, factors):
        """Product of generators via column updates; cheaper than matmuls."""
        arr = self._id.copy()
        for root, xi in factors:
            self._rmul_gen(arr, root, xi)
        return UpMatrix(self, arr)

    def commutator_of_gens(self, a, xi, b, zeta):
        """[x_a(xi), x_b(zeta)] as an 8-column-update product."""
        return self.product_of_gens([(a, xi), (b, zeta), (a, -xi), (b, -zeta)])

    def filtration_level(self, a):
        """Smallest diagonal carrying a nonzero entry; 2n for the identity."""
        for h in range(1, self.d):
            if a.arr.diagonal(h, 0, 1).any():
                return h
        return self.d

    def in_filtration(self, a, s):
        return self.filtration_level(a) >= s

    def in_P_i_k(self, a, i, k):
        """Level >= i and no height-i coefficient at roots with m_t > 0, t < k."""
        if not (1 <= i <= self.d - 1):
            raise BadIndices(f"height {i} out of range")
        if k < 1:
            raise BadIndices(f"index {k} must be >= 1")
        for h in range(1, i):
            if a.arr.diagonal(h, 0, 1).any():
                return False
        # diagonals below i vanish, so height-i entries are normal-form coefficients
        for root in self.rs.of_height.get(i, ()):
            if any(root.m[t] > 0 for t in range(min(k - 1, self.n))):
                r, c = root.pos0
                if a.arr[r, c].any():
                    return False
        return True

    def in_U1(self, a):
        """Support only on the first row and last column above the diagonal."""
        for r in range(1, self.d):
            if a.arr[r, r + 1:self.d - 1].any():
                return False
        return True

    def in_U1_level2(self, a):
        return self.in_U1(a) and self.filtration_level(a) >= 2

    # randomness: uniform via normal-form coordinates

    def random_element(self, rng, min_height=1, support=None):
        roots = support if support is not None else self.rs.roots
        terms = []
        for root in roots:
            if root.height < min_height:
                continue
            xi = self.field.sample(rng)
            if xi:
                terms.append((root, xi))
        return self.word_to_matrix(terms)

    def random_u1(self, rng, min_height=1):
        sup = [r for r in self.rs.roots if r.m[0] >= 1]
        return self.random_element(rng, min_height=min_height, support=sup)

    # measured commutator constants for this rank (field cross-checked)

    @property
    def constants(self):
        if self._constants is None:
            from .roots import compute_structure_constants

            self._constants = compute_structure_constants(self.n, self.field)
        return self._constants

    def matrix_from_json(self, data):
        arr = np.zeros((self.d, self.d, self.field.k), dtype=np.int64)
        if len(data) != self.d:
            raise DimensionMismatch("serialized matrix has wrong size")
        for r in range(self.d):
            if len(data[r]) != self.d:
                raise DimensionMismatch("serialized matrix has wrong size")
            for c in range(self.d):
                v = data[r][c]
                if isinstance(v, int):
                    v = [v]
                arr[r, c, :] = [x % self.field.p for x in v]
        m = UpMatrix(self, arr)
        self.validate(m)
        return m

    def word_from_json(self, data):
        terms = []
        for item in data:
            root = self.rs.root(item["root"]["i"], item["root"]["j"])
            terms.append((root, self.field.elem_from_json(item["coeff"])))
        return RootWord(self, terms)

    def __repr__(self):
        return f"Up({self.d}, {self.field!r})"


_GROUPS = {}


def group(n, field):
    key = (n, field.spec())
    if key not in _GROUPS:
        _GROUPS[key] = Group(n, field)
    return _GROUPS[key]


# spec-level conveniences: context resolved from the arguments

def elem_unipotent(root, xi):
    return group(root.n, xi.field).elem(root, xi)


def multiply(a, b):
    return a.group.multiply(a, b)


def invert_unitriangular(a):
    return a.group.invert(a)


def commutator(a, b):
    return a.group.commutator(a, b)


def torus_elem(t):
    if not t:
        raise DimensionMismatch("empty torus vector")
    return group(len(t), t[0].field).torus(t)


def normal_form(a):
    return a.group.normal_form(a)


def word_to_matrix(w):
    return w.group.word_to_matrix(w)


def filtration_level(a):
    return a.group.filtration_level(a)


def in_P_i_k(a, i, k):
    return a.group.in_P_i_k(a, i, k)
