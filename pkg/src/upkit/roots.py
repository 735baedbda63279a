"""Positive roots of type C_n and the measured structure-constant table.

A rank-n positive root is one of e_i - e_j (i < j <= n), e_i + e_j
(i < j <= n), or 2e_i. Names are pairs (i, j): j > 0 encodes e_i - e_j,
j = -t with t > i encodes e_i + e_t, and j = -i encodes the long root 2e_i.
Every root knows its simple-root coefficient vector, its height, and the
matrix entry that carries its coefficient.

Structure constants are not taken from a formula. They are measured from
matrix commutators over two prime fields and lifted to integers; a mismatch
between the two fields raises InconsistentLift.
"""

from __future__ import annotations

from .errors import BadIndices, DimensionMismatch, InconsistentLift, RankTooSmall


class Root:
    """One positive root of C_n."""

    __slots__ = ("n", "i", "j", "m", "height", "is_long", "pos")

    def __init__(self, n, i, j):
        if not (1 <= i <= n):
            raise BadIndices(f"row index {i} out of range for rank {n}")
        if j > 0:
            if not (i < j <= n):
                raise BadIndices(f"bad root name ({i}, {j})")
        else:
            if not (i <= -j <= n):
                raise BadIndices(f"bad root name ({i}, {j})")
        self.n = n
        self.i = i
        self.j = j
        m = [0] * n
        if j > 0:
            for t in range(i, j):
                m[t - 1] = 1
        else:
            t = -j
            for s in range(i, t):
                m[s - 1] = 1
            for s in range(t, n):
                m[s - 1] = 2
            m[n - 1] += 1
        self.m = tuple(m)
        self.height = sum(m)
        self.is_long = j == -i
        self.pos = (i, j) if j > 0 else (i, 2 * n + 1 - (-j))

    @property
    def name(self):
        return (self.i, self.j)

    @property
    def pos0(self):
        r, c = self.pos
        return (r - 1, c - 1)

    @property
    def mirror0(self):
        """Second matrix entry of a short root generator (0-based), or None."""
        if self.is_long:
            return None
        n2 = 2 * self.n
        if self.j > 0:
            return (n2 - self.j, n2 - self.i)
        return (-self.j - 1, n2 - self.i)

    @property
    def mirror_sign(self):
        # e_i - e_j carries -xi at the mirror entry, e_i + e_j carries +xi
        if self.is_long:
            return 0
        return -1 if self.j > 0 else 1

    def __eq__(self, other):
        return (
            isinstance(other, Root)
            and self.n == other.n
            and self.i == other.i
            and self.j == other.j
        )

    def __hash__(self):
        return hash((self.n, self.i, self.j))

    def __repr__(self):
        if self.is_long:
            return f"2e{self.i}"
        if self.j > 0:
            return f"e{self.i}-e{self.j}"
        return f"e{self.i}+e{-self.j}"

    def to_json(self):
        return {"i": self.i, "j": self.j}


class RootSystem:
    """All positive roots of a fixed rank, with lookup tables."""

    def __init__(self, n):
        if n < 2:
            raise RankTooSmall(f"rank {n} < 2")
        self.n = n
        roots = []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                roots.append(Root(n, i, j))
                roots.append(Root(n, i, -j))
            roots.append(Root(n, i, -i))
        roots.sort(key=lambda r: (r.height, r.pos))
        self.roots = tuple(roots)
        self.by_name = {r.name: r for r in roots}
        self.by_m = {r.m: r for r in roots}
        self.of_height = {}
        for r in roots:
            self.of_height.setdefault(r.height, []).append(r)
        # simple roots alpha_1 .. alpha_n
        self.simple = tuple(
            [self.by_name[(t, t + 1)] for t in range(1, n)] + [self.by_name[(n, -n)]]
        )
        self.alpha_max = self.by_name[(1, -1)]
        # owner of each strictly-upper matrix entry: (root, sign, is_mirror)
        self.entry_owner = {}
        for r in roots:
            self.entry_owner[r.pos0] = (r, 1, False)
            if not r.is_long:
                self.entry_owner[r.mirror0] = (r, r.mirror_sign, True)
        assert len(self.entry_owner) == n * (2 * n - 1)

    def root(self, i, j):
        key = (i, j)
        if key not in self.by_name:
            raise BadIndices(f"no root named {key} at rank {self.n}")
        return self.by_name[key]

    def sum(self, a, b):
        m = tuple(x + y for x, y in zip(a.m, b.m))
        return self.by_m.get(m)

    def sub(self, a, b):
        m = tuple(x - y for x, y in zip(a.m, b.m))
        if any(x < 0 for x in m):
            return None
        return self.by_m.get(m)

    def perp(self, a):
        """Roots b with a + b not a root; X_b then commutes with X_a."""
        return frozenset(b for b in self.roots if self.sum(a, b) is None)


_SYSTEMS = {}


def root_system(n):
    if n not in _SYSTEMS:
        _SYSTEMS[n] = RootSystem(n)
    return _SYSTEMS[n]


def positive_roots(n):
    """All n^2 positive roots in canonical (height, position) order."""
    return list(root_system(n).roots)


def root_sum(a, b):
    if a.n != b.n:
        raise DimensionMismatch("roots of different ranks")
    return root_system(a.n).sum(a, b)


def perp_roots(a):
    return root_system(a.n).perp(a)


class StructureConstantTable:
    """Measured integer constants of the commutator relations.

    N1[(a, b)] is the coefficient of x_{a+b}(N1 * xi * zeta) in
    [x_a(xi), x_b(zeta)] for every ordered pair with a + b a root.
    N2[(a, b)] is the quadratic-term coefficient when exactly one of the
    pair is long: the term is x_{a+2b}(N2 * xi * zeta^2) for long a, and
    x_{2a+b}(N2 * xi^2 * zeta) for long b.
    """

    def __init__(self, n, N1, N2):
        self.n = n
        self.N1 = N1
        self.N2 = N2

    def n1(self, a, b):
        return self.N1[(a.name, b.name)]

    def n2(self, a, b):
        return self.N2[(a.name, b.name)]

    def terms(self, a, b):
        """Expansion [x_a(xi), x_b(zeta)] = prod of x_root(c * xi^e1 * zeta^e2).

        Returns a list of (root, e1, e2, c) in ascending height order;
        empty when the generators commute.
        """
        key = (a.name, b.name)
        if key not in self.N1:
            return []
        rs = root_system(self.n)
        s = rs.sum(a, b)
        out = [(s, 1, 1, self.N1[key])]
        if key in self.N2:
            if a.is_long:
                out.append((rs.sum(s, b), 1, 2, self.N2[key]))
            else:
                out.append((rs.sum(s, a), 2, 1, self.N2[key]))
        out.sort(key=lambda t: t[0].height)
        return out

    def to_json(self):
        items = []
        for (an, bn), c in sorted(self.N1.items()):
            rec = {"alpha": {"i": an[0], "j": an[1]}, "beta": {"i": bn[0], "j": bn[1]}, "N1": c}
            if (an, bn) in self.N2:
                rec["N2"] = self.N2[(an, bn)]
            items.append(rec)
        return items


def _lift_constant(field, value, pair):
    """Integer of smallest absolute value congruent to a prime-subfield element."""
    if any(value.coeffs[1:]):
        raise InconsistentLift(f"constant at {pair} lies outside the prime subfield")
    v = value.coeffs[0]
    return v if v <= field.p // 2 else v - field.p


def _measure(n, field):
    from .group import group  # deferred: group builds on this module

    G = group(n, field)
    rs = G.rs
    one = field.one
    N1, N2 = {}, {}
    for a in rs.roots:
        for b in rs.roots:
            if a is b:
                continue
            s = rs.sum(a, b)
            if s is None:
                continue
            if a.is_long:
                quad = rs.sum(s, b)
            elif b.is_long:
                quad = rs.sum(s, a)
            else:
                quad = None
            com = G.commutator(G.elem(a, one), G.elem(b, one))
            coeffs = {t.name: c for t, c in G.normal_form(com).terms}
            allowed = {s.name} | ({quad.name} if quad is not None else set())
            extra = set(coeffs) - allowed
            if extra:
                raise InconsistentLift(
                    f"[x_{a}(1), x_{b}(1)] has unexpected support {sorted(extra)}"
                )
            key = (a.name, b.name)
            N1[key] = _lift_constant(field, coeffs.get(s.name, field.zero), key)
            if quad is not None:
                N2[key] = _lift_constant(field, coeffs.get(quad.name, field.zero), key)
    return N1, N2


_TABLES = {}


def compute_structure_constants(n, field):
    """Measure N1/N2 over `field` and over an auxiliary prime field, lift to
    integers, and require the lifts to agree."""
    if n < 2:
        raise RankTooSmall(f"rank {n} < 2")
    key = (n, field.spec())
    if key in _TABLES:
        return _TABLES[key]
    from .field import Field

    N1, N2 = _measure(n, field)
    aux_p = 7 if field.p != 7 else 5
    A1, A2 = _measure(n, Field(aux_p))
    if N1 != A1 or N2 != A2:
        bad = [k for k in N1 if N1[k] != A1.get(k)] + [k for k in N2 if N2[k] != A2.get(k)]
        raise InconsistentLift(f"constants differ between fields at {bad[:3]}")
    table = StructureConstantTable(n, N1, N2)
    _TABLES[key] = table
    return table
