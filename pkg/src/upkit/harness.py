"""Named verification checks over one parameter set, with uniform reports.

Every supporting fact the classifier rests on gets a catalog entry that
replays it at the requested rank and field: exhaustively when the domain is
small, otherwise on seeded random points. `run_lemma` produces one report,
`run_all` sweeps the catalog. Reports are plain JSON-ready dicts and are
bit-identical across runs with the same params and seed, except for the
elapsed wall-time field.

For fault-injection testing, params may carry a `fault` entry; the affected
check then reports the planted defect as an ordinary failure witness.
"""

from __future__ import annotations

import itertools
import random
import time

from .centralizers import (
    probe_families,
    verify_centralizer_lemma,
    verify_corollary_preservation,
    verify_probe_families,
)
from .classify import (
    as_oracle,
    classify,
    express_U12_as_commutator,
    residual_central_certificate,
    step_first_wall_check,
)
from .errors import (
    BadParams,
    MismatchAtCoefficient,
    ResidualNotCentral,
    UnknownLemma,
    UpkitError,
)
from .field import Field
from .group import Group, group
from .pcmaps import (
    ALL_KINDS,
    Central,
    CentralFunction,
    is_pc_map,
    random_central_function,
    random_map,
    random_standard_composition,
)
from .roots import StructureConstantTable
from .symbolic import (
    check_evaluation_consistency,
    verify_cleanup_identities,
    verify_tower_expansion,
)

DEFAULT_PARAMS = {"n": 4, "p": 5, "k": 1, "trials": 500, "seed": 42}

_CORE_KEYS = ("n", "p", "k", "trials", "seed")
_EXTRA_KEYS = ("reading", "fault")
_FAULT_KINDS = ("structure_constant", "oracle_output", "central_table")

# at most this many witnesses are recorded per report
FAILURE_CAP = 12


def _is_prime(p):
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def normalize_params(params=None):
    """Fill in defaults and validate; raises BadParams on anything off."""
    merged = dict(DEFAULT_PARAMS)
    if params:
        if not isinstance(params, dict):
            raise BadParams("params must be a dict")
        unknown = set(params) - set(_CORE_KEYS) - set(_EXTRA_KEYS)
        if unknown:
            raise BadParams(f"unrecognized params: {sorted(unknown)}")
        merged.update(params)
    for key in ("n", "p", "k", "trials", "seed"):
        if not isinstance(merged[key], int) or isinstance(merged[key], bool):
            raise BadParams(f"{key} must be an integer")
    if merged["n"] < 2:
        raise BadParams("rank n must be at least 2")
    if merged["p"] < 5 or not _is_prime(merged["p"]):
        raise BadParams("characteristic p must be a prime >= 5")
    if merged["k"] < 1:
        raise BadParams("extension degree k must be at least 1")
    if merged["trials"] < 1:
        raise BadParams("trials must be positive")
    if "reading" in merged and merged["reading"] not in (1, 2):
        raise BadParams("reading must be 1 or 2")
    if "fault" in merged:
        fault = merged["fault"]
        if not isinstance(fault, dict) or fault.get("kind") not in _FAULT_KINDS:
            raise BadParams(f"fault kind must be one of {_FAULT_KINDS}")
    return merged


_GROUP_CACHE = {}


def _group_for(n, p, k):
    key = (n, p, k)
    if key not in _GROUP_CACHE:
        _GROUP_CACHE[key] = group(n, Field(p, k))
    return _GROUP_CACHE[key]


class _Ctx:
    """One normalized parameter set with its group, built once per report."""

    def __init__(self, params):
        self.params = params
        self.n = params["n"]
        self.p = params["p"]
        self.k = params["k"]
        self.trials = params["trials"]
        self.seed = params["seed"]
        self.fault = params.get("fault")
        if self.fault and self.fault["kind"] == "structure_constant":
            # a private instance, bypassing the factory cache, so the
            # planted defect cannot leak into other runs
            self.G = Group(self.n, Field(self.p, self.k))
            self._corrupt_constants(self.fault)
        else:
            self.G = _group_for(self.n, self.p, self.k)

    def _corrupt_constants(self, fault):
        base = self.G.constants
        try:
            pair = (tuple(fault["alpha"]), tuple(fault["beta"]))
        except (KeyError, TypeError):
            raise BadParams("structure_constant fault needs alpha and beta")
        if pair not in base.N1:
            raise BadParams(f"no structure constant at {pair}")
        n1 = dict(base.N1)
        n1[pair] += 1
        self.G._constants = StructureConstantTable(base.n, n1, dict(base.N2))

    def rng(self, tag, t=None):
        key = f"{self.seed}|{tag}" if t is None else f"{self.seed}|{tag}|{t}"
        return random.Random(key)


def _push(failures, entry):
    if len(failures) < FAILURE_CAP:
        failures.append(entry)


def _word_json(G, a):
    return G.normal_form(a, validate=False).to_json()


# --- catalog registration ---------------------------------------------------

_CATALOG = {}
_MIN_RANK = {}


def _lemma(lemma_id, min_n=2):
    def register(fn):
        _CATALOG[lemma_id] = fn
        _MIN_RANK[lemma_id] = min_n
        return fn

    return register


def catalog():
    """Checkable lemma ids, in presentation order."""
    return tuple(_CATALOG)


def min_rank(lemma_id):
    if lemma_id not in _MIN_RANK:
        raise UnknownLemma(f"no catalog entry named {lemma_id!r}")
    return _MIN_RANK[lemma_id]


# --- generator relations and constants ---------------------------------------


def _expansion_matches(G, a, b, xi, zeta):
    lhs = G.commutator_of_gens(a, xi, b, zeta)
    rhs = G.product_of_gens(
        [(root, G.field.embed(c) * xi**e1 * zeta**e2)
         for root, e1, e2, c in G.constants.terms(a, b)])
    return lhs == rhs


@_lemma("steinberg_relations")
def _check_steinberg(ctx):
    """[x_a(xi), x_b(zeta)] equals the measured-constant expansion for every
    ordered pair of roots: exhaustively at unit arguments, then on seeded
    random argument pairs."""
    G = ctx.G
    F = G.field
    roots = G.rs.roots
    failures = []
    one = F.one
    for a in roots:
        for b in roots:
            if not _expansion_matches(G, a, b, one, one):
                _push(failures, {
                    "witness": {"alpha": repr(a), "beta": repr(b),
                                "xi": one.to_json(), "zeta": one.to_json()},
                    "expected": "constant-table expansion",
                    "actual": "commutator disagrees with the table",
                })
    for t in range(ctx.trials):
        rng = ctx.rng("steinberg", t)
        a = rng.choice(roots)
        b = rng.choice(roots)
        xi, zeta = F.sample(rng), F.sample(rng)
        if not _expansion_matches(G, a, b, xi, zeta):
            _push(failures, {
                "witness": {"alpha": repr(a), "beta": repr(b),
                            "xi": xi.to_json(), "zeta": zeta.to_json()},
                "expected": "constant-table expansion",
                "actual": "commutator disagrees with the table",
            })
    return failures


@_lemma("structure_constants")
def _check_structure_constants(ctx):
    """Exhaustive shape of the measured table: the linear constant has
    magnitude 2 exactly on short+short pairs with a long sum and magnitude 1
    otherwise; the quadratic constant exists exactly when the doubled sum is
    a root and always has magnitude 1; both lift identically over a second
    characteristic."""
    G = ctx.G
    rs = G.rs
    tbl = G.constants
    other = _group_for(ctx.n, 7 if ctx.p != 7 else 11, 1).constants
    failures = []
    seen = set()
    for a in rs.roots:
        for b in rs.roots:
            s = rs.sum(a, b)
            if s is None:
                if tbl.terms(a, b):
                    _push(failures, {
                        "witness": {"alpha": repr(a), "beta": repr(b)},
                        "expected": "no table entry (sum is not a root)",
                        "actual": tbl.terms(a, b),
                    })
                continue
            seen.add((a.name, b.name))
            c1 = tbl.n1(a, b)
            want = 2 if (not a.is_long and not b.is_long and s.is_long) else 1
            if abs(c1) != want:
                _push(failures, {
                    "witness": {"alpha": repr(a), "beta": repr(b)},
                    "expected": f"|N1| = {want}",
                    "actual": c1,
                })
            if other.n1(a, b) != c1:
                _push(failures, {
                    "witness": {"alpha": repr(a), "beta": repr(b)},
                    "expected": f"N1 = {c1} in every characteristic",
                    "actual": other.n1(a, b),
                })
            doubled = rs.sum(s, b) if a.is_long else (
                rs.sum(s, a) if b.is_long else None)
            key = (a.name, b.name)
            if doubled is None:
                if key in tbl.N2:
                    _push(failures, {
                        "witness": {"alpha": repr(a), "beta": repr(b)},
                        "expected": "no quadratic constant",
                        "actual": tbl.N2[key],
                    })
            else:
                if key not in tbl.N2 or abs(tbl.N2[key]) != 1:
                    _push(failures, {
                        "witness": {"alpha": repr(a), "beta": repr(b)},
                        "expected": "|N2| = 1",
                        "actual": tbl.N2.get(key),
                    })
                elif other.N2.get(key) != tbl.N2[key]:
                    _push(failures, {
                        "witness": {"alpha": repr(a), "beta": repr(b)},
                        "expected": f"N2 = {tbl.N2[key]} in every characteristic",
                        "actual": other.N2.get(key),
                    })
    stray = set(tbl.N1) - seen
    if stray:
        _push(failures, {
            "witness": {"pairs": sorted(map(str, stray))[:4]},
            "expected": "table keyed by root pairs with root sums only",
            "actual": f"{len(stray)} stray entries",
        })
    return failures


@_lemma("root_subgroups")
def _check_root_subgroups(ctx):
    """Each coordinate map is a homomorphism into the group: generators are
    unitriangular symplectic, multiply by adding arguments, invert by
    negating, and sit at filtration level equal to their height."""
    G = ctx.G
    F = G.field
    failures = []
    els = F.elements()
    if len(els) ** 2 <= 10_000:
        arg_pairs = [(x, y) for x in els for y in els]
    else:
        rng = ctx.rng("root-subgroup-args")
        arg_pairs = [(F.sample(rng), F.sample(rng)) for _ in range(ctx.trials)]
    for r in G.rs.roots:
        for xi in els:
            m = G.elem(r, xi)
            if not G.is_symplectic(m.arr) or not G.is_unitriangular(m.arr):
                _push(failures, {
                    "witness": {"root": repr(r), "xi": xi.to_json()},
                    "expected": "unitriangular symplectic generator",
                    "actual": "matrix fails the membership test",
                })
            if G.multiply(m, G.elem(r, -xi)) != G.one():
                _push(failures, {
                    "witness": {"root": repr(r), "xi": xi.to_json()},
                    "expected": "inverse at the negated argument",
                    "actual": "product is not the identity",
                })
            lvl = G.filtration_level(m)
            want = r.height if xi else G.d
            if lvl != want:
                _push(failures, {
                    "witness": {"root": repr(r), "xi": xi.to_json()},
                    "expected": f"filtration level {want}",
                    "actual": lvl,
                })
        for xi, zeta in arg_pairs:
            if G.multiply(G.elem(r, xi), G.elem(r, zeta)) != G.elem(r, xi + zeta):
                _push(failures, {
                    "witness": {"root": repr(r), "xi": xi.to_json(),
                                "zeta": zeta.to_json()},
                    "expected": "one-parameter subgroup additivity",
                    "actual": "product differs from the summed argument",
                })
    return failures


@_lemma("normal_form_roundtrip")
def _check_normal_form(ctx):
    """Height-ordered coordinates exist, are canonical, and rebuild the
    matrix exactly, on seeded random elements."""
    G = ctx.G
    failures = []
    for t in range(ctx.trials):
        rng = ctx.rng("normal-form", t)
        a = G.random_element(rng)
        w = G.normal_form(a)
        if not w.is_canonical() or w.matrix() != a:
            _push(failures, {
                "witness": {"trial": t, "element": a.to_json()},
                "expected": "canonical word rebuilding the element",
                "actual": w.to_json(),
            })
    return failures


@_lemma("filtration_brackets")
def _check_filtration_brackets(ctx):
    """Commutators add filtration levels: level-i against level-j lands at
    level at least i+j (capped at the trivial level)."""
    G = ctx.G
    d = G.d
    failures = []
    per_bucket = max(3, ctx.trials // 50)
    for i in range(1, d):
        for j in range(i, d):
            for t in range(per_bucket):
                rng = ctx.rng(f"bracket|{i}|{j}", t)
                a = G.random_element(rng, min_height=i)
                b = G.random_element(rng, min_height=j)
                lvl = G.filtration_level(G.commutator(a, b))
                if lvl < min(i + j, d):
                    _push(failures, {
                        "witness": {"i": i, "j": j, "trial": t,
                                    "a": _word_json(G, a), "b": _word_json(G, b)},
                        "expected": f"level >= {min(i + j, d)}",
                        "actual": lvl,
                    })
    return failures


@_lemma("center")
def _check_center(ctx):
    """An element commutes with every generator exactly when its support
    lies on the top root; top-root elements commute with everything."""
    G = ctx.G
    F = G.field
    rs = G.rs
    one = G.one()
    gens = [G.elem(r, F.one) for r in rs.roots]
    failures = []

    def central(a):
        return all(G.commutator(a, g) == one for g in gens)

    for xi in F.elements():
        if not central(G.elem(rs.alpha_max, xi)):
            _push(failures, {
                "witness": {"xi": xi.to_json()},
                "expected": "top-root element commutes with all generators",
                "actual": "found a non-commuting generator",
            })
    for t in range(ctx.trials):
        rng = ctx.rng("center", t)
        a = G.random_element(rng)
        sup = G.normal_form(a).support()
        if central(a) != (sup <= {rs.alpha_max}):
            _push(failures, {
                "witness": {"trial": t, "element": _word_json(G, a)},
                "expected": "central iff supported on the top root",
                "actual": sorted(repr(r) for r in sup),
            })
    return failures


# --- standard commutator-preserving maps -------------------------------------


@_lemma("standard_maps", min_n=3)
def _check_standard_maps(ctx):
    """Every standard kind preserves commutators on sampled pairs and
    composes with its inverse to the identity."""
    G = ctx.G
    failures = []
    tr = max(10, ctx.trials // 20)
    for kind in ALL_KINDS:
        phi = random_map(G, kind, ctx.rng(f"standard|{kind}"),
                         seed=f"{ctx.seed}|standard|{kind}")
        rep = is_pc_map(phi.apply, G, trials=tr, seed=f"{ctx.seed}|pc|{kind}")
        if rep["status"] != "pass":
            _push(failures, {
                "witness": {"kind": kind, **rep["counterexample"]},
                "expected": "phi([x, y]) = [phi(x), phi(y)]",
                "actual": "commutator preservation broke",
            })
        inv = phi.inverse()
        for t in range(tr):
            rng = ctx.rng(f"standard-inv|{kind}", t)
            a = G.random_element(rng)
            if inv.apply(phi.apply(a)) != a:
                _push(failures, {
                    "witness": {"kind": kind, "trial": t},
                    "expected": "inverse map undoes the map",
                    "actual": "roundtrip moved the element",
                })
    return failures


@_lemma("standard_central_map")
def _check_standard_central_map(ctx):
    """Any superdiagonal-indexed table vanishing at zero gives a
    commutator-preserving bijection by appending a top-root factor; its
    inverse is the negated table, and the offset depends on the
    superdiagonal alone."""
    G = ctx.G
    F = G.field
    n, d = G.n, G.d
    failures = []
    f = random_central_function(G, f"{ctx.seed}|central-map")
    inv = Central(G, f.negate())
    if ctx.fault and ctx.fault["kind"] == "central_table":
        target = tuple(ctx.fault.get("prefix", (1,) + (0,) * (n - 1)))
        if len(target) != n:
            raise BadParams(f"central_table fault prefix needs {n} indices")
        clean = f

        def corrupted(prefix, _clean=clean, _target=target, _F=F):
            v = _clean(prefix)
            if tuple(_F.index_of(x) for x in prefix) == _target:
                v = v + _F.one
            return v

        f = CentralFunction(G, func=corrupted)
    phi = Central(G, f)
    zero = tuple(F.zero for _ in range(n))
    if f(zero) != F.zero:
        _push(failures, {
            "witness": {"prefix": [0] * n},
            "expected": "zero value at the zero superdiagonal",
            "actual": f(zero).to_json(),
        })
    rep = is_pc_map(phi.apply, G, trials=max(10, ctx.trials // 20),
                    seed=f"{ctx.seed}|central-pc")
    if rep["status"] != "pass":
        _push(failures, {
            "witness": rep["counterexample"],
            "expected": "commutator preservation",
            "actual": "sampled pair broke it",
        })
    if F.order ** n <= 10_000:
        prefixes = itertools.product(*[F.elements()] * n)
    else:
        rng = ctx.rng("central-prefixes")
        prefixes = ([F.sample(rng) for _ in range(n)] for _ in range(ctx.trials))
    for prefix in prefixes:
        a = G.product_of_gens(
            [(G.rs.simple[i], prefix[i]) for i in range(n)])
        if inv.apply(phi.apply(a)) != a:
            _push(failures, {
                "witness": {"prefix": [x.to_json() for x in prefix]},
                "expected": "negated table inverts the map",
                "actual": "roundtrip moved the probe",
            })
    for t in range(max(10, ctx.trials // 20)):
        rng = ctx.rng("central-prefix-only", t)
        a = G.random_element(rng)
        b = G.multiply(a, G.random_element(rng, min_height=2))
        off_a = G.multiply(phi.apply(a), G.invert(a))
        off_b = G.multiply(phi.apply(b), G.invert(b))
        if off_a != off_b:
            _push(failures, {
                "witness": {"trial": t},
                "expected": "offset determined by the superdiagonal",
                "actual": "two elements with equal superdiagonal disagree",
            })
    return failures


# --- filtration subgroups and coefficient extraction --------------------------


def _mirror_symmetric(G, a, i, s):
    # a_{i,i+s} = -eps_i eps_{i+s} a_{2n+1-(i+s),2n+1-i}, 1-based indices
    n, d = G.n, G.d
    eps = lambda t: 1 if t <= n else -1
    return a.entry(i - 1, i + s - 1) == -eps(i) * eps(i + s) * a.entry(
        d - (i + s), d - i)


@_lemma("symmetry_of_zeros")
def _check_symmetry_of_zeros(ctx):
    """Inverse-transpose symmetry of entries across the antidiagonal: forced
    whenever the row prefix (or the inverse's column suffix) vanishes, hence
    on diagonal s for every level-(s-1) element once s >= 3 and for every
    level-s element at any s."""
    G = ctx.G
    d = G.d
    failures = []
    checked = 0
    for t in range(ctx.trials):
        rng = ctx.rng("zeros-row", t)
        a = G.random_element(rng, min_height=rng.choice([1, 1, 1, 2, 3]))
        ainv = a.inv()
        for s in range(1, d):
            for i in range(1, d - s + 1):
                row_zero = all(not a.entry(i - 1, i + k - 1) for k in range(1, s))
                col_zero = all(not ainv.entry(i + k - 1, i + s - 1)
                               for k in range(1, s))
                if row_zero or col_zero:
                    checked += 1
                    if not _mirror_symmetric(G, a, i, s):
                        _push(failures, {
                            "witness": {"trial": t, "i": i, "s": s,
                                        "element": _word_json(G, a)},
                            "expected": "mirror symmetry at (i, i+s)",
                            "actual": "entries disagree",
                        })
    if not checked:
        _push(failures, {
            "witness": {"trials": ctx.trials},
            "expected": "at least one hypothesis instance",
            "actual": 0,
        })
    per_level = max(5, ctx.trials // 20)
    for s in range(3, d):
        for t in range(per_level):
            rng = ctx.rng(f"zeros-deep|{s}", t)
            a = G.random_element(rng, min_height=s - 1)
            for i in range(1, d - s + 1):
                if not _mirror_symmetric(G, a, i, s):
                    _push(failures, {
                        "witness": {"s": s, "i": i, "level": s - 1,
                                    "element": _word_json(G, a)},
                        "expected": "symmetry on diagonal s at level s-1",
                        "actual": "entries disagree",
                    })
    for s in range(1, d):
        for t in range(per_level):
            rng = ctx.rng(f"zeros-level|{s}", t)
            a = G.random_element(rng, min_height=s)
            for i in range(1, d - s + 1):
                if not _mirror_symmetric(G, a, i, s):
                    _push(failures, {
                        "witness": {"s": s, "i": i, "level": s,
                                    "element": _word_json(G, a)},
                        "expected": "symmetry on diagonal s at level s",
                        "actual": "entries disagree",
                    })
    return failures


@_lemma("transvections_in_filtration")
def _check_transvections(ctx):
    """A root generator with nonzero argument sits exactly at the filtration
    level given by its height; exhaustive over roots and arguments."""
    G = ctx.G
    failures = []
    for r in G.rs.roots:
        for xi in G.field.elements():
            lvl = G.filtration_level(G.elem(r, xi))
            want = r.height if xi else G.d
            if lvl != want:
                _push(failures, {
                    "witness": {"root": repr(r), "xi": xi.to_json()},
                    "expected": want,
                    "actual": lvl,
                })
    return failures


def _first_row_owner(rs, j):
    """First-row root occupying matrix column j (1-based), 2 <= j <= 2n-1."""
    n = rs.n
    return rs.root(1, j) if j <= n else rs.root(1, -(2 * n + 1 - j))


@_lemma("extract_from_u1")
def _check_extract_from_u1(ctx):
    """One commutator against a complementary first-row generator reads any
    middle first-row entry into the top root, scaled by the full measured
    constant of magnitude 2. The reading that applies only the constant's
    sign is refutable here by passing reading=1."""
    G = ctx.G
    F = G.field
    rs = G.rs
    n, d = G.n, G.d
    reading = ctx.params.get("reading", 2)
    failures = []
    per_col = max(10, ctx.trials // (2 * n))
    for j in range(2, 2 * n):
        delta = _first_row_owner(rs, j)
        beta = rs.sub(rs.alpha_max, delta)
        c = G.constants.n1(beta, delta)
        scale = F.embed(c) if reading == 2 else F.embed(1 if c > 0 else -1)
        probe = G.elem(beta, F.one)
        for t in range(per_col):
            rng = ctx.rng(f"u1-extract|{j}", t)
            a = G.random_u1(rng)
            z = G.commutator(probe, a)
            want = G.elem(rs.alpha_max, scale * a.entry(0, j - 1))
            if z != want:
                _push(failures, {
                    "witness": {"column": j, "probe": repr(beta), "trial": t,
                                "entry": a.entry(0, j - 1).to_json()},
                    "expected": want.entry(0, d - 1).to_json(),
                    "actual": z.entry(0, d - 1).to_json(),
                })
    return failures


@_lemma("extract_middle")
def _check_extract_middle(ctx):
    """A double commutator against two first-row generators reads any
    interior matrix entry of the inverse into the top root, with a constant
    of magnitude 2 fixed per position; for elements deep enough that the
    inverse entry is the negated entry, it reads the entry itself. The two
    probe heights always sum to 2n-1+i-j."""
    G = ctx.G
    F = G.field
    rs = G.rs
    n = G.n
    failures = []
    per_pair = max(8, ctx.trials // 60)
    for i in range(2, 2 * n - 1):
        gamma = _first_row_owner(rs, i)
        for j in range(i + 1, 2 * n):
            delta = _first_row_owner(rs, j)
            beta = rs.sub(rs.alpha_max, delta)
            c = G.constants.n1(beta, delta)
            if abs(c) != 2:
                _push(failures, {
                    "witness": {"i": i, "j": j},
                    "expected": "constant of magnitude 2",
                    "actual": c,
                })
            if beta.height + gamma.height != 2 * n - 1 + i - j:
                _push(failures, {
                    "witness": {"i": i, "j": j, "outer": repr(beta),
                                "inner": repr(gamma)},
                    "expected": f"probe heights summing to {2 * n - 1 + i - j}",
                    "actual": beta.height + gamma.height,
                })
            outer = G.elem(beta, F.one)
            inner = G.elem(gamma, F.one)
            for t in range(per_pair):
                rng = ctx.rng(f"middle|{i}|{j}", t)
                a = G.random_element(rng)
                z = G.commutator(outer, G.commutator(inner, a))
                want = G.elem(rs.alpha_max, F.embed(-c) * a.inv().entry(i - 1, j - 1))
                if z != want:
                    _push(failures, {
                        "witness": {"i": i, "j": j, "trial": t,
                                    "element": _word_json(G, a)},
                        "expected": want.entry(0, G.d - 1).to_json(),
                        "actual": z.entry(0, G.d - 1).to_json(),
                    })
                # deep elements: the entry itself is extracted
                b = G.random_element(rng, min_height=j - i)
                z = G.commutator(outer, G.commutator(inner, b))
                want = G.elem(rs.alpha_max, F.embed(c) * b.entry(i - 1, j - 1))
                if z != want:
                    _push(failures, {
                        "witness": {"i": i, "j": j, "trial": t,
                                    "element": _word_json(G, b), "deep": True},
                        "expected": want.entry(0, G.d - 1).to_json(),
                        "actual": z.entry(0, G.d - 1).to_json(),
                    })
    return failures


@_lemma("pc_preserves_filtration", min_n=3)
def _check_pc_preserves_filtration(ctx):
    """Standard compositions map each filtration subgroup into itself, in
    both directions."""
    G = ctx.G
    failures = []
    ncomp = max(2, min(6, ctx.trials // 100))
    per = max(3, ctx.trials // 100)
    for idx in range(ncomp):
        comp = random_standard_composition(G, f"{ctx.seed}|pcup|{idx}")
        inv = comp.inverse()
        for s in range(1, G.d):
            for t in range(per):
                rng = ctx.rng(f"pcup|{idx}|{s}", t)
                a = G.random_element(rng, min_height=s)
                for label, phi in (("forward", comp), ("inverse", inv)):
                    lvl = G.filtration_level(phi.apply(a))
                    if lvl < s:
                        _push(failures, {
                            "witness": {"composition": idx, "s": s, "trial": t,
                                        "direction": label,
                                        "element": _word_json(G, a)},
                            "expected": f"image level >= {s}",
                            "actual": lvl,
                        })
    return failures


@_lemma("pc_preserves_p_i_k", min_n=3)
def _check_pc_preserves_p_i_k(ctx):
    """Standard compositions preserve the pierced filtration subgroups: level
    at least i with the first k-1 height-i coefficient slots empty."""
    G = ctx.G
    F = G.field
    rs = G.rs
    failures = []
    for idx in range(2):
        comp = random_standard_composition(G, f"{ctx.seed}|pik|{idx}")
        for i in range(1, G.d):
            for k in range(1, G.n + 1):
                allowed = [r for r in rs.of_height.get(i, ())
                           if all(r.m[t] == 0 for t in range(k - 1))]
                for t in range(3):
                    rng = ctx.rng(f"pik|{idx}|{i}|{k}", t)
                    head = [(r, F.sample(rng)) for r in allowed]
                    a = G.multiply(G.product_of_gens(head),
                                   G.random_element(rng, min_height=i + 1))
                    if not G.in_P_i_k(a, i, k):
                        continue
                    if not G.in_P_i_k(comp.apply(a), i, k):
                        _push(failures, {
                            "witness": {"composition": idx, "i": i, "k": k,
                                        "trial": t, "element": _word_json(G, a)},
                            "expected": "image stays in the subgroup",
                            "actual": "membership lost",
                        })
    return failures


# --- centralizers -------------------------------------------------------------


@_lemma("centralizer_generators")
def _check_centralizer_generators(ctx):
    """Per root: the generator's centralizer is the product of root subgroups
    on perpendicular roots (containment exhaustive over generators,
    falsification sampled), unchanged by central cofactors."""
    G = ctx.G
    failures = []
    per_root = max(20, ctx.trials // 16)
    for alpha in G.rs.roots:
        rep = verify_centralizer_lemma(G, alpha, trials=per_root, seed=ctx.seed)
        for item in rep["failures"]:
            _push(failures, {
                "witness": {"alpha": repr(alpha), **item},
                "expected": "two-sided centralizer description",
                "actual": item.get("direction"),
            })
    return failures


@_lemma("simple_roots_as_centralizer", min_n=3)
def _check_simple_roots_as_centralizer(ctx):
    """The displayed input families have exactly the claimed (corrected)
    centralizer supports, confirmed set-wise and by sampled commutation."""
    rep = verify_probe_families(ctx.n, trials=min(ctx.trials, 50), seed=ctx.seed)
    failures = []
    for item in rep["failures"]:
        _push(failures, {
            "witness": item,
            "expected": "claimed support equals computed centralizer",
            "actual": item.get("kind"),
        })
    return failures


@_lemma("centralizer_preserved", min_n=3)
def _check_centralizer_preserved(ctx):
    """A map sending each input generator into its own root subgroup times
    the center maps the centralizer of the family into itself."""
    G = ctx.G
    failures = []
    kinds = ("diagonal", "semidiagonal", "field", "central")
    for idx in range(2):
        comp = random_standard_composition(G, f"{ctx.seed}|cpres|{idx}",
                                           kinds=kinds, length=3)
        for fam in probe_families(ctx.n):
            rep = verify_corollary_preservation(
                G, fam["inputs"], comp.apply,
                trials=max(20, ctx.trials // 20), seed=f"{ctx.seed}|{idx}")
            if not rep["hypothesis_ok"]:
                _push(failures, {
                    "witness": {"family": fam["name"], "composition": idx},
                    "expected": "generator images inside X_a X_max",
                    "actual": "hypothesis violated",
                })
            for item in rep["failures"]:
                _push(failures, {
                    "witness": {"family": fam["name"], "composition": idx,
                                **item},
                    "expected": "centralizer mapped into itself",
                    "actual": item.get("kind"),
                })
    return failures


# --- first-wall support and symbolic identities --------------------------------


@_lemma("first_wall_support", min_n=3)
def _check_first_wall_support(ctx):
    """Images of the first simple-root subgroup under standard compositions
    stay on first-row roots plus the three allowed spillover roots."""
    G = ctx.G
    failures = []
    ncomp = max(3, min(8, ctx.trials // 100))
    for idx in range(ncomp):
        comp = random_standard_composition(G, f"{ctx.seed}|wall|{idx}")
        rep = step_first_wall_check(as_oracle(comp))
        for item in rep["witnesses"]:
            _push(failures, {
                "witness": {"composition": idx, **item},
                "expected": "support inside the allowed set",
                "actual": item["outside"],
            })
    return failures


@_lemma("cleanup_identities")
def _check_cleanup_identities(ctx):
    """The three symbolic commutator expansions used to clean the first wall
    match their recorded coefficient tables and force the recorded zeros, at
    the two ranks where they are applied."""
    failures = []
    for rank in (3, 4):
        rep = verify_cleanup_identities(rank)
        if rep["status"] != "pass":
            _push(failures, {
                "witness": {"rank": rank},
                "expected": "expansions match the recorded tables",
                "actual": rep["status"],
            })
    return failures


@_lemma("tower_expansion")
def _check_tower_expansion(ctx):
    """The closed-form ladder expansion for the two first-row towers against
    the simple-root word matches the symbolic engine, including the top-root
    cross terms."""
    rep = verify_tower_expansion(max(4, ctx.n))
    failures = []
    if rep["status"] != "pass":
        _push(failures, {
            "witness": {"rank": max(4, ctx.n)},
            "expected": "closed form matches the symbolic expansion",
            "actual": rep["status"],
        })
    return failures


@_lemma("symbolic_consistency", min_n=3)
def _check_symbolic_consistency(ctx):
    """Every symbolic identity evaluates to the same matrix as the plain
    engine at seeded random field points."""
    failures = []
    try:
        count = check_evaluation_consistency(ctx.G, trials=min(ctx.trials, 200),
                                             seed=ctx.seed)
        if count == 0:
            _push(failures, {
                "witness": {"n": ctx.n},
                "expected": "at least one comparison",
                "actual": 0,
            })
    except MismatchAtCoefficient as exc:
        _push(failures, {
            "witness": {"error": str(exc)},
            "expected": "symbolic and matrix engines agree",
            "actual": "mismatch",
        })
    return failures


# --- the classifier's own machinery --------------------------------------------


@_lemma("commutator_solver", min_n=4)
def _check_commutator_solver(ctx):
    """Every deep first-row element is one commutator of a first-row element
    against a product of simple-root generators, solved exactly."""
    G = ctx.G
    rs = G.rs
    failures = []
    simple = set(rs.simple)
    for t in range(max(20, ctx.trials // 5)):
        rng = ctx.rng("solver", t)
        a = G.random_u1(rng, min_height=2)
        try:
            b, c = express_U12_as_commutator(a)
        except UpkitError as exc:
            _push(failures, {
                "witness": {"trial": t, "element": _word_json(G, a)},
                "expected": "a solved commutator pair",
                "actual": f"{type(exc).__name__}: {exc}",
            })
            continue
        if G.commutator(b, c) != a:
            _push(failures, {
                "witness": {"trial": t, "element": _word_json(G, a)},
                "expected": "commutator reproduces the input",
                "actual": "mismatch",
            })
        if not G.in_U1(b) or not G.normal_form(c).support() <= simple:
            _push(failures, {
                "witness": {"trial": t},
                "expected": "first-row left factor, simple-root right factor",
                "actual": "factor left its subgroup",
            })
    return failures


@_lemma("residual_central", min_n=4)
def _check_residual_central(ctx):
    """A residual that only appends top-root factors is certified central and
    its extracted table matches the planted one; a residual that moves other
    coefficients is rejected."""
    G = ctx.G
    F = G.field
    n = G.n
    failures = []
    f = random_central_function(G, f"{ctx.seed}|resid")
    oracle = as_oracle(Central(G, f))
    tr = max(20, min(ctx.trials, 100))
    try:
        cf, rep = residual_central_certificate(oracle, trials=tr,
                                               seed=f"{ctx.seed}|resid-cert")
        if rep["status"] != "pass":
            _push(failures, {
                "witness": {"report": rep},
                "expected": "a passing certificate",
                "actual": rep["status"],
            })
        else:
            for t in range(20):
                rng = ctx.rng("resid-probe", t)
                prefix = tuple(F.sample(rng) for _ in range(n))
                if cf(prefix) != f(prefix):
                    _push(failures, {
                        "witness": {"prefix": [x.to_json() for x in prefix]},
                        "expected": f(prefix).to_json(),
                        "actual": cf(prefix).to_json(),
                    })
    except ResidualNotCentral as exc:
        _push(failures, {
            "witness": {"error": str(exc)},
            "expected": "central residual accepted",
            "actual": "rejected",
        })
    try:
        residual_central_certificate(as_oracle(_noncentral_probe(G)),
                                     trials=tr, seed=f"{ctx.seed}|resid-neg")
        _push(failures, {
            "witness": {"map": "first-row shear"},
            "expected": "non-central residual rejected",
            "actual": "accepted",
        })
    except ResidualNotCentral:
        pass
    return failures


def _noncentral_probe(G):
    from .pcmaps import Extremal1

    return Extremal1(G, G.field.one)


@_lemma("classifier_roundtrip", min_n=4)
def _check_classifier_roundtrip(ctx):
    """Random standard compositions, presented as opaque oracles, come back
    as verified factor lists in the fixed slot order; composing the factors
    reproduces the oracle exactly."""
    G = ctx.G
    failures = []
    expected_slots = ["inner", "extremal", "extremal", "inner", "diagonal",
                      "semidiagonal", "central", "field", "residual"]
    ncomp = max(1, min(3, ctx.trials // 150))
    for idx in range(ncomp):
        comp = random_standard_composition(G, f"{ctx.seed}|clf|{idx}")
        oracle = comp.apply
        if ctx.fault and ctx.fault["kind"] == "oracle_output":
            shear = G.elem(G.rs.root(2, 3), G.field.one)
            oracle = lambda a, _c=comp, _s=shear: G.multiply(_c.apply(a), _s)
        try:
            fact = classify(as_oracle(oracle, G), trials=min(ctx.trials, 200),
                            seed=f"{ctx.seed}|clf|{idx}")
        except UpkitError as exc:
            _push(failures, {
                "witness": {"composition": idx,
                            "error": f"{type(exc).__name__}: {exc}"},
                "expected": "a verified factorization",
                "actual": "pipeline rejected the oracle",
            })
            continue
        if fact.slots != expected_slots:
            _push(failures, {
                "witness": {"composition": idx, "slots": fact.slots},
                "expected": expected_slots,
                "actual": fact.slots,
            })
        recovered = fact.compose()
        for t in range(10):
            rng = ctx.rng(f"clf-spot|{idx}", t)
            a = G.random_element(rng)
            if recovered.apply(a) != comp.apply(a):
                _push(failures, {
                    "witness": {"composition": idx, "trial": t},
                    "expected": "factor composition equals the oracle",
                    "actual": "spot check disagrees",
                })
    return failures


# --- reports ------------------------------------------------------------------


def _report(lemma_id, params, failures, started):
    core = {key: params[key] for key in _CORE_KEYS}
    for key in _EXTRA_KEYS:
        if key in params:
            core[key] = params[key]
    return {
        "lemma_id": lemma_id,
        "params": core,
        "status": "pass" if not failures else "fail",
        "failures": failures,
        "elapsed": round(time.perf_counter() - started, 6),
    }


def run_lemma(lemma_id, params=None):
    """Run one catalog entry and return its report dict."""
    if lemma_id not in _CATALOG:
        raise UnknownLemma(f"no catalog entry named {lemma_id!r}")
    merged = normalize_params(params)
    if merged["n"] < _MIN_RANK[lemma_id]:
        raise BadParams(
            f"{lemma_id} needs rank >= {_MIN_RANK[lemma_id]}, got {merged['n']}")
    ctx = _Ctx(merged)
    started = time.perf_counter()
    failures = _CATALOG[lemma_id](ctx)
    return _report(lemma_id, merged, failures, started)


def run_all(params=None):
    """Run the full catalog and return the aggregate report."""
    merged = normalize_params(params)
    floor = max(_MIN_RANK.values())
    if merged["n"] < floor:
        raise BadParams(f"the full catalog needs rank >= {floor}")
    started = time.perf_counter()
    reports = [run_lemma(lemma_id, merged) for lemma_id in _CATALOG]
    npass = sum(r["status"] == "pass" for r in reports)
    return {
        "params": {key: merged[key] for key in _CORE_KEYS},
        "status": "pass" if npass == len(reports) else "fail",
        "counts": {"pass": npass, "fail": len(reports) - npass},
        "lemmas": reports,
        "elapsed": round(time.perf_counter() - started, 6),
    }
