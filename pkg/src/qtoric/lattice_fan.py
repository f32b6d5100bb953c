"""q-lattices and quantum fans: validity, properties, combinatorial types,
standardization and D-realizability.

A q-lattice is a finitely generated additive subgroup of R^d spanning it
over the reals; it is described by a generator list of scalar vectors.
Fans are stored simplicially: a set of ray generators plus a family of
index subsets (1-based, matching the usual cone notation <i1...ik>).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .linalg import (Matrix, int_rank, int_solve, mat_inverse, rank,
                     rational_to_int_rows, solve_right)
from .scalars import Scalar, Witness

Q = Fraction


def _vec(v):
    return tuple(Scalar.coerce(x) for x in v)


class QLattice:
    """Additive subgroup of R^d given by a generator list."""

    def __init__(self, dim: int, generators):
        self.dim = dim
        self.generators = tuple(_vec(g) for g in generators)
        for g in self.generators:
            if len(g) != dim:
                raise ValueError("generator of wrong dimension")

    def __eq__(self, other):
        return (isinstance(other, QLattice) and self.dim == other.dim
                and self.generators == other.generators)

    def __repr__(self):
        return f"QLattice(dim={self.dim}, generators={self.generators})"

    @staticmethod
    def standard(dim: int) -> "QLattice":
        eye = Matrix.identity(dim)
        return QLattice(dim, [eye.rows[i] for i in range(dim)])

    def param_names(self) -> list:
        names = set()
        for g in self.generators:
            for x in g:
                names |= set(x.params)
        return sorted(names)

    def coefficient_rows(self):
        """Each generator flattened to rational coordinates in the basis
        (1, params) x (e_1..e_d); raises UnsupportedEntries when an entry
        is not affine-linear in the parameters."""
        names = self.param_names()
        rows = []
        for g in self.generators:
            row = []
            for x in g:
                row.extend(x.affine_coefficients(names))
            rows.append(row)
        return rows, names

    def transform(self, L: Matrix) -> "QLattice":
        return QLattice(L.nrows, [L.apply(g) for g in self.generators])


def gamma_rank(gamma: QLattice) -> int:
    """Minimal number of Z-generators: Z-rank of the coefficient matrix of
    the generators in the basis {1} u params."""
    rows, _ = gamma.coefficient_rows()
    if not rows:
        return 0
    return int_rank(rational_to_int_rows(rows))


def gamma_contains(gamma: QLattice, x) -> tuple | None:
    """Integer coefficients expressing x in the generators, or None."""
    x = _vec(x)
    names = sorted(set(gamma.param_names())
                   | {n for s in x for n in s.params})
    grows = []
    for g in gamma.generators:
        row = []
        for e in g:
            row.extend(e.affine_coefficients(names))
        grows.append(row)
    target = []
    for e in x:
        target.extend(e.affine_coefficients(names))
    if not grows:
        return None
    # common denominator scaling must be shared between matrix and target
    den = 1
    for row in grows + [target]:
        for v in row:
            den = den * v.denominator // _gcd(den, v.denominator)
    A = [[int(v * den) for v in row] for row in grows]
    b = [int(v * den) for v in target]
    # solve c . A = b  (c integral), i.e. A^T c = b
    At = [list(col) for col in zip(*A)]
    return int_solve(At, b)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _normalize_cones(cones) -> frozenset:
    out = {frozenset()}
    for c in cones:
        out.add(frozenset(int(i) for i in c))
    return frozenset(out)


class QuantumFan:
    """Ray generators v_1..v_p plus a family of index subsets of {1..p}."""

    def __init__(self, gamma: QLattice, rays, cones):
        self.gamma = gamma
        self.rays = tuple(_vec(v) for v in rays)
        for v in self.rays:
            if len(v) != gamma.dim:
                raise ValueError("ray of wrong dimension")
        self.cones = _normalize_cones(cones)
        for c in self.cones:
            if any(i < 1 or i > len(self.rays) for i in c):
                raise ValueError("cone index out of range")

    @property
    def dim(self) -> int:
        return self.gamma.dim

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def ray(self, i: int):
        return self.rays[i - 1]

    def cone_generators(self, cone):
        return [self.ray(i) for i in sorted(cone)]

    def maximal_cones(self):
        return [c for c in self.cones
                if not any(c < d for d in self.cones)]

    def with_closure(self) -> "QuantumFan":
        closed = set()
        for c in self.cones:
            members = sorted(c)
            for r in range(len(members) + 1):
                for sub in itertools.combinations(members, r):
                    closed.add(frozenset(sub))
        return QuantumFan(self.gamma, self.rays, closed)

    def __repr__(self):
        cs = sorted(tuple(sorted(c)) for c in self.cones)
        return f"QuantumFan(d={self.dim}, p={self.nrays}, cones={cs})"


def fan_from_max_cones(gamma: QLattice, rays, max_cones) -> QuantumFan:
    """Convenience constructor closing the cone family under faces."""
    return QuantumFan(gamma, rays, max_cones).with_closure()


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    valid: bool
    violations: list = field(default_factory=list)

    def add(self, kind, detail):
        self.valid = False
        self.violations.append({"kind": kind, "detail": detail})

    def to_json(self):
        return {"valid": self.valid, "violations": self.violations}


def _rays_at_witness(fan: QuantumFan, w: Witness):
    return {i: [w.approx(x) for x in fan.ray(i)]
            for i in range(1, fan.nrays + 1)}


def validate_fan(fan: QuantumFan, w: Witness) -> ValidationReport:
    """Report zero generators, dependent cone generators, missing faces and
    pairs of cones whose relative interiors meet at the witness."""
    report = ValidationReport(True)
    for i in range(1, fan.nrays + 1):
        if all(x.is_zero() for x in fan.ray(i)):
            report.add("zero_generator", {"ray": i})
    for c in fan.cones:
        if c and rank(Matrix.from_columns(fan.cone_generators(c))) != len(c):
            report.add("dependent_cone", {"cone": sorted(c)})
    for c in fan.cones:
        for i in c:
            if (c - {i}) not in fan.cones:
                report.add("missing_face",
                           {"cone": sorted(c), "missing": sorted(c - {i})})
    ray_indices = {i for c in fan.cones for i in c}
    for i in range(1, fan.nrays + 1):
        if i not in ray_indices:
            report.add("missing_face", {"cone": [i], "missing": [i]})
    if not report.valid:
        return report
    coords = _rays_at_witness(fan, w)
    cones = sorted(fan.cones, key=lambda c: (len(c), sorted(c)))
    for a, b in itertools.combinations(cones, 2):
        if not a or not b:
            continue
        if a < b or b < a:
            # a simplicial face never meets the parent's relative interior
            continue
        if lp.cones_relint_intersect([coords[i] for i in sorted(a)],
                                     [coords[i] for i in sorted(b)]):
            report.add("overlap", {"cones": [sorted(a), sorted(b)]})
    return report


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

@dataclass
class FanProperties:
    irrational: bool
    complete: bool
    gamma_complete: bool
    polytopal: bool

    def to_json(self):
        return {"irrational": self.irrational, "complete": self.complete,
                "gamma_complete": self.gamma_complete,
                "polytopal": self.polytopal}


def _is_complete(fan: QuantumFan) -> bool:
    """Simplicial completeness: all maximal cones of dimension d, every
    (d-1)-face in exactly two maximal cones, facet graph connected."""
    d = fan.dim
    maxc = fan.maximal_cones()
    if not maxc or any(len(c) != d for c in maxc):
        return False
    facet_count: dict = {}
    for c in maxc:
        for i in c:
            f = c - {i}
            facet_count[f] = facet_count.get(f, 0) + 1
    if any(v != 2 for v in facet_count.values()):
        return False
    # connectivity of the facet-adjacency graph
    adj = {tuple(sorted(c)): set() for c in maxc}
    for f in facet_count:
        touching = [c for c in maxc if f <= c]
        for c1, c2 in itertools.combinations(touching, 2):
            adj[tuple(sorted(c1))].add(tuple(sorted(c2)))
            adj[tuple(sorted(c2))].add(tuple(sorted(c1)))
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(adj)


def _is_gamma_complete(fan: QuantumFan) -> bool:
    ray_lattice = QLattice(fan.dim, fan.rays)
    for g in fan.gamma.generators:
        if gamma_contains(ray_lattice, g) is None:
            return False
    for v in fan.rays:
        if gamma_contains(fan.gamma, v) is None:
            return False
    return True


def _is_polytopal(fan: QuantumFan, w: Witness) -> bool:
    """Strictly convex piecewise-linear support function via exact LP on
    witness values ("polytopal at witness")."""
    if not _is_complete(fan):
        return False
    d = fan.dim
    p = fan.nrays
    maxc = [tuple(sorted(c)) for c in fan.maximal_cones()]
    coords = _rays_at_witness(fan, w)
    exact = all(w.is_exact_for(x) for v in fan.rays for x in v)
    # variables: w_i (free, split +/-) for i = 1..p ; slacks per constraint
    # For each maximal cone s and each j not in s:
    #   l_s(v_j) - w_j >= margin,  l_s determined by l_s(v_i) = w_i, i in s.
    # Express l_s(v_j) = sum_i gamma_i w_i where gamma solves V_s gamma = v_j.
    constraints = []
    for s in maxc:
        Vs = Matrix.from_columns([[Scalar.from_fraction(c) for c in coords[i]]
                                  for i in s])
        for j in range(1, p + 1):
            if j in s:
                continue
            gam = solve_right(Vs, [Scalar.from_fraction(c)
                                   for c in coords[j]])
            if gam is None:
                return False
            row = [Q(0)] * p
            for idx, i in enumerate(s):
                row[i - 1] += gam[idx].as_fraction()
            row[j - 1] -= 1
            constraints.append(row)
    if not constraints:
        return True
    # feasibility of  C w >= margin  with w free:
    # w = u - v, u,v >= 0; slack t >= 0:  C(u - v) - t = margin
    m = len(constraints)
    A = []
    b = []
    margin = lp.MARGIN if not exact else Q(1)
    for k, row in enumerate(constraints):
        A.append(row + [-x for x in row] +
                 [Q(-1) if kk == k else Q(0) for kk in range(m)])
        b.append(margin)
    return lp.feasible(A, b)


def fan_properties(fan: QuantumFan, w: Witness) -> FanProperties:
    return FanProperties(
        irrational=gamma_rank(fan.gamma) > fan.dim,
        complete=_is_complete(fan),
        gamma_complete=_is_gamma_complete(fan),
        polytopal=_is_polytopal(fan, w),
    )


# ---------------------------------------------------------------------------
# combinatorial types
# ---------------------------------------------------------------------------

class CombType:
    """Number of rays plus the poset of cone index subsets."""

    def __init__(self, nrays: int, poset):
        self.nrays = nrays
        self.poset = _normalize_cones(poset)

    @staticmethod
    def of_fan(fan: QuantumFan) -> "CombType":
        return CombType(fan.nrays, fan.cones)

    def __eq__(self, other):
        return (isinstance(other, CombType) and self.nrays == other.nrays
                and self.poset == other.poset)

    def __repr__(self):
        cs = sorted((tuple(sorted(c)) for c in self.poset),
                    key=lambda t: (len(t), t))
        return f"CombType(p={self.nrays}, poset={cs})"

    def to_json(self):
        return {"p": self.nrays,
                "poset": sorted((sorted(c) for c in self.poset),
                                key=lambda t: (len(t), t))}

    def apply_permutation(self, perm) -> "CombType":
        return CombType(self.nrays,
                        [frozenset(perm[i] for i in c) for c in self.poset])

    def is_pseudomanifold(self) -> bool:
        """Combinatorial necessary condition for being the type of a
        complete fan: equidimensional maximal elements, every ridge in
        exactly two of them, ridge graph connected."""
        maxc = [c for c in self.poset if not any(c < d for d in self.poset)]
        maxc = [c for c in maxc if c]
        if not maxc:
            return False
        d = len(maxc[0])
        if any(len(c) != d for c in maxc):
            return False
        ridge: dict = {}
        for c in maxc:
            for i in c:
                ridge[c - {i}] = ridge.get(c - {i}, 0) + 1
        if any(v != 2 for v in ridge.values()):
            return False
        adj = {tuple(sorted(c)): set() for c in maxc}
        for f in ridge:
            touch = [c for c in maxc if f <= c]
            for c1, c2 in itertools.combinations(touch, 2):
                adj[tuple(sorted(c1))].add(tuple(sorted(c2)))
                adj[tuple(sorted(c2))].add(tuple(sorted(c1)))
        seen = set()
        stack = [next(iter(adj))]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(adj[cur])
        return len(seen) == len(adj)


def comb_type(fan: QuantumFan) -> CombType:
    return CombType.of_fan(fan)


def comb_equivalent(D: CombType, E: CombType) -> dict | None:
    """A bijection s of {1..p} with s(D) = E, as a dict i -> s(i);
    the lexicographically least one when several exist."""
    if D.nrays != E.nrays:
        return None
    p = D.nrays
    sizesD = sorted(len(c) for c in D.poset)
    sizesE = sorted(len(c) for c in E.poset)
    if sizesD != sizesE:
        return None

    def signature(ct: CombType):
        sig = {}
        for i in range(1, p + 1):
            counts = {}
            for c in ct.poset:
                if i in c:
                    counts[len(c)] = counts.get(len(c), 0) + 1
            sig[i] = tuple(sorted(counts.items()))
        return sig

    sigD, sigE = signature(D), signature(E)
    targetsE = E.poset

    def compatible(assign, i, j):
        # all fully-assigned cones through i must map into E's poset
        for c in D.poset:
            if i in c and all(k in assign or k == i for k in c):
                image = frozenset(assign.get(k, j) for k in c)
                if image not in targetsE:
                    return False
        return True

    def backtrack(assign, used, i):
        if i > p:
            inv_ok = all(
                frozenset(assign[k] for k in c) in targetsE for c in D.poset)
            if not inv_ok:
                return None
            # surjectivity on the poset (same cardinality => bijection)
            image = {frozenset(assign[k] for k in c) for c in D.poset}
            if len(image) != len(D.poset):
                return None
            return dict(assign)
        for j in range(1, p + 1):
            if j in used or sigD[i] != sigE[j]:
                continue
            assign[i] = j
            if compatible(assign, i, j):
                used.add(j)
                res = backtrack(assign, used, i + 1)
                if res is not None:
                    return res
                used.discard(j)
            del assign[i]
        return None

    return backtrack({}, set(), 1)


# ---------------------------------------------------------------------------
# standardization
# ---------------------------------------------------------------------------

def standardize_fan(fan: QuantumFan):
    """Standard form: the lexicographically first linearly independent
    subset of the rays is mapped to the canonical basis of the span,
    completed greedily by canonical vectors; returns (fan', L)."""
    d = fan.dim
    chosen = []
    chosen_cols = []
    for i in range(1, fan.nrays + 1):
        cand = chosen_cols + [fan.ray(i)]
        if rank(Matrix.from_columns(cand)) == len(cand):
            chosen.append(i)
            chosen_cols.append(fan.ray(i))
        if len(chosen) == d:
            break
    l = len(chosen)
    cols = list(chosen_cols)
    eye = Matrix.identity(d)
    for j in range(d):
        if len(cols) == d:
            break
        cand = cols + [eye.rows[j]]
        if rank(Matrix.from_columns(cand)) == len(cand):
            cols.append(eye.rows[j])
    B = Matrix.from_columns(cols)
    L = mat_inverse(B)
    new_rays = [L.apply(v) for v in fan.rays]
    new_gamma = fan.gamma.transform(L)
    return QuantumFan(new_gamma, new_rays, fan.cones), L


def d_realizable(rays, D: CombType, w: Witness,
                 gamma: QLattice | None = None) -> bool:
    """Do the vectors realize the combinatorial type D as a valid fan
    (complete when D is the type of a complete fan)?

    By default the q-lattice is the one generated by the standard basis
    and the given vectors."""
    if len(rays) != D.nrays:
        return False
    rays = [_vec(v) for v in rays]
    if gamma is None:
        d = len(rays[0]) if rays else 0
        eye = Matrix.identity(d)
        gamma = QLattice(d, [eye.rows[i] for i in range(d)] + list(rays))
    fan = QuantumFan(gamma, rays, D.poset)
    rep = validate_fan(fan, w)
    if not rep.valid:
        return False
    if D.is_pseudomanifold() and not _is_complete(fan):
        return False
    return True
