"""Moduli deciders: the GL_n(Z) action on calibrated-torus parameters,
2-dimensional continued-fraction equivalence, quantum-P2 orbits under S3,
weighted projective weights, Hopf lattice equivalence, and orbit
canonicalization for maximal-length calibrated tori."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .errors import (NotRational, NotUnimodular, OutOfDomain, OutOfZone,
                     SingularBlock, UnsupportedField)
from .linalg import Matrix, det, hnf, mat_inverse
from .scalars import Scalar, Sign, Witness, sign_at

Q = Fraction


# ---------------------------------------------------------------------------
# the GL_n(Z) action on hbar points
# ---------------------------------------------------------------------------

def _check_unimodular(H: Matrix):
    if not H.is_integer():
        raise NotUnimodular("H must have integer entries")
    d = det(H)
    if abs(d.as_fraction()) != 1:
        raise NotUnimodular("H must have determinant +-1")


def torus_act(hbar: Matrix, H: Matrix) -> Matrix:
    """(H1 + hbar H3)^{-1} (H2 + hbar H4) for the block split of H after
    row/column d; a right action on d x (n-d) parameter matrices."""
    d = hbar.nrows
    n = d + hbar.ncols
    if H.nrows != n or H.ncols != n:
        raise ValueError("H must be n x n")
    _check_unimodular(H)
    H1 = Matrix([r[:d] for r in H.rows[:d]])
    H2 = Matrix([r[d:] for r in H.rows[:d]])
    H3 = Matrix([r[:d] for r in H.rows[d:]])
    H4 = Matrix([r[d:] for r in H.rows[d:]])
    lead = H1 + hbar * H3
    if det(lead).is_zero():
        raise SingularBlock("H1 + hbar*H3 is singular")
    return mat_inverse(lead) * (H2 + hbar * H4)


# ---------------------------------------------------------------------------
# quadratic numbers and continued fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quad:
    """u + v*sqrt(D) with rational u, v and squarefree-ish integer payload
    (P + sqrt(N))/Q with Q | N - P^2 for the continued-fraction walk."""
    u: Fraction
    v: Fraction
    D: Fraction  # 0 for rationals

    def is_rational(self):
        return self.v == 0

    def value_floor(self):
        if self.v == 0:
            return self.u.numerator // self.u.denominator
        # floor(u + sign(v) * sqrt(v^2 D)) by refining an isqrt bracket;
        # exact because u + v sqrt(D) is irrational when v != 0
        w = self.v * self.v * self.D
        s = 1 if self.v > 0 else -1
        p, q = w.numerator, w.denominator
        bits = 64
        while True:
            scale = 1 << bits
            nint = isqrt(p * q * scale * scale)
            slo = Q(nint, q * scale)
            shi = Q(nint + 1, q * scale)
            xlo = self.u + (slo if s > 0 else -shi)
            xhi = self.u + (shi if s > 0 else -slo)
            if xlo.__floor__() == xhi.__floor__():
                return xlo.__floor__()
            bits *= 2
            if bits > 1 << 16:
                raise UnsupportedField("floor did not stabilize")

    def __sub__(self, k: int):
        return Quad(self.u - k, self.v, self.D)

    def inverse(self):
        den = self.u * self.u - self.v * self.v * self.D
        if den == 0:
            raise ZeroDivisionError("inverse of zero quadratic")
        return Quad(self.u / den, -self.v / den, self.D)

    def key(self):
        return (self.u, self.v, self.D)

    def _common_D(self, other: "Quad"):
        if self.D == other.D or other.v == 0:
            return self.D
        if self.v == 0:
            return other.D
        raise UnsupportedField("mixed quadratic fields")

    def add(self, other: "Quad") -> "Quad":
        return Quad(self.u + other.u, self.v + other.v,
                    self._common_D(other))

    def mul(self, other: "Quad") -> "Quad":
        D = self._common_D(other)
        return Quad(self.u * other.u + self.v * other.v * D,
                    self.u * other.v + self.v * other.u, D)

    def div(self, other: "Quad") -> "Quad":
        D = self._common_D(other)
        den = other.u * other.u - other.v * other.v * D
        if den == 0:
            raise ZeroDivisionError("division by zero quadratic")
        conj = Quad(other.u / den, -other.v / den, D)
        return self.mul(conj)

    def equals_value(self, other: "Quad") -> bool:
        if self.v == 0 and other.v == 0:
            return self.u == other.u
        return (self.u == other.u and self.v == other.v
                and self.D == other.D)


def _squarefree_core(n: int):
    """(s, c) with n = s^2 * c and c squarefree (trial division)."""
    s, c = 1, 1
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            s *= d ** (e // 2)
            if e % 2:
                c *= d
        d += 1
    return s, c * n


def scalar_to_quad(x: Scalar) -> Quad:
    """Interpret a constant scalar of the supported field as u + v sqrt(D)
    with D a squarefree integer (so equal values get equal keys);
    raises UnsupportedField for anything else."""
    x = Scalar.coerce(x)
    params = x.params
    quad = [p for p in params.values() if p.kind == "quadratic"]
    trans = [p for p in params.values() if p.kind == "transcendental"]
    if trans or len(quad) > 1:
        raise UnsupportedField(
            "2d equivalence supports rational and quadratic scalars only")
    if not quad:
        return Quad(x.as_fraction(), Q(0), Q(0))
    p = quad[0]
    coeffs = x.affine_coefficients([p.name])
    u, v = coeffs[0], coeffs[1]
    if v == 0:
        return Quad(u, Q(0), Q(0))
    # v sqrt(p/q) = (v/q) sqrt(pq); pull the square part out of pq
    D = p.D
    s, core = _squarefree_core(D.numerator * D.denominator)
    return Quad(u, v * s / D.denominator, Q(core))


def continued_fraction_walk(x: Quad, max_steps=512):
    """Complete quotients (as Quad keys) and convergent matrices of the
    continued fraction of x; stops at the first repeated complete quotient.

    Returns (states, mats) with states[k] the k-th complete quotient and
    mats[k] the matrix M with x = M . states[k] (Moebius action)."""
    states = [x]
    mats = [((1, 0), (0, 1))]
    seen = {x.key(): 0}
    cur = x
    M = ((1, 0), (0, 1))
    for _ in range(max_steps):
        k = cur.value_floor()
        frac = cur - k
        if frac.is_rational() and frac.u == 0:
            return states, mats, None
        nxt = frac.inverse()
        # x = M . cur, cur = k + 1/nxt: new M' = M * [[k,1],[1,0]]
        (a, bb), (c, d) = M
        M = ((a * k + bb, a), (c * k + d, c))
        cur = nxt
        if cur.key() in seen:
            return states, mats + [M], seen[cur.key()]
        seen[cur.key()] = len(states)
        states.append(cur)
        mats.append(M)
    raise UnsupportedField("continued fraction did not cycle")


def _moebius_to_H(mat):
    """Moebius matrix [[alpha,beta],[gamma,delta]] (x -> (a x + b)/(c x + d))
    to the action convention H = [[p,r],[q,s]], a.H = (r + s a)/(p + q a)."""
    (alpha, beta), (gamma, delta) = mat
    return Matrix([[delta, beta], [gamma, alpha]])


def _mat_mul2(m1, m2):
    (a, b), (c, d) = m1
    (e, f), (g, h) = m2
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def _mat_adj2(m):
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


def act_2d(a_scalar: Scalar, H: Matrix) -> Scalar:
    """a . H = (r + s a)/(p + q a) for H = [[p, r], [q, s]]."""
    _check_unimodular(H)
    p, r = H.rows[0]
    q, s = H.rows[1]
    a = Scalar.coerce(a_scalar)
    denominator = p + q * a
    if denominator.is_zero():
        raise SingularBlock("p + q a vanishes")
    return (r + s * a) / denominator


def act_2d_quad(a: Quad, H: Matrix) -> Quad:
    """The same action on normalized quadratic values (used to verify
    witnesses across different discriminant representations)."""
    p, r = (x.as_fraction() for x in H.rows[0])
    q, s = (x.as_fraction() for x in H.rows[1])
    num = Quad(r, Q(0), a.D).add(Quad(s, Q(0), a.D).mul(a))
    den = Quad(p, Q(0), a.D).add(Quad(q, Q(0), a.D).mul(a))
    return num.div(den)


def torus_equiv_2d(a, b) -> Matrix | None:
    """GL_2(Z) equivalence of two scalars under the standard action:
    rationals are all equivalent (via 0, Bezout); quadratic irrationals are
    equivalent iff their continued fractions share a complete quotient;
    mixed cases are inequivalent.  Returns a witnessing H or None."""
    qa, qb = scalar_to_quad(a), scalar_to_quad(b)
    if qa.is_rational() != qb.is_rational():
        return None
    if qa.is_rational():
        Ha = _bezout_to_zero(qa.u)
        Hb = _bezout_to_zero(qb.u)
        # a . Ha = 0 and b . Hb = 0, so H = Ha Hb^{-1} sends a to b
        Hbinv = _int_inverse_2x2(Hb)
        return _mat_to_matrix(_mat_mul_entries(Ha, Hbinv))
    if qa.D != qb.D:
        return None
    sa, ma, loop_a = continued_fraction_walk(qa)
    sb, mb, loop_b = continued_fraction_walk(qb)
    if loop_a is None or loop_b is None:
        return None
    keys_b = {s.key(): k for k, s in enumerate(sb)}
    for ia, st in enumerate(sa):
        hit = keys_b.get(st.key())
        if hit is not None:
            # a = Ma . t, b = Mb . t  =>  b = Mb Ma^{-1} . a
            Ma, Mb = ma[ia], mb[hit]
            W = _mat_mul2(Mb, _mat_adj2(Ma))
            H = _moebius_to_H(W)
            assert act_2d_quad(qa, H).equals_value(qb)
            return H
    return None


def _bezout_to_zero(a: Fraction):
    """H with a . H = 0: for a = p/q reduced, ps + rq = 1 gives
    H = [[r, -p], [s, q]]."""
    p, q = a.numerator, a.denominator
    if p == 0:
        return ((1, 0), (0, 1))
    g, r, s = _xgcd(q, p)
    assert g == 1
    # r*q + s*p = 1
    return ((r, -p), (s, q))


def _xgcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def _int_inverse_2x2(m):
    (a, b), (c, d) = m
    dt = a * d - b * c
    assert abs(dt) == 1
    return ((d * dt, -b * dt), (-c * dt, a * dt))


def _mat_mul_entries(m1, m2):
    return _mat_mul2(m1, m2)


def _mat_to_matrix(m):
    return Matrix([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])


# ---------------------------------------------------------------------------
# quantum P2 orbits
# ---------------------------------------------------------------------------

@dataclass
class OrbitReport:
    canonical: object
    witnesses: dict = field(default_factory=dict)
    isotropy: str = "trivial"
    orbit: list = field(default_factory=list)
    heuristic: bool = False

    def to_json(self):
        out = {"canonical": _jsonable(self.canonical),
               "isotropy": self.isotropy,
               "orbit": [_jsonable(x) for x in self.orbit]}
        if self.witnesses:
            out["witnesses"] = {k: _jsonable(v)
                                for k, v in self.witnesses.items()}
        if self.heuristic:
            out["heuristic"] = True
        return out


def _jsonable(x):
    if isinstance(x, Matrix):
        return [[str(v) for v in r] for r in x.rows]
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    return str(x)


def p2_sigma(ab):
    a, b = ab
    return (b, a)


def p2_tau(ab):
    a, b = ab
    return (Scalar.one() / b, -a / b)


def p2_orbit(a, b, w: Witness) -> OrbitReport:
    """S3 orbit of (a, b) under sigma(a,b) = (b,a), tau(a,b) = (1/b, -a/b);
    canonical representative = lexicographically least canonical-string
    pair; isotropy per the classification (full S3 only at (-1,-1), Z2 on
    the three reflection loci)."""
    a, b = Scalar.coerce(a), Scalar.coerce(b)
    for x in (a, b):
        if x.is_zero() or sign_at(x, w) is not Sign.NEGATIVE:
            raise OutOfDomain("p2 moduli chart needs a < 0 and b < 0")
    pt = (a, b)
    words = {
        "id": lambda p: p,
        "sigma": p2_sigma,
        "tau": p2_tau,
        "tau2": lambda p: p2_tau(p2_tau(p)),
        "sigma.tau": lambda p: p2_sigma(p2_tau(p)),
        "tau.sigma": lambda p: p2_tau(p2_sigma(p)),
    }
    images = {name: f(pt) for name, f in words.items()}
    distinct = []
    for name, q in images.items():
        if not any(_pair_eq(q, r) for _, r in distinct):
            distinct.append((name, q))
    canonical = min((q for _, q in distinct),
                    key=lambda q: (str(q[0]), str(q[1])))
    minus_one = Scalar.from_fraction(-1)
    if _pair_eq(pt, (minus_one, minus_one)):
        isotropy = "S3"
    elif (a - b).is_zero():
        isotropy = "Z2(sigma)"
    elif (b - minus_one).is_zero():
        isotropy = "Z2(sigma.tau)"
    elif (a - minus_one).is_zero():
        isotropy = "Z2(tau.sigma)"
    else:
        isotropy = "trivial"
    wit = {name: q for name, q in images.items()
           if _pair_eq(q, canonical)}
    return OrbitReport(canonical=canonical,
                       witnesses={k: v for k, v in wit.items()},
                       isotropy=isotropy,
                       orbit=[q for _, q in distinct])


def _pair_eq(p, q):
    return (p[0] - q[0]).is_zero() and (p[1] - q[1]).is_zero()


# ---------------------------------------------------------------------------
# weighted projective weights
# ---------------------------------------------------------------------------

def wps_weights(a, b) -> tuple:
    """Weights of the weighted projective space for negative rationals
    a, b: with |a| = p/q and |b| = r/s reduced,
    alpha = lcm(q, s), beta = lcm(sp/gcd(sp, qr), p),
    gamma = lcm(qr/gcd(sp, qr), r)."""
    a, b = Scalar.coerce(a), Scalar.coerce(b)
    if not (a.is_rational() and b.is_rational()):
        raise NotRational("weights need rational a and b")
    fa, fb = a.as_fraction(), b.as_fraction()
    if fa >= 0 or fb >= 0:
        raise OutOfDomain("weights need a < 0 and b < 0")
    p, q = abs(fa.numerator), fa.denominator
    r, s = abs(fb.numerator), fb.denominator
    alpha = _lcm(q, s)
    g = gcd(s * p, q * r)
    beta = _lcm(s * p // g, p)
    gamma = _lcm(q * r // g, r)
    return alpha, beta, gamma


def wps_weights_chart_oracle(a, b) -> tuple:
    """Independent oracle: per chart, the minimal positive integer t with
    t * (chart hbar vector) integral; chart vectors (a,b), (-b/a, 1/a),
    (1/b, -a/b) in chart order."""
    fa = Scalar.coerce(a).as_fraction()
    fb = Scalar.coerce(b).as_fraction()
    charts = [(fa, fb), (-fb / fa, 1 / fa), (1 / fb, -fa / fb)]
    out = []
    for u, v in charts:
        out.append(_lcm(u.denominator, v.denominator))
    return tuple(out)


def _lcm(x, y):
    return x * y // gcd(x, y)


# ---------------------------------------------------------------------------
# Hopf surface equivalence
# ---------------------------------------------------------------------------

def _is_real_integer(z) -> bool:
    """A complex scalar pair (re, im) is a (real) integer point of the
    lattice."""
    re, im = z
    return im.is_zero() and re.is_integer()


def hopf_zone_check(pair, w: Witness) -> int:
    """Both parameters on the same side of the line Im z = 1; returns the
    side (+1/-1) or raises OutOfZone."""
    sides = []
    for (re, im) in pair:
        s = sign_at(im - 1, w)
        if s is Sign.ZERO:
            raise OutOfZone("Im lambda = 1")
        sides.append(1 if s is Sign.POSITIVE else -1)
    if sides[0] != sides[1]:
        raise OutOfZone("parameters on opposite sides of Im z = 1")
    return sides[0]


def hopf_equiv(pair1, pair2, w: Witness) -> dict:
    """Equivalence of Hopf parameters (lambda3, lambda4): equal up to the
    integer lattice Z + Z (componentwise real integers) directly or after
    switching; isotropy Z2 iff lambda4 - lambda3 is an integer."""
    p1 = [tuple(Scalar.coerce(x) for x in z) for z in pair1]
    p2 = [tuple(Scalar.coerce(x) for x in z) for z in pair2]
    hopf_zone_check(p1, w)
    hopf_zone_check(p2, w)

    def diff(z1, z2):
        return (z1[0] - z2[0], z1[1] - z2[1])

    direct = (_is_real_integer(diff(p2[0], p1[0])) and
              _is_real_integer(diff(p2[1], p1[1])))
    switched = (_is_real_integer(diff(p2[0], p1[1])) and
                _is_real_integer(diff(p2[1], p1[0])))
    iso1 = _is_real_integer(diff(p1[1], p1[0]))
    out = {"equivalent": direct or switched,
           "isotropy": "Z2" if iso1 else "trivial"}
    if direct:
        out["witness"] = {"kind": "direct",
                          "shift": [str(x) for z in
                                    (diff(p2[0], p1[0]), diff(p2[1], p1[1]))
                                    for x in z]}
    elif switched:
        out["witness"] = {"kind": "switched",
                          "shift": [str(x) for z in
                                    (diff(p2[0], p1[1]), diff(p2[1], p1[0]))
                                    for x in z]}
    return out


# ---------------------------------------------------------------------------
# canonicalization of maximal-length calibrated tori
# ---------------------------------------------------------------------------

def _hbar_denominator_lcm(hbar: Matrix) -> int:
    L = 1
    for r in hbar.rows:
        for x in r:
            L = _lcm(L, x.as_fraction().denominator)
    return L


def _marked_canonical_rational(hbar: Matrix):
    """Left-GL_d(Z) canonical form of a rational matrix: HNF of the
    cleared-denominator matrix, divided back."""
    L = _hbar_denominator_lcm(hbar)
    introws = [[int(x.as_fraction() * L) for x in r] for r in hbar.rows]
    H, U = hnf(introws)
    rows = [[Q(v, L) for v in r] for r in H]
    return Matrix([[Scalar.from_fraction(x) for x in r] for r in rows]), U


def cal_torus_orbit_maximal(hbar: Matrix, mode: str = "full",
                            bound: int = 2) -> OrbitReport:
    """Canonical representative of hbar under hbar -> H1^{-1} hbar s
    (full mode: H1 in GL_d(Z) and s a column permutation; marked mode:
    s = id).  Exact HNF canonicalization for rational entries; bounded
    search (reported heuristic) for parametric ones."""
    if mode not in ("full", "marked"):
        raise ValueError("mode must be 'full' or 'marked'")
    d, k = hbar.nrows, hbar.ncols
    rational = all(x.is_rational() for r in hbar.rows for x in r)
    if rational:
        if mode == "marked":
            canon, U = _marked_canonical_rational(hbar)
            iso = _rational_isotropy(hbar, [tuple(range(k))])
            return OrbitReport(canonical=canon,
                               witnesses={"H1_inverse": Matrix(U)},
                               isotropy=iso, orbit=[canon])
        best = None
        best_perm = None
        best_U = None
        for perm in itertools.permutations(range(k)):
            permuted = Matrix([[hbar.rows[i][j] for j in perm]
                               for i in range(d)])
            canon, U = _marked_canonical_rational(permuted)
            key = [[str(x) for x in r] for r in canon.rows]
            if best is None or key < best[0]:
                best = (key, canon)
                best_perm = perm
                best_U = U
        iso = _rational_isotropy(hbar, list(itertools.permutations(range(k))))
        return OrbitReport(canonical=best[1],
                           witnesses={"H1_inverse": Matrix(best_U),
                                      "s": list(best_perm)},
                           isotropy=iso, orbit=[best[1]])
    # parametric: bounded enumeration over small unimodular H1 and perms
    perms = [tuple(range(k))] if mode == "marked" else \
        list(itertools.permutations(range(k)))
    candidates = []
    for H1 in _small_unimodular(d, bound):
        H1inv = mat_inverse(H1)
        for perm in perms:
            img = H1inv * Matrix([[hbar.rows[i][j] for j in perm]
                                  for i in range(d)])
            candidates.append((tuple(str(x) for r in img.rows for x in r),
                               img, H1, perm))
    candidates.sort(key=lambda t: t[0])
    _, canon, H1, perm = candidates[0]
    return OrbitReport(canonical=canon,
                       witnesses={"H1": H1, "s": list(perm)},
                       isotropy="unknown (heuristic)", orbit=[canon],
                       heuristic=True)


def _rational_isotropy(hbar: Matrix, perms) -> str:
    """Column permutations s admitting H1 with H1^{-1} hbar s = hbar,
    detected by equality of marked canonical forms."""
    d, k = hbar.nrows, hbar.ncols
    base, _ = _marked_canonical_rational(hbar)
    stab = []
    for perm in perms:
        permuted = Matrix([[hbar.rows[i][j] for j in perm]
                           for i in range(d)])
        canon, _ = _marked_canonical_rational(permuted)
        if canon == base:
            stab.append(perm)
    ident = tuple(range(k))
    nontrivial = [p for p in stab if p != ident]
    if not nontrivial:
        return "trivial"
    return "permutations:" + ";".join(str(list(p)) for p in sorted(stab))


def _small_unimodular(d: int, bound: int):
    """All d x d integer matrices with entries in [-bound, bound] and
    determinant +-1 (d <= 2 enumerated exhaustively; d >= 3 uses
    elementary generators products)."""
    out = []
    if d == 1:
        return [Matrix([[1]]), Matrix([[-1]])]
    if d == 2:
        rng = range(-bound, bound + 1)
        for a in rng:
            for b in rng:
                for c in rng:
                    for e in rng:
                        if a * e - b * c in (1, -1):
                            out.append(Matrix([[a, b], [c, e]]))
        return out
    # products of <= 2 elementary matrices
    gens = []
    eye = Matrix.identity(d)
    gens.append(eye)
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            for v in (1, -1):
                E = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
                E[i][j] = v
                gens.append(Matrix(E))
    seen = set()
    for g1 in gens:
        for g2 in gens:
            M = g1 * g2
            key = tuple(int(x.as_fraction()) for r in M.rows for x in r)
            if key not in seen:
                seen.add(key)
                out.append(M)
    return out
