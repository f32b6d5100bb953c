"""Exact scalar field: fractions of polynomials over Q in declared real
parameters.

Parameters are transcendental by default; a parameter may instead be
quadratic, i.e. carry the minimal relation t^2 = D for a positive
non-square rational D.  Scalars are kept in canonical form (coprime
numerator/denominator, denominator free of quadratic parameters and monic
under the lexicographic order), so equality is structural.

Sign decisions are made against a Witness: an assignment of exact rational
values to transcendental parameters and of a root choice to quadratic ones,
certified by interval evaluation at a growing precision.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from math import isqrt

from .errors import Indeterminate, UnsupportedEntries

Q = Fraction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to a rational")


class Parameter:
    """A declared real parameter, transcendental or quadratic (t^2 = D)."""

    __slots__ = ("name", "kind", "D")

    def __init__(self, name: str, kind: str = "transcendental", D=None):
        if kind not in ("transcendental", "quadratic"):
            raise ValueError(f"unknown parameter kind {kind!r}")
        if kind == "quadratic":
            D = _as_fraction(D)
            if D <= 0:
                raise ValueError("quadratic discriminant must be positive")
            if _is_square(D):
                raise ValueError("quadratic discriminant must be a non-square")
        elif D is not None:
            raise ValueError("only quadratic parameters carry a discriminant")
        self.name = name
        self.kind = kind
        self.D = D

    def __repr__(self):
        if self.kind == "quadratic":
            return f"Parameter({self.name!r}, quadratic, D={self.D})"
        return f"Parameter({self.name!r})"

    def __eq__(self, other):
        return (isinstance(other, Parameter) and self.name == other.name
                and self.kind == other.kind and self.D == other.D)

    def __hash__(self):
        return hash((self.name, self.kind, self.D))


def _is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    return isqrt(q.numerator) ** 2 == q.numerator and \
        isqrt(q.denominator) ** 2 == q.denominator


# ---------------------------------------------------------------------------
# polynomials
#
# A monomial is a tuple of (name, exponent) pairs sorted by name with all
# exponents positive; the empty tuple is the constant monomial.  Terms map
# monomials to nonzero Fractions.  Quadratic parameters are reduced on the
# fly (t^k -> D^(k//2) * t^(k%2)) so their degree never reaches 2.
# ---------------------------------------------------------------------------

_ONE_MONO = ()


def _merge_params(a: dict, b: dict) -> dict:
    if not b:
        return a
    if not a:
        return b
    out = dict(a)
    for name, p in b.items():
        q = out.get(name)
        if q is None:
            out[name] = p
        elif q != p:
            raise ValueError(f"conflicting declarations for parameter {name!r}")
    return out


class Poly:
    """Multivariate polynomial over Q in the declared parameters."""

    __slots__ = ("terms", "params")

    def __init__(self, terms: dict, params: dict):
        self.terms = terms
        self.params = params

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(c, params=None) -> "Poly":
        c = _as_fraction(c)
        return Poly({} if c == 0 else {_ONE_MONO: c}, params or {})

    @staticmethod
    def var(p: Parameter) -> "Poly":
        return Poly({((p.name, 1),): Q(1)}, {p.name: p})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Q(0)
        return self.terms[_ONE_MONO]

    def variables(self) -> set:
        out = set()
        for mono in self.terms:
            for name, _ in mono:
                out.add(name)
        return out

    def has_quadratic(self) -> bool:
        return any(self.params[v].kind == "quadratic" for v in self.variables())

    # -- arithmetic ---------------------------------------------------------

    def _reduce_mono(self, mono):
        """Reduce quadratic exponents; returns (factor, reduced monomial)."""
        factor = Q(1)
        out = []
        for name, e in mono:
            p = self.params.get(name)
            if p is not None and p.kind == "quadratic" and e >= 2:
                factor *= p.D ** (e // 2)
                e = e % 2
            if e:
                out.append((name, e))
        return factor, tuple(out)

    def __add__(self, other: "Poly") -> "Poly":
        params = _merge_params(self.params, other.params)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            s = terms.get(mono, Q(0)) + c
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)
        return Poly(terms, params)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, self.params)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        params = _merge_params(self.params, other.params)
        terms: dict = {}
        tmp = Poly({}, params)
        for m1, c1 in self.terms.items():
            d1 = dict(m1)
            for m2, c2 in other.terms.items():
                merged = dict(d1)
                for name, e in m2:
                    merged[name] = merged.get(name, 0) + e
                mono = tuple(sorted(merged.items()))
                factor, mono = tmp._reduce_mono(mono)
                c = c1 * c2 * factor
                s = terms.get(mono, Q(0)) + c
                if s:
                    terms[mono] = s
                else:
                    terms.pop(mono, None)
        return Poly(terms, params)

    def scale(self, c) -> "Poly":
        c = _as_fraction(c)
        if c == 0:
            return Poly({}, self.params)
        return Poly({m: c * v for m, v in self.terms.items()}, self.params)

    # -- lex order helpers --------------------------------------------------

    def _vorder(self):
        return sorted(self.variables())

    def _key(self, mono, vorder):
        d = dict(mono)
        return tuple(d.get(v, 0) for v in vorder)

    def leading(self, vorder=None):
        """Leading (monomial, coefficient) under lex order."""
        if not self.terms:
            return _ONE_MONO, Q(0)
        if vorder is None:
            vorder = self._vorder()
        mono = max(self.terms, key=lambda m: self._key(m, vorder))
        return mono, self.terms[mono]

    def leading_coeff(self) -> Fraction:
        return self.leading()[1]

    # -- display ------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        vorder = self._vorder()
        monos = sorted(self.terms, key=lambda m: self._key(m, vorder), reverse=True)
        parts = []
        for mono in monos:
            c = self.terms[mono]
            factors = []
            for name, e in mono:
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += sign + body
        return out

    __repr__ = __str__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))


# -- gcd over the transcendental variables ----------------------------------

def _content(polys):
    """gcd of a list of transcendental-only polynomials."""
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else _gcd2(g, p)
        if g.is_const():
            break
    if g is None:
        return None
    return _monic(g)


def _monic(p: Poly) -> Poly:
    lc = p.leading_coeff()
    if lc == 0 or lc == 1:
        return p
    return p.scale(Q(1) / lc)


def _to_univariate(p: Poly, v: str):
    """Coefficients of p in the variable v, low to high degree."""
    coeffs: dict = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        e = d.pop(v, 0)
        rest = tuple(sorted(d.items()))
        coeffs.setdefault(e, {})[rest] = coeffs.setdefault(e, {}).get(rest, Q(0)) + c
    deg = max(coeffs) if coeffs else 0
    out = []
    for e in range(deg + 1):
        out.append(Poly({m: c for m, c in coeffs.get(e, {}).items() if c}, p.params))
    return out


def _from_univariate(coeffs, v: str, params) -> Poly:
    out = Poly({}, params)
    xe = Poly.const(1, params)
    x = Poly.var(params[v])
    for e, c in enumerate(coeffs):
        if not c.is_zero():
            out = out + (c * xe)
        if e < len(coeffs) - 1:
            xe = xe * x
    return out


def _udeg(u):
    d = len(u) - 1
    while d >= 0 and u[d].is_zero():
        d -= 1
    return d


def _gcd2(a: Poly, b: Poly) -> Poly:
    """gcd of two nonzero polynomials in transcendental variables only."""
    avars = a.variables() | b.variables()
    if not avars:
        return Poly.const(1, _merge_params(a.params, b.params))
    if a.is_const() or b.is_const():
        return Poly.const(1, _merge_params(a.params, b.params))
    v = sorted(avars)[0]
    params = _merge_params(a.params, b.params)
    A = _to_univariate(a, v)
    B = _to_univariate(b, v)
    ca = _content([c for c in A if not c.is_zero()]) or Poly.const(1, params)
    cb = _content([c for c in B if not c.is_zero()]) or Poly.const(1, params)
    A = [poly_divexact(c, ca) for c in A]
    B = [poly_divexact(c, cb) for c in B]
    cont = _gcd2(ca, cb) if not (ca.is_const() and cb.is_const()) else Poly.const(1, params)
    # primitive PRS
    while True:
        da, db = _udeg(A), _udeg(B)
        if db < 0:
            break
        if da < db:
            A, B = B, A
            continue
        R = _pseudo_rem(A, B, params)
        A = B
        B = R
        dr = _udeg(B)
        if dr >= 0:
            cr = _content([c for c in B[: dr + 1] if not c.is_zero()])
            if cr is not None and not cr.is_const():
                B = [poly_divexact(c, cr) if not c.is_zero() else c for c in B]
    da = _udeg(A)
    prim = _from_univariate(A[: da + 1], v, params) if da >= 0 else Poly.const(1, params)
    cg = _content([c for c in A[: da + 1] if not c.is_zero()])
    if cg is not None and not cg.is_const():
        prim = poly_divexact(prim, cg)
    return _monic(cont * prim)


def _pseudo_rem(A, B, params):
    """Pseudo-remainder of univariate polynomial lists (Poly coefficients)."""
    da, db = _udeg(A), _udeg(B)
    lb = B[db]
    R = list(A[: da + 1])
    while True:
        dr = _udeg(R)
        if dr < db:
            break
        lr = R[dr]
        R = [c * lb for c in R]
        shift = dr - db
        for i in range(db + 1):
            R[i + shift] = R[i + shift] - lr * B[i]
    return R


def poly_gcd(a: Poly, b: Poly) -> Poly:
    if a.is_zero():
        return _monic(b) if not b.is_zero() else Poly.const(1, b.params)
    if b.is_zero():
        return _monic(a)
    return _gcd2(a, b)


def poly_divexact(a: Poly, b: Poly) -> Poly:
    """Exact division a / b; b must divide a (b transcendental-only)."""
    if b.is_const():
        return a.scale(Q(1) / b.const_value())
    params = _merge_params(a.params, b.params)
    vorder = sorted(a.variables() | b.variables())
    rem = Poly(dict(a.terms), params)
    bmono, bc = b.leading(vorder)
    bdict = dict(bmono)
    out: dict = {}
    while not rem.is_zero():
        rmono, rc = rem.leading(vorder)
        rdict = dict(rmono)
        qdict = {}
        ok = True
        for name, e in bdict.items():
            if rdict.get(name, 0) < e:
                ok = False
                break
        if not ok:
            raise ArithmeticError("poly_divexact: not divisible")
        for name, e in rdict.items():
            q = e - bdict.get(name, 0)
            if q:
                qdict[name] = q
        qmono = tuple(sorted(qdict.items()))
        qc = rc / bc
        out[qmono] = out.get(qmono, Q(0)) + qc
        rem = rem - Poly({qmono: qc}, params) * b
    return Poly({m: c for m, c in out.items() if c}, params)


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

class Scalar:
    """Canonical fraction of two polynomials over Q in the declared
    parameters.  Immutable; equality is canonical-form equality."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly, _canonical=False):
        if den.is_zero():
            raise ZeroDivisionError("scalar with zero denominator")
        if _canonical:
            self.num = num
            self.den = den
            return
        num, den = _canonicalize(num, den)
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_fraction(c, params=None) -> "Scalar":
        c = _as_fraction(c)
        p = params or {}
        return Scalar(Poly.const(c, p), Poly.const(1, p), _canonical=True)

    @staticmethod
    def of_param(p: Parameter) -> "Scalar":
        return Scalar(Poly.var(p), Poly.const(1, {p.name: p}), _canonical=True)

    @staticmethod
    def zero() -> "Scalar":
        return _ZERO

    @staticmethod
    def one() -> "Scalar":
        return _ONE

    # -- coercion ------------------------------------------------------------

    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, Parameter):
            return Scalar.of_param(x)
        return Scalar.from_fraction(x)

    @property
    def params(self) -> dict:
        return _merge_params(self.num.params, self.den.params)

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_rational(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise UnsupportedEntries(f"{self} is not rational")
        return self.num.const_value() / self.den.const_value()

    def is_integer(self) -> bool:
        return self.is_rational() and self.as_fraction().denominator == 1

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = Scalar.coerce(other)
        return Scalar(self.num * other.den + other.num * self.den,
                      self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other):
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other):
        other = Scalar.coerce(other)
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Scalar.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("scalar division by zero")
        return Scalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return Scalar.one() / self ** (-e)
        out = Scalar.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.from_fraction(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- display -------------------------------------------------------------

    def __str__(self):
        if self.den.is_const() and self.den.const_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return str(self)

    def sort_key(self):
        """Deterministic total order key (canonical string)."""
        return str(self)

    # -- affine-linear coefficient extraction ---------------------------------

    def affine_coefficients(self, names) -> list:
        """Coefficients of this scalar in the basis (1, *names).

        Requires the scalar to be an affine-linear combination of 1 and the
        listed parameters with rational coefficients; raises
        UnsupportedEntries otherwise.
        """
        if not self.den.is_const():
            raise UnsupportedEntries(f"{self}: non-constant denominator")
        d = self.den.const_value()
        idx = {n: i + 1 for i, n in enumerate(names)}
        out = [Q(0)] * (len(names) + 1)
        for mono, c in self.num.terms.items():
            if mono == _ONE_MONO:
                out[0] += c / d
            elif len(mono) == 1 and mono[0][1] == 1 and mono[0][0] in idx:
                out[idx[mono[0][0]]] += c / d
            else:
                raise UnsupportedEntries(
                    f"{self}: entry not affine-linear in the parameters")
        return out


def _canonicalize(num: Poly, den: Poly):
    params = _merge_params(num.params, den.params)
    if num.is_zero():
        return Poly({}, params), Poly.const(1, params)
    # clear quadratic parameters from the denominator by conjugation
    while den.has_quadratic():
        qv = sorted(v for v in den.variables()
                    if params[v].kind == "quadratic")[0]
        u = _to_univariate(den, qv)
        p0 = u[0]
        p1 = u[1] if len(u) > 1 else Poly({}, params)
        t = Poly.var(params[qv])
        conj = p0 - p1 * t
        num = num * conj
        den = den * conj
        if den.has_quadratic() and qv in den.variables():
            raise ArithmeticError("conjugation failed to clear quadratic")
        if num.is_zero():
            return Poly({}, params), Poly.const(1, params)
    # divide by gcd of den with the transcendental coefficients of num
    qvars = sorted(v for v in num.variables() if params[v].kind == "quadratic")
    pieces = [num]
    for qv in qvars:
        nxt = []
        for p in pieces:
            nxt.extend(_to_univariate(p, qv))
        pieces = [p for p in nxt if not p.is_zero()]
    g = den
    for p in pieces:
        g = poly_gcd(g, p)
        if g.is_const():
            break
    if not g.is_const():
        num = poly_divexact(num, g)
        den = poly_divexact(den, g)
    lc = den.leading_coeff()
    if lc != 1:
        num = num.scale(Q(1) / lc)
        den = den.scale(Q(1) / lc)
    return num, den


_ZERO = Scalar(Poly.const(0, {}), Poly.const(1, {}), _canonical=True)
_ONE = Scalar(Poly.const(1, {}), Poly.const(1, {}), _canonical=True)


# ---------------------------------------------------------------------------
# witnesses and signs
# ---------------------------------------------------------------------------

class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _sqrt_enclosure(D: Fraction, bits: int):
    """Rational enclosure [lo, hi] of sqrt(D) with hi - lo <= 2^(1-bits)."""
    scale = 1 << bits
    n = isqrt(D.numerator * D.denominator * scale * scale)
    den = D.denominator * scale
    return Q(n, den), Q(n + 1, den)


class Witness:
    """Exact rational values for transcendental parameters and root choices
    for quadratic ones; used only for sign and feasibility decisions.

    The parameters are declared Q-linearly independent together with 1
    (a promise by the caller, used by the integer-lattice routines)."""

    def __init__(self, values: dict, precision: int = 128, cap: int = 4096):
        self.values = {}
        for p, v in values.items():
            if not isinstance(p, Parameter):
                raise TypeError("witness keys must be Parameters")
            if p.kind == "quadratic":
                sign = 1 if _as_fraction(v) >= 0 else -1
                self.values[p.name] = (p, sign)
            else:
                self.values[p.name] = (p, _as_fraction(v))
        self.precision = precision
        self.cap = cap

    def _interval(self, name: str, bits: int):
        p, v = self.values[name]
        if p.kind == "quadratic":
            lo, hi = _sqrt_enclosure(p.D, bits)
            return (lo, hi) if v > 0 else (-hi, -lo)
        return (v, v)

    def covers(self, s: Scalar) -> bool:
        return all(n in self.values for n in s.params)

    def _eval_poly(self, poly: Poly, bits: int):
        lo, hi = Q(0), Q(0)
        for mono, c in poly.terms.items():
            tlo, thi = Q(c), Q(c)
            for name, e in mono:
                if name not in self.values:
                    raise UnsupportedEntries(f"parameter {name} not valued")
                plo, phi = self._interval(name, bits)
                for _ in range(e):
                    cands = (tlo * plo, tlo * phi, thi * plo, thi * phi)
                    tlo, thi = min(cands), max(cands)
            lo, hi = lo + tlo, hi + thi
        return lo, hi

    def eval_scalar(self, s: Scalar, bits=None):
        """Interval [lo, hi] containing the value of s at this witness."""
        bits = bits or self.precision
        nlo, nhi = self._eval_poly(s.num, bits)
        dlo, dhi = self._eval_poly(s.den, bits)
        if dlo <= 0 <= dhi:
            raise Indeterminate(f"denominator of {s} straddles zero")
        cands = (nlo / dlo, nlo / dhi, nhi / dlo, nhi / dhi)
        return min(cands), max(cands)

    def approx(self, s: Scalar) -> Fraction:
        """Midpoint rational approximation (exact when no quadratic parameter
        occurs in s)."""
        lo, hi = self.eval_scalar(s)
        return lo if lo == hi else (lo + hi) / 2

    def is_exact_for(self, s: Scalar) -> bool:
        return not (s.num.has_quadratic() or s.den.has_quadratic())


def sign_at(s: Scalar, w: Witness) -> Sign:
    """Sign of s at the witness: symbolic zero test first, then certified
    interval evaluation with precision doubling up to the witness cap."""
    s = Scalar.coerce(s)
    if s.is_zero():
        return Sign.ZERO
    if s.is_rational():
        v = s.as_fraction()
        return Sign.POSITIVE if v > 0 else Sign.NEGATIVE
    bits = w.precision
    while True:
        lo, hi = w.eval_scalar(s, bits)
        if lo > 0:
            return Sign.POSITIVE
        if hi < 0:
            return Sign.NEGATIVE
        if lo == hi == 0:
            raise Indeterminate(
                f"{s} vanishes at the witness but is not symbolically zero")
        if bits >= w.cap:
            raise Indeterminate(
                f"sign of {s} undecided at {bits} bits (cap {w.cap})")
        bits = min(2 * bits, w.cap)
