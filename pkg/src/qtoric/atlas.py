"""Chart and gluing data of (calibrated) quantum toric varieties:
chart matrices, gluing exponent matrices, chart calibrations, cocycle
checks, and the toric open set S with its fan Delta_H.

Exponent matrices are emitted for the monomial convention
z^M = (prod_i z_i^{M_i1}, ..., prod_i z_i^{M_id}); under that convention
the transition from chart I to chart I' is z -> z^M with
M = (A_{I'} A_I^{-1})^T, and the rows of M indexed by the shared rays are
identity rows pointing at the rays' positions in the target chart.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .calibration import CalibratedFan
from .errors import EmptyIntersection, Singular
from .lattice_fan import QuantumFan
from .linalg import Matrix, mat_inverse, rank
from .scalars import Scalar


@dataclass
class ChartData:
    cone: tuple            # sorted ray indices of the maximal cone
    A: Matrix              # the chart matrix A_I
    completion: tuple      # canonical basis indices used when |I| < d
    H: Matrix | None = None        # permutation H_I (calibrated case)
    hbar: Matrix | None = None     # d x (n-d) chart calibration values

    def to_json(self):
        out = {"I": list(self.cone),
               "A": [[str(x) for x in r] for r in self.A.rows],
               "completion": list(self.completion)}
        if self.H is not None:
            out["H"] = [[int(x.as_fraction()) for x in r]
                        for r in self.H.rows]
        if self.hbar is not None:
            out["hbar"] = [[str(x) for x in r] for r in self.hbar.rows]
        return out


def _ordered(cone):
    """Cones given as sequences keep their written order (the paper's
    A_<3,1> differs from A_<1,3>); sets are sorted."""
    if isinstance(cone, (set, frozenset)):
        return sorted(cone)
    return list(cone)


def chart_matrix(fan: QuantumFan, cone) -> tuple:
    """A_I for a maximal cone: the exact inverse of the generator matrix,
    completed (when |I| < d) by canonical basis vectors chosen greedily in
    index order.  Returns (A_I, completion indices)."""
    cone = _ordered(cone)
    gens = [fan.ray(i) for i in cone]
    cols = list(gens)
    completion = []
    eye = Matrix.identity(fan.dim)
    for j in range(fan.dim):
        if len(cols) == fan.dim:
            break
        cand = cols + [eye.rows[j]]
        if rank(Matrix.from_columns(cand)) == len(cand):
            cols.append(eye.rows[j])
            completion.append(j + 1)
    if len(cols) != fan.dim:
        raise Singular("cone generators do not extend to a basis")
    return mat_inverse(Matrix.from_columns(cols)), tuple(completion)


def gluing_exponents(fan: QuantumFan, cone_from, cone_to) -> Matrix:
    """Exponent matrix M with z_to = z_from^M, i.e. (A_to A_from^-1)^T.

    Requires two maximal cones with nonempty intersection."""
    if not frozenset(cone_from) & frozenset(cone_to):
        raise EmptyIntersection(
            f"{_ordered(cone_from)} and {_ordered(cone_to)} are disjoint")
    A_from, _ = chart_matrix(fan, cone_from)
    A_to, _ = chart_matrix(fan, cone_to)
    return (A_to * mat_inverse(A_from)).transpose()


def shared_rows_are_identity(fan: QuantumFan, cone_from, cone_to) -> bool:
    """For every shared ray, the exponent-matrix row at the ray's position
    in the source chart is the identity row of its position in the target
    chart."""
    M = gluing_exponents(fan, cone_from, cone_to)
    src = _ordered(cone_from)
    dst = _ordered(cone_to)
    for r in frozenset(cone_from) & frozenset(cone_to):
        i = src.index(r)
        j = dst.index(r)
        row = M.rows[i]
        for c, x in enumerate(row):
            expected = Scalar.one() if c == j else Scalar.zero()
            if not (x - expected).is_zero():
                return False
    return True


def chart_calibration(cf: CalibratedFan, cone) -> tuple:
    """(H_I, hbar_I): the permutation aligning the cone's calibration
    indices with the leading coordinates, and the chart calibration making
    h_I = A_I h H_I^{-1} standard (h_I = [Id | hbar_I])."""
    cal, fan = cf.cal, cf.fan
    n, d = cal.n, cal.d
    cone = _ordered(cone)
    A_I, _ = chart_matrix(fan, cone)
    # calibration indices of the cone's rays, in cone order
    cone_cal_idx = [cf.index_of_ray(ray) for ray in cone]
    rest = [i for i in range(1, n + 1) if i not in cone_cal_idx]
    order = cone_cal_idx + rest
    pos = {src: t + 1 for t, src in enumerate(order)}
    eye = Matrix.identity(n)
    H_I = Matrix.from_columns([eye.column(pos[src] - 1)
                               for src in range(1, n + 1)])
    # h_I = A_I h H_I^{-1}: columns are A_I h(e_{order[k]})
    h_cols = [A_I.apply(cal.image(src)) for src in order]
    h_I = Matrix.from_columns(h_cols)
    hbar = Matrix([r[d:] for r in h_I.rows])
    return H_I, hbar


def cocycle_check(fan: QuantumFan) -> bool:
    """A_IK = A_JK A_IJ symbolically for every triple of pairwise
    intersecting maximal cones (exponent convention included)."""
    maxc = [frozenset(c) for c in fan.maximal_cones()]
    for I, J, K in itertools.combinations(maxc, 3):
        if not (I & J and J & K and I & K):
            continue
        M_IJ = gluing_exponents(fan, I, J)
        M_JK = gluing_exponents(fan, J, K)
        M_IK = gluing_exponents(fan, I, K)
        if M_IJ * M_JK != M_IK:
            return False
    return True


@dataclass
class IrrelevantDescriptor:
    """Minimal forbidden index subsets (z_i = 0 for i in F excluded) plus
    the cone list of Delta_H."""
    n: int
    forbidden: list = field(default_factory=list)
    delta_H: list = field(default_factory=list)

    def allows(self, zero_set) -> bool:
        z = set(zero_set)
        return not any(set(f) <= z for f in self.forbidden)

    def to_json(self):
        return {"n": self.n,
                "forbidden": [sorted(f) for f in self.forbidden],
                "delta_H": [sorted(c) for c in self.delta_H]}


def build_irrelevant(cf_or_fan) -> IrrelevantDescriptor:
    """Minimal non-faces of the cone poset (the minimal forbidden zero-sets
    of S) and the cone list of Delta_H lifted to canonical basis cones.

    For a calibrated fan the ambient coordinates are the calibration
    indices 1..n (virtual indices are never faces, so each is a minimal
    forbidden singleton).  Minimal non-faces of a simplicial fan have at
    most d+1 elements, which bounds the enumeration."""
    if isinstance(cf_or_fan, CalibratedFan):
        cf = cf_or_fan
        n = cf.cal.n
        d = cf.fan.dim
        cones = {frozenset(cf.index_of_ray(k) for k in c)
                 for c in cf.fan.cones}
    else:
        fan = cf_or_fan
        n = fan.nrays
        d = fan.dim
        cones = set(fan.cones)
    forbidden = []
    for size in range(1, min(n, d + 1) + 1):
        for sub in itertools.combinations(range(1, n + 1), size):
            fs = frozenset(sub)
            if fs in cones:
                continue
            if any(set(f) <= fs for f in forbidden):
                continue
            forbidden.append(tuple(sorted(fs)))
    delta_H = sorted((tuple(sorted(c)) for c in cones),
                     key=lambda t: (len(t), t))
    return IrrelevantDescriptor(n, forbidden, [list(c) for c in delta_H])


def atlas_report(cf_or_fan, cone_orders=None) -> dict:
    """Per maximal cone chart data, per intersecting pair the gluing
    exponents, and the irrelevant descriptor.

    cone_orders: optional list of ordered index tuples fixing the chart
    coordinate order of each maximal cone (e.g. the order written in the
    input file); maximal cones not listed fall back to sorted order."""
    if isinstance(cf_or_fan, CalibratedFan):
        fan = cf_or_fan.fan
        cf = cf_or_fan
    else:
        fan = cf_or_fan
        cf = None
    order_of = {}
    for t in cone_orders or []:
        order_of[frozenset(t)] = tuple(t)
    maxc = [order_of.get(frozenset(c), tuple(sorted(c)))
            for c in sorted(fan.maximal_cones(), key=lambda c: sorted(c))]
    charts = []
    for cone in maxc:
        A, completion = chart_matrix(fan, cone)
        chart = ChartData(tuple(cone), A, completion)
        if cf is not None:
            chart.H, chart.hbar = chart_calibration(cf, cone)
        charts.append(chart)
    gluings = []
    for c1, c2 in itertools.combinations(maxc, 2):
        if not (frozenset(c1) & frozenset(c2)):
            continue
        for src, dst in ((c1, c2), (c2, c1)):
            M = gluing_exponents(fan, src, dst)
            gluings.append({"from": list(src), "to": list(dst),
                            "exponents": [[str(x) for x in r]
                                          for r in M.rows]})
    return {"charts": [c.to_json() for c in charts],
            "gluings": gluings,
            "cocycle": cocycle_check(fan),
            "irrelevant": build_irrelevant(cf if cf else fan).to_json()}
