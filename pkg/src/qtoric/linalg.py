"""Exact linear algebra over the scalar field, plus integer-lattice
routines (Hermite normal form, integer kernels and solves).

The kernel routine uses a fixed deterministic pivot rule: the leftmost
linearly independent columns are the pivots and every free column receives
an identity block.  Several downstream identities (notably the Gale vectors
of the blow-up example) depend on this normalization bit for bit.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import Singular
from .scalars import Scalar

Q = Fraction


def _s(x) -> Scalar:
    return Scalar.coerce(x)


class Matrix:
    """Immutable rectangular matrix of Scalars."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        rows = tuple(tuple(_s(x) for x in r) for r in rows)
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise ValueError("ragged matrix")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0

    # -- constructors --------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "Matrix":
        one, zero = Scalar.one(), Scalar.zero()
        return Matrix([[one if i == j else zero for j in range(n)]
                       for i in range(n)])

    @staticmethod
    def zero(m: int, n: int) -> "Matrix":
        z = Scalar.zero()
        return Matrix([[z] * n for _ in range(m)])

    @staticmethod
    def from_columns(cols) -> "Matrix":
        cols = [tuple(c) for c in cols]
        if not cols:
            return Matrix([])
        return Matrix([[cols[j][i] for j in range(len(cols))]
                       for i in range(len(cols[0]))])

    def column(self, j: int):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r1, r2)]
                       for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, c) -> "Matrix":
        c = _s(c)
        return Matrix([[c * x for x in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch in product")
            ocols = other.columns()
            return Matrix([[dot(r, c) for c in ocols] for r in self.rows])
        return self.apply(other)

    def apply(self, vec):
        """Matrix times column vector."""
        vec = tuple(_s(x) for x in vec)
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch in apply")
        return tuple(dot(r, vec) for r in self.rows)

    def transpose(self) -> "Matrix":
        return Matrix([[self.rows[i][j] for i in range(self.nrows)]
                       for j in range(self.ncols)])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(x) for x in r)
                               for r in self.rows) + "]"

    __repr__ = __str__

    def is_integer(self) -> bool:
        return all(x.is_integer() for r in self.rows for x in r)

    def to_int_rows(self):
        return [[int(x.as_fraction()) for x in r] for r in self.rows]


def dot(u, v) -> Scalar:
    out = Scalar.zero()
    for a, b in zip(u, v):
        out = out + _s(a) * _s(b)
    return out


def _rref(rows):
    """Reduced row echelon form with leftmost pivots.

    Returns (rref rows, pivot column list)."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if not rows[i][c].is_zero():
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = Scalar.one() / rows[r][c]
        rows[r] = [inv * x for x in rows[r]]
        for i in range(nrows):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(M: Matrix) -> int:
    _, pivots = _rref(M.rows)
    return len(pivots)


def det(M: Matrix) -> Scalar:
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = M.nrows
    rows = [list(r) for r in M.rows]
    out = Scalar.one()
    for c in range(n):
        sel = None
        for i in range(c, n):
            if not rows[i][c].is_zero():
                sel = i
                break
        if sel is None:
            return Scalar.zero()
        if sel != c:
            rows[c], rows[sel] = rows[sel], rows[c]
            out = -out
        out = out * rows[c][c]
        inv = Scalar.one() / rows[c][c]
        for i in range(c + 1, n):
            if not rows[i][c].is_zero():
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return out


def mat_inverse(M: Matrix) -> Matrix:
    """Exact inverse; raises Singular when the determinant is the zero
    scalar."""
    if M.nrows != M.ncols:
        raise ValueError("inverse of a non-square matrix")
    n = M.nrows
    aug = [list(M.rows[i]) + list(Matrix.identity(n).rows[i])
           for i in range(n)]
    red, pivots = _rref(aug)
    if len(pivots) < n or pivots[:n] != list(range(n)):
        raise Singular("matrix is symbolically singular")
    return Matrix([r[n:] for r in red[:n]])


def solve_right(M: Matrix, b) -> tuple | None:
    """One solution x of M x = b over the scalar field, or None."""
    b = tuple(_s(x) for x in b)
    if len(b) != M.nrows:
        raise ValueError("shape mismatch in solve")
    aug = [list(M.rows[i]) + [b[i]] for i in range(M.nrows)]
    red, pivots = _rref(aug)
    if M.ncols in pivots:
        return None
    x = [Scalar.zero()] * M.ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][-1]
    return tuple(x)


def kernel_basis(M: Matrix) -> list:
    """Basis of the right kernel with the deterministic pivot rule:
    leftmost independent columns are pivots, free columns carry an
    identity block."""
    red, pivots = _rref(M.rows)
    free = [c for c in range(M.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Scalar.zero()] * M.ncols
        v[f] = Scalar.one()
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# integer-lattice routines (plain Python ints)
# ---------------------------------------------------------------------------

def hnf(M) -> tuple:
    """Row Hermite normal form with transform: returns (H, U) with
    H = U*M, U unimodular, pivot entries positive and entries above each
    pivot reduced into [0, pivot)."""
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if A else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def addmul(i, j, q):
        # row_i += q * row_j
        A[i] = [a + q * b for a, b in zip(A[i], A[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]

    def negate(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    r = 0
    for c in range(n):
        # euclidean elimination below row r in column c
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            swap(r, piv)
            if A[r][c] < 0:
                negate(r)
            done = True
            for i in range(r + 1, m):
                if A[i][c] != 0:
                    q = A[i][c] // A[r][c]
                    addmul(i, r, -q)
                    if A[i][c] != 0:
                        done = False
            if done:
                break
        if r < m and A[r][c] != 0:
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    addmul(i, r, -q)
            r += 1
            if r == m:
                # reduce remaining columns above earlier pivots: handled above
                pass
    return A, U


def int_rank(M) -> int:
    H, _ = hnf(M)
    return sum(1 for row in H if any(x != 0 for x in row))


def int_row_basis(M) -> list:
    """Nonzero rows of the HNF: a canonical basis of the row lattice."""
    H, _ = hnf(M)
    return [row for row in H if any(x != 0 for x in row)]


def int_kernel(M) -> list:
    """Z-basis of {x : x integral, M x = 0} for an integer matrix M
    (saturated by construction)."""
    A = [list(r) for r in M]
    if not A:
        return []
    At = [list(col) for col in zip(*A)]
    H, U = hnf(At)
    out = []
    for i, row in enumerate(H):
        if all(x == 0 for x in row):
            out.append(tuple(U[i]))
    return out


def int_solve(M, b) -> tuple | None:
    """One integral solution x of M x = b (M integer matrix, b integer
    vector), or None when none exists."""
    A = [list(r) for r in M]
    m = len(A)
    if m == 0:
        return None
    n = len(A[0])
    At = [list(col) for col in zip(*A)] + []
    # solve x^T M^T = b^T: row-reduce [M^T] with transform, then express b
    H, U = hnf(At)
    # H = U * M^T ; want y with y H = b  =>  x = y U
    y = [0] * len(H)
    rem = list(map(int, b))
    used = [False] * len(H)
    for i, row in enumerate(H):
        piv = next((j for j, v in enumerate(row) if v != 0), None)
        if piv is None:
            continue
        if rem[piv] % row[piv] != 0:
            return None
        q = rem[piv] // row[piv]
        y[i] = q
        if q:
            rem = [a - q * v for a, v in zip(rem, row)]
        used[i] = True
    if any(v != 0 for v in rem):
        return None
    x = [0] * n
    for i, q in enumerate(y):
        if q:
            x = [a + q * v for a, v in zip(x, U[i])]
    return tuple(x)


def rational_to_int_rows(rows):
    """Scale rational rows to integer rows (each row by its own lcm)."""
    out = []
    for r in rows:
        fr = [Q(x) for x in r]
        L = 1
        for x in fr:
            L = L * x.denominator // _gcd(L, x.denominator)
        out.append([int(x * L) for x in fr])
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def fraction_matrix_kernel_int(rows) -> list:
    """Z-basis of {x in Z^n : R x = 0} for rational rows R."""
    if not rows:
        return []
    introws = rational_to_int_rows(rows)
    return int_kernel(introws)
