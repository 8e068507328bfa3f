"""Exact dense linear algebra over Q or a prime field.

Everything here is exact: the default scalars are `fractions.Fraction`
values, optionally replaced by GF(p) elements for fast cross-checks.
Matrices are small and dense (desk scale), so plain Gaussian elimination
with exact division is used throughout.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction

import sympy


class FieldQ:
    """The field of rational numbers (arbitrary precision)."""

    name = "Q"
    char = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)  # accepts "p/q", "-3", "0"
        raise TypeError("cannot coerce %r into Q" % (x,))

    def to_str(self, x):
        return str(x)  # Fraction prints "3/2", "-1"; integers omit "/1"

    def __repr__(self):
        return "QQ"


class FpElement:
    """An element of GF(p), normalized to 0 <= v < p."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError("mixed prime fields")
            return other.v
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElement(self.v + w, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElement(self.v - w, self.p)

    def __rsub__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElement(w - self.v, self.p)

    def __neg__(self):
        return FpElement(-self.v, self.p)

    def __mul__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElement(self.v * w, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElement(self.v * pow(w, -1, self.p), self.p)

    def __rtruediv__(self, other):
        w = self._lift(other)
        if w is NotImplemented:
            return NotImplemented
        return FpElement(w * pow(self.v, -1, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __bool__(self):
        return self.v != 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return "%d" % self.v


class FieldFp:
    """The prime field GF(p); used only for speed cross-checks."""

    char = None

    def __init__(self, p):
        if p < 2 or any(p % q == 0 for q in range(2, min(p, 1000)) if q * q <= p):
            raise ValueError("modulus %d is not prime" % p)
        self.p = p
        self.char = p
        self.name = "F%d" % p
        self.zero = FpElement(0, p)
        self.one = FpElement(1, p)

    def coerce(self, x):
        if isinstance(x, FpElement):
            if x.p != self.p:
                raise ValueError("mixed prime fields")
            return x
        if isinstance(x, int):
            return FpElement(x, self.p)
        if isinstance(x, Fraction):
            return FpElement(x.numerator * pow(x.denominator, -1, self.p), self.p)
        if isinstance(x, str):
            return self.coerce(Fraction(x))
        raise TypeError("cannot coerce %r into %s" % (x, self.name))

    def to_str(self, x):
        return str(x.v)

    def __repr__(self):
        return "GF(%d)" % self.p


QQ = FieldQ()

_fp_cache = {}


def GF(p):
    if p not in _fp_cache:
        _fp_cache[p] = FieldFp(p)
    return _fp_cache[p]


class Mat:
    """A dense rows x cols matrix with exact entries.

    `data` is a list of row lists and is owned by the matrix; callers must
    not alias it.  Entries support +, -, *, /, bool (Fraction or FpElement).
    """

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data):
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, field, rows, cols):
        z = field.zero
        return cls(field, rows, cols, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, field, n):
        z, o = field.zero, field.one
        return cls(field, n, n, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, field, rows):
        data = [[field.coerce(x) for x in row] for row in rows]
        cols = len(data[0]) if data else 0
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged rows")
        return cls(field, len(data), cols, data)

    @classmethod
    def column(cls, field, entries):
        return cls(field, len(entries), 1, [[field.coerce(x)] for x in entries])

    def copy(self):
        return Mat(self.field, self.rows, self.cols, [row[:] for row in self.data])

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    def is_zero(self):
        return all(not x for row in self.data for x in row)

    def __add__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return Mat(self.field, self.rows, self.cols,
                   [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return Mat(self.field, self.rows, self.cols,
                   [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __neg__(self):
        return Mat(self.field, self.rows, self.cols, [[-a for a in row] for row in self.data])

    def scale(self, c):
        c = self.field.coerce(c)
        return Mat(self.field, self.rows, self.cols, [[c * a for a in row] for row in self.data])

    def __mul__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        assert self.cols == other.rows, "shape mismatch %dx%d * %dx%d" % (
            self.rows, self.cols, other.rows, other.cols)
        z = self.field.zero
        out = [[z] * other.cols for _ in range(self.rows)]
        bd = other.data
        for i, arow in enumerate(self.data):
            orow = out[i]
            for k, a in enumerate(arow):
                if not a:
                    continue
                brow = bd[k]
                for j, b in enumerate(brow):
                    if b:
                        orow[j] = orow[j] + a * b
        return Mat(self.field, self.rows, other.cols, out)

    def power(self, k):
        assert self.rows == self.cols and k >= 0
        out = Mat.identity(self.field, self.rows)
        for _ in range(k):
            out = out * self
        return out

    def transpose(self):
        return Mat(self.field, self.cols, self.rows,
                   [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def col(self, j):
        return Mat(self.field, self.rows, 1, [[row[j]] for row in self.data])

    def col_entries(self, j):
        return tuple(row[j] for row in self.data)

    def trace(self):
        assert self.rows == self.cols
        t = self.field.zero
        for i in range(self.rows):
            t = t + self.data[i][i]
        return t

    def __repr__(self):
        return "Mat(%dx%d, %r)" % (self.rows, self.cols, self.data)


def hstack(mats, field=None, rows=None):
    """Concatenate matrices left to right (all with the same row count)."""
    mats = list(mats)
    if not mats:
        assert field is not None and rows is not None
        return Mat.zeros(field, rows, 0)
    field = mats[0].field
    rows = mats[0].rows
    assert all(m.rows == rows for m in mats)
    data = [[] for _ in range(rows)]
    for m in mats:
        for i in range(rows):
            data[i].extend(m.data[i])
    return Mat(field, rows, sum(m.cols for m in mats), data)


def vstack(mats, field=None, cols=None):
    mats = list(mats)
    if not mats:
        assert field is not None and cols is not None
        return Mat.zeros(field, 0, cols)
    field = mats[0].field
    cols = mats[0].cols
    assert all(m.cols == cols for m in mats)
    data = []
    for m in mats:
        data.extend(row[:] for row in m.data)
    return Mat(field, len(data), cols, data)


def block_diag(mats, field):
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = Mat.zeros(field, rows, cols)
    r = c = 0
    for m in mats:
        for i in range(m.rows):
            out.data[r + i][c:c + m.cols] = m.data[i][:]
        r += m.rows
        c += m.cols
    return out


def _rref(data, rows, cols, pivot_limit=None):
    """In-place reduced row echelon form; returns the pivot column list.

    Pivots are only chosen among the first `pivot_limit` columns, which lets
    the same routine solve augmented systems.
    """
    limit = cols if pivot_limit is None else pivot_limit
    pivots = []
    r = 0
    for c in range(limit):
        pr = None
        for rr in range(r, rows):
            if data[rr][c]:
                pr = rr
                break
        if pr is None:
            continue
        if pr != r:
            data[r], data[pr] = data[pr], data[r]
        piv = data[r][c]
        if piv != 1:
            data[r] = [x / piv for x in data[r]]
        rowr = data[r]
        for rr in range(rows):
            if rr == r:
                continue
            f = data[rr][c]
            if not f:
                continue
            rowrr = data[rr]
            for cc in range(c, cols):
                if rowr[cc]:
                    rowrr[cc] = rowrr[cc] - f * rowr[cc]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def rank(A):
    data = [row[:] for row in A.data]
    return len(_rref(data, A.rows, A.cols))


def nullspace(A):
    """Basis of {x : A x = 0}, returned as the columns of a matrix."""
    data = [row[:] for row in A.data]
    pivots = _rref(data, A.rows, A.cols)
    pivot_set = set(pivots)
    free = [c for c in range(A.cols) if c not in pivot_set]
    z, o = A.field.zero, A.field.one
    basis = Mat.zeros(A.field, A.cols, len(free))
    for k, fc in enumerate(free):
        basis.data[fc][k] = o
        for r, pc in enumerate(pivots):
            v = data[r][fc]
            if v:
                basis.data[pc][k] = -v
    return basis


def rank_nullspace(A):
    """(rank, kernel basis as a list of column tuples)."""
    ns = nullspace(A)
    return A.cols - ns.cols, [ns.col_entries(j) for j in range(ns.cols)]


def solve(A, b):
    """Some x with A x = b, or None when the system is inconsistent."""
    X = solve_matrix(A, Mat.column(A.field, b) if not isinstance(b, Mat) else b)
    if X is None:
        return None
    return [X.data[i][0] for i in range(X.rows)]


solve_linear = solve


def solve_matrix(A, B):
    """Some X with A X = B (column by column), or None if inconsistent."""
    assert A.rows == B.rows
    data = [ra[:] + rb[:] for ra, rb in zip(A.data, B.data)] if A.rows else []
    pivots = _rref(data, A.rows, A.cols + B.cols, pivot_limit=A.cols)
    nr = len(pivots)
    for r in range(nr, A.rows):
        if any(data[r][A.cols + j] for j in range(B.cols)):
            return None
    X = Mat.zeros(A.field, A.cols, B.cols)
    for r, pc in enumerate(pivots):
        X.data[pc] = data[r][A.cols:]
    return X


def inverse(A):
    assert A.rows == A.cols
    X = solve_matrix(A, Mat.identity(A.field, A.rows))
    if X is None or rank(A) < A.rows:
        raise ValueError("matrix is singular")
    return X


def is_invertible(A):
    return A.rows == A.cols and rank(A) == A.rows


def column_space(A):
    """An independent subset of A's columns spanning its column space."""
    data = [row[:] for row in A.data]
    pivots = _rref(data, A.rows, A.cols)
    return hstack([A.col(j) for j in pivots], field=A.field, rows=A.rows)


def left_annihilator(B):
    """A matrix P with ker P = col(B); rows form a basis of the left kernel."""
    return nullspace(B.transpose()).transpose()


def intersect_columns(B1, B2):
    """Basis of col(B1) ∩ col(B2)."""
    assert B1.rows == B2.rows
    if B1.cols == 0 or B2.cols == 0:
        return Mat.zeros(B1.field, B1.rows, 0)
    ns = nullspace(hstack([B1, -B2]))
    top = Mat(B1.field, B1.cols, ns.cols, [ns.data[i][:] for i in range(B1.cols)])
    return column_space(B1 * top)


def invariant_subspace(E, B):
    """Largest E-invariant subspace contained in col(B)."""
    U = column_space(B)
    while U.cols:
        P = left_annihilator(U)
        X = nullspace(P * (E * U))
        if X.cols == U.cols:
            break
        U = column_space(U * X)
    return U


def closure_under(E, B):
    """Smallest E-invariant subspace containing col(B)."""
    U = column_space(B)
    while True:
        W = column_space(hstack([U, E * U]))
        if W.cols == U.cols:
            return U
        U = W


def complete_basis(B):
    """Standard basis vectors completing the (independent) columns of B."""
    n = B.rows
    data = [row[:] for row in hstack([B, Mat.identity(B.field, n)]).data]
    pivots = _rref(data, n, B.cols + n)
    extra = [c - B.cols for c in pivots if c >= B.cols]
    out = Mat.zeros(B.field, n, len(extra))
    for k, j in enumerate(extra):
        out.data[j][k] = B.field.one
    return out


# -- characteristic polynomials and coprime factor splitting ----------------
#
# Factoring over Q is delegated to sympy; everything else stays on Fraction.

def _to_sympy(A):
    if A.field is not QQ:
        raise ValueError("polynomial factorization requires the rational field")
    return sympy.Matrix(A.rows, A.cols,
                        lambda i, j: sympy.Rational(A.data[i][j].numerator,
                                                    A.data[i][j].denominator))


_X = sympy.Symbol("x")


def charpoly(A):
    """Characteristic polynomial of a square matrix as a sympy Poly in x."""
    assert A.rows == A.cols
    if A.rows == 0:
        return sympy.Poly(1, _X, domain="QQ")
    return sympy.Poly(_to_sympy(A).charpoly(_X).as_expr(), _X, domain="QQ")


def charpoly_product(mats):
    """The product of the characteristic polynomials of several matrices."""
    poly = sympy.Poly(1, _X, domain="QQ")
    for A in mats:
        poly = poly * charpoly(A)
    return poly


def coprime_factors(poly):
    """[(coeffs, multiplicity)] over the distinct irreducible factors of poly.

    Coefficient lists are monic, highest degree first, as Fractions.
    """
    _, factors = sympy.factor_list(poly)
    out = []
    for p, m in factors:
        p = sympy.Poly(p, _X, domain="QQ")
        lead = p.LC()
        coeffs = [Fraction(sympy.Rational(c / lead).p, sympy.Rational(c / lead).q)
                  for c in p.all_coeffs()]
        if len(coeffs) == 1:
            continue  # constant factor
        out.append((coeffs, int(m)))
    return out


def eval_poly(coeffs, A):
    """Evaluate a polynomial (highest degree first) at a square matrix."""
    out = Mat.zeros(A.field, A.rows, A.rows)
    for c in coeffs:
        out = out * A
        if c:
            out = out + Mat.identity(A.field, A.rows).scale(c)
    return out


def coprime_split(f):
    """Generalized eigenspace decomposition of a square matrix over Q.

    Splits the ambient space along the pairwise-coprime irreducible factors
    of the characteristic polynomial; returns one basis matrix per factor.
    The blocks are f-invariant and sum directly to the whole space.
    """
    assert f.rows == f.cols
    if f.rows == 0:
        return []
    blocks = []
    for coeffs, mult in coprime_factors(charpoly(f)):
        blocks.append(nullspace(eval_poly(coeffs, f).power(mult)))
    assert sum(b.cols for b in blocks) == f.rows
    return blocks


# -- serialization -----------------------------------------------------------

def mat_to_json(A):
    return [[A.field.to_str(x) for x in row] for row in A.data]


def mat_from_json(field, rows, cols, data):
    if data in (None, []):
        return Mat.zeros(field, rows, cols)
    if len(data) != rows or any(len(row) != cols for row in data):
        raise ValueError("matrix shape mismatch: expected %dx%d" % (rows, cols))
    return Mat.from_rows(field, data)
