"""Exact dense linear algebra over the rationals and over prime fields.

Everything downstream (hom spaces, kernels, projective covers, homology)
reduces to row reduction of small dense matrices, so this module keeps a
single canonical kernel: full reduced row echelon form with leftmost-pivot
selection.  Entries are exact scalars: `gmpy2.mpq` when gmpy2 is importable,
`fractions.Fraction` otherwise, and plain ints in [0, p) for GF(p).

A compiled version of the kernel (intres._speedups, built from Cython) is
used when available; set INTRES_PURE=1 to force the interpreted fallback.
Both produce bit-identical results.
"""

from __future__ import annotations

import os
from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpq = Fraction
    _HAVE_GMPY2 = False


def _rref_frac_py(data, nrows, ncols):
    """In-place RREF for rational entries. Returns (data, pivot columns)."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = -1
        for i in range(r, nrows):
            if data[i * ncols + c]:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            pr, pp = r * ncols, p * ncols
            for j in range(c, ncols):
                data[pr + j], data[pp + j] = data[pp + j], data[pr + j]
        piv = data[r * ncols + c]
        if piv != 1:
            for j in range(c, ncols):
                if data[r * ncols + j]:
                    data[r * ncols + j] = data[r * ncols + j] / piv
        for i in range(nrows):
            if i == r:
                continue
            factor = data[i * ncols + c]
            if factor:
                base = r * ncols
                row = i * ncols
                for j in range(c, ncols):
                    x = data[base + j]
                    if x:
                        data[row + j] = data[row + j] - factor * x
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return data, pivots


def _rref_mod_py(data, nrows, ncols, p):
    """In-place RREF for entries in GF(p), represented as ints in [0, p)."""
    pivots = []
    r = 0
    for c in range(ncols):
        piv_row = -1
        for i in range(r, nrows):
            if data[i * ncols + c]:
                piv_row = i
                break
        if piv_row < 0:
            continue
        if piv_row != r:
            pr, pp = r * ncols, piv_row * ncols
            for j in range(c, ncols):
                data[pr + j], data[pp + j] = data[pp + j], data[pr + j]
        inv = pow(data[r * ncols + c], p - 2, p)
        if inv != 1:
            for j in range(c, ncols):
                if data[r * ncols + j]:
                    data[r * ncols + j] = data[r * ncols + j] * inv % p
        for i in range(nrows):
            if i == r:
                continue
            factor = data[i * ncols + c]
            if factor:
                base = r * ncols
                row = i * ncols
                for j in range(c, ncols):
                    x = data[base + j]
                    if x:
                        data[row + j] = (data[row + j] - factor * x) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return data, pivots


if os.environ.get("INTRES_PURE"):
    HAVE_SPEEDUPS = False
else:
    try:
        from intres._speedups import rref_frac as _rref_frac
        from intres._speedups import rref_mod as _rref_mod

        HAVE_SPEEDUPS = True
    except ImportError:
        HAVE_SPEEDUPS = False

if not HAVE_SPEEDUPS:
    _rref_frac = _rref_frac_py
    _rref_mod = _rref_mod_py


class Field:
    """The coefficient field: the rationals or GF(p) for a prime p."""

    __slots__ = ("kind", "p")

    def __init__(self, kind, p=None):
        if kind not in ("Q", "GF"):
            raise ValueError(f"unknown field kind {kind!r}")
        if kind == "GF":
            if p is None or p < 2 or not _is_prime(p):
                raise ValueError(f"GF order must be prime, got {p!r}")
        self.kind = kind
        self.p = p

    @classmethod
    def rationals(cls):
        return cls("Q")

    @classmethod
    def prime(cls, p):
        return cls("GF", p)

    @property
    def characteristic(self):
        return 0 if self.kind == "Q" else self.p

    def zero(self):
        return _mpq(0) if self.kind == "Q" else 0

    def one(self):
        return _mpq(1) if self.kind == "Q" else 1

    def coerce(self, x):
        """Coerce an int, Fraction, mpq or 'a/b' string into this field."""
        if self.kind == "Q":
            if isinstance(x, str):
                x = x.strip()
                if "/" in x:
                    num, den = x.split("/")
                    return _mpq(int(num), int(den))
                return _mpq(int(x))
            return _mpq(x)
        if isinstance(x, str):
            x = x.strip()
            if "/" in x:
                num, den = x.split("/")
                return int(num) * self.invert(int(den)) % self.p
            x = int(x)
        if isinstance(x, Fraction):
            return x.numerator * self.invert(x.denominator) % self.p
        return int(x) % self.p

    def invert(self, x):
        if self.kind == "Q":
            return 1 / x
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(x, self.p - 2, self.p)

    def render(self, x):
        return str(x)

    def __eq__(self, other):
        return (
            isinstance(other, Field) and self.kind == other.kind and self.p == other.p
        )

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return "Q" if self.kind == "Q" else f"GF({self.p})"


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


QQ = Field.rationals()


class Mat:
    """A dense matrix over a Field, stored as a flat row-major list."""

    __slots__ = ("field", "nrows", "ncols", "data")

    def __init__(self, field, nrows, ncols, data):
        if len(data) != nrows * ncols:
            raise ValueError(
                f"data length {len(data)} does not match shape {nrows}x{ncols}"
            )
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.data = data

    # ---- constructors -------------------------------------------------

    @classmethod
    def from_rows(cls, field, rows, ncols=None):
        nrows = len(rows)
        if nrows == 0:
            if ncols is None:
                ncols = 0
            return cls(field, 0, ncols, [])
        width = len(rows[0])
        if ncols is not None and ncols != width:
            raise ValueError(f"expected {ncols} columns, rows have {width}")
        data = []
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            data.extend(field.coerce(x) for x in row)
        return cls(field, nrows, width, data)

    @classmethod
    def zeros(cls, field, nrows, ncols):
        z = field.zero()
        return cls(field, nrows, ncols, [z] * (nrows * ncols))

    @classmethod
    def identity(cls, field, n):
        m = cls.zeros(field, n, n)
        one = field.one()
        for i in range(n):
            m.data[i * n + i] = one
        return m

    @classmethod
    def column(cls, field, entries):
        return cls(field, len(entries), 1, [field.coerce(x) for x in entries])

    # ---- access --------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i * self.ncols + j]

    def row(self, i):
        return self.data[i * self.ncols : (i + 1) * self.ncols]

    def col(self, j):
        return [self.data[i * self.ncols + j] for i in range(self.nrows)]

    def rows(self):
        return [self.row(i) for i in range(self.nrows)]

    def copy(self):
        return Mat(self.field, self.nrows, self.ncols, list(self.data))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_zero(self):
        return not any(self.data)

    # ---- arithmetic ----------------------------------------------------

    def __add__(self, other):
        self._check_same_shape(other)
        if self.field.kind == "GF":
            p = self.field.p
            data = [(a + b) % p for a, b in zip(self.data, other.data)]
        else:
            data = [a + b for a, b in zip(self.data, other.data)]
        return Mat(self.field, self.nrows, self.ncols, data)

    def __sub__(self, other):
        self._check_same_shape(other)
        if self.field.kind == "GF":
            p = self.field.p
            data = [(a - b) % p for a, b in zip(self.data, other.data)]
        else:
            data = [a - b for a, b in zip(self.data, other.data)]
        return Mat(self.field, self.nrows, self.ncols, data)

    def __neg__(self):
        if self.field.kind == "GF":
            p = self.field.p
            return Mat(self.field, self.nrows, self.ncols, [(-a) % p for a in self.data])
        return Mat(self.field, self.nrows, self.ncols, [-a for a in self.data])

    def scale(self, c):
        c = self.field.coerce(c)
        if self.field.kind == "GF":
            p = self.field.p
            return Mat(self.field, self.nrows, self.ncols, [a * c % p for a in self.data])
        return Mat(self.field, self.nrows, self.ncols, [a * c for a in self.data])

    def __mul__(self, other):
        """Matrix product self @ other."""
        if not isinstance(other, Mat):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(
                f"shape mismatch {self.shape} * {other.shape}"
            )
        n, k, m = self.nrows, self.ncols, other.ncols
        zero = self.field.zero()
        out = [zero] * (n * m)
        a, b = self.data, other.data
        modp = self.field.p if self.field.kind == "GF" else None
        for i in range(n):
            arow = i * k
            orow = i * m
            for t in range(k):
                x = a[arow + t]
                if not x:
                    continue
                brow = t * m
                if modp is None:
                    for j in range(m):
                        y = b[brow + j]
                        if y:
                            out[orow + j] = out[orow + j] + x * y
                else:
                    for j in range(m):
                        y = b[brow + j]
                        if y:
                            out[orow + j] = (out[orow + j] + x * y) % modp
        return Mat(self.field, n, m, out)

    def transpose(self):
        out = [None] * (self.nrows * self.ncols)
        for i in range(self.nrows):
            for j in range(self.ncols):
                out[j * self.nrows + i] = self.data[i * self.ncols + j]
        return Mat(self.field, self.ncols, self.nrows, out)

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.shape == other.shape
            and self.field == other.field
            and all(a == b for a, b in zip(self.data, other.data))
        )

    def __repr__(self):
        if self.nrows == 0 or self.ncols == 0:
            return f"Mat({self.nrows}x{self.ncols})"
        body = "; ".join(
            " ".join(str(x) for x in self.row(i)) for i in range(self.nrows)
        )
        return f"Mat[{body}]"

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    # ---- stacking -------------------------------------------------------

    @classmethod
    def hstack(cls, field, mats, nrows=None):
        mats = list(mats)
        if not mats:
            return cls.zeros(field, nrows or 0, 0)
        nrows = mats[0].nrows
        if any(m.nrows != nrows for m in mats):
            raise ValueError("hstack: row counts differ")
        data = []
        for i in range(nrows):
            for m in mats:
                data.extend(m.row(i))
        return cls(field, nrows, sum(m.ncols for m in mats), data)

    @classmethod
    def vstack(cls, field, mats, ncols=None):
        mats = list(mats)
        if not mats:
            return cls.zeros(field, 0, ncols or 0)
        ncols = mats[0].ncols
        if any(m.ncols != ncols for m in mats):
            raise ValueError("vstack: column counts differ")
        data = []
        for m in mats:
            data.extend(m.data)
        return cls(field, sum(m.nrows for m in mats), ncols, data)

    @classmethod
    def block(cls, field, grid):
        """Assemble a block matrix from a 2d grid of Mats (None = zero block
        is not allowed; pass explicit zero matrices so shapes are known)."""
        rows = [cls.hstack(field, row) for row in grid]
        return cls.vstack(field, rows)

    # ---- elimination-derived operations ---------------------------------

    def rref(self):
        """Reduced row echelon form. Returns (Mat, tuple of pivot columns)."""
        data = list(self.data)
        if self.field.kind == "GF":
            data, pivots = _rref_mod(data, self.nrows, self.ncols, self.field.p)
        else:
            data, pivots = _rref_frac(data, self.nrows, self.ncols)
        return Mat(self.field, self.nrows, self.ncols, data), tuple(pivots)

    def rank(self):
        return len(self.rref()[1])

    def kernel_basis(self):
        """Basis of the right kernel, as a list of length-ncols coordinate
        lists, in the canonical RREF order (one vector per free column)."""
        R, pivots = self.rref()
        pivset = set(pivots)
        free = [j for j in range(self.ncols) if j not in pivset]
        zero = self.field.zero()
        one = self.field.one()
        basis = []
        for f in free:
            v = [zero] * self.ncols
            v[f] = one
            for i, c in enumerate(pivots):
                x = R.data[i * self.ncols + f]
                if x:
                    v[c] = -x if self.field.kind == "Q" else (-x) % self.field.p
            basis.append(v)
        return basis

    def solve(self, b):
        """One solution x of self @ x = b (b a list or column Mat), or None."""
        if isinstance(b, Mat):
            if b.ncols != 1:
                raise ValueError("solve expects a single column")
            bdata = list(b.data)
        else:
            bdata = [self.field.coerce(x) for x in b]
        if len(bdata) != self.nrows:
            raise ValueError("right-hand side has wrong length")
        aug = Mat.hstack(
            self.field, [self, Mat(self.field, self.nrows, 1, bdata)]
        )
        R, pivots = aug.rref()
        if pivots and pivots[-1] == self.ncols:
            return None
        x = [self.field.zero()] * self.ncols
        for i, c in enumerate(pivots):
            x[c] = R.data[i * R.ncols + self.ncols]
        return x

    def solve_matrix(self, B):
        """One solution X of self @ X = B, or None. Shares one elimination."""
        if self.nrows != B.nrows:
            raise ValueError("solve_matrix: row counts differ")
        aug = Mat.hstack(self.field, [self, B])
        R, pivots = aug.rref()
        pivots = [c for c in pivots if c < self.ncols]
        # consistency: no pivot may fall in the appended block
        r = len(pivots)
        for i in range(r, self.nrows):
            row = R.row(i)
            if any(row[self.ncols :]):
                return None
        zero = self.field.zero()
        out = [zero] * (self.ncols * B.ncols)
        for i, c in enumerate(pivots):
            for j in range(B.ncols):
                out[c * B.ncols + j] = R.data[i * R.ncols + self.ncols + j]
        return Mat(self.field, self.ncols, B.ncols, out)

    def column_span_contains(self, v):
        return self.solve(v) is not None


# Function-style conveniences; the methods above do the work.


def rank(m: Mat) -> int:
    return m.rank()


def kernel_basis(m: Mat):
    return m.kernel_basis()


def solve(m: Mat, b):
    particular = m.solve(b)
    return particular, m.kernel_basis()


def column_span_contains(span: Mat, v) -> bool:
    return span.column_span_contains(v)
