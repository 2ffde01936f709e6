"""Exact integer and rational linear algebra.

Everything here works on Python integers (arbitrary precision) or
``fractions.Fraction``.  Matrices are small enough (a few hundred rows at
most) that plain lists beat the overhead of a numeric library, and exactness
is not negotiable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = list[int]


class IntMatrix:
    """Immutable dense integer matrix.

    Entries are stored row-major as a tuple of tuples.  Arithmetic skips zero
    entries, which keeps products of sparse adjacency and incidence matrices
    cheap.
    """

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        if cols is None:
            cols = len(data[0]) if data else 0
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self.entries = data
        self.rows = len(data)
        self.cols = cols
        self._hash = None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[col[i] for col in columns] for i in range(rows)], len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self.entries]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self.entries), self.rows) if self.rows else IntMatrix.zeros(self.cols, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self.entries))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.entries], self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self.entries], self.cols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        ocols = other.cols
        orows = other.entries
        for row in self.entries:
            acc = [0] * ocols
            for k, a in enumerate(row):
                if a:
                    brow = orows[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return IntMatrix(out, ocols)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(a * b for a, b in zip(row, v) if a and b) for row in self.entries]

    def power(self, k: int) -> "IntMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            raise ValueError("negative power")
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def _same_shape(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


def block_diagonal(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b.entries):
            out[r0 + i][c0:c0 + b.cols] = row
        r0 += b.rows
        c0 += b.cols
    return IntMatrix(out, cols)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ m @ V == D``.

    ``D`` is diagonal with nonnegative entries forming a divisibility chain;
    ``U`` and ``V`` are unimodular.  Pivots are chosen by minimal absolute
    value, which keeps intermediate coefficients small in practice.
    """
    rows, cols = m.shape
    a = [list(r) for r in m.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, k: int) -> None:
        # row_dst += k * row_src
        ra, rs = a[dst], a[src]
        for c in range(cols):
            if rs[c]:
                ra[c] += k * rs[c]
        ua, us = u[dst], u[src]
        for c in range(rows):
            if us[c]:
                ua[c] += k * us[c]

    def add_col(dst: int, src: int, k: int) -> None:
        for row in a:
            if row[src]:
                row[dst] += k * row[src]
        for row in v:
            if row[src]:
                row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        # choose the nonzero entry of least absolute value in the lower-right block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, -q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, -q)
                    if a[t][j]:
                        done = False
            if not done:
                # move a smaller remainder into the pivot position
                best = None
                for i in range(t, rows):
                    x = a[i][t]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, "r")
                for j in range(t, cols):
                    x = a[t][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), j, "c")
                _, k, kind = best
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return IntMatrix(a, cols), IntMatrix(u, rows), IntMatrix(v, cols)


def smith_invariants(m: IntMatrix) -> list[int]:
    """Nonzero diagonal entries of the Smith form."""
    d, _, _ = smith_normal_form(m)
    return [d[i, i] for i in range(min(d.shape)) if d[i, i]]


# ---------------------------------------------------------------------------
# Lattices in Z^n, given by generator rows


class Lattice:
    """A sublattice of Z^n stored as a Hermite-reduced echelon basis.

    Rows are independent and have strictly increasing pivot columns with
    positive pivots; entries above each pivot are reduced into ``[0, pivot)``.
    This form is canonical, so two lattices are equal iff their bases are.
    """

    __slots__ = ("dim", "basis", "pivots")

    def __init__(self, dim: int, generators: Iterable[Sequence[int]] = ()):
        self.dim = dim
        self.basis, self.pivots = _hermite(dim, [list(g) for g in generators])

    @classmethod
    def _raw(cls, dim: int, basis: list[list[int]], pivots: list[int]) -> "Lattice":
        obj = cls.__new__(cls)
        obj.dim, obj.basis, obj.pivots = dim, basis, pivots
        return obj

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.dim == other.dim and self.basis == other.basis

    def __repr__(self) -> str:
        return f"Lattice(dim={self.dim}, rank={self.rank})"

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Coefficients of ``v`` in the basis, or None if ``v`` is not in the lattice."""
        r = list(v)
        coeffs = []
        for row, p in zip(self.basis, self.pivots):
            x = r[p]
            if x % row[p]:
                return None
            c = x // row[p]
            coeffs.append(c)
            if c:
                for j in range(p, self.dim):
                    if row[j]:
                        r[j] -= c * row[j]
        if any(r):
            return None
        return coeffs

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(b) for b in other.basis)

    def join(self, vectors: Iterable[Sequence[int]]) -> "Lattice":
        return Lattice(self.dim, list(self.basis) + [list(v) for v in vectors])

    def index_product(self) -> int:
        """Product of pivots (the covolume when the lattice has full rank)."""
        out = 1
        for row, p in zip(self.basis, self.pivots):
            out *= row[p]
        return out


def _hermite(dim: int, rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    pending = [r for r in rows if any(r)]
    basis: list[list[int]] = []
    pivots: list[int] = []
    for col in range(dim):
        live = [r for r in pending if r[col]]
        if not live:
            continue
        rest = [r for r in pending if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            pv = piv[col]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // pv
                if q:
                    for j in range(col, dim):
                        if piv[j]:
                            r[j] -= q * piv[j]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        # reduce earlier rows above this pivot
        pv = piv[col]
        for b in basis:
            if b[col] < 0 or b[col] >= pv:
                q = b[col] // pv
                for j in range(col, dim):
                    if piv[j]:
                        b[j] -= q * piv[j]
        basis.append(piv)
        pivots.append(col)
        pending = rest
    return basis, pivots


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of the lattice ``{y in Z^ncols : M y = 0}`` for M given by rows."""
    nrows = len(rows)
    # Row-reduce [M^T | I]; rows whose M^T part vanishes span the kernel.
    aug = [[rows[i][j] for i in range(nrows)] + [1 if k == j else 0 for k in range(ncols)]
           for j in range(ncols)]
    width = nrows + ncols
    pending = aug
    for col in range(nrows):
        live = [r for r in pending if r[col]]
        if not live:
            continue
        rest = [r for r in pending if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            pv = piv[col]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // pv
                for j in range(col, width):
                    if piv[j]:
                        r[j] -= q * piv[j]
                if r[col]:
                    nxt.append(r)
                else:
                    rest.append(r)
            live = nxt
        pending = rest
    kernel = [r[nrows:] for r in pending]
    return Lattice(ncols, kernel).basis


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    inv = rational_inverse([[Fraction(x) for x in row] for row in m.entries])
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return IntMatrix(out, m.cols)


# ---------------------------------------------------------------------------
# Rational linear algebra


QVector = list[Fraction]


def to_fractions(rows: Iterable[Iterable[int]]) -> list[QVector]:
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[QVector], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        if pv != 1:
            a[r] = [x / pv for x in a[r]]
        pr = a[r]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                ai = a[i]
                for j in range(c, ncols):
                    if pr[j] != 0:
                        ai[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rational_rank(rows: Sequence[Sequence[int | Fraction]], ncols: int) -> int:
    if not rows or not ncols:
        return 0
    return len(rref([[Fraction(x) for x in r] for r in rows], ncols)[0])


def rational_inverse(a: Sequence[Sequence[Fraction]]) -> list[QVector]:
    n = len(a)
    aug = [list(a[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def q_matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]], inner: int | None = None) -> list[QVector]:
    if not a:
        return []
    if inner is None:
        inner = len(a[0])
    bcols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [Fraction(0)] * bcols
        for k in range(inner):
            x = row[k]
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def q_apply(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> QVector:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a]


def q_identity(n: int) -> list[QVector]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def q_power(a: Sequence[Sequence[Fraction]], k: int) -> list[QVector]:
    n = len(a)
    if k < 0:
        return q_power(rational_inverse(a), -k)
    result = q_identity(n)
    base = [list(r) for r in a]
    while k:
        if k & 1:
            result = q_matmul(result, base, n)
        base = q_matmul(base, base, n)
        k >>= 1
    return result


class Subspace:
    """Subspace of Q^n spanned by a list of vectors, kept in reduced form."""

    def __init__(self, dim: int, vectors: Iterable[Sequence[int | Fraction]] = ()):
        self.dim = dim
        rows = [[Fraction(x) for x in v] for v in vectors]
        rows = [r for r in rows if any(r)]
        self.basis, self.pivots = rref(rows, dim) if rows else ([], [])

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, v: Sequence[Fraction]) -> QVector:
        r = [Fraction(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            c = r[p]
            if c:
                for j in range(p, self.dim):
                    if row[j]:
                        r[j] -= c * row[j]
        return r

    def contains(self, v: Sequence[int | Fraction]) -> bool:
        return not any(self.reduce(v))

    def join(self, vectors: Iterable[Sequence[int | Fraction]]) -> "Subspace":
        return Subspace(self.dim, list(self.basis) + [list(v) for v in vectors])


class Decomposer:
    """Coordinates with respect to an independent family of vectors.

    ``split(v)`` returns the coefficient vector ``c`` with ``v = sum c_i b_i``
    or None if ``v`` is outside the span.
    """

    def __init__(self, dim: int, vectors: Sequence[Sequence[int | Fraction]]):
        self.dim = dim
        self.k = len(vectors)
        # Row-reduce [B | I_k] where B has the vectors as rows: yields a left
        # inverse restricted to pivot coordinates.
        aug = [[Fraction(x) for x in v] + [Fraction(int(i == j)) for j in range(self.k)]
               for i, v in enumerate(vectors)]
        red, piv = rref(aug, dim + self.k) if aug else ([], [])
        if len([p for p in piv if p < dim]) != self.k:
            raise ValueError("vectors are not independent")
        self._rows = red
        self._piv = piv
        self._vectors = [[Fraction(x) for x in v] for v in vectors]

    def split(self, v: Sequence[int | Fraction]) -> QVector | None:
        # v^T = c^T B; with R = E [B | I] in rref, pivot columns of B give c.
        coeffs = [Fraction(0)] * self.k
        r = [Fraction(x) for x in v]
        for row, p in zip(self._rows, self._piv):
            if p >= self.dim:
                break
            c = r[p]
            if c:
                for j in range(p, self.dim):
                    if row[j]:
                        r[j] -= c * row[j]
                for j in range(self.k):
                    x = row[self.dim + j]
                    if x:
                        coeffs[j] += c * x
        if any(r):
            return None
        return coeffs


def rational_nullspace(rows: Sequence[Sequence[int | Fraction]], ncols: int) -> list[QVector]:
    """Basis of ``{x in Q^ncols : M x = 0}``."""
    if not rows:
        return q_identity(ncols)
    red, piv = rref([[Fraction(x) for x in r] for r in rows], ncols)
    free = [j for j in range(ncols) if j not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis
