"""Square matrices of expressions: exact determinant, adjugate, inverse."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import expr as ex


class SingularMatrixError(ex.ExprError):
    pass


@dataclass(frozen=True)
class MatrixExpr:
    entries: tuple  # tuple of row tuples of Expr

    def __post_init__(self):
        rows = tuple(tuple(ex.normalize(ex._coerce(e)) for e in row)
                     for row in self.entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_det", None)

    @property
    def rows(self):
        return len(self.entries)

    @property
    def cols(self):
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, rc):
        return self.entries[rc[0]][rc[1]]

    @staticmethod
    def identity(n):
        return MatrixExpr(tuple(
            tuple(ex.ONE if i == j else ex.ZERO for j in range(n))
            for i in range(n)))

    @staticmethod
    def zero(n, m=None):
        m = n if m is None else m
        return MatrixExpr(tuple(tuple(ex.ZERO for _ in range(m))
                                for _ in range(n)))

    def map(self, fn):
        return MatrixExpr(tuple(tuple(fn(e) for e in row)
                                for row in self.entries))

    def add(self, other):
        return MatrixExpr(tuple(
            tuple(a + b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.entries, other.entries)))

    def sub(self, other):
        return MatrixExpr(tuple(
            tuple(a - b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.entries, other.entries)))

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("matrix shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ex.ZERO
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(tuple(row))
        return MatrixExpr(tuple(out))

    def scale(self, f):
        f = ex._coerce(f)
        return self.map(lambda e: f * e)

    def transpose(self):
        return MatrixExpr(tuple(zip(*self.entries)))

    def is_square(self):
        return self.rows == self.cols

    def minor(self, i, j):
        return MatrixExpr(tuple(
            tuple(e for c, e in enumerate(row) if c != j)
            for r, row in enumerate(self.entries) if r != i))

    def det(self):
        if self._det is not None:
            return self._det
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            d = ex.ONE
        elif n == 1:
            d = self.entries[0][0]
        elif n == 2:
            (a, b), (c, e) = self.entries
            d = a * e - b * c
        else:
            d = ex.ZERO
            for j in range(n):
                sign = ex.num(-1 if j % 2 else 1)
                d = d + sign * self.entries[0][j] * self.minor(0, j).det()
        d = ex.normalize(d)
        object.__setattr__(self, "_det", d)
        return d

    def adjugate(self):
        n = self.rows
        if n == 1:
            return MatrixExpr(((ex.ONE,),))
        cof = []
        for i in range(n):
            row = []
            for j in range(n):
                sign = ex.num(-1 if (i + j) % 2 else 1)
                row.append(ex.normalize(sign * self.minor(i, j).det()))
            cof.append(tuple(row))
        return MatrixExpr(tuple(cof)).transpose()

    def inverse(self, rng=None):
        d = self.det()
        verdict = ex.is_zero(d, rng)
        if verdict == ex.PROVEN_ZERO:
            raise SingularMatrixError("matrix determinant is zero")
        inv_d = ex.power(d, -1)
        return self.adjugate().map(lambda e: ex.normalize(e * inv_d))

    def equals(self, other, rng=None):
        if self.rows != other.rows or self.cols != other.cols:
            return False
        return all(
            ex.is_zero(a - b, rng) == ex.PROVEN_ZERO
            for r1, r2 in zip(self.entries, other.entries)
            for a, b in zip(r1, r2))

    def is_zero_matrix(self, rng=None):
        return all(ex.is_zero(e, rng) == ex.PROVEN_ZERO
                   for row in self.entries for e in row)

    def render(self):
        return "[" + ", ".join(
            "[" + ", ".join(ex.render(e) for e in row) + "]"
            for row in self.entries) + "]"


def commutator(A, B):
    return A.mul(B).sub(B.mul(A))


def symbolic_rank(rows, rng=None):
    """(rank, certain) of a list of expression rows by Gaussian elimination.

    `certain` is False when some eliminated entry was only probably zero,
    in which case the rank is a generic-point estimate."""
    rng = rng or random.Random(ex.DEFAULT_PROBE_SEED)
    work = [[ex.normalize(e) for e in row] for row in rows]
    ncols = len(work[0]) if work else 0
    used = set()
    certain = True
    rank = 0
    for col in range(ncols):
        best = None
        for r in range(len(work)):
            if r in used:
                continue
            entry = work[r][col]
            verdict = ex.is_zero(entry, rng)
            if verdict == ex.PROVEN_ZERO:
                continue
            if verdict in (ex.PROBABLY_ZERO, ex.UNKNOWN):
                certain = False
                continue
            size = ex.complexity(entry)
            if best is None or size < best[0]:
                best = (size, r)
        if best is None:
            continue
        _, prow = best
        used.add(prow)
        rank += 1
        pivot = work[prow][col]
        for r in range(len(work)):
            if r == prow or r in used:
                continue
            factor = work[r][col]
            if ex.is_zero(factor, rng) == ex.PROVEN_ZERO:
                continue
            scale = ex.normalize(factor / pivot)
            work[r] = [ex.normalize(work[r][k] - scale * work[prow][k])
                       for k in range(ncols)]
    return rank, certain


def numeric_rank(rows, symbols, rng, probes=5, tol=1e-8):
    """Generic rank by exact rational evaluation is unavailable for
    transcendental entries, so probe in floating point and take the
    maximal rank over sample points."""
    best = 0
    attempts = 0
    good = 0
    while good < probes and attempts < probes * 12:
        attempts += 1
        point = {s: random.Random(rng.randint(0, 10 ** 9)).uniform(-3, 3)
                 for s in symbols}
        try:
            mat = [[ex.eval_numeric(e, point) for e in row] for row in rows]
        except ex.EvalDomainError:
            continue
        good += 1
        best = max(best, _float_rank(mat, tol))
    return best


def _float_rank(mat, tol):
    m = [row[:] for row in mat]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank = 0
    row = 0
    for col in range(ncols):
        piv, piv_val = None, tol
        for r in range(row, nrows):
            if abs(m[r][col]) > piv_val:
                piv, piv_val = r, abs(m[r][col])
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        for r in range(nrows):
            if r != row and abs(m[r][col]) > 0:
                f = m[r][col] / pv
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank
