"""Exact integer linear algebra over Python ints.

Matrices are plain row-major lists of lists. Everything here is small
(at most 33x33 for arity-5 lifts), so correctness beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

from .errors import InvalidInputError

IntMatrix = list[list[int]]


def as_matrix(M: Sequence[Sequence[int]]) -> IntMatrix:
    rows = [list(map(int, row)) for row in M]
    if not rows or not rows[0]:
        raise InvalidInputError("matrix must have at least one row and one column")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise InvalidInputError("ragged matrix")
    return rows


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def matvec(A: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def vecmat(x: Sequence[int], A: Sequence[Sequence[int]]) -> list[int]:
    return [sum(a * b for a, b in zip(x, col)) for col in zip(*A)]


def transpose(A: Sequence[Sequence[int]]) -> IntMatrix:
    return [list(col) for col in zip(*A)]


@dataclass
class SnfDecomposition:
    """``U @ M @ V == D`` with U, V unimodular and D in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    diagonal: list[int]
    source: IntMatrix = field(repr=False)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    def solve(self, w: Sequence[int]) -> Optional[list[int]]:
        """Integer solution z of ``source @ z == w``, or None."""
        rows, cols = len(self.source), len(self.source[0])
        if len(w) != rows:
            raise InvalidInputError(f"right-hand side has length {len(w)}, expected {rows}")
        y = matvec(self.U, w)
        x = [0] * cols
        for i, yi in enumerate(y):
            d = self.diagonal[i] if i < len(self.diagonal) else 0
            if d == 0:
                if yi:
                    return None
            elif yi % d:
                return None
            else:
                x[i] = yi // d
        z = matvec(self.V, x)
        if matvec(self.source, z) != list(w):
            raise ArithmeticError("Smith solve produced a non-solution")
        return z

    def residual(self, w: Sequence[int]) -> list[int]:
        """``U @ w``: the right-hand side in the diagonal coordinates."""
        return matvec(self.U, w)


def smith_normal_form(M: Sequence[Sequence[int]]) -> SnfDecomposition:
    """Smith normal form with transforms.

    Pivot rule: the smallest-magnitude nonzero entry of the remaining
    submatrix, ties broken by row then column index.
    """
    A = as_matrix(M)
    source = [row[:] for row in A]
    m, n = len(A), len(A[0])
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for s in range(min(m, n)):
        while True:
            best = None
            for i in range(s, m):
                for j in range(s, n):
                    a = A[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != s:
                swap_rows(s, pi)
            if pj != s:
                swap_cols(s, pj)
            p = A[s][s]
            clean = True
            for i in range(s + 1, m):
                if A[i][s]:
                    add_row(i, s, -(A[i][s] // p))
                    clean = clean and A[i][s] == 0
            for j in range(s + 1, n):
                if A[s][j]:
                    add_col(j, s, -(A[s][j] // p))
                    clean = clean and A[s][j] == 0
            if not clean:
                continue
            offender = next(
                (i for i in range(s + 1, m) for j in range(s + 1, n) if A[i][j] % p),
                None,
            )
            if offender is None:
                break
            add_row(s, offender, 1)
        if A[s][s] < 0:
            A[s] = [-a for a in A[s]]
            U[s] = [-u for u in U[s]]

    diagonal = [A[i][i] for i in range(min(m, n))]
    return SnfDecomposition(U=U, D=A, V=V, diagonal=diagonal, source=source)


def solve_integer(M: Sequence[Sequence[int]], w: Sequence[int]) -> Optional[list[int]]:
    return smith_normal_form(M).solve(w)


def in_integer_span(generators: Sequence[Sequence[int]], w: Sequence[int]) -> bool:
    if not generators:
        return all(x == 0 for x in w)
    length = len(generators[0])
    if any(len(g) != length for g in generators) or len(w) != length:
        raise InvalidInputError("generators and target must have equal length")
    return solve_integer(transpose(generators), w) is not None


def left_nullspace_mod(
    M: Sequence[Sequence[int]], q: int, decomposition: Optional[SnfDecomposition] = None
) -> list[list[int]]:
    """Generators of ``{a : a @ M == 0 (mod q)}``, one per row of M.

    Row i of U scaled by q / gcd(d_i, q) (by 1 past the diagonal) and
    reduced mod q. Zero generators are kept so the count is always rows(M).
    """
    if not isinstance(q, int) or q < 2:
        raise InvalidInputError(f"modulus must be an integer >= 2, got {q!r}")
    snf = decomposition or smith_normal_form(M)
    out = []
    for i, u_row in enumerate(snf.U):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        factor = q // gcd(d, q)
        gen = [factor * u % q for u in u_row]
        if any(v % q for v in vecmat(gen, snf.source)):
            raise ArithmeticError("null-space generator does not annihilate the matrix")
        out.append(gen)
    return out
