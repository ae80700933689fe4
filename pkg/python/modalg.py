"""
Modular Linear Algebra over Z_m

Exact row reduction (Howell form) and kernel counting for homogeneous systems
modulo an integer m >= 2 that need not be prime.
"""

import itertools
import logging
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModMatrix:
    """Row-major integer matrix with entries reduced into [0, modulus)."""

    modulus: int
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"Modulus must be at least 2, got {self.modulus}")
        if self.rows * self.cols != len(self.entries):
            raise ValueError(
                f"Expected {self.rows}x{self.cols}={self.rows * self.cols} entries, got {len(self.entries)}"
            )
        for e in self.entries:
            if not 0 <= e < self.modulus:
                raise ValueError(f"Entry {e} is not reduced modulo {self.modulus}")

    @classmethod
    def from_rows(cls, modulus: int, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "ModMatrix":
        """
        Build a matrix from a list of rows, reducing every entry mod modulus.

        Args:
            modulus: The modulus m
            rows: Row vectors (integers of any sign)
            cols: Column count, required when rows is empty

        Returns:
            ModMatrix
        """
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("Column count is required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError(f"Ragged row of length {len(r)} in a {cols}-column matrix")
        entries = tuple(int(v) % modulus for r in rows for v in r)
        return cls(modulus, len(rows), cols, entries)

    @classmethod
    def zeros(cls, modulus: int, rows: int, cols: int) -> "ModMatrix":
        return cls(modulus, rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, modulus: int, size: int) -> "ModMatrix":
        return cls.from_rows(modulus, [[int(i == j) for j in range(size)] for i in range(size)], cols=size)

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[Tuple[int, ...]]:
        return [self.row(i) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)

    def apply(self, vector: Sequence[int]) -> Tuple[int, ...]:
        """Return M·v reduced mod m."""
        if len(vector) != self.cols:
            raise ValueError(f"Vector of length {len(vector)} does not match {self.cols} columns")
        v = np.array(vector, dtype=np.int64) % self.modulus
        return tuple(int(x) for x in (self.to_array() @ v) % self.modulus)

    def render(self) -> str:
        width = len(str(self.modulus - 1))
        return "\n".join(" ".join(str(e).rjust(width) for e in r) for r in self.to_rows())


@dataclass(frozen=True)
class SolutionSpace:
    """
    Solutions of M·x = 0 over Z_m, given as generators plus the exact count.

    Every solution is written uniquely as sum(c_i * g_i) with
    0 <= c_i < coefficient_ranges[i], so count is the product of the ranges.
    """

    modulus: int
    cols: int
    generators: Tuple[Tuple[int, ...], ...]
    coefficient_ranges: Tuple[int, ...]
    count: int
    source: Optional[ModMatrix] = field(default=None, compare=False, repr=False)

    def contains(self, vector: Sequence[int]) -> bool:
        if self.source is None:
            raise ValueError("Solution space has no source matrix to test membership against")
        return not any(self.source.apply(vector))

    def elements(self) -> Iterator[Tuple[int, ...]]:
        """Yield every solution exactly once."""
        m = self.modulus
        gens = [np.array(g, dtype=np.int64) for g in self.generators]
        for coeffs in itertools.product(*(range(r) for r in self.coefficient_ranges)):
            total = np.zeros(self.cols, dtype=np.int64)
            for c, g in zip(coeffs, gens):
                total = (total + c * g) % m
            yield tuple(int(x) for x in total)


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _unit_normalizer(a: int, m: int) -> int:
    """Unit u of Z_m with u*a = gcd(a, m) (mod m)."""
    g = gcd(a, m)
    q = m // g
    if q == 1:
        return 1
    u = pow((a // g) % q, -1, q)
    while gcd(u, m) != 1:
        u += q
    return u % m


def _howell_rows(rows: List[np.ndarray], m: int, ncols: int) -> List[np.ndarray]:
    """
    Reduce row vectors to Howell form over Z_m.

    Pivots divide m, entries above a pivot lie in [0, pivot), and the
    annihilator multiple of every pivot row is folded back into the
    remaining rows so the result has the Howell property.
    """
    work = [np.array(r, dtype=np.int64) % m for r in rows]
    pivot = 0
    for j in range(ncols):
        if pivot >= len(work):
            break
        for i in range(pivot + 1, len(work)):
            b = int(work[i][j])
            if b == 0:
                continue
            a = int(work[pivot][j])
            g, s, t = _ext_gcd(a, b)
            top, bottom = work[pivot], work[i]
            work[pivot] = (s * top + t * bottom) % m
            work[i] = ((-b // g) * top + (a // g) * bottom) % m
        a = int(work[pivot][j])
        if a == 0:
            continue
        work[pivot] = (_unit_normalizer(a, m) * work[pivot]) % m
        g = int(work[pivot][j])
        for i in range(pivot):
            q = int(work[i][j]) // g
            if q:
                work[i] = (work[i] - q * work[pivot]) % m
        annihilated = ((m // g) * work[pivot]) % m
        if annihilated.any():
            work.append(annihilated)
        pivot += 1
    return work[:pivot]


def _leading(row: Sequence[int]) -> int:
    for v in row:
        if v:
            return int(v)
    raise ValueError("Zero row has no leading entry")


def howell_form(M: ModMatrix) -> ModMatrix:
    """
    Canonical row-reduced form of M over Z_m.

    The non-zero rows are the Howell basis of the row span (unique for the
    span); zero rows pad the result back up to M.rows when the basis is
    shorter than the input.

    Args:
        M: Input matrix

    Returns:
        ModMatrix with the same column count and row span
    """
    basis = _howell_rows([M.to_array()[i] for i in range(M.rows)], M.modulus, M.cols)
    out = [tuple(int(x) for x in r) for r in basis]
    out.extend([(0,) * M.cols] * max(0, M.rows - len(out)))
    return ModMatrix.from_rows(M.modulus, out, cols=M.cols)


def rank(M: ModMatrix) -> int:
    """Number of non-zero rows in the Howell form."""
    return sum(1 for r in howell_form(M).to_rows() if any(r))


def span_size(M: ModMatrix) -> int:
    """Number of distinct vectors in the row span of M."""
    return prod(M.modulus // _leading(r) for r in howell_form(M).to_rows() if any(r))


def kernel(M: ModMatrix) -> SolutionSpace:
    """
    Solutions of M·x = 0 (mod m).

    Reduces [M^T | I] to Howell form; the rows whose M^T part vanished span
    the kernel and are themselves a Howell basis of it.

    Args:
        M: Coefficient matrix (one equation per row)

    Returns:
        SolutionSpace with generators, coefficient ranges and exact count
    """
    m, r, c = M.modulus, M.rows, M.cols
    A = M.to_array()
    eye = np.eye(c, dtype=np.int64)
    augmented = [np.concatenate([A[:, k], eye[k]]) for k in range(c)]
    basis = _howell_rows(augmented, m, r + c)

    generators = []
    ranges = []
    for row in basis:
        if row[:r].any():
            continue
        vec = tuple(int(x) for x in row[r:])
        generators.append(vec)
        ranges.append(m // _leading(vec))

    count = prod(ranges)
    logger.debug(f"kernel mod {m}: {r}x{c} system, {len(generators)} generators, {count} solutions")
    return SolutionSpace(
        modulus=m,
        cols=c,
        generators=tuple(generators),
        coefficient_ranges=tuple(ranges),
        count=count,
        source=M,
    )


def solve_count(M: ModMatrix) -> int:
    """Exact number of x with M·x = 0 (mod m)."""
    return kernel(M).count


if __name__ == "__main__":
    hopf = ModMatrix.from_rows(3, [[1, 2, 1, 2], [1, 2, 1, 2]])
    print("Howell form:")
    print(howell_form(hopf).render())
    print(f"Solutions: {solve_count(hopf)}")
