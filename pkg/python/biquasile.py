"""
Finite Biquasiles

A biquasile is a set with two quasigroup operations, star (∗) and dot (·),
satisfying two exchange axioms. Elements are labelled 1..n; for Alexander
biquasiles over Z_n the label n stands for the zero residue.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from python.parallel import apply_pool

logger = logging.getLogger(__name__)

Table = Tuple[Tuple[int, ...], ...]

MAX_ENUMERATION_ORDER = 4


class MalformedTableError(ValueError):
    """Operation table has the wrong shape or an entry outside 1..n."""


class ParameterError(ValueError):
    """Alexander parameters are not units, or an order is unsupported."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of an axiom check; witness is None when valid."""

    valid: bool
    axiom: Optional[str] = None
    witness: Optional[Tuple[int, ...]] = None
    reason: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {
            'valid': self.valid,
            'axiom': self.axiom,
            'witness': list(self.witness) if self.witness is not None else None,
            'reason': self.reason,
        }

    def describe(self) -> str:
        if self.valid:
            return "pass"
        return f"fail: {self.axiom} {self.reason}".rstrip()


def _as_table(rows: Sequence[Sequence[int]], order: int, name: str) -> Table:
    if len(rows) != order:
        raise MalformedTableError(f"{name} table has {len(rows)} rows, expected {order}")
    table = []
    for i, row in enumerate(rows, 1):
        if len(row) != order:
            raise MalformedTableError(f"{name} row {i} has {len(row)} entries, expected {order}")
        for j, value in enumerate(row, 1):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise MalformedTableError(f"{name}[{i}][{j}] = {value!r} is not an integer")
            if not 1 <= value <= order:
                raise MalformedTableError(f"{name}[{i}][{j}] = {value} is outside 1..{order}")
        table.append(tuple(int(v) for v in row))
    return tuple(table)


def _invert_rows(table: Table) -> Table:
    """result[y][z] = the x with table[y][x] = z (left division)."""
    n = len(table)
    out = [[0] * n for _ in range(n)]
    for y in range(n):
        for x in range(n):
            out[y][table[y][x] - 1] = x + 1
    return tuple(tuple(r) for r in out)


def _invert_cols(table: Table) -> Table:
    """result[z][y] = the x with table[x][y] = z (right division)."""
    n = len(table)
    out = [[0] * n for _ in range(n)]
    for y in range(n):
        for x in range(n):
            out[table[x][y] - 1][y] = x + 1
    return tuple(tuple(r) for r in out)


def _latin_failure(table: Table) -> Optional[Tuple[str, int, int]]:
    """First (line kind, 1-based index, repeated symbol) breaking the Latin property."""
    n = len(table)
    for kind, lines in (("row", table), ("column", tuple(zip(*table)))):
        for i, line in enumerate(lines, 1):
            seen = set()
            for v in line:
                if v in seen:
                    return kind, i, v
                seen.add(v)
    return None


@dataclass(frozen=True)
class DivisionTables:
    """
    The four derived operations, 1-indexed.

    star_left[y][z] = y\\∗z, star_right[z][y] = z/∗y,
    dot_left[y][z] = y\\z,   dot_right[z][y] = z/y.
    """

    star_left: Table
    star_right: Table
    dot_left: Table
    dot_right: Table


@dataclass(frozen=True)
class Biquasile:
    """A pair of n×n operation tables over {1..n}; check_axioms decides validity."""

    order: int
    star: Table
    dot: Table

    def __post_init__(self):
        if self.order < 1:
            raise MalformedTableError(f"Order must be positive, got {self.order}")
        object.__setattr__(self, 'star', _as_table(self.star, self.order, "star"))
        object.__setattr__(self, 'dot', _as_table(self.dot, self.order, "dot"))

    @classmethod
    def from_rows(cls, star: Sequence[Sequence[int]], dot: Sequence[Sequence[int]]) -> "Biquasile":
        return cls(len(star), star, dot)

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Biquasile":
        """Build from {"order": n, "star": [[...]], "dot": [[...]]}."""
        try:
            order, star, dot = data['order'], data['star'], data['dot']
        except (KeyError, TypeError):
            raise MalformedTableError("Biquasile JSON needs 'order', 'star' and 'dot' keys")
        if not isinstance(order, int) or not isinstance(star, list) or not isinstance(dot, list):
            raise MalformedTableError("Biquasile JSON has the wrong value types")
        return cls(order, star, dot)

    def to_json(self) -> Dict[str, Any]:
        return {'order': self.order, 'star': [list(r) for r in self.star], 'dot': [list(r) for r in self.dot]}

    def op_star(self, x: int, y: int) -> int:
        return self.star[x - 1][y - 1]

    def op_dot(self, x: int, y: int) -> int:
        return self.dot[x - 1][y - 1]

    def is_latin(self) -> bool:
        return _latin_failure(self.star) is None and _latin_failure(self.dot) is None

    @cached_property
    def divisions(self) -> DivisionTables:
        return derived_divisions(self)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """0-indexed numpy copies of (star, dot)."""
        return np.array(self.star, dtype=np.int64) - 1, np.array(self.dot, dtype=np.int64) - 1


@dataclass(frozen=True)
class AlexanderParams:
    """Units d, s, n_param of Z_modulus for x·y = dx+sy and x∗y = -dsn²x+ny."""

    modulus: int
    d: int
    s: int
    n_param: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ParameterError(f"Alexander modulus must be at least 2, got {self.modulus}")
        for name in ('d', 's', 'n_param'):
            value = getattr(self, name) % self.modulus
            if gcd(value, self.modulus) != 1:
                raise ParameterError(f"{name}={getattr(self, name)} is not a unit mod {self.modulus}")
            object.__setattr__(self, name, value)

    @classmethod
    def parse(cls, text: str) -> "AlexanderParams":
        """Parse "modulus,d,s,n_param"."""
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 4:
            raise ParameterError(f"Expected modulus,d,s,n_param, got: {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError as e:
            if isinstance(e, ParameterError):
                raise
            raise ParameterError(f"Alexander parameters must be integers, got: {text!r}")

    def label(self) -> str:
        return f"{self.modulus},{self.d},{self.s},{self.n_param}"

    def residue(self, label: int) -> int:
        return label % self.modulus

    def to_label(self, value: int) -> int:
        return value % self.modulus or self.modulus

    def inverse(self, value: int) -> int:
        return pow(value, -1, self.modulus)


def unit_triples(modulus: int) -> List[AlexanderParams]:
    """All Alexander parameter triples over Z_modulus, ordered by (d, s, n_param)."""
    units = [u for u in range(1, modulus) if gcd(u, modulus) == 1]
    return [AlexanderParams(modulus, d, s, n) for d, s, n in itertools.product(units, repeat=3)]


def alexander(p: AlexanderParams) -> Biquasile:
    """
    The Alexander biquasile on {1..modulus}.

    Args:
        p: Validated parameters

    Returns:
        Biquasile with x·y = dx+sy and x∗y = -dsn²x+ny
    """
    m = p.modulus
    star_coeff = (-p.d * p.s * p.n_param * p.n_param) % m
    labels = range(1, m + 1)
    star = [[p.to_label(star_coeff * x + p.n_param * y) for y in labels] for x in labels]
    dot = [[p.to_label(p.d * x + p.s * y) for y in labels] for x in labels]
    return Biquasile(m, star, dot)


def alexander_divisions(p: AlexanderParams) -> DivisionTables:
    """
    Closed-form divisions of the Alexander biquasile.

    x\\∗y = dsn·x + n⁻¹y, x\\y = -ds⁻¹x + s⁻¹y, x/y = d⁻¹x - d⁻¹sy and
    x/∗y = -(dsn²)⁻¹(x - ny).
    """
    m, d, s, n = p.modulus, p.d, p.s, p.n_param
    inv_n, inv_s, inv_d = p.inverse(n), p.inverse(s), p.inverse(d)
    inv_dsn2 = p.inverse((d * s * n * n) % m)
    labels = range(1, m + 1)

    def table(f):
        return tuple(tuple(p.to_label(f(x, y)) for y in labels) for x in labels)

    return DivisionTables(
        star_left=table(lambda x, y: d * s * n * x + inv_n * y),
        star_right=table(lambda x, y: -inv_dsn2 * (x - n * y)),
        dot_left=table(lambda x, y: -d * inv_s * x + inv_s * y),
        dot_right=table(lambda x, y: inv_d * x - inv_d * s * y),
    )


def is_alexander(B: Biquasile) -> Optional[AlexanderParams]:
    """Alexander parameters reproducing B's tables exactly, or None."""
    if B.order < 2:
        return None
    for p in unit_triples(B.order):
        candidate = alexander(p)
        if candidate.star == B.star and candidate.dot == B.dot:
            return p
    return None


def derived_divisions(B: Biquasile) -> DivisionTables:
    """
    Invert the operation tables.

    Raises:
        ValueError: if either table is not a Latin square
    """
    if not B.is_latin():
        raise ValueError("Divisions need both tables to be Latin squares")
    return DivisionTables(
        star_left=_invert_rows(B.star),
        star_right=_invert_cols(B.star),
        dot_left=_invert_rows(B.dot),
        dot_right=_invert_cols(B.dot),
    )


def _exchange_sides(stars: np.ndarray, dot: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluate both exchange axioms over every (a, b, x, y), for a stack of star tables.

    Args:
        stars: (K, n, n) 0-indexed star tables
        dot: (n, n) 0-indexed dot table

    Returns:
        Two (K, n⁴) boolean arrays (axiom (i) holds, axiom (ii) holds), tuples in
        lexicographic (a, b, x, y) order
    """
    count, n = stars.shape[0], dot.shape[0]
    k = np.arange(count)[:, None]
    a, b, x, y = (np.broadcast_to(v, (count, v.size)) for v in np.indices((n,) * 4).reshape(4, -1))

    def st(u, v):
        return stars[k, u, v]

    y_ab = st(y, dot[a, b])
    a_xy = st(a, dot[x, y])
    a_x_yab = st(a, dot[x, y_ab])
    first = a_x_yab == st(a_xy, dot[x, st(y, dot[a_xy, b])])
    second = st(y, dot[a_xy, b]) == st(y_ab, dot[a_x_yab, b])
    return first, second


def check_axioms(B: Biquasile) -> Verdict:
    """
    Decide whether the tables form a biquasile.

    Args:
        B: Candidate tables (shape and range already validated)

    Returns:
        Verdict; failures name the broken property and a witness. Latin
        failures give (line index, repeated symbol); exchange failures give
        (a, b, x, y).
    """
    for name, table in (("star", B.star), ("dot", B.dot)):
        failure = _latin_failure(table)
        if failure is not None:
            kind, index, symbol = failure
            return Verdict(
                valid=False,
                axiom=f"latin-{name}",
                witness=(index, symbol),
                reason=f"{kind} {index} of {name} repeats {symbol}",
            )

    star, dot = B.arrays()
    first, second = _exchange_sides(star[None], dot)
    n = B.order
    for axiom, holds in (("i", first[0]), ("ii", second[0])):
        if not holds.all():
            flat = int(np.argmin(holds))
            witness = tuple(int(v) + 1 for v in np.unravel_index(flat, (n,) * 4))
            return Verdict(
                valid=False,
                axiom=axiom,
                witness=witness,
                reason=f"(a,b,x,y)={witness}",
            )
    return Verdict(valid=True)


@lru_cache(maxsize=None)
def latin_squares(order: int) -> Tuple[Table, ...]:
    """Every Latin square of the given order, in lexicographic row-major order."""
    perms = list(itertools.permutations(range(1, order + 1)))
    found = []

    def extend(rows: List[Tuple[int, ...]]):
        if len(rows) == order:
            found.append(tuple(rows))
            return
        for perm in perms:
            if all(perm[c] != row[c] for row in rows for c in range(order)):
                rows.append(perm)
                extend(rows)
                rows.pop()

    extend([])
    return tuple(found)


def _stars_matching_dot(order: int, dot_index: int) -> List[int]:
    """Indices of star tables that form a biquasile with latin_squares(order)[dot_index]."""
    squares = latin_squares(order)
    stars = np.array(squares, dtype=np.int64) - 1
    dot = np.array(squares[dot_index], dtype=np.int64) - 1
    first, second = _exchange_sides(stars, dot)
    return [int(k) for k in np.flatnonzero(first.all(axis=1) & second.all(axis=1))]


def enumerate_biquasiles(order: int, workers: int = 1) -> List[Biquasile]:
    """
    Every biquasile of the given order, sorted by (star, dot) tables.

    Candidates are pairs of Latin squares; for each dot table the axioms are
    evaluated against all star tables at once.

    Args:
        order: 1..4
        workers: Process count for splitting the dot tables

    Returns:
        List of Biquasile
    """
    if not 1 <= order <= MAX_ENUMERATION_ORDER:
        raise ParameterError(f"Enumeration supports orders 1..{MAX_ENUMERATION_ORDER}, got {order}")
    squares = latin_squares(order)
    logger.info(f"Checking {len(squares) ** 2} Latin square pairs of order {order}")
    matches = apply_pool(_stars_matching_dot, [(order, i) for i in range(len(squares))], workers)

    pairs = sorted((squares[k], squares[i]) for i, ks in enumerate(matches) for k in ks)
    logger.info(f"Found {len(pairs)} biquasiles of order {order}")
    return [Biquasile(order, star, dot) for star, dot in pairs]


def render_block_matrix(B: Biquasile) -> str:
    """Render as the block matrix [star | dot], one table row per line."""
    width = len(str(B.order))

    def cells(row):
        return " ".join(str(v).rjust(width) for v in row)

    return "\n".join(f"{cells(s)} | {cells(d)}" for s, d in zip(B.star, B.dot))


if __name__ == "__main__":
    X = alexander(AlexanderParams(3, 1, 1, 2))
    print(render_block_matrix(X))
    print(check_axioms(X).describe())
