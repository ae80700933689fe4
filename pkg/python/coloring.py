"""
Biquasile Colorings

Counts and lists colorings of dual graph diagrams: every region gets an
element of the biquasile and each crossing record must satisfy
star_out = star_in ∗ (dot_left · dot_right).

The general path is a backtracking search with forward propagation through
the division tables; Alexander biquasiles also have an exact linear path.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from python.biquasile import AlexanderParams, Biquasile
from python.diagram import DualGraphDiagram
from python.modalg import ModMatrix, solve_count
from python.parallel import apply_pool

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ColoringAssignment:
    """Colors of regions 0..R-1, each in 1..order."""

    order: int
    colors: Tuple[int, ...]

    def __getitem__(self, region: int) -> int:
        return self.colors[region]

    def to_json(self) -> List[int]:
        return list(self.colors)


@dataclass(frozen=True)
class Presentation:
    """
    Fundamental biquasile presentation of a diagram.

    relations holds (star_out, star_in, dot_left, dot_right) region indices,
    one per crossing record.
    """

    generators: Tuple[str, ...]
    relations: Tuple[Tuple[int, int, int, int], ...]

    def render(self, ascii: bool = False) -> str:
        star, dot, left, right = ("*", ".", "<", ">") if ascii else ("∗", "·", "⟨", "⟩")
        g = self.generators
        rels = [f"{g[y]} = {g[x]} {star} ({g[a]} {dot} {g[b]})" for y, x, a, b in self.relations]
        return f"{left}{', '.join(g)} | {', '.join(rels)}{right}"

    def satisfied_by(self, colors: Sequence[int], B: Biquasile) -> bool:
        if len(colors) != len(self.generators):
            raise ValueError(f"Expected {len(self.generators)} colors, got {len(colors)}")
        return all(
            colors[y] == B.op_star(colors[x], B.op_dot(colors[a], colors[b]))
            for y, x, a, b in self.relations
        )


def presentation(G: DualGraphDiagram) -> Presentation:
    generators = tuple(f"g{i + 1}" for i in range(G.region_count))
    relations = tuple((r.star_out, r.star_in, r.dot_left, r.dot_right) for r in G.crossings)
    return Presentation(generators, relations)


def variable_order(G: DualGraphDiagram) -> List[int]:
    """Regions by descending incidence with crossing records, ties by index."""
    incidence = G.incidence()
    return sorted(range(G.region_count), key=lambda r: (-incidence[r], r))


def _search(G: DualGraphDiagram, B: Biquasile, root: Optional[int] = None) -> List[Tuple[int, ...]]:
    """
    Backtracking over regions in variable_order.

    After each assignment, any record with three colored roles fixes the
    fourth; a fully colored record is checked. With root given, the first
    region in the order is pinned to that color.
    """
    star, dot = B.star, B.dot
    div = B.divisions
    records = [r.regions() for r in G.crossings]
    touching: List[List[int]] = [[] for _ in range(G.region_count)]
    for k, regions in enumerate(records):
        for r in set(regions):
            touching[r].append(k)
    order = variable_order(G)
    colors = [0] * G.region_count
    found = []

    def assign(region: int, value: int, trail: List[int]) -> bool:
        queue = [(region, value)]
        while queue:
            r, v = queue.pop()
            if colors[r]:
                if colors[r] != v:
                    return False
                continue
            colors[r] = v
            trail.append(r)
            for k in touching[r]:
                x, a, b, y = records[k]
                cx, ca, cb, cy = colors[x], colors[a], colors[b], colors[y]
                missing = (cx == 0) + (ca == 0) + (cb == 0) + (cy == 0)
                if missing == 0:
                    if star[cx - 1][dot[ca - 1][cb - 1] - 1] != cy:
                        return False
                elif missing == 1:
                    if cy == 0:
                        queue.append((y, star[cx - 1][dot[ca - 1][cb - 1] - 1]))
                    elif cx == 0:
                        queue.append((x, div.star_right[cy - 1][dot[ca - 1][cb - 1] - 1]))
                    elif ca == 0:
                        t = div.star_left[cx - 1][cy - 1]
                        queue.append((a, div.dot_right[t - 1][cb - 1]))
                    else:
                        t = div.star_left[cx - 1][cy - 1]
                        queue.append((b, div.dot_left[ca - 1][t - 1]))
        return True

    def backtrack(i: int):
        while i < len(order) and colors[order[i]]:
            i += 1
        if i == len(order):
            found.append(tuple(colors))
            return
        r = order[i]
        values = [root] if i == 0 and root is not None else range(1, B.order + 1)
        for v in values:
            trail: List[int] = []
            if assign(r, v, trail):
                backtrack(i + 1)
            for t in trail:
                colors[t] = 0

    backtrack(0)
    return found


def enumerate_colorings(G: DualGraphDiagram, B: Biquasile, workers: int = 1) -> List[ColoringAssignment]:
    """
    Every coloring of G by B, in lexicographic color order.

    Args:
        G: Dual graph diagram
        B: Biquasile (both tables Latin)
        workers: Processes to split the first region's colors across

    Returns:
        Sorted list of ColoringAssignment
    """
    if workers > 1 and G.region_count and B.order > 1:
        parts = apply_pool(_search, [(G, B, v) for v in range(1, B.order + 1)], workers)
        found = [c for part in parts for c in part]
    else:
        found = _search(G, B)
    return [ColoringAssignment(B.order, c) for c in sorted(found)]


def count_colorings(G: DualGraphDiagram, B: Biquasile, workers: int = 1) -> int:
    count = len(enumerate_colorings(G, B, workers))
    logger.debug(f"{count} colorings over {G.region_count} regions, order {B.order}")
    return count


def coefficient_matrix(G: DualGraphDiagram, p: AlexanderParams) -> ModMatrix:
    """
    Alexander coloring system, one row per record and one column per region.

    Row: star_out + dsn²·star_in - nd·dot_left - ns·dot_right ≡ 0; coefficients
    add up when a region fills several roles.
    """
    m, d, s, n = p.modulus, p.d, p.s, p.n_param
    rows = []
    for record in G.crossings:
        row = [0] * G.region_count
        row[record.star_out] += 1
        row[record.star_in] += d * s * n * n
        row[record.dot_left] -= n * d
        row[record.dot_right] -= n * s
        rows.append(row)
    return ModMatrix.from_rows(m, rows, cols=G.region_count)


def count_colorings_alexander(G: DualGraphDiagram, p: AlexanderParams) -> int:
    """Exact coloring count from the kernel of the Alexander system."""
    return solve_count(coefficient_matrix(G, p))
