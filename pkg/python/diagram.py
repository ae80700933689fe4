"""
Link Diagrams and Dual Graph Diagrams

Parses PD codes (KnotTheory convention: each X[i,j,k,l] lists its edges
counterclockwise starting from the incoming under-strand), traces the
regions of the underlying 4-valent plane graph, and emits one crossing
record per crossing with the four corner regions in their coloring roles.
Also builds R1/R2-perturbed equivalents and braid closures.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

Crossing = Tuple[int, int, int, int]
Occurrence = Tuple[int, int]

_X_TERM = re.compile(r"X\[([^\]]*)\]")
_PD_BODY = re.compile(r"\s*(X\[[^\]]*\]\s*(,\s*X\[[^\]]*\]\s*)*)?")
_TUPLE_TEXT = re.compile(r"[\s\d,;\[\]\(\)-]*")


class PDParseError(ValueError):
    """PD text is malformed or does not describe an oriented diagram."""


class SplitDiagramError(ValueError):
    """Diagram is disconnected; split links are not supported."""


class PerturbationError(ValueError):
    """Requested R1/R2 move has no valid site."""


@dataclass(frozen=True)
class LinkDiagram:
    """
    Parsed PD code.

    over_entry[c] is the position (1 or 3) where the over-strand enters
    crossing c; components list edge labels in traversal order.
    """

    crossings: Tuple[Crossing, ...]
    over_entry: Tuple[int, ...]
    components: Tuple[Tuple[int, ...], ...]

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    @property
    def edge_count(self) -> int:
        return sum(len(c) for c in self.components)

    @property
    def component_count(self) -> int:
        # PD[] is the 0-crossing unknot
        return len(self.components) or 1

    def writhe(self) -> int:
        return sum(crossing_sign(self, c) for c in range(self.crossing_count))


@dataclass(frozen=True)
class RegionTrace:
    """Faces of a diagram: corners[c][p] is the region between positions p and p+1 of crossing c."""

    region_count: int
    corners: Tuple[Tuple[int, int, int, int], ...]
    faces: Tuple[Tuple[Occurrence, ...], ...]


# Weight rules. A drawn diagram weights +φ(x, a, b) at a positive crossing and
# -φ(y, a, b) at a negative one; a diagram traced from a PD code weights
# φ(x, a, b) with the opposite of the crossing sign.
DRAWN = "drawn"
TRACED = "traced"
WEIGHT_RULES = (DRAWN, TRACED)


@dataclass(frozen=True)
class CrossingRecord:
    """
    One dual-graph crossing: star_out = star_in ∗ (dot_left · dot_right).

    sign is the crossing sign.
    """

    sign: int
    star_in: int
    dot_left: int
    dot_right: int
    star_out: int

    def regions(self) -> Tuple[int, int, int, int]:
        return self.star_in, self.dot_left, self.dot_right, self.star_out

    def weighted(self, rule: str) -> Tuple[int, int]:
        """(coefficient, region) of the Boltzmann weight φ(region, dot_left, dot_right) under a weight rule."""
        if rule == TRACED:
            return -self.sign, self.star_in
        return self.sign, self.star_in if self.sign > 0 else self.star_out

    def to_json(self) -> Dict[str, int]:
        return {'sign': self.sign, 'x': self.star_in, 'a': self.dot_left, 'b': self.dot_right, 'y': self.star_out}


@dataclass(frozen=True)
class DualGraphDiagram:
    region_count: int
    crossings: Tuple[CrossingRecord, ...]
    weight_rule: str = DRAWN

    def __post_init__(self):
        if self.weight_rule not in WEIGHT_RULES:
            raise ValueError(f"Unknown weight rule {self.weight_rule!r}, expected one of {', '.join(WEIGHT_RULES)}")
        if self.region_count < 1:
            raise ValueError(f"A dual graph diagram needs at least one region, got {self.region_count}")
        for i, record in enumerate(self.crossings):
            if record.sign not in (1, -1):
                raise ValueError(f"Crossing {i} has sign {record.sign}, expected +1 or -1")
            for r in record.regions():
                if not 0 <= r < self.region_count:
                    raise ValueError(f"Crossing {i} refers to region {r} outside 0..{self.region_count - 1}")

    def to_json(self) -> Dict[str, Any]:
        return {
            'regions': self.region_count,
            'rule': self.weight_rule,
            'crossings': [r.to_json() for r in self.crossings],
        }

    def incidence(self) -> List[int]:
        """Number of record slots each region occupies."""
        counts = [0] * self.region_count
        for record in self.crossings:
            for r in record.regions():
                counts[r] += 1
        return counts


def dual_graph_from_json(data: Dict[str, Any]) -> DualGraphDiagram:
    """
    Read {"regions": n, "crossings": [{"sign", "x", "a", "b", "y"}, ...]}.

    An optional "rule" key selects the weight rule; hand-entered diagrams
    default to the drawn rule.
    """
    try:
        records = tuple(
            CrossingRecord(int(c['sign']), int(c['x']), int(c['a']), int(c['b']), int(c['y']))
            for c in data['crossings']
        )
        return DualGraphDiagram(int(data['regions']), records, str(data.get('rule', DRAWN)))
    except (KeyError, TypeError) as e:
        raise ValueError(f"Dual graph JSON is missing a field: {e}")


def _occurrences(crossings: Sequence[Sequence[Hashable]]) -> Dict[Hashable, List[Occurrence]]:
    occ = defaultdict(list)
    for c, crossing in enumerate(crossings):
        for p, label in enumerate(crossing):
            occ[label].append((c, p))
    for label, places in occ.items():
        if len(places) != 2:
            raise PDParseError(f"Edge {label} appears {len(places)} times, expected exactly 2")
    return dict(occ)


def _other(occ: Dict[Hashable, List[Occurrence]], label: Hashable, here: Occurrence) -> Occurrence:
    first, second = occ[label]
    return second if first == here else first


def _walk(crossings, occ, label, head: Occurrence) -> List[Tuple[Hashable, int, int]]:
    """
    Follow a strand from edge `label` entering crossing head[0] at position head[1].

    Returns (edge, crossing, entry position) for every passage until the walk closes.
    """
    passages = []
    edge, (c, p) = label, head
    for _ in range(2 * len(occ) + 1):
        passages.append((edge, c, p))
        exit_pos = (p + 2) % 4
        edge = crossings[c][exit_pos]
        c, p = _other(occ, edge, (c, exit_pos))
        if edge == label and (c, p) == head:
            return passages
    raise PDParseError(f"Strand through edge {label} does not close up")


def _orient(crossings: Sequence[Crossing]) -> Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...]]:
    """
    Orient every component and find where each over-strand enters.

    Under-strand passages fix a component's direction (they must enter at
    position 0); a component that only ever passes over is oriented by
    increasing edge labels.
    """
    occ = _occurrences(crossings)
    over_entry: List[Optional[int]] = [None] * len(crossings)
    components = []
    assigned = set()

    for label in sorted(occ):
        if label in assigned:
            continue
        walk = _walk(crossings, occ, label, occ[label][0])
        unders = {p for _, _, p in walk if p in (0, 2)}
        if unders == {2}:
            walk = _walk(crossings, occ, label, occ[label][1])
        elif len(unders) > 1:
            raise PDParseError(f"Component through edge {label} runs against the PD orientation at an under-crossing")
        elif not unders and len(walk) > 2 and walk[1][0] != label + 1:
            walk = _walk(crossings, occ, label, occ[label][1])

        edges = [e for e, _, _ in walk]
        if edges != list(range(label, label + len(edges))):
            raise PDParseError(f"Edge labels {edges} are not consecutive along their component")
        for _, c, p in walk:
            if p in (1, 3):
                if over_entry[c] is not None:
                    raise PDParseError(f"Crossing {c + 1} has two over-strand entries")
                over_entry[c] = p
        assigned.update(edges)
        components.append(tuple(edges))

    for c, entry in enumerate(over_entry):
        if entry is None:
            raise PDParseError(f"Crossing {c + 1} has no over-strand")
    return tuple(over_entry), tuple(components)


def _parse_crossing_list(text: str) -> List[Crossing]:
    stripped = text.strip()
    if not stripped:
        return []
    if "X[" in stripped:
        body = stripped
        if body.startswith("PD[") and body.endswith("]"):
            body = body[3:-1]
        if not _PD_BODY.fullmatch(body):
            raise PDParseError(f"Malformed PD text: {text.strip()[:60]!r}")
        terms = [t.split(",") for t in _X_TERM.findall(body)]
    else:
        if stripped.startswith("PD[") and stripped.endswith("]"):
            stripped = stripped[3:-1]
        if not _TUPLE_TEXT.fullmatch(stripped):
            raise PDParseError(f"Malformed PD text: {text.strip()[:60]!r}")
        numbers = re.findall(r"-?\d+", stripped)
        if len(numbers) % 4:
            raise PDParseError(f"Expected a multiple of 4 labels, got {len(numbers)}")
        terms = [numbers[i:i + 4] for i in range(0, len(numbers), 4)]

    crossings = []
    for term in terms:
        if len(term) != 4:
            raise PDParseError(f"Crossing {term} does not have 4 edges")
        try:
            crossings.append(tuple(int(v) for v in term))
        except ValueError:
            raise PDParseError(f"Crossing {term} has a non-integer edge label")
    return crossings


def parse_pd(text: str) -> LinkDiagram:
    """
    Parse PD[X[a,b,c,d], ...] or a bare list of 4-tuples.

    Args:
        text: PD text; "PD[]" is the 0-crossing unknot

    Returns:
        LinkDiagram with orientation inferred from the PD convention

    Raises:
        PDParseError: for malformed text or an inconsistent diagram
    """
    crossings = _parse_crossing_list(text)
    if not crossings:
        return LinkDiagram((), (), ())
    over_entry, components = _orient(crossings)
    return LinkDiagram(tuple(crossings), over_entry, components)


def to_pd_text(D: LinkDiagram) -> str:
    return "PD[" + ", ".join("X[" + ",".join(str(v) for v in x) + "]" for x in D.crossings) + "]"


def crossing_sign(D: LinkDiagram, c: int) -> int:
    """Writhe of crossing c: +1 when the over-strand runs from position 3 to position 1."""
    if not 0 <= c < D.crossing_count:
        raise IndexError(f"Crossing index {c} out of range")
    return 1 if D.over_entry[c] == 3 else -1


def mirror(D: LinkDiagram) -> LinkDiagram:
    """Switch every crossing."""
    flipped = []
    for x, entry in zip(D.crossings, D.over_entry):
        flipped.append(tuple(x[(entry + i) % 4] for i in range(4)))
    return parse_pd(to_pd_text(LinkDiagram(tuple(flipped), D.over_entry, D.components)))


def crossing_graph(D: LinkDiagram) -> nx.MultiGraph:
    """Crossings as nodes, one edge per PD edge label."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(D.crossing_count))
    for label, places in _occurrences(D.crossings).items():
        (c1, _), (c2, _) = places
        graph.add_edge(c1, c2, label=label)
    return graph


def trace_regions(D: LinkDiagram) -> RegionTrace:
    """
    Assign a region to every crossing corner by face tracing.

    From corner (c, p), follow the edge at position p+1 to its other end
    (c', q); the face continues at corner (c', q).

    Raises:
        SplitDiagramError: if the diagram is disconnected
        PDParseError: if the face count violates Euler's formula
    """
    if not D.crossings:
        return RegionTrace(2, (), ())
    if not nx.is_connected(crossing_graph(D)):
        raise SplitDiagramError("Diagram is disconnected; split links are not supported")

    occ = _occurrences(D.crossings)
    region_of: Dict[Occurrence, int] = {}
    faces = []
    for c in range(D.crossing_count):
        for p in range(4):
            if (c, p) in region_of:
                continue
            face = []
            corner = (c, p)
            while corner not in region_of:
                region_of[corner] = len(faces)
                face.append(corner)
                cc, pp = corner
                arm = (pp + 1) % 4
                corner = _other(occ, D.crossings[cc][arm], (cc, arm))
            faces.append(tuple(face))

    expected = D.edge_count - D.crossing_count + 2
    if len(faces) != expected:
        raise PDParseError(f"PD code is not planar: {len(faces)} faces, Euler's formula needs {expected}")
    corners = tuple(tuple(region_of[(c, p)] for p in range(4)) for c in range(D.crossing_count))
    return RegionTrace(len(faces), corners, tuple(faces))


def _record(corners: Tuple[int, int, int, int], writhe: int) -> CrossingRecord:
    # behind/ahead lie between the incoming/outgoing arms; left/right are to the left/right of both strands
    if writhe < 0:
        behind, ahead, left, right = corners[0], corners[2], corners[3], corners[1]
        return CrossingRecord(sign=-1, star_in=behind, dot_left=left, dot_right=right, star_out=ahead)
    behind, ahead, left, right = corners[3], corners[1], corners[2], corners[0]
    return CrossingRecord(sign=1, star_in=ahead, dot_left=left, dot_right=right, star_out=behind)


def to_dual_graph(D: LinkDiagram) -> DualGraphDiagram:
    """
    One crossing record per crossing.

    At a negative crossing the star relation runs from the region behind
    the crossing to the region ahead of it; at a positive crossing it runs
    from ahead to behind. The result carries the traced weight rule.
    """
    trace = trace_regions(D)
    records = tuple(_record(trace.corners[c], crossing_sign(D, c)) for c in range(D.crossing_count))
    logger.debug(f"Traced {trace.region_count} regions over {D.crossing_count} crossings")
    return DualGraphDiagram(trace.region_count, records, TRACED)


def region_graph(G: DualGraphDiagram) -> nx.MultiGraph:
    """Regions as nodes; a 'star' edge and a 'dot' edge per crossing record."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(G.region_count))
    for i, record in enumerate(G.crossings):
        graph.add_edge(record.star_in, record.star_out, kind='star', crossing=i)
        graph.add_edge(record.dot_left, record.dot_right, kind='dot', crossing=i)
    return graph


def _entry_positions(D: LinkDiagram, c: int) -> Tuple[int, int]:
    return 0, D.over_entry[c]


def _tail_and_head(D: LinkDiagram, occ, label: int) -> Tuple[Occurrence, Occurrence]:
    """(exit occurrence, entry occurrence) of an edge."""
    first, second = occ[label]
    c, p = second
    if p in _entry_positions(D, c):
        return first, second
    return second, first


def _relabel(crossings: Sequence[Sequence[Hashable]], over_entry: Sequence[int]) -> LinkDiagram:
    """Renumber sortable edge keys 1..E along each oriented component and re-parse."""
    occ = _occurrences(crossings)
    heads = {}
    for key, places in occ.items():
        for c, p in places:
            if p == 0 or p == over_entry[c]:
                heads[key] = (c, p)
    numbering = {}
    for key in sorted(occ):
        if key in numbering:
            continue
        for edge, _, _ in _walk(crossings, occ, key, heads[key]):
            numbering[edge] = len(numbering) + 1
    renamed = tuple(tuple(numbering[k] for k in x) for x in crossings)
    return parse_pd(to_pd_text(LinkDiagram(renamed, tuple(over_entry), ())))


def _rotate_for_pd(arms: List[Hashable], under: Sequence[Hashable]) -> Tuple[List[Hashable], int]:
    """Rotate a counterclockwise arm list so the incoming under piece comes first; return it with its over entry."""
    start = arms.index(min(under))
    rotated = arms[start:] + arms[:start]
    over = [k for k in rotated if k not in under]
    return rotated, rotated.index(min(over))


def _kink(D: LinkDiagram, label: int, writhe: int) -> LinkDiagram:
    if not D.crossings:
        return parse_pd("PD[X[1,1,2,2]]" if writhe > 0 else "PD[X[1,2,2,1]]")
    occ = _occurrences(D.crossings)
    if label not in occ:
        raise PerturbationError(f"Edge {label} is not in the diagram")
    _, (hc, hp) = _tail_and_head(D, occ, label)
    keyed = [[(v, 0) for v in x] for x in D.crossings]
    keyed[hc][hp] = (label, 2)
    before, loop, after = (label, 0), (label, 1), (label, 2)
    if writhe > 0:
        keyed.append([before, after, loop, loop])
        entries = list(D.over_entry) + [3]
    else:
        keyed.append([before, loop, loop, after])
        entries = list(D.over_entry) + [1]
    return _relabel(keyed, entries)


def _finger(D: LinkDiagram, label: int, side: str, over: bool) -> LinkDiagram:
    if not D.crossings:
        raise PerturbationError("R2 needs two edges on a common region; the diagram has none")
    occ = _occurrences(D.crossings)
    if label not in occ:
        raise PerturbationError(f"Edge {label} is not in the diagram")
    tail, head = _tail_and_head(D, occ, label)
    start = tail if side == "right" else head
    corner = (start[0], (start[1] - 1) % 4)

    trace = trace_regions(D)
    face = next(f for f in trace.faces if corner in f)
    i = face.index(corner)
    steps = face[i:] + face[:i]

    def boundary_start(step: Occurrence) -> Occurrence:
        c, p = step
        return c, (p + 1) % 4

    partner = None
    for step in steps[1:]:
        c, q = boundary_start(step)
        if D.crossings[c][q] != label:
            partner = (D.crossings[c][q], (c, q))
            break
    if partner is None:
        raise PerturbationError(f"Edge {label} has no other edge across its {side} region")
    other, other_start = partner

    def pieces(edge: int, first: Occurrence) -> List[Tuple[int, int]]:
        edge_tail, _ = _tail_and_head(D, occ, edge)
        keys = [(edge, 0), (edge, 1), (edge, 2)]
        return keys if first == edge_tail else keys[::-1]

    e = pieces(label, start)
    f = pieces(other, other_start)
    keyed = [[(v, 0) for v in x] for x in D.crossings]
    for edge, first, keys in ((label, start, e), (other, other_start, f)):
        last = _other(occ, edge, first)
        keyed[first[0]][first[1]] = keys[0]
        keyed[last[0]][last[1]] = keys[2]

    under = f if over else e
    entries = list(D.over_entry)
    for arms in ([f[1], e[0], f[2], e[1]], [f[0], e[2], f[1], e[1]]):
        local_under = [k for k in arms if k in under]
        rotated, entry = _rotate_for_pd(arms, local_under)
        keyed.append(rotated)
        entries.append(entry)
    return _relabel(keyed, entries)


def perturb(D: LinkDiagram, move: str, site: int, side: str = "right", over: bool = True) -> LinkDiagram:
    """
    Apply a Reidemeister move that preserves the link type.

    Args:
        D: Source diagram
        move: "R1+" or "R1-" (kink of writhe +1/-1 on edge `site`) or "R2"
            (push edge `site` across the next edge of the region on its
            `side`, creating a bigon)
        site: Edge label; ignored for R1 on the 0-crossing unknot
        side: "right" or "left" of the edge's orientation, for R2
        over: For R2, whether the pushed edge passes over

    Returns:
        Re-parsed LinkDiagram with 1 (R1) or 2 (R2) more crossings
    """
    if move == "R1+":
        return _kink(D, site, 1)
    if move == "R1-":
        return _kink(D, site, -1)
    if move == "R2":
        if side not in ("right", "left"):
            raise PerturbationError(f"Side must be 'right' or 'left', got {side!r}")
        return _finger(D, site, side, over)
    raise PerturbationError(f"Unknown move {move!r}; expected R1+, R1- or R2")


def braid_closure(word: Sequence[int], strands: int) -> LinkDiagram:
    """
    PD code of the closure of a braid.

    Generator k (or -k) crosses strands k and k+1 with writhe +1 (or -1);
    strands run downward and the closing arcs pass to one side.

    Raises:
        ValueError: for a generator out of range or a strand no generator touches
    """
    if strands < 1:
        raise ValueError(f"A braid needs at least one strand, got {strands}")
    current = list(range(strands))
    crossings = []
    entries = []
    next_piece = strands
    for g in word:
        if g == 0 or abs(g) >= strands:
            raise ValueError(f"Generator {g} is out of range for {strands} strands")
        i = abs(g) - 1
        a, b = current[i], current[i + 1]
        c, d = next_piece, next_piece + 1
        next_piece += 2
        if g > 0:
            crossings.append([a, c, d, b])
            entries.append(3)
        else:
            crossings.append([b, a, c, d])
            entries.append(1)
        current[i], current[i + 1] = c, d

    idle = [i + 1 for i in range(strands) if current[i] == i]
    if idle:
        raise ValueError(f"Strands {idle} take part in no crossing")
    closing = {current[i]: i for i in range(strands)}
    crossings = [[closing.get(v, v) for v in x] for x in crossings]
    return _relabel(crossings, entries)


if __name__ == "__main__":
    hopf = parse_pd("PD[X[4,1,3,2], X[2,3,1,4]]")
    print(f"Hopf: {hopf.crossing_count} crossings, {hopf.component_count} components, writhe {hopf.writhe()}")
    print(to_dual_graph(hopf).to_json())
