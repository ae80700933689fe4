"""
Boltzmann Weights and Enhanced Polynomials

A Boltzmann weight assigns a value in Z_m to every triple of biquasile
elements, stored as coefficients on the characteristic-function basis in
row-major (x, y, z) order. Summing the signed weights of a coloring's
crossings gives its Boltzmann weight; the multiset of those sums over all
colorings is the enhanced polynomial.

Includes the exhaustive weight-space solver, closed-form linear weights for
Alexander biquasiles, and a resumable scanner over linear weights.
"""

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from python.biquasile import AlexanderParams, Biquasile, Verdict, alexander, unit_triples
from python.coloring import ColoringAssignment, enumerate_colorings
from python.diagram import DualGraphDiagram
from python.modalg import ModMatrix, SolutionSpace, kernel
from python.parallel import apply_pool

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]

TRIVIAL_ZERO = "trivial-zero"
CONSTANT = "constant"
COUNTEREXAMPLE = "counterexample"


class WeightError(ValueError):
    """Coefficient map is incomplete, mis-sized, or on the wrong modulus."""


@dataclass(frozen=True)
class BoltzmannWeight:
    """Coefficients of a weight on {1..order}³ with values in Z_modulus."""

    order: int
    modulus: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 2:
            raise WeightError(f"Weight modulus must be at least 2, got {self.modulus}")
        if len(self.coeffs) != self.order ** 3:
            raise WeightError(f"Expected {self.order ** 3} coefficients for order {self.order}, got {len(self.coeffs)}")
        object.__setattr__(self, 'coeffs', tuple(int(v) % self.modulus for v in self.coeffs))

    def index(self, x: int, y: int, z: int) -> int:
        n = self.order
        for v in (x, y, z):
            if not 1 <= v <= n:
                raise WeightError(f"Triple ({x},{y},{z}) has an entry outside 1..{n}")
        return ((x - 1) * n + (y - 1)) * n + (z - 1)

    def value(self, x: int, y: int, z: int) -> int:
        return self.coeffs[self.index(x, y, z)]

    def triples(self) -> Iterable[Triple]:
        n = self.order
        for i in range(n ** 3):
            yield i // (n * n) + 1, (i // n) % n + 1, i % n + 1

    def nonzero(self) -> List[Tuple[Triple, int]]:
        return [(t, c) for t, c in zip(self.triples(), self.coeffs) if c]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def scaled(self, k: int) -> "BoltzmannWeight":
        return BoltzmannWeight(self.order, self.modulus, tuple(k * c for c in self.coeffs))

    def __add__(self, other: "BoltzmannWeight") -> "BoltzmannWeight":
        if (self.order, self.modulus) != (other.order, other.modulus):
            raise WeightError("Cannot add weights of different order or modulus")
        return BoltzmannWeight(self.order, self.modulus, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    @classmethod
    def from_map(cls, order: int, modulus: int, values: Mapping[Triple, int], total: bool = False) -> "BoltzmannWeight":
        """
        Build from {(x, y, z): value}; absent triples are zero unless total is set.

        Raises:
            WeightError: when total is set and a triple is missing
        """
        coeffs = [0] * order ** 3
        layout = cls(order, modulus, tuple(coeffs))
        for triple, v in values.items():
            coeffs[layout.index(*triple)] = int(v)
        if total and len(values) != order ** 3:
            missing = next(t for t in layout.triples() if t not in values)
            raise WeightError(f"Coefficient map is missing triple {missing}")
        return cls(order, modulus, tuple(coeffs))

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "BoltzmannWeight":
        """Read {"order": n, "modulus": m, "coeffs": {"x,y,z": v, ...}} with only nonzero entries listed."""
        try:
            order, modulus, raw = int(data['order']), int(data['modulus']), data['coeffs']
        except (KeyError, TypeError, ValueError):
            raise WeightError("Weight JSON needs integer 'order' and 'modulus' and a 'coeffs' object")
        values = {}
        for key, v in raw.items():
            try:
                triple = tuple(int(p) for p in key.split(","))
            except ValueError:
                raise WeightError(f"Coefficient key {key!r} is not of the form x,y,z")
            if len(triple) != 3:
                raise WeightError(f"Coefficient key {key!r} is not of the form x,y,z")
            if triple in values:
                raise WeightError(f"Coefficient key {key!r} appears twice")
            values[triple] = int(v)
        return cls.from_map(order, modulus, values)

    def to_json(self) -> Dict[str, Any]:
        return {
            'order': self.order,
            'modulus': self.modulus,
            'coeffs': {f"{x},{y},{z}": c for (x, y, z), c in self.nonzero()},
        }


@dataclass(frozen=True)
class EnhancedPolynomial:
    """Multiplicity of every exponent 0..modulus-1 in a multiset over Z_modulus."""

    modulus: int
    multiplicities: Tuple[int, ...]

    @classmethod
    def from_multiset(cls, values: Iterable[int], modulus: int) -> "EnhancedPolynomial":
        counts = Counter(int(v) % modulus for v in values)
        return cls(modulus, tuple(counts.get(k, 0) for k in range(modulus)))

    def evaluate_at_one(self) -> int:
        return sum(self.multiplicities)

    def text(self) -> str:
        terms = []
        for k, c in enumerate(self.multiplicities):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
                continue
            coeff = "" if c == 1 else str(c)
            power = "u" if k == 1 else f"u^{k}"
            terms.append(coeff + power)
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> Dict[str, Any]:
        return {
            'modulus': self.modulus,
            'terms': {str(k): c for k, c in enumerate(self.multiplicities) if c},
            'text': self.text(),
        }

    def __str__(self) -> str:
        return self.text()


def _division_arrays(B: Biquasile) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    div = B.divisions
    return (
        np.array(div.star_left, dtype=np.int64) - 1,
        np.array(div.dot_left, dtype=np.int64) - 1,
        np.array(div.dot_right, dtype=np.int64) - 1,
    )


def _vanishing_triples(B: Biquasile) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flat indices that the first axiom forces to zero.

    Returns two n² arrays: (x, a, a\\(x\\∗x)) over (x, a) and
    (x, (x\\∗x)/b, b) over (x, b).
    """
    n = B.order
    star_left, dot_left, dot_right = _division_arrays(B)
    x, u = (v.ravel() for v in np.indices((n, n)))
    t = star_left[x, x]
    free_a = (x * n + u) * n + dot_left[u, t]
    free_b = (x * n + dot_right[t, u]) * n + u
    return free_a, free_b


def _exchange_terms(B: Biquasile) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    Flat indices of the six terms of the second axiom over every (x, y, a, b).

    The three positive terms come first, in the printed order, then the
    three that are subtracted.
    """
    n = B.order
    S, D = B.arrays()
    x, y, a, b = np.indices((n,) * 4).reshape(4, -1)

    def flat(u, v, w):
        return (u * n + v) * n + w

    xab = S[x, D[a, b]]
    bxy = S[b, D[x, y]]
    positive = [
        flat(x, a, b),
        flat(b, xab, y),
        flat(xab, a, S[b, D[xab, y]]),
    ]
    negative = [
        flat(b, x, y),
        flat(x, a, bxy),
        flat(bxy, S[x, D[a, bxy]], y),
    ]
    return positive, negative


def check_weight(B: Biquasile, W: BoltzmannWeight) -> Verdict:
    """
    Evaluate both weight axioms.

    Args:
        B: Biquasile (Latin tables)
        W: Weight of the same order

    Returns:
        Verdict; the first axiom reports the offending triple, the second
        reports (x, y, a, b)
    """
    if W.order != B.order:
        raise WeightError(f"Weight has order {W.order} but the biquasile has order {B.order}")
    n, m = B.order, W.modulus
    c = np.array(W.coeffs, dtype=np.int64)

    for indices in _vanishing_triples(B):
        bad = np.flatnonzero(c[indices])
        if bad.size:
            flat = int(indices[bad[0]])
            triple = (flat // (n * n) + 1, (flat // n) % n + 1, flat % n + 1)
            return Verdict(False, "i", triple, f"phi{triple} = {int(c[indices[bad[0]]])}, must be 0")

    positive, negative = _exchange_terms(B)
    total = sum(c[i] for i in positive) - sum(c[i] for i in negative)
    bad = np.flatnonzero(total % m)
    if bad.size:
        witness = tuple(int(v) + 1 for v in np.unravel_index(int(bad[0]), (n,) * 4))
        return Verdict(False, "ii", witness, f"(x,y,a,b)={witness} sums to {int(total[bad[0]] % m)}")
    return Verdict(True)


def weight_system(B: Biquasile, m: int) -> ModMatrix:
    """
    Homogeneous system whose solutions are exactly the weights of B over Z_m.

    2n² single-entry rows from the first axiom, then n⁴ rows from the
    second axiom written as (left side) - (right side).
    """
    n = B.order
    cols = n ** 3
    free_a, free_b = _vanishing_triples(B)
    vanishing = np.zeros((2 * n * n, cols), dtype=np.int64)
    vanishing[np.arange(2 * n * n), np.concatenate([free_a, free_b])] = 1

    positive, negative = _exchange_terms(B)
    exchange = np.zeros((n ** 4, cols), dtype=np.int64)
    rows = np.arange(n ** 4)
    for indices in positive:
        np.add.at(exchange, (rows, indices), 1)
    for indices in negative:
        np.add.at(exchange, (rows, indices), -1)
    return ModMatrix.from_rows(m, np.vstack([vanishing, exchange]).tolist(), cols=cols)


def solve_weights(B: Biquasile, m: int) -> SolutionSpace:
    """Every Boltzmann weight of B over Z_m, as a kernel."""
    system = weight_system(B, m)
    logger.info(f"Solving {system.rows} equations in {system.cols} unknowns mod {m}")
    space = kernel(system)
    logger.info(f"{space.count} Boltzmann weights over Z_{m}")
    return space


def weights_from_space(space: SolutionSpace, order: int) -> List[BoltzmannWeight]:
    """Expand a weight solution space into BoltzmannWeight values."""
    return [BoltzmannWeight(order, space.modulus, v) for v in space.elements()]


def linear_weight(p: AlexanderParams, gamma: int) -> BoltzmannWeight:
    """
    φ(x,y,z) = -γ(s⁻¹n⁻¹ + dn)x + γs⁻¹d·y + γz on the Alexander biquasile.

    Labels are read as residues, so label m is 0.
    """
    m, d, s, n = p.modulus, p.d, p.s, p.n_param
    inv_s, inv_n = p.inverse(s), p.inverse(n)
    cx = -gamma * (inv_s * inv_n + d * n)
    cy = gamma * inv_s * d
    labels = range(1, m + 1)
    coeffs = tuple(cx * x + cy * y + gamma * z for x in labels for y in labels for z in labels)
    return BoltzmannWeight(m, m, coeffs)


@dataclass(frozen=True)
class LinearFamily:
    params: AlexanderParams
    weights: Tuple[BoltzmannWeight, ...]
    generator: Optional[BoltzmannWeight]
    single_generator: bool


def linear_family(p: AlexanderParams) -> LinearFamily:
    """
    Distinct linear weights over every γ in Z_m.

    single_generator says whether all nonzero members are multiples of one
    of them.
    """
    seen: Dict[Tuple[int, ...], BoltzmannWeight] = {}
    for gamma in range(p.modulus):
        w = linear_weight(p, gamma)
        seen.setdefault(w.coeffs, w)
    weights = tuple(seen.values())
    nonzero = [w for w in weights if not w.is_zero()]

    generator = None
    for candidate in nonzero:
        multiples = {candidate.scaled(k).coeffs for k in range(p.modulus)}
        if all(w.coeffs in multiples for w in nonzero):
            generator = candidate
            break
    return LinearFamily(p, weights, generator, generator is not None or not nonzero)


def coloring_weight(G: DualGraphDiagram, W: BoltzmannWeight, f: ColoringAssignment) -> int:
    """
    Signed sum of φ over the crossing records, mod m.

    The diagram's weight rule picks the first argument and the sign of
    each term; see CrossingRecord.weighted.
    """
    total = 0
    for record in G.crossings:
        coefficient, region = record.weighted(G.weight_rule)
        total += coefficient * W.value(f[region], f[record.dot_left], f[record.dot_right])
    return total % W.modulus


def enhanced_polynomial(G: DualGraphDiagram, B: Biquasile, W: BoltzmannWeight, workers: int = 1) -> EnhancedPolynomial:
    """
    Boltzmann enhanced polynomial of a diagram.

    Raises:
        WeightError: if the weight's order differs from the biquasile's
    """
    if W.order != B.order:
        raise WeightError(f"Weight has order {W.order} but the biquasile has order {B.order}")
    colorings = enumerate_colorings(G, B, workers)
    return EnhancedPolynomial.from_multiset((coloring_weight(G, W, f) for f in colorings), W.modulus)


def format_weight(W: BoltzmannWeight, ascii: bool = False) -> str:
    """Characteristic-function expansion, e.g. "2χ(1,1,1) + 3χ(1,2,2)"."""
    name, joiner = ("chi", "*") if ascii else ("χ", "")
    terms = []
    for (x, y, z), c in W.nonzero():
        coeff = "" if c == 1 else f"{c}{joiner}"
        terms.append(f"{coeff}{name}({x},{y},{z})")
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class CoefficientMismatch:
    triple: Triple
    computed: int
    listed: int
    listed_times: int


@dataclass(frozen=True)
class CoefficientReport:
    mismatches: Tuple[CoefficientMismatch, ...]
    repeated: Tuple[Triple, ...]

    @property
    def matches(self) -> bool:
        return not self.mismatches and not self.repeated

    def describe(self) -> List[str]:
        lines = [f"{t} listed more than once" for t in self.repeated]
        for mm in self.mismatches:
            lines.append(f"{mm.triple}: computed {mm.computed}, listed {mm.listed} ({mm.listed_times} entries)")
        return lines


def compare_coefficients(W: BoltzmannWeight, listed: Sequence[Tuple[int, Triple]]) -> CoefficientReport:
    """
    Compare a weight with a printed expansion, read literally.

    Repeated triples in the listing are summed and also reported.
    """
    sums: Dict[Triple, int] = {}
    times: Counter = Counter()
    for coeff, triple in listed:
        triple = tuple(triple)
        sums[triple] = (sums.get(triple, 0) + coeff) % W.modulus
        times[triple] += 1
    mismatches = []
    for triple, computed in zip(W.triples(), W.coeffs):
        printed = sums.get(triple, 0)
        if printed != computed:
            mismatches.append(CoefficientMismatch(triple, computed, printed, times[triple]))
    repeated = tuple(sorted(t for t, k in times.items() if k > 1))
    return CoefficientReport(tuple(mismatches), repeated)


@dataclass(frozen=True)
class Separation:
    counts: Tuple[int, int]
    polynomials: Tuple[EnhancedPolynomial, EnhancedPolynomial]

    @property
    def proper(self) -> bool:
        """Equal counts but different polynomials."""
        return self.counts[0] == self.counts[1] and self.polynomials[0] != self.polynomials[1]


def separates(G1: DualGraphDiagram, G2: DualGraphDiagram, B: Biquasile, W: BoltzmannWeight) -> Separation:
    polys = (enhanced_polynomial(G1, B, W), enhanced_polynomial(G2, B, W))
    return Separation((polys[0].evaluate_at_one(), polys[1].evaluate_at_one()), polys)


def _table_row(G: DualGraphDiagram, B: Biquasile, weights: Tuple[BoltzmannWeight, ...]) -> Tuple[str, ...]:
    return tuple(enhanced_polynomial(G, B, W).text() for W in weights)


def link_table(
    diagrams: Mapping[str, DualGraphDiagram],
    B: Biquasile,
    weights: Mapping[str, BoltzmannWeight],
    workers: int = 1,
) -> Dict[str, Dict[str, str]]:
    """
    Enhanced polynomial text for every link under every weight.

    Args:
        diagrams: Link name -> dual graph diagram
        B: Biquasile shared by all weights
        weights: Column label -> weight
        workers: Processes, one link per work unit

    Returns:
        {link: {weight label: polynomial text}} in the order of diagrams
    """
    labels = list(weights)
    ws = tuple(weights[k] for k in labels)
    names = list(diagrams)
    logger.info(f"Computing {len(names)} x {len(labels)} enhanced polynomials")
    rows = apply_pool(_table_row, [(diagrams[name], B, ws) for name in names], workers)
    return {name: dict(zip(labels, row)) for name, row in zip(names, rows)}


@dataclass(frozen=True)
class ScanRecord:
    modulus: int
    d: int
    s: int
    n_param: int
    gamma: int
    link: str
    polynomial: str
    predicate: str
    witness: Optional[Tuple[int, ...]] = None

    @property
    def key(self) -> Tuple[int, int, int, int, int, str]:
        return self.modulus, self.d, self.s, self.n_param, self.gamma, self.link

    def to_json(self) -> Dict[str, Any]:
        return {
            'modulus': self.modulus,
            'd': self.d,
            's': self.s,
            'n_param': self.n_param,
            'gamma': self.gamma,
            'link': self.link,
            'polynomial': self.polynomial,
            'predicate': self.predicate,
            'witness': list(self.witness) if self.witness is not None else None,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "ScanRecord":
        witness = data.get('witness')
        return cls(
            int(data['modulus']), int(data['d']), int(data['s']), int(data['n_param']),
            int(data['gamma']), str(data['link']), str(data['polynomial']), str(data['predicate']),
            tuple(witness) if witness is not None else None,
        )


def classify(G: DualGraphDiagram, W: BoltzmannWeight, colorings: Sequence[ColoringAssignment]) -> Tuple[str, str, Optional[Tuple[int, ...]]]:
    """(polynomial text, predicate, witness coloring) for one weight on one diagram."""
    values = [coloring_weight(G, W, f) for f in colorings]
    poly = EnhancedPolynomial.from_multiset(values, W.modulus).text()
    if all(v == 0 for v in values):
        return poly, TRIVIAL_ZERO, None
    if len(set(values)) == 1:
        return poly, CONSTANT, None
    witness = next(f for f, v in zip(colorings, values) if v != values[0])
    return poly, COUNTEREXAMPLE, witness.colors


def _scan_unit(p: AlexanderParams, name: str, G: DualGraphDiagram, gammas: Tuple[int, ...]) -> List[ScanRecord]:
    colorings = enumerate_colorings(G, alexander(p))
    records = []
    for gamma in gammas:
        poly, predicate, witness = classify(G, linear_weight(p, gamma), colorings)
        records.append(ScanRecord(p.modulus, p.d, p.s, p.n_param, gamma, name, poly, predicate, witness))
    return records


def _load_scan(path: str) -> Dict[Tuple, ScanRecord]:
    """Finished records from a JSONL report; lines cut short by an interrupted write are skipped."""
    done = {}
    if not os.path.exists(path):
        return done
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = ScanRecord.from_json(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                logger.warning(f"Skipping unreadable line {lineno} of {path}: {e}")
                continue
            done[record.key] = record
    return done


def _write_scan(path: str, records: Iterable[ScanRecord]):
    with open(path, 'w', encoding='utf-8') as f:
        for record in sorted(records, key=lambda r: r.key):
            f.write(json.dumps(record.to_json(), sort_keys=True) + "\n")


def scan_conjecture(
    diagrams: Mapping[str, DualGraphDiagram],
    moduli: Sequence[int],
    gammas: Optional[Sequence[int]] = None,
    workers: int = 1,
    resume_path: Optional[str] = None,
    batch_size: int = 16,
) -> List[ScanRecord]:
    """
    Classify the linear-weight enhancement of every Alexander biquasile on every diagram.

    One work unit is a (biquasile, link) pair covering all gammas. With
    resume_path, finished units are appended to that JSONL file as they
    complete and skipped on the next run; the file is rewritten sorted at
    the end.

    Args:
        diagrams: Link name -> dual graph diagram
        moduli: Moduli to scan (each >= 2)
        gammas: Gamma values; every residue when None
        workers: Processes
        resume_path: Optional JSONL report path
        batch_size: Units per batch between report appends

    Returns:
        Records sorted by (modulus, d, s, n_param, gamma, link)
    """
    done = _load_scan(resume_path) if resume_path else {}
    if done:
        # drop any partial trailing line before appending
        _write_scan(resume_path, done.values())
    units = []
    for m in moduli:
        gs = tuple(sorted({g % m for g in gammas})) if gammas is not None else tuple(range(m))
        for p in unit_triples(m):
            for name in sorted(diagrams):
                if all((m, p.d, p.s, p.n_param, g, name) in done for g in gs):
                    continue
                units.append((p, name, diagrams[name], gs))
    logger.info(f"Scanning {len(units)} (biquasile, link) units; {len(done)} records already done")

    for start in range(0, len(units), batch_size):
        batch = units[start:start + batch_size]
        for records in apply_pool(_scan_unit, batch, workers):
            for record in records:
                done[record.key] = record
            if resume_path:
                with open(resume_path, 'a', encoding='utf-8') as f:
                    for record in records:
                        f.write(json.dumps(record.to_json(), sort_keys=True) + "\n")
        logger.info(f"Scanned {min(start + batch_size, len(units))}/{len(units)} units")

    wanted = set()
    for m in moduli:
        gs = {g % m for g in gammas} if gammas is not None else set(range(m))
        wanted.update((m, g) for g in gs)
    report = sorted((r for r in done.values() if (r.modulus, r.gamma) in wanted and r.link in diagrams), key=lambda r: r.key)
    if resume_path:
        _write_scan(resume_path, done.values())
    return report


def summarize_scan(records: Sequence[ScanRecord]) -> Dict[str, int]:
    """Record count per predicate."""
    tally = Counter(r.predicate for r in records)
    return {k: tally.get(k, 0) for k in (TRIVIAL_ZERO, CONSTANT, COUNTEREXAMPLE)}
