"""
Biquasile Invariants Command Line

Subcommands check and enumerate biquasiles, trace diagrams, count colorings,
evaluate Boltzmann enhanced polynomials, solve for weights, and run the
linear-weight scan. Results go to stdout (or --out); progress goes to stderr.

Exit codes: 0 success, 1 a failed verdict, 2 bad input.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
from dotenv import load_dotenv

# Add parent directory to path for imports
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from python.biquasile import (
    AlexanderParams,
    Biquasile,
    alexander,
    check_axioms,
    enumerate_biquasiles,
    is_alexander,
    render_block_matrix,
)
from python.boltzmann import (
    COUNTEREXAMPLE,
    BoltzmannWeight,
    WeightError,
    check_weight,
    enhanced_polynomial,
    format_weight,
    linear_family,
    linear_weight,
    link_table,
    scan_conjecture,
    separates,
    solve_weights,
    summarize_scan,
    weights_from_space,
)
from python.coloring import (
    coefficient_matrix,
    count_colorings,
    count_colorings_alexander,
    enumerate_colorings,
    presentation,
)
from python.corpus import data_dir, diagram_from_code, load_corpus, lookup, select
from python.diagram import DualGraphDiagram, dual_graph_from_json, region_graph, to_dual_graph
from python.modalg import howell_form
from python.parallel import resolve_workers


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2


@dataclass
class RunConfig:
    """Parsed command line, shared by every subcommand."""

    command: str
    inputs: List[str] = field(default_factory=list)
    biquasile: Optional[str] = None
    alexander: Optional[str] = None
    weight: Optional[str] = None
    linear: Optional[int] = None
    modulus: Optional[int] = None
    format: str = "text"
    threads: int = 1
    out: Optional[str] = None
    ascii: bool = False
    order: Optional[int] = None
    max_modulus: int = 3
    max_crossings: int = 7
    gammas: Optional[List[int]] = None
    table: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        inputs = list(getattr(args, 'inputs', None) or [])
        if getattr(args, 'path', None):
            inputs = [args.path]
        return cls(
            command=args.command,
            inputs=inputs,
            biquasile=getattr(args, 'biquasile', None),
            alexander=getattr(args, 'alexander', None),
            weight=getattr(args, 'weight', None),
            linear=getattr(args, 'linear', None),
            modulus=getattr(args, 'modulus', None),
            format=args.format,
            threads=resolve_workers(args.threads),
            out=args.out,
            ascii=args.ascii,
            order=getattr(args, 'order', None),
            max_modulus=getattr(args, 'max_modulus', 3),
            max_crossings=getattr(args, 'max_crossings', 7),
            gammas=getattr(args, 'gamma', None),
            table=getattr(args, 'table', None),
        )


def _read_json(path: str) -> Any:
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def load_biquasile(config: RunConfig) -> Tuple[Biquasile, Optional[AlexanderParams]]:
    """The biquasile named by exactly one of --biquasile / --alexander."""
    if bool(config.biquasile) == bool(config.alexander):
        raise ValueError("Give exactly one of --biquasile PATH or --alexander m,d,s,n")
    if config.alexander:
        params = AlexanderParams.parse(config.alexander)
        return alexander(params), params
    B = Biquasile.from_json(_read_json(config.biquasile))
    return B, is_alexander(B)


def load_weight(config: RunConfig, B: Biquasile, params: Optional[AlexanderParams]) -> Optional[BoltzmannWeight]:
    """The weight named by --weight / --linear, or None when neither is given."""
    if config.weight and config.linear is not None:
        raise ValueError("Give at most one of --weight PATH or --linear GAMMA")
    if config.linear is not None:
        if params is None:
            raise WeightError("--linear needs an Alexander biquasile")
        W = linear_weight(params, config.linear)
    elif config.weight:
        W = BoltzmannWeight.from_json(_read_json(config.weight))
    else:
        return None
    if W.order != B.order:
        raise WeightError(f"Weight order {W.order} does not match biquasile order {B.order}")
    if config.modulus is not None and config.modulus != W.modulus:
        raise WeightError(f"--modulus {config.modulus} does not match the weight's modulus {W.modulus}")
    return W


def load_link(source: str) -> Tuple[str, DualGraphDiagram]:
    """
    Resolve a link argument.

    Accepts inline PD[...] or BR[...] text, a file holding such text, a dual
    graph JSON file, or the name of a bundled corpus entry.
    """
    text = source.strip()
    if text.startswith(("PD[", "BR[")):
        return text, to_dual_graph(diagram_from_code(text))
    if os.path.isfile(source):
        if source.endswith(".json"):
            return Path(source).stem, dual_graph_from_json(_read_json(source))
        with open(source, 'r', encoding='utf-8') as f:
            return Path(source).stem, to_dual_graph(diagram_from_code(f.read()))
    return source, to_dual_graph(lookup(load_corpus(), source).diagram)


def _require_inputs(config: RunConfig, count: int):
    if len(config.inputs) != count:
        raise ValueError(f"{config.command} takes {count} link argument(s), got {len(config.inputs)}")


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


def _write_out(config: RunConfig, filename: str, data: Any) -> str:
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, filename)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")
    print(f"Wrote {path}", file=sys.stderr)
    return path


# Each command returns (exit code, text lines, JSON payload)
Result = Tuple[int, List[str], Any]


def cmd_check_biquasile(config: RunConfig) -> Result:
    _require_inputs(config, 1)
    B = Biquasile.from_json(_read_json(config.inputs[0]))
    verdict = check_axioms(B)
    lines = [verdict.describe()]
    if not verdict.valid:
        lines.append(f"witness: {verdict.witness}")
    return (EXIT_OK if verdict.valid else EXIT_FAILED), lines, verdict.as_dict()


def cmd_enumerate_biquasiles(config: RunConfig) -> Result:
    if config.order is None:
        raise ValueError("enumerate-biquasiles needs --order")
    found = enumerate_biquasiles(config.order, config.threads)
    payload = [B.to_json() for B in found]
    lines = []
    if config.out:
        _write_out(config, f"biquasiles_order{config.order}.json", payload)
    else:
        for B in found:
            lines.extend([render_block_matrix(B), ""])
    lines.append(_plural(len(found), "biquasile"))
    return EXIT_OK, lines, payload


def cmd_alexander(config: RunConfig) -> Result:
    if not config.alexander:
        raise ValueError("alexander needs --alexander m,d,s,n")
    B = alexander(AlexanderParams.parse(config.alexander))
    return EXIT_OK, [render_block_matrix(B)], B.to_json()


def cmd_regions(config: RunConfig) -> Result:
    _require_inputs(config, 1)
    _, G = load_link(config.inputs[0])
    graph = region_graph(G)
    star, dot = ("*", ".") if config.ascii else ("∗", "·")
    lines = [f"regions: {G.region_count}", f"crossings: {len(G.crossings)}"]
    for i, r in enumerate(G.crossings, 1):
        lines.append(f"c{i} sign {r.sign:+d}: r{r.star_out} = r{r.star_in} {star} (r{r.dot_left} {dot} r{r.dot_right})")
    lines.append(f"region graph: {graph.number_of_nodes()} nodes, {graph.number_of_edges()} edges, "
                 f"{_plural(nx.number_connected_components(graph), 'component')}")
    return EXIT_OK, lines, G.to_json()


def cmd_color(config: RunConfig) -> Result:
    _require_inputs(config, 1)
    name, G = load_link(config.inputs[0])
    B, _ = load_biquasile(config)
    colorings = enumerate_colorings(G, B, config.threads)
    lines = [_plural(len(colorings), "coloring")] + [" ".join(map(str, c.colors)) for c in colorings]
    return EXIT_OK, lines, {'link': name, 'count': len(colorings), 'colorings': [c.to_json() for c in colorings]}


def cmd_invariant(config: RunConfig) -> Result:
    _require_inputs(config, 1)
    name, G = load_link(config.inputs[0])
    B, params = load_biquasile(config)
    W = load_weight(config, B, params)
    if W is None:
        count = count_colorings_alexander(G, params) if params else count_colorings(G, B, config.threads)
        return EXIT_OK, [str(count)], {'link': name, 'count': count}
    poly = enhanced_polynomial(G, B, W, config.threads)
    payload = {'link': name, 'count': poly.evaluate_at_one()}
    payload.update(poly.to_json())
    return EXIT_OK, [poly.text()], payload


def cmd_presentation(config: RunConfig) -> Result:
    _require_inputs(config, 1)
    name, G = load_link(config.inputs[0])
    P = presentation(G)
    lines = [P.render(config.ascii)]
    if config.alexander:
        M = coefficient_matrix(G, AlexanderParams.parse(config.alexander))
        lines += ["", "coefficient matrix:", M.render(), "", "row reduced:", howell_form(M).render()]
    payload = {'link': name, 'generators': list(P.generators), 'relations': [list(r) for r in P.relations]}
    return EXIT_OK, lines, payload


def cmd_check_weight(config: RunConfig) -> Result:
    B, params = load_biquasile(config)
    W = load_weight(config, B, params)
    if W is None:
        raise ValueError("check-weight needs --weight PATH or --linear GAMMA")
    verdict = check_weight(B, W)
    lines = [verdict.describe()]
    if not verdict.valid:
        lines.append(f"witness: {verdict.witness}")
    return (EXIT_OK if verdict.valid else EXIT_FAILED), lines, verdict.as_dict()


def cmd_solve_weights(config: RunConfig) -> Result:
    if config.modulus is None:
        raise ValueError("solve-weights needs --modulus")
    B, _ = load_biquasile(config)
    space = solve_weights(B, config.modulus)
    generators = [BoltzmannWeight(B.order, space.modulus, g) for g in space.generators]
    payload = {
        'order': B.order,
        'modulus': space.modulus,
        'count': space.count,
        'generators': [g.to_json()['coeffs'] for g in generators],
        'coefficient_ranges': list(space.coefficient_ranges),
    }
    if config.out:
        payload['weights'] = [w.to_json()['coeffs'] for w in weights_from_space(space, B.order)]
        _write_out(config, f"weights_order{B.order}_mod{space.modulus}.json", payload)
    lines = [_plural(space.count, "solution")]
    lines += [f"generator {i} (order {r}): {format_weight(g, config.ascii)}"
              for i, (g, r) in enumerate(zip(generators, space.coefficient_ranges), 1)]
    return EXIT_OK, lines, payload


def cmd_linear_weight(config: RunConfig) -> Result:
    if not config.alexander:
        raise ValueError("linear-weight needs --alexander m,d,s,n")
    params = AlexanderParams.parse(config.alexander)
    if config.linear is not None:
        W = linear_weight(params, config.linear)
        return EXIT_OK, [format_weight(W, config.ascii)], W.to_json()
    family = linear_family(params)
    lines = [f"{_plural(len(family.weights), 'distinct linear weight')}"]
    lines += [format_weight(W, config.ascii) for W in family.weights]
    lines.append(f"single generator: {'yes' if family.single_generator else 'no'}")
    payload = {
        'alexander': params.label(),
        'weights': [W.to_json()['coeffs'] for W in family.weights],
        'single_generator': family.single_generator,
    }
    return EXIT_OK, lines, payload


def _corpus_diagrams(config: RunConfig) -> Dict[str, DualGraphDiagram]:
    corpus = select(load_corpus(), max_crossings=config.max_crossings)
    if config.inputs:
        corpus = {name: lookup(corpus, name) for name in config.inputs}
    return {name: to_dual_graph(e.diagram) for name, e in corpus.items()}


def cmd_scan_conjecture(config: RunConfig) -> Result:
    diagrams = _corpus_diagrams(config)
    moduli = list(range(2, config.max_modulus + 1))
    resume = None
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        resume = os.path.join(config.out, "scan.jsonl")
    records = scan_conjecture(diagrams, moduli, config.gammas, config.threads, resume)
    tally = summarize_scan(records)
    lines = [f"{len(records)} records over {len(diagrams)} diagrams, moduli {moduli[0]}..{moduli[-1]}" if moduli
             else "no moduli to scan"]
    lines += [f"{k}: {v}" for k, v in tally.items()]
    for r in records:
        if r.predicate == COUNTEREXAMPLE:
            lines.append(f"counterexample: {r.modulus},{r.d},{r.s},{r.n_param} gamma={r.gamma} {r.link} "
                         f"{r.polynomial} witness={list(r.witness)}")
    return EXIT_OK, lines, {'summary': tally, 'records': [r.to_json() for r in records]}


def cmd_table(config: RunConfig) -> Result:
    table_path = config.table or os.path.join(data_dir(), "link_table_z6.json")
    layout = _read_json(table_path)
    base = os.path.dirname(table_path)
    B = Biquasile.from_json(_read_json(os.path.join(base, layout['biquasile'])))
    weights = {label: BoltzmannWeight.from_json(_read_json(os.path.join(base, path)))
               for label, path in layout['weights'].items()}
    corpus = load_corpus()
    names = config.inputs or list(layout['published'])
    present = {name: to_dual_graph(corpus[name].diagram) for name in names if name in corpus}
    computed = link_table(present, B, weights, config.threads)

    labels = list(weights)
    lines = ["link\t" + "\t".join(labels)]
    payload = {}
    corrections = layout.get('corrections', {})
    for name in names:
        published = layout['published'].get(name)
        expected = corrections.get(name, published)
        row = computed.get(name)
        payload[name] = {
            'computed': row,
            'published': dict(zip(labels, published)) if published else None,
            'corrected': name in corrections,
        }
        if row is None:
            lines.append(f"{name}\t(no bundled diagram)")
            continue
        cells = []
        for i, label in enumerate(labels):
            mark = "" if expected is None or expected[i] == row[label] else " *"
            cells.append(row[label] + mark)
        note = f"\t(published: {' / '.join(published)})" if name in corrections else ""
        lines.append(f"{name}\t" + "\t".join(cells) + note)
    return EXIT_OK, lines, payload


def cmd_compare(config: RunConfig) -> Result:
    _require_inputs(config, 2)
    (n1, G1), (n2, G2) = load_link(config.inputs[0]), load_link(config.inputs[1])
    B, params = load_biquasile(config)
    W = load_weight(config, B, params)
    if W is None:
        raise ValueError("compare needs --weight PATH or --linear GAMMA")
    result = separates(G1, G2, B, W)
    p1, p2 = result.polynomials
    lines = [
        f"{n1}: count {result.counts[0]}, {p1.text()}",
        f"{n2}: count {result.counts[1]}, {p2.text()}",
        f"proper enhancement: {'yes' if result.proper else 'no'}",
    ]
    payload = {n1: p1.to_json(), n2: p2.to_json(), 'proper': result.proper}
    return EXIT_OK, lines, payload


def cmd_corpus(config: RunConfig) -> Result:
    corpus = load_corpus()
    lines = [f"{e.name}\t{e.crossing_count} crossings\t{_plural(e.component_count, 'component')}"
             for e in corpus.values()]
    payload = [{'name': e.name, 'crossings': e.crossing_count, 'components': e.component_count, 'code': e.code}
               for e in corpus.values()]
    return EXIT_OK, lines, payload


COMMANDS = {
    'check-biquasile': cmd_check_biquasile,
    'enumerate-biquasiles': cmd_enumerate_biquasiles,
    'alexander': cmd_alexander,
    'regions': cmd_regions,
    'color': cmd_color,
    'invariant': cmd_invariant,
    'presentation': cmd_presentation,
    'check-weight': cmd_check_weight,
    'solve-weights': cmd_solve_weights,
    'linear-weight': cmd_linear_weight,
    'scan-conjecture': cmd_scan_conjecture,
    'table': cmd_table,
    'compare': cmd_compare,
    'corpus': cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text", help="Output format.")
    common.add_argument("--threads", type=int, default=None, help="Worker processes (default: $BQK_THREADS or 1).")
    common.add_argument("--out", default=None, help="Directory for result files.")
    common.add_argument("--ascii", action="store_true", help="ASCII operators in presentations and weights.")
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("--quiet", action="store_true", help="Only warnings and errors on stderr.")
    noise.add_argument("--verbose", action="store_true", help="Debug logging on stderr.")

    bq = argparse.ArgumentParser(add_help=False)
    bq.add_argument("--biquasile", metavar="PATH", help="Biquasile JSON file.")
    bq.add_argument("--alexander", metavar="m,d,s,n", help="Alexander biquasile parameters.")

    wt = argparse.ArgumentParser(add_help=False)
    wt.add_argument("--weight", metavar="PATH", help="Boltzmann weight JSON file.")
    wt.add_argument("--linear", metavar="GAMMA", type=int, help="Linear weight with this gamma.")
    wt.add_argument("--modulus", type=int, help="Expected weight modulus.")

    parser = argparse.ArgumentParser(
        prog="bqk",
        description="Biquasile counting invariants and Boltzmann enhancements of knots and links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-biquasile", parents=[common], help="Check a biquasile JSON table.")
    p.add_argument("path")
    p = sub.add_parser("enumerate-biquasiles", parents=[common], help="List every biquasile of an order.")
    p.add_argument("--order", type=int, required=True)
    sub.add_parser("alexander", parents=[common, bq], help="Print an Alexander biquasile.")
    p = sub.add_parser("regions", parents=[common], help="Trace regions and crossing records.")
    p.add_argument("inputs", nargs=1)
    p = sub.add_parser("color", parents=[common, bq], help="List colorings.")
    p.add_argument("inputs", nargs=1)
    p = sub.add_parser("invariant", parents=[common, bq, wt], help="Counting invariant or enhanced polynomial.")
    p.add_argument("inputs", nargs=1)
    p = sub.add_parser("presentation", parents=[common, bq], help="Fundamental biquasile presentation.")
    p.add_argument("inputs", nargs=1)
    sub.add_parser("check-weight", parents=[common, bq, wt], help="Check a Boltzmann weight.")
    sub.add_parser("solve-weights", parents=[common, bq, wt], help="Solve for every Boltzmann weight.")
    sub.add_parser("linear-weight", parents=[common, bq, wt], help="Linear weights of an Alexander biquasile.")
    p = sub.add_parser("scan-conjecture", parents=[common], help="Classify linear enhancements on the corpus.")
    p.add_argument("inputs", nargs="*", help="Corpus names (default: all within --max-crossings).")
    p.add_argument("--max-modulus", type=int, default=3)
    p.add_argument("--max-crossings", type=int, default=7)
    p.add_argument("--gamma", type=int, action="append", help="Gamma to scan (repeatable; default all).")
    p = sub.add_parser("table", parents=[common], help="Enhanced polynomial table of bundled links.")
    p.add_argument("inputs", nargs="*", help="Link names (default: every published row).")
    p.add_argument("--table", help="Table layout JSON (default: data/link_table_z6.json).")
    p = sub.add_parser("compare", parents=[common, bq, wt], help="Proper-enhancement check on two links.")
    p.add_argument("inputs", nargs=2)
    sub.add_parser("corpus", parents=[common], help="List bundled diagrams.")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    # BQK_THREADS and BQK_DATA_DIR may come from a .env file
    load_dotenv()

    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')
    logging.getLogger().setLevel(level)

    try:
        config = RunConfig.from_args(args)
        code, lines, payload = COMMANDS[config.command](config)
    except (ValueError, OSError, KeyError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_BAD_INPUT

    if config.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        for line in lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
