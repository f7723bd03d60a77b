"""Command-line front end: one verb per experiment, JSON reports on standard output.

Exit codes: 0 on success (a witness is a successful answer), 2 for usage
errors, 3 when a capacity cap is exceeded, 4 for any other input or
hypothesis error.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from config_validation import ConfigurationError, LabSettings, load_settings, validate_settings
from decks import (
    DECK_KINDS,
    EDGE,
    END_VERTEX,
    VERTEX,
    AttachmentProfile,
    DeckError,
    edge_deck,
    end_vertex_deck,
    infer_attachment_profile,
    is_G_edge_hypomorphic,
    vertex_deck,
)
from graph_core import (
    CapacityError,
    Graph,
    GraphError,
    emit_graph6,
    end_vertices,
    is_connected,
    normalize_edge_set,
    parse_graph6,
    read_graph6_file,
)
from isomorphism import CodeCache, automorphism_group, canonical_form, is_G_isomorphic
from logger import LogCategory, LoggableMixin, enable_progress, setup_logger, timer
from nash_williams import (
    CONTEXTS,
    LemmaError,
    is_G_edge_reconstructible,
    sufficient_conditions,
    verify_lemma,
)
from perm_group import (
    DEFAULT_MAX_ORDER,
    GroupError,
    Permutation,
    PermGroup,
    alternating,
    aut_complete_bipartite,
    closure,
    symmetric,
    trivial,
)
from reports import ReportError, build_report, error_document, render_json, write_report_atomic
from search_experiments import (
    SearchError,
    burnside_graph_count,
    edge_deck_collisions,
    end_vertex_experiment,
    enumerate_graphs,
    enumerate_trees,
    find_hypomorphic_pairs,
    find_irreplaceable_edge_set,
    find_replacing_sets,
    survey_trees,
)
from structure import (
    StructureError,
    block_cut_tree,
    blocks_and_cutpoints,
    classify,
    depth_profile,
    end_vertex_depths,
    is_2_edge_connected,
    pruned_center,
    pruned_graph,
    reduce_separable,
    vertex_connectivity_at_least,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_INPUT = 4

VERBS = (
    "deck",
    "hypomorphic",
    "lemma",
    "check",
    "pairs",
    "structure",
    "bounds",
    "replace",
    "endvertex",
    "survey-trees",
    "enumerate",
)

LIBRARY_ERRORS = (
    GraphError,
    GroupError,
    DeckError,
    LemmaError,
    StructureError,
    SearchError,
    ReportError,
)


class BadGroupSpec(GroupError):
    """Raised for group specifications outside the mini-language."""


# ----------------------------------------------------------------------
# Group specifications
# ----------------------------------------------------------------------
_KST_RE = re.compile(r"autKst:\s*(\d+)\s*,\s*(\d+)")


def parse_group_spec(
    text: str,
    n: int,
    graph: Optional[Graph] = None,
    max_order: int = DEFAULT_MAX_ORDER,
) -> PermGroup:
    """Build the group named by ``text`` acting on ``n`` points.

    Accepted forms: ``S``, ``A``, ``trivial``, ``autKst:s,t``, ``aut`` (needs
    ``graph``) and ``gens:(0 1 2);(0 1)``.
    """

    spec = text.strip()
    if spec == "S":
        return symmetric(n, max_order)
    if spec == "A":
        return alternating(n, max_order)
    if spec == "trivial":
        return trivial(n)
    if spec == "aut":
        if graph is None:
            raise BadGroupSpec("'aut' needs an input graph")
        if graph.n != n:
            raise BadGroupSpec(f"'aut' graph has {graph.n} vertices, expected {n}")
        return automorphism_group(graph, max_order)
    match = _KST_RE.fullmatch(spec)
    if match:
        s, t = int(match.group(1)), int(match.group(2))
        if s + t != n:
            raise BadGroupSpec(f"autKst:{s},{t} acts on {s + t} points, not {n}")
        return aut_complete_bipartite(s, t, max_order)
    if spec.startswith("gens:"):
        body = spec[len("gens:") :].strip()
        try:
            generators = [Permutation.from_cycles(part, n) for part in body.split(";") if part]
        except GroupError as exc:
            raise BadGroupSpec(f"bad generator list {body!r}: {exc}") from exc
        return closure(n, generators, max_order, tag=f"gens:{body}")
    raise BadGroupSpec(
        f"unknown group specification {text!r}; "
        "expected S, A, trivial, aut, autKst:s,t or gens:(...);(...)"
    )


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------
def _add_graph_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g6", action="append", help="Graph6 line (repeatable)")
    parser.add_argument("--input", type=Path, help="File of graph6 lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grecon",
        description="G-edge reconstruction laboratory",
        allow_abbrev=False,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  grecon deck --kind edge --group S --g6 "Bw"
  grecon lemma --x "Ch" --y "Cp" --group A
  grecon pairs --n 4 --m 2 --group S
        """,
    )
    parser.add_argument("--threads", type=int, help="Worker threads for group loops")
    parser.add_argument("--quiet", action="store_true", help="Only warnings on standard error")
    parser.add_argument("--max-group-order", type=int, help="Cap on enumerated group orders")
    parser.add_argument("--max-candidates", type=int, help="Cap on candidate graphs")
    parser.add_argument("--max-subsets", type=int, help="Cap on 2^m subset sweeps")
    parser.add_argument("--config", type=Path, help="JSON settings file")
    parser.add_argument("--log-dir", type=str, help="Custom directory for log files")
    parser.add_argument("--output", type=Path, help="Also write the report to this file")
    parser.add_argument("--timing", action="store_true", help="Fill the timing block")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    deck = verbs.add_parser("deck", help="Vertex, edge or end-vertex deck")
    _add_graph_source(deck)
    deck.add_argument("--kind", choices=DECK_KINDS, default=EDGE)
    deck.add_argument("--group", default="S")
    deck.add_argument("--infer", action="store_true", help="Infer the attachment profile")

    for name, text in (
        ("hypomorphic", "G-edge hypomorphism of two graphs"),
        ("lemma", "Verify the counting identity on a pair"),
    ):
        pair = verbs.add_parser(name, help=text)
        pair.add_argument("--x", required=True, help="Graph6 of X")
        pair.add_argument("--y", required=True, help="Graph6 of Y")
        pair.add_argument("--group", default="S")

    check = verbs.add_parser("check", help="Decide G-edge reconstructibility by exhaustion")
    _add_graph_source(check)
    check.add_argument("--group", default="S")

    pairs = verbs.add_parser("pairs", help="Find G-edge-hypomorphic non-isomorphic pairs")
    pairs.add_argument("--n", type=int, required=True)
    pairs.add_argument("--m", type=int, required=True)
    pairs.add_argument("--group", default="S")

    structure = verbs.add_parser("structure", help="Blocks, pruned centre and class flags")
    _add_graph_source(structure)

    bounds = verbs.add_parser("bounds", help="Sufficient conditions")
    _add_graph_source(bounds)
    bounds.add_argument("--group", default="S")
    bounds.add_argument("--context", choices=CONTEXTS, default="generic")

    replace = verbs.add_parser("replace", help="Replacing edge sets")
    _add_graph_source(replace)
    replace.add_argument("--group", default="S")
    replace.add_argument("--edges", help="Edge set such as '0-1,2-3'")
    replace.add_argument("--max-k", type=int, help="Largest irreplaceable set to look for")

    endvertex = verbs.add_parser("endvertex", help="End-vertex attachment experiment")
    endvertex.add_argument("--z", required=True, help="Graph6 of the pruned graph Z")
    endvertex.add_argument("--r", required=True, help="Profile r_1,...,r_k such as '1,1'")

    survey = verbs.add_parser("survey-trees", help="Irreplaceable edge sets in small trees")
    survey.add_argument("--max-n", type=int, required=True)
    survey.add_argument("--group", default="S")

    enumerate_ = verbs.add_parser("enumerate", help="Isomorphism classes of small graphs")
    enumerate_.add_argument("--n", type=int, required=True)
    enumerate_.add_argument("--m", type=int)
    enumerate_.add_argument("--trees", action="store_true")
    enumerate_.add_argument("--connected", action="store_true")
    enumerate_.add_argument(
        "--deck-collisions",
        action="store_true",
        help="List non-isomorphic pairs sharing an S_n edge deck",
    )
    enumerate_.add_argument("--min-edges", type=int, default=4)
    return parser


def parse_edge_list(text: str) -> List[tuple]:
    pairs = []
    for token in filter(None, (t.strip() for t in text.split(","))):
        match = re.fullmatch(r"(\d+)\s*-\s*(\d+)", token)
        if not match:
            raise GraphError(f"malformed edge {token!r}; expected 'u-v'")
        pairs.append((int(match.group(1)), int(match.group(2))))
    return list(normalize_edge_set(pairs))


def parse_profile(text: str) -> AttachmentProfile:
    try:
        counts = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise DeckError(f"malformed profile {text!r}") from exc
    return AttachmentProfile(counts)


# ----------------------------------------------------------------------
# Command execution
# ----------------------------------------------------------------------
class CommandRunner(LoggableMixin):
    """Executes one parsed command and returns ``(experiment, parameters, results)``."""

    def __init__(self, args: argparse.Namespace, settings: LabSettings):
        super().__init__()
        self.args = args
        self.settings = settings
        self.workers = settings.threads

    # -- helpers -------------------------------------------------------
    def group_for(self, spec: str, n: int, graph: Optional[Graph] = None) -> PermGroup:
        return parse_group_spec(spec, n, graph, self.settings.max_group_order)

    def graphs(self) -> List[Graph]:
        found: List[Graph] = [parse_graph6(text) for text in self.args.g6 or []]
        if self.args.input is not None:
            try:
                found.extend(read_graph6_file(self.args.input))
            except OSError as exc:
                raise GraphError(f"Unable to read graph file '{self.args.input}': {exc}") from exc
        if not found:
            raise GraphError("no input graph; use --g6 or --input")
        return found

    def per_graph(self, fn: Callable[[Graph], Dict[str, Any]]) -> List[Dict[str, Any]]:
        results = []
        for graph in self.graphs():
            entry = {"graph": emit_graph6(graph)}
            entry.update(fn(graph))
            results.append(entry)
        return results

    @staticmethod
    def attempt(fn: Callable[[], Any]) -> Any:
        """Result of ``fn`` or an error document for the structural optional parts."""

        try:
            return fn()
        except (StructureError, DeckError) as exc:
            return error_document(exc)

    # -- verbs ---------------------------------------------------------
    def run(self) -> tuple:
        handler = getattr(self, "do_" + self.args.verb.replace("-", "_"))
        self.log_debug(f"Running {self.args.verb}", category=LogCategory.CLI)
        return handler()

    def do_deck(self):
        args = self.args

        def one(graph: Graph) -> Dict[str, Any]:
            if args.kind == EDGE:
                group = self.group_for(args.group, graph.n, graph)
                entry = {"deck": edge_deck(graph, group, workers=self.workers).to_json()}
            elif args.kind == VERTEX:
                entry = {"deck": vertex_deck(graph).to_json()}
            else:
                entry = {"deck": end_vertex_deck(graph).to_json()}
            if args.infer and args.kind == END_VERTEX:
                entry["inference"] = infer_attachment_profile(end_vertex_deck(graph)).to_json()
            return entry

        parameters = {"kind": args.kind, "group": args.group if args.kind == EDGE else "S"}
        return "deck", parameters, self.per_graph(one)

    def _pair_parameters(self) -> Dict[str, Any]:
        return {"x": self.args.x, "y": self.args.y, "group": self.args.group}

    def _pair(self):
        x, y = parse_graph6(self.args.x), parse_graph6(self.args.y)
        return x, y, self.group_for(self.args.group, x.n, x)

    def do_hypomorphic(self):
        x, y, group = self._pair()
        cache = CodeCache(group, self.workers)
        hypomorphic = is_G_edge_hypomorphic(x, y, group, cache)
        results = {
            "hypomorphic": hypomorphic,
            "isomorphic": is_G_isomorphic(x, y, group, self.workers),
            "group_order": group.order,
        }
        if x.m:
            results["x_deck"] = edge_deck(x, group, cache).to_json()
            results["y_deck"] = edge_deck(y, group, cache).to_json()
        return "hypomorphic", self._pair_parameters(), results

    def do_lemma(self):
        x, y, group = self._pair()
        report = verify_lemma(x, y, group, self.settings.max_subsets, self.workers)
        results = report.to_json()
        results["group_order"] = group.order
        return "lemma", self._pair_parameters(), results

    def do_check(self):
        def one(graph: Graph) -> Dict[str, Any]:
            group = self.group_for(self.args.group, graph.n, graph)
            verdict = is_G_edge_reconstructible(
                graph, group, self.settings.max_candidates, self.workers
            )
            entry = verdict.to_json()
            entry["group_order"] = group.order
            entry["conditions"] = sufficient_conditions(graph, group).to_json()
            if verdict.witness is not None:
                entry["witness_code"] = canonical_form(verdict.witness).to_hex()
                report = verify_lemma(
                    graph, verdict.witness, group, self.settings.max_subsets, self.workers
                )
                entry["witness_lemma_verdict"] = report.verdict
            return entry

        return "check", {"group": self.args.group}, self.per_graph(one)

    def do_pairs(self):
        args = self.args
        group = self.group_for(args.group, args.n)
        witnesses = find_hypomorphic_pairs(
            args.n,
            args.m,
            group,
            self.settings.max_candidates,
            self.settings.max_subsets,
            self.workers,
        )
        results = {"count": len(witnesses), "pairs": [w.to_json() for w in witnesses]}
        return "pairs", {"n": args.n, "m": args.m, "group": args.group}, results

    def do_structure(self):
        def one(graph: Graph) -> Dict[str, Any]:
            def blocks():
                found, cuts = blocks_and_cutpoints(graph)
                return {"blocks": [[list(e) for e in b] for b in found], "cutpoints": list(cuts)}

            pruned = pruned_graph(graph)
            entry: Dict[str, Any] = {
                "blocks": self.attempt(blocks),
                "block_cut_tree": self.attempt(lambda: block_cut_tree(graph).to_json()),
                "pruned_graph": {
                    "graph": emit_graph6(pruned.graph) if pruned.graph.n else None,
                    "vertices": list(pruned.vertices),
                    "rounds": pruned.rounds,
                },
                "pruned_center": self.attempt(lambda: pruned_center(graph).to_json()),
                "classes": classify(graph).to_json(),
                "connectivity": {
                    "vertex_2": vertex_connectivity_at_least(graph, 2),
                    "vertex_3": vertex_connectivity_at_least(graph, 3),
                    "edge_2": is_2_edge_connected(graph),
                },
            }
            if end_vertices(graph) and pruned.graph.n:
                entry["end_vertex_depths"] = {
                    str(u): d for u, d in sorted(end_vertex_depths(graph).items())
                }
                entry["depth_profile"] = [list(p) for p in depth_profile(graph)]

            def reduction():
                reduced = reduce_separable(graph, self.settings.max_group_order)
                return {
                    "center": emit_graph6(reduced.center),
                    "center_vertices": list(reduced.center_vertices),
                    "group_order": reduced.group.order,
                    "recognized": [list(e) for e in reduced.recognized],
                    "sub_deck": reduced.sub_deck.to_json(),
                }

            entry["separable_reduction"] = self.attempt(reduction)
            return entry

        return "structure", {}, self.per_graph(one)

    def do_bounds(self):
        args = self.args

        def one(graph: Graph) -> Dict[str, Any]:
            if args.context == "center_known":
                reduced = reduce_separable(graph, self.settings.max_group_order)
                flags = sufficient_conditions(reduced.center, reduced.group, args.context)
                return {
                    "center": emit_graph6(reduced.center),
                    "group_order": reduced.group.order,
                    "conditions": flags.to_json(),
                    "reconstructible_by_bound": flags.any,
                }
            group = self.group_for(args.group, graph.n, graph)
            flags = sufficient_conditions(graph, group, args.context)
            return {
                "group_order": group.order,
                "conditions": flags.to_json(),
                "reconstructible_by_bound": flags.any,
            }

        group_label = "induced" if args.context == "center_known" else args.group
        parameters = {"group": group_label, "context": args.context}
        return "bounds", parameters, self.per_graph(one)

    def do_replace(self):
        args = self.args

        def one(graph: Graph) -> Dict[str, Any]:
            group = self.group_for(args.group, graph.n, graph)
            cache = CodeCache(group, self.workers)
            if args.edges:
                removed = parse_edge_list(args.edges)
                found = find_replacing_sets(graph, removed, group, cache)
                return {
                    "edges": [list(e) for e in removed],
                    "replacing_sets": [[list(e) for e in f] for f in found],
                }
            irreplaceable = find_irreplaceable_edge_set(graph, group, args.max_k, cache)
            return {
                "irreplaceable": (
                    [list(e) for e in irreplaceable] if irreplaceable is not None else None
                )
            }

        parameters = {"group": args.group, "edges": args.edges, "max_k": args.max_k}
        return "replace", parameters, self.per_graph(one)

    def do_endvertex(self):
        z = parse_graph6(self.args.z)
        verdict = end_vertex_experiment(z, parse_profile(self.args.r))
        return "endvertex", {"z": self.args.z, "r": self.args.r}, verdict.to_json()

    def do_survey_trees(self):
        spec = self.args.group
        survey = survey_trees(
            self.args.max_n,
            group_factory=lambda tree: self.group_for(spec, tree.n, tree),
            group_spec=spec,
        )
        return "survey-trees", {"max_n": self.args.max_n, "group": spec}, survey.to_json()

    def do_enumerate(self):
        args = self.args
        if args.trees:
            graphs = enumerate_trees(args.n)
        else:
            graphs = enumerate_graphs(args.n, args.m)
        if args.connected:
            graphs = [g for g in graphs if is_connected(g)]
        results: Dict[str, Any] = {
            "count": len(graphs),
            "graphs": [emit_graph6(g) for g in graphs] if args.n else [],
        }
        if not args.trees and not args.connected:
            results["burnside_count"] = burnside_graph_count(args.n, args.m)
        if args.deck_collisions:
            results["deck_collisions"] = [
                [emit_graph6(a), emit_graph6(b)]
                for a, b in edge_deck_collisions(args.n, args.min_edges)
            ]
        parameters = {
            "n": args.n,
            "m": args.m,
            "trees": args.trees,
            "connected": args.connected,
            "deck_collisions": args.deck_collisions,
            "min_edges": args.min_edges if args.deck_collisions else None,
        }
        return "enumerate", parameters, results


# ----------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------
def resolve_settings(args: argparse.Namespace) -> LabSettings:
    """File settings first, then command-line overrides, validated together."""

    settings = load_settings(args.config) if args.config else LabSettings()
    overrides = {
        "max_group_order": args.max_group_order,
        "max_candidates": args.max_candidates,
        "max_subsets": args.max_subsets,
        "threads": args.threads,
        "quiet": True if args.quiet else None,
        "log_dir": args.log_dir,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    issues = validate_settings(overrides)
    if issues:
        summary = "; ".join(f"{issue.field}: {issue.title}" for issue in issues)
        raise ConfigurationError(f"Invalid options ({summary})", issues)
    return settings.merged(overrides)


def _emit(document: Dict[str, Any], stream) -> None:
    stream.write(render_json(document))
    stream.flush()


def _execute(args: argparse.Namespace, settings: LabSettings, stdout) -> int:
    runner = CommandRunner(args, settings)
    started = time.perf_counter()
    try:
        with timer(f"grecon {args.verb}", log_result=not settings.quiet):
            experiment, parameters, results = runner.run()
    except BadGroupSpec as exc:
        runner.log_warning("Bad group specification", category=LogCategory.CLI, detail=str(exc))
        _emit(error_document(exc), stdout)
        return EXIT_USAGE
    except CapacityError as exc:
        runner.log_warning("Capacity cap exceeded", category=LogCategory.CLI, detail=str(exc))
        _emit(error_document(exc), stdout)
        return EXIT_CAPACITY
    except LIBRARY_ERRORS as exc:
        runner.log_warning("Command failed", category=LogCategory.CLI, detail=str(exc))
        _emit(error_document(exc), stdout)
        return EXIT_INPUT

    timing = None
    if args.timing:
        timing = {"seconds": round(time.perf_counter() - started, 6), "threads": settings.threads}
    document = build_report(experiment, parameters, results, timing)
    _emit(document, stdout)
    if args.output is not None:
        try:
            write_report_atomic(args.output, document)
        except ReportError as exc:
            runner.log_error("Report not written", exception=exc, category=LogCategory.DATA)
            return EXIT_INPUT
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    """Parse ``argv``, run the verb and print its JSON report; returns the exit code."""

    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        settings = resolve_settings(args)
    except ConfigurationError as exc:
        _emit(error_document(exc), stdout)
        return EXIT_USAGE

    logger = setup_logger(
        "grecon",
        settings.log_dir,
        logging.WARNING if settings.quiet else logging.INFO,
    )
    enable_progress(not settings.quiet)
    try:
        return _execute(args, settings, stdout)
    finally:
        logger.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


__all__ = [
    "BadGroupSpec",
    "CommandRunner",
    "EXIT_CAPACITY",
    "EXIT_INPUT",
    "EXIT_OK",
    "EXIT_USAGE",
    "VERBS",
    "build_parser",
    "main",
    "parse_edge_list",
    "parse_group_spec",
    "parse_profile",
    "resolve_settings",
    "run",
]
