"""Command line entry point: ``python -m permuta.cli <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .census import (EXIT_DISAGREE, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, CensusConfig,
                     UnknownTarget, UnsupportedFormat, export, load_entries, read_graph,
                     run_census)
from .classifier import cross_validate
from .groups import GroupError
from .topology import (BudgetExceeded, EmbeddingCertificate, HashMismatch, embeddable_on,
                       verify_certificate)
from .zoo import construct, parse_descriptor


def _budgets(p: argparse.ArgumentParser) -> None:
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--time-budget-seconds", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permuta", description="Permutability graphs of finite groups.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("census", help="classify a list of groups and cross-check against the oracle")
    src = c.add_mutually_exclusive_group()
    src.add_argument("--builtin", action="store_true", help="the shipped fixture set (default)")
    src.add_argument("--from", dest="from_file", type=Path, help="JSON list of descriptors")
    c.add_argument("--out", type=Path, default=Path("census_out"))
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--no-cache", action="store_true")
    c.add_argument("--no-golden", action="store_true", help="ignore the shipped certificates")
    _budgets(c)

    k = sub.add_parser("classify", help="pipeline and oracle verdicts for one group")
    k.add_argument("--group", required=True)
    _budgets(k)

    g = sub.add_parser("graph", help="export the permutability graph of a group")
    g.add_argument("--group", required=True)
    g.add_argument("--emit", default="graph6")
    g.add_argument("--out", type=Path)

    e = sub.add_parser("embed", help="search for an embedding of a graph")
    e.add_argument("--graph", required=True, type=Path)
    e.add_argument("--surface", required=True, choices=("torus", "projective"))
    e.add_argument("--certificate", type=Path, help="where to write the certificate")
    _budgets(e)

    v = sub.add_parser("verify", help="check a certificate against a graph")
    v.add_argument("--graph", required=True, type=Path)
    v.add_argument("--certificate", required=True, type=Path)
    return ap


def _census(a) -> int:
    entries = None
    if a.from_file is not None:
        try:
            entries = load_entries(a.from_file)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot read {a.from_file}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    cfg = CensusConfig(entries=entries, out_dir=a.out, node_budget=a.node_budget,
                       time_budget_seconds=a.time_budget_seconds, use_cache=not a.no_cache,
                       use_golden=not a.no_golden, workers=a.workers)
    res = run_census(cfg)
    if res.error:
        print(f"error: {res.error}", file=sys.stderr)
        return res.exit_code
    for r in res.rows:
        flag = "" if r["status"] == "agree" else f"  [{r['status']}: {r['disagreements'] or r['note']}]"
        print(f"{r['name']:<40} |G|={r['order']:<4} planar={r['planar'] or '?'} "
              f"toroidal={r['toroidal'] or '?'} projective={r['projective'] or '?'}{flag}")
    print(f"{len(res.rows)} groups, {res.searches} embedding searches, reports in {a.out}")
    return res.exit_code


def _classify(a) -> int:
    g = construct(parse_descriptor(a.group))
    rep = cross_validate(g, a.node_budget, a.time_budget_seconds, expected=parse_descriptor(a.group))
    out = {
        "group": g.name, "order": g.order, "recognized": rep.descriptor.text(),
        "pipeline": rep.pipeline.flags(),
        "oracle": None if rep.oracle is None else rep.oracle.flags(),
        "evidence": {k: (f"certificate on {v.surface}, {v.faces} faces" if isinstance(v, EmbeddingCertificate)
                         else str(v)) for k, v in rep.pipeline.evidence.items()},
        "disagreements": rep.disagreements, "inconclusive": rep.inconclusive, "note": rep.note,
    }
    print(json.dumps(out, indent=1))
    if rep.disagreements:
        return EXIT_DISAGREE
    return EXIT_INCONCLUSIVE if rep.inconclusive else EXIT_OK


def _graph(a) -> int:
    text = export(a.group, a.emit, a.out)
    if a.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _embed(a) -> int:
    g = read_graph(a.graph)
    try:
        cert = embeddable_on(g, a.surface, a.node_budget, a.time_budget_seconds)
    except BudgetExceeded as exc:
        print(f"inconclusive: {exc}")
        return EXIT_INCONCLUSIVE
    if cert is None:
        print(f"not embeddable on the {a.surface}")
        return EXIT_OK
    print(f"embeds on the {a.surface} ({cert.surface} certificate, {cert.faces} faces)")
    if a.certificate is not None:
        cert.dump(a.certificate)
    return EXIT_OK


def _verify(a) -> int:
    g = read_graph(a.graph)
    cert = EmbeddingCertificate.load(a.certificate)
    ok = verify_certificate(g, cert)
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_DISAGREE


COMMANDS = {"census": _census, "classify": _classify, "graph": _graph, "embed": _embed, "verify": _verify}


def main(argv: list[str] | None = None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return COMMANDS[a.cmd](a)
    except (GroupError, HashMismatch, UnknownTarget, UnsupportedFormat, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
