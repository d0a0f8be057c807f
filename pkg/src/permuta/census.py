"""Census runs, report files and graph export."""

from __future__ import annotations

import csv
import json
import os
from contextlib import contextmanager
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import topology
from .classifier import CrossValidationReport, cross_validate
from .graphs import Graph, from_graph6, permutability_graph, to_dot, to_graph6
from .groups import GroupError
from .topology import EmbeddingCertificate
from .zoo import GroupDescriptor, construct, parse_descriptor

BUILTIN = Path(__file__).parent / "data" / "builtin_census.json"
CSV_COLUMNS = ("name", "order", "descriptor", "source", "planar", "toroidal", "projective",
               "k33free", "k15free", "c6free", "p5free", "p6free", "evidence", "runtime_ms",
               "oracle", "status", "disagreements", "note")

EXIT_OK, EXIT_ERROR, EXIT_DISAGREE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UnknownTarget(ValueError):
    pass


class UnsupportedFormat(ValueError):
    pass


@dataclass
class CensusEntry:
    descriptor: str
    name: str = ""
    role: str = ""


@dataclass
class CensusConfig:
    entries: list[CensusEntry] | None = None
    out_dir: Path | None = Path("census_out")
    node_budget: int | None = None
    time_budget_seconds: float | None = None
    cache_dir: Path | None = None
    use_cache: bool = True
    use_golden: bool = True
    workers: int = 1

    def resolved_entries(self) -> list[CensusEntry]:
        return self.entries if self.entries is not None else load_entries(BUILTIN)


def load_entries(path: str | Path) -> list[CensusEntry]:
    """Read a census file: a JSON list of descriptor strings or {descriptor, name, role} objects."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["groups"]
    out = []
    for item in data:
        if isinstance(item, str):
            out.append(CensusEntry(item))
        else:
            out.append(CensusEntry(item["descriptor"], item.get("name", ""), item.get("role", "")))
    return out


@dataclass
class CensusResult:
    exit_code: int
    rows: list[dict] = field(default_factory=list)
    error: str = ""
    searches: int = 0


def _flag(v) -> str:
    return "" if v is None else str(int(bool(v)))


def _evidence_text(ev: dict) -> str:
    parts = []
    for key in ("planar", "torus", "projective"):
        if key in ev:
            v = ev[key]
            if isinstance(v, EmbeddingCertificate):
                v = f"certificate F={v.faces}"
            parts.append(f"{key}: {v}")
    return "; ".join(parts)


def report_row(entry: CensusEntry, rep: CrossValidationReport) -> dict:
    pf = rep.pipeline.flags()
    row = {
        "name": entry.name or rep.name,
        "order": rep.order,
        "descriptor": entry.descriptor,
        "source": "pipeline",
        "planar": _flag(pf["planar"]),
        "toroidal": _flag(pf["toroidal"]),
        "projective": _flag(pf["projective"]),
        **{k: _flag(pf[k]) for k in ("k33free", "k15free", "c6free", "p5free", "p6free")},
        "evidence": _evidence_text(rep.pipeline.evidence),
        "runtime_ms": round(rep.runtime_ms, 1),
        "oracle": ("" if rep.oracle is None else
                   " ".join(f"{k}={_flag(v)}" for k, v in rep.oracle.flags().items())),
        "status": "disagree" if rep.disagreements else ("inconclusive" if rep.inconclusive else "agree"),
        "disagreements": ",".join(rep.disagreements),
        "note": rep.note,
    }
    row["recognized"] = rep.descriptor.text()
    row["graph"] = rep.pipeline.evidence.get("graph", "")
    return row


def _run_one(args) -> tuple[dict | None, str, int]:
    entry, node_budget, time_budget, use_cache = args
    before = topology.STATS.searches
    try:
        d = parse_descriptor(entry.descriptor)
        g = construct(d)
    except (GroupError, OSError, ValueError) as exc:
        return None, f"{entry.descriptor}: {type(exc).__name__}: {exc}", 0
    rep = cross_validate(g, node_budget, time_budget, use_cache, expected=d)
    return report_row(entry, rep), "", topology.STATS.searches - before


@contextmanager
def _environment(**values: str | None):
    old = {k: os.environ.get(k) for k in values}
    for k, v in values.items():
        if v is not None:
            os.environ[k] = v
    try:
        yield
    finally:
        for k, v in old.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


def run_census(cfg: CensusConfig) -> CensusResult:
    """Classify every entry; worker processes inherit the cache settings via the environment."""
    cache = None if cfg.cache_dir is None else str(cfg.cache_dir)
    with _environment(PERMUTA_CACHE_DIR=cache, PERMUTA_GOLDEN="1" if cfg.use_golden else "0"):
        return _run_census(cfg)


def _run_census(cfg: CensusConfig) -> CensusResult:
    try:
        entries = cfg.resolved_entries()
    except (OSError, ValueError, KeyError) as exc:
        return CensusResult(EXIT_ERROR, error=f"cannot read census: {exc}")
    jobs = [(e, cfg.node_budget, cfg.time_budget_seconds, cfg.use_cache) for e in entries]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    errors = [msg for _, msg, _ in results if msg]
    if errors:
        return CensusResult(EXIT_ERROR, error="\n".join(errors))
    rows = [r for r, _, _ in results]
    searches = sum(s for _, _, s in results)
    if any(r["status"] == "disagree" for r in rows):
        code = EXIT_DISAGREE
    elif any(r["status"] == "inconclusive" for r in rows):
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    result = CensusResult(code, rows, searches=searches)
    if cfg.out_dir is not None:
        try:
            write_reports(result, Path(cfg.out_dir))
        except OSError as exc:
            return CensusResult(EXIT_ERROR, rows, error=f"cannot write reports: {exc}")
    return result


def write_reports(result: CensusResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "census.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        w.writeheader()
        w.writerows(result.rows)
    summary = {
        "exit_code": result.exit_code,
        "groups": len(result.rows),
        "disagreements": sum(r["status"] == "disagree" for r in result.rows),
        "inconclusive": sum(r["status"] == "inconclusive" for r in result.rows),
        "embedding_searches": result.searches,
    }
    with open(out / "census.json", "w") as fh:
        json.dump({"summary": summary, "rows": result.rows}, fh, indent=1)


# -- export ------------------------------------------------------------------

def resolve_graph(target: str) -> Graph:
    """A graph from a group descriptor (its permutability graph) or a graph file."""
    path = Path(target)
    if path.suffix in (".g6", ".json", ".txt") and path.exists():
        return read_graph(path)
    try:
        d = parse_descriptor(target)
    except ValueError:
        raise UnknownTarget(f"{target!r} is neither a group descriptor nor a graph file") from None
    return group_graph(d)


def group_graph(d: GroupDescriptor) -> Graph:
    return permutability_graph(construct(d))


def read_graph(path: str | Path) -> Graph:
    text = Path(path).read_text().strip()
    if str(path).endswith(".json"):
        data = json.loads(text)
        if "edges" not in data:
            return from_graph6(data["graph6"])
        return Graph.from_edges(data["n"], [tuple(e) for e in data["edges"]], data.get("labels") or None)
    return from_graph6(text.splitlines()[0].strip())


def graph_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges()], "labels": list(g.labels or []),
            "graph6": to_graph6(g)}


def export(target: str | Graph, fmt: str, out: str | Path | None = None) -> str:
    if fmt not in ("graph6", "dot", "json"):
        raise UnsupportedFormat(f"unsupported format {fmt!r}; use graph6, dot or json")
    g = target if isinstance(target, Graph) else resolve_graph(target)
    if fmt == "graph6":
        text = to_graph6(g) + "\n"
    elif fmt == "dot":
        text = to_dot(g)
    else:
        text = json.dumps(graph_json(g), indent=1) + "\n"
    if out is not None:
        Path(out).write_text(text)
    return text
