"""Command line interface.

Exit codes: 0 when a question was answered, 1 on any error (including an
invalid manifold for ``validate``), 2 when a bounded search ran out of budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Optional

from .backends.base import SearchExhausted
from .certificates import ReplayError, replay, run_query, with_budget
from .dsl import ParseError, emit_manifold, parse_manifold, parse_query
from .graph import validate_graph, validate_jsj
from .harness import fuzz
from .presets import NOTES, UnknownPreset, load_preset, preset_names

EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2


def shipped_files() -> dict[str, str]:
    """Preset DSL files bundled with the package, by preset name."""
    out = {}
    for entry in resources.files("gogcalc").joinpath("data").iterdir():
        if entry.name.endswith(".gog"):
            out[entry.name[: -len(".gog")]] = entry.read_text(encoding="utf-8")
    return dict(sorted(out.items()))


def _read_manifold(path: str):
    if path.startswith("preset:"):
        return load_preset(path[len("preset:") :])
    return parse_manifold(Path(path).read_bytes())


def _factors(factors: list) -> str:
    return " * ".join(f"({text})" if n == 1 else f"({text})^{n}" for text, n in factors)


def _summary(cert: dict) -> str:
    lines = [f"query: {cert['query']}"]
    for p in cert["inputs"]:
        lines.append(f"  input: {p}")
    for k, v in cert["answer"].items():
        lines.append(f"  {k}: {v}")
    if not cert["complete"]:
        lines.append("  note: answer rests on a bounded search (incomplete)")
    lines.append(f"  reduction steps: {cert['budget']['reduction_steps']}")
    if cert["traced"]:
        for c in cert["checks"]:
            lines.append(f"  check {c['claim']}: {_factors(c['factors'])}  =>  {c['result']}")
            for s in c["steps"]:
                lines.append(
                    f"    cancel {s['edge']} at {s['index']} with witness {tuple(s['witness'])}: {s['replacement']}"
                )
    return "\n".join(lines)


def cmd_validate(args) -> int:
    gog = _read_manifold(args.file)
    issues = validate_graph(gog.graph).issues + validate_jsj(gog).issues
    if issues:
        for msg in issues:
            print(f"invalid: {msg}")
        return EXIT_ERROR
    print(f"valid: {len(gog.graph.vertices)} vertices, {len(gog.graph.edges) // 2} edges, base {gog.base_vertex}")
    return EXIT_OK


def cmd_query(args) -> int:
    gog = with_budget(_read_manifold(args.file), args.budget)
    src = Path(args.query)
    text = src.read_bytes() if src.is_file() else args.query
    query = parse_query(text, gog)
    cert = run_query(gog, query, trace=args.trace)
    if args.certificate:
        Path(args.certificate).write_text(json.dumps(cert, indent=2) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps(cert, indent=2))
    else:
        print(_summary(cert))
    return EXIT_OK


def cmd_replay(args) -> int:
    cert = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
    replay(cert)
    print(f"replayed {len(cert['checks'])} checks: ok")
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.list or not args.name:
        for name in preset_names():
            print(f"{name}: {NOTES[name]}")
        return EXIT_OK
    gog = load_preset(args.name)
    if args.emit:
        sys.stdout.write(emit_manifold(gog))
    else:
        print(NOTES[args.name])
        print(f"vertices: {', '.join(gog.graph.vertices)}; free tori: {gog.free_tori()}")
    return EXIT_OK


def _fuzz_chunk(job: tuple[int, int, int]) -> dict:
    seed, length, count = job
    corpus = [t.encode() for t in shipped_files().values()]
    stats = fuzz(seed, length, count, corpus)
    stats["crashes"] = [(d.hex(), msg) for d, msg in stats["crashes"]]
    return stats


def cmd_fuzz(args) -> int:
    jobs = max(1, args.jobs)
    per = -(-args.count // jobs)
    chunks = [(args.seed * 1000 + k, args.len, min(per, args.count - k * per)) for k in range(jobs)]
    chunks = [c for c in chunks if c[2] > 0]
    if jobs == 1:
        results = [_fuzz_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fuzz_chunk, chunks))
    crashes = [c for r in results for c in r["crashes"]]
    total = sum(r["inputs"] for r in results)
    errors = sum(r["errors"] for r in results)
    print(f"fuzzed {total} inputs: {errors} positioned errors, {len(crashes)} crashes")
    for data, msg in crashes[:10]:
        print(f"  crash on {data}: {msg}")
    return EXIT_ERROR if crashes else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gogcalc", description="Path calculus for graphs of groups.")
    ap.add_argument("--budget", type=int, default=None, help="word length for bounded searches in hyperbolic pieces")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for bounded searches and fuzzing")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a manifold file")
    p.add_argument("file", help="DSL file, or preset:NAME")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("query", help="answer a query and print its certificate")
    p.add_argument("file", help="DSL file, or preset:NAME")
    p.add_argument("query", help="query file or inline query text")
    p.add_argument("--trace", action=argparse.BooleanOptionalAction, default=True, help="include reduction traces")
    p.add_argument("--json", action="store_true", help="print the certificate as JSON")
    p.add_argument("--certificate", help="also write the JSON certificate to this path")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("replay", help="verify a JSON certificate independently")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("preset", help="list presets or print one")
    p.add_argument("name", nargs="?")
    p.add_argument("--emit", action="store_true", help="print the preset as a DSL file")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("fuzz", help="feed random bytes to the parsers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--len", type=int, default=64)
    p.add_argument("--count", type=int, default=10000)
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SearchExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParseError as exc:
        print(f"parse error at line {exc.line}, column {exc.column}: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, ReplayError, UnknownPreset) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
