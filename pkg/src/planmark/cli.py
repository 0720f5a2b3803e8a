"""Command-line surface: KB checking, single-path tools, full runs."""

from __future__ import annotations

import argparse
import sys

from .bayes import (
    NetworkError,
    build_network,
    default_cpts,
    exact_posterior,
    render_network,
)
from .kb import KbError, load_kb
from .marker import EngineConfig, OracleGuardError, enumerate_paths_oracle
from .paths import PathError, parse_path
from .pipeline import RunConfig, SynthParams, run, synth_corpus
from .scoring import score_path
from .semantics import relevant_statements, statements_of


def _add_common(parser: argparse.ArgumentParser, *, kb_required: bool = True) -> None:
    parser.add_argument("--kb", required=kb_required, help="knowledge base file")
    parser.add_argument("--output", default=None, help="output file (default stdout)")


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threshold", type=float, default=30.0,
                        help="half-path cutoff T (default 30)")
    parser.add_argument("--full-threshold", type=float, default=None,
                        help="whole-path cutoff (default T*T)")
    parser.add_argument("--max-depth", type=int, default=10)
    parser.add_argument("--approval-ratio", type=float, default=1000.0)
    parser.add_argument("--gamma1", type=float, default=0.9,
                        help="interior evidence strength when all equalities hold")
    parser.add_argument("--gamma0", type=float, default=1e-7,
                        help="interior evidence strength otherwise")


def _beliefs(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated beliefs")
    return float(parts[0]), float(parts[1])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planmark")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="load a KB and report invariant results")
    _add_common(p)

    p = sub.add_parser("run", help="full recognition pass over an input stream")
    _add_common(p)
    p.add_argument("--input", default=None, help="stream file (default stdin)")
    _add_config(p)

    for name, description in (("score", "spinal contribution of a path"),
                              ("translate", "statements a path asserts"),
                              ("network", "dump the path's network"),
                              ("eval", "exact posterior of a path")):
        p = sub.add_parser(name, help=description)
        _add_common(p)
        p.add_argument("--path", required=True, help="path literal")
        p.add_argument("--beliefs", type=_beliefs, default=(1.0, 1.0),
                       help="start,end beliefs (default 1.0,1.0)")
        if name == "eval":
            p.add_argument("--gamma1", type=float, default=0.9)
            p.add_argument("--gamma0", type=float, default=1e-7)

    p = sub.add_parser("paths", help="enumerate all valid paths (oracle)")
    _add_common(p)
    p.add_argument("--start", required=True, help="(inst ID SCHEMA) form")
    p.add_argument("--end", required=True, help="(inst ID SCHEMA) form")
    p.add_argument("--max-depth", type=int, default=10)

    p = sub.add_parser("synth", help="emit a synthetic corpus")
    _add_common(p, kb_required=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stories", type=int, default=6)
    p.add_argument("--plans", type=int, default=6)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--out-kb", default=None, help="write the KB here")
    p.add_argument("--out-streams", default=None,
                   help="write one stream file per story under this prefix")
    return parser


def _parse_obs(text: str):
    from .pipeline import parse_stream

    records = parse_stream(text)
    if len(records) != 1 or records[0][0] != "inst":
        raise KbError("expected a single (inst ID SCHEMA [:belief FLOAT]) form")
    return records[0][1]


def _dispatch(args: argparse.Namespace, out) -> int:
    if args.command == "synth":
        params = SynthParams(n_plans=args.plans, n_stories=args.stories,
                             corroboration_density=args.density)
        corpus = synth_corpus(args.seed, params)
        if args.out_kb is not None:
            with open(args.out_kb, "w", encoding="utf-8") as fh:
                fh.write(corpus.kb_text)
        if args.out_streams is not None:
            for i, stream in enumerate(corpus.streams):
                with open(f"{args.out_streams}{i:03d}.stream", "w",
                          encoding="utf-8") as fh:
                    fh.write(stream)
        if args.out_kb is None and args.out_streams is None:
            out.write(corpus.kb_text)
            for i, stream in enumerate(corpus.streams):
                out.write(f"; ---- stream {i:03d} ----\n")
                out.write(stream)
        return 0

    with open(args.kb, encoding="utf-8") as fh:
        kb = load_kb(fh.read())

    if args.command == "check":
        roles = sum(len(s.slots) for s in kb.schemas.values())
        out.write(f"ok: {len(kb.schemas)} schemas, {roles} role links, "
                  f"eq-prior {kb.eq_prior!r}\n")
        return 0

    if args.command == "run":
        if args.input is None:
            stream_text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                stream_text = fh.read()
        config = RunConfig(
            engine=EngineConfig(half_threshold=args.threshold,
                                full_threshold=args.full_threshold,
                                max_depth=args.max_depth,
                                approval_ratio=args.approval_ratio),
            gamma1=args.gamma1, gamma0=args.gamma0)
        out.write(run(kb, config, stream_text).render())
        return 0

    if args.command == "paths":
        obs1 = _parse_obs(args.start)
        obs2 = _parse_obs(args.end)
        for path in enumerate_paths_oracle(kb, obs1, obs2, args.max_depth):
            out.write(path.render() + "\n")
        return 0

    path = parse_path(kb, args.path, beliefs=args.beliefs)
    if args.command == "score":
        out.write(f"{score_path(kb, path)!r}\n")
    elif args.command == "translate":
        full = statements_of(path)
        rs = relevant_statements(kb, path)
        out.write("S(P):\n")
        for statement in full.statements:
            out.write(f"  {statement.render()}\n")
        out.write("RS(P):\n")
        for statement in rs.statements:
            out.write(f"  {statement.render()}\n")
    elif args.command == "network":
        network = build_network(kb, path, relevant_statements(kb, path))
        out.write(render_network(network))
    else:  # eval
        network = build_network(kb, path, relevant_statements(kb, path))
        cpts = default_cpts(kb, network, args.gamma1, args.gamma0)
        joint, residual = exact_posterior(network, cpts)
        out.write(f"posterior {joint!r}\n")
        out.write(f"residual {residual!r}\n")
        out.write(f"sc {score_path(kb, path)!r}\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.output is not None:
            with open(args.output, "w", encoding="utf-8") as fh:
                return _dispatch(args, fh)
        return _dispatch(args, sys.stdout)
    except (KbError, PathError, NetworkError, OracleGuardError, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
