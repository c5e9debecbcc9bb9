"""Command-line interface: ``mdsx build|verify|audit|ingest|kill|repair|reassemble``.

Exit codes: 0 success, 1 validation failure, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .builder import AccessOptimalCode, build
from .cluster import SYMBOL_BYTES, Cluster
from .code_model import is_mds
from .errors import MdsxError
from .repair import audit, bandwidth_bound, check_repair_systems, format_audit

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY = 2


def load_code(path: str | Path) -> AccessOptimalCode:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MdsxError(f"{path}: not valid JSON ({exc})") from None
    return AccessOptimalCode.from_json(doc)


def _parse_nodes(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def cmd_build(args) -> int:
    built = build(args.n, args.k, args.delta, keep_intermediates=False)
    Path(args.out).write_text(json.dumps(built.to_json()))
    d = built.k + built.delta - 1
    bound = bandwidth_bound(d, built.k, built.N)
    print(f"(n,k,delta)=({built.n},{built.k},{built.delta})  q={built.code.q}  tau={built.tau}  N={built.N}")
    for p in built.plans:
        print(f"node {p.node}: round {p.round} goal {p.goal_index}  "
              f"per-helper {len(p.accessed)}  d={d}  bound {bound} symbols")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    built = load_code(args.code)
    mds = is_mds(built.code)
    if not mds:
        print(f"FAIL: MDS check, singular node subset {list(mds.witness)} (after {mds.checked} subsets)")
        return EXIT_VERIFY
    rep = check_repair_systems(built.code, built.plans, built.delta)
    if not rep:
        print(f"FAIL: repair systems, witness {rep.witness} (after {rep.checked} systems)")
        return EXIT_VERIFY
    print(f"PASS ({mds.checked} MDS subsets, {rep.checked} repair systems)")
    return EXIT_OK


def cmd_audit(args) -> int:
    built = load_code(args.code)
    rows = audit(built)
    if args.json:
        for row in rows:
            print(row.to_json())
    else:
        print(format_audit(rows, paper_indexing=args.paper_indexing))
    return EXIT_OK if all(r.optimal for r in rows) else EXIT_VERIFY


def cmd_ingest(args) -> int:
    built = load_code(args.code)
    cluster = Cluster.ingest(built, Path(args.input), Path(args.cluster))
    print(f"ingested {cluster.original_length} bytes: {cluster.stripe_count} stripes, "
          f"{cluster.packing} packing, {built.n} shards in {args.cluster}")
    return EXIT_OK


def cmd_kill(args) -> int:
    cluster = Cluster.open(Path(args.cluster))
    cluster.kill(args.node)
    print(f"node {args.node} shard deleted")
    return EXIT_OK


def cmd_repair(args) -> int:
    cluster = Cluster.open(Path(args.cluster))
    helpers = _parse_nodes(args.helpers) if args.helpers else None
    s = cluster.repair(args.node, helpers, force=args.force)
    r = s.per_stripe
    d = len(r.helpers)
    print(f"repaired node {r.failed} from helpers {list(r.helpers)}")
    print(f"per stripe: {r.downloaded_per_helper} symbols/helper, {r.total_downloaded} total, "
          f"bound {r.bound} ({'optimal' if r.optimal else 'NOT optimal'})")
    print(f"stripes {s.stripes}: downloaded {s.symbols_downloaded} symbols "
          f"({s.bytes_downloaded} bytes), accessed {s.symbols_accessed} symbols, "
          f"bound {s.bound_symbols} symbols ({s.bound_symbols * SYMBOL_BYTES} bytes), d={d}")
    return EXIT_OK


def cmd_reassemble(args) -> int:
    cluster = Cluster.open(Path(args.cluster))
    cluster.reassemble(Path(args.out))
    print(f"wrote {cluster.original_length} bytes to {args.out} (checksum ok)")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdsx", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct an (n,k) code with delta-optimal access")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--out", default="code.json")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="exhaustive MDS and repair-system check")
    p.add_argument("code")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("audit", help="print the repair-plan table")
    p.add_argument("code")
    p.add_argument("--paper-indexing", action="store_true", help="print PCG rows 1-indexed")
    p.add_argument("--json", action="store_true", help="emit JSON lines")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("ingest", help="encode a file into a cluster directory")
    p.add_argument("--code", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--cluster", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("kill", help="delete one node's shard")
    p.add_argument("--cluster", required=True)
    p.add_argument("--node", type=int, required=True)
    p.set_defaults(func=cmd_kill)

    p = sub.add_parser("repair", help="regenerate one node's shard from d helpers")
    p.add_argument("--cluster", required=True)
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--helpers", help="comma-separated helper nodes (default: d lowest survivors)")
    p.add_argument("--force", action="store_true", help="rebuild even if the shard exists")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("reassemble", help="decode the original file from any k shards")
    p.add_argument("--cluster", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reassemble)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MdsxError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
