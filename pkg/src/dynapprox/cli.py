"""Command line driver: run streams, verify against oracles, benchmark,
generate instances, or serve the HTTP API.

Exit codes: 0 success, 1 verification failure or internal error, 2 parse
error, 3 promise violation.
"""

import argparse
import sys

from .graph import format_graph, format_stream
from .oracle import gen_host, gen_stream

EXIT_PARSE = 2
EXIT_PROMISE = 3


def _client(url):
    """Local in-process client by default, HTTP client when --url is given."""
    if url:
        import httpx

        return httpx.Client(base_url=url)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail(resp):
    detail = {}
    try:
        detail = resp.json().get("detail", {})
    except Exception:
        pass
    msg = detail.get("message", resp.text) if isinstance(detail, dict) \
        else str(detail)
    print("error: %s" % msg, file=sys.stderr)
    if resp.status_code == 400:
        return EXIT_PARSE
    if resp.status_code == 409:
        return EXIT_PROMISE
    return 1


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return None


def _run_payload(args):
    graph = _read(args.graph)
    updates = _read(args.updates)
    if graph is None or updates is None:
        return None
    return {
        "mode": args.mode,
        "eps": args.eps,
        "graph": graph,
        "updates": updates,
        "delta_cap": args.delta_cap,
        "force_L": args.force_L,
        "budget": args.budget,
        "bulk_init": args.bulk_init,
    }


def cmd_run(args):
    payload = _run_payload(args)
    if payload is None:
        return EXIT_PARSE
    with _client(args.url) as client:
        resp = client.post("/run", json=payload)
        if resp.status_code != 200:
            return _fail(resp)
        for line in resp.json()["answers"]:
            print(line)
    return 0


def cmd_verify(args):
    payload = _run_payload(args)
    if payload is None:
        return EXIT_PARSE
    with _client(args.url) as client:
        resp = client.post("/verify", json=payload)
        if resp.status_code != 200:
            return _fail(resp)
        body = resp.json()
    bad = 0
    for line in body["lines"]:
        print(line["answer"])
        if not line["ok"]:
            bad += 1
            print("violation: answer %s vs optimum %d"
                  % (line["answer"], line["optimum"]), file=sys.stderr)
    return 1 if bad else 0


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",") if s]
    payload = {
        "mode": args.mode,
        "eps": args.eps,
        "sizes": sizes,
        "ops": args.ops,
        "seed": args.seed,
        "kind": args.kind,
        "rows": args.rows,
        "delta_cap": args.delta_cap,
        "force_L": args.force_L,
        "budget": args.budget,
    }
    with _client(args.url) as client:
        resp = client.post("/bench", json=payload)
        if resp.status_code != 200:
            return _fail(resp)
        body = resp.json()
    print("n,ops,total_ns,amortized_ns")
    for row in body["rows"]:
        print("%d,%d,%d,%d" % (row["n"], row["ops"], row["total_ns"],
                               row["amortized_ns"]))
    return 0


def cmd_gen(args):
    host = gen_host(args.kind, args.n, args.seed, rows=args.rows,
                    max_weight=args.max_weight, deg_cap=args.deg_cap)
    text = format_graph(host)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.stream_out:
        ops = gen_stream(host, args.ops, args.seed + 1,
                         max_weight=args.max_weight,
                         query_every=args.query_every)
        with open(args.stream_out, "w", encoding="utf-8") as fh:
            fh.write(format_stream(ops))
    return 0


def cmd_serve(args):
    import uvicorn

    uvicorn.run("dynapprox.service:app", host=args.host, port=args.port)
    return 0


def _add_common(p, with_updates=True):
    p.add_argument("--mode", choices=["mwis", "mwds"], required=True)
    p.add_argument("--eps", required=True,
                   help="accuracy as a rational, e.g. 1/2 or 0.25")
    p.add_argument("--delta-cap", dest="delta_cap", type=int, default=4,
                   help="degree promise for mwds")
    p.add_argument("--force-L", dest="force_L", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=1 << 26)
    p.add_argument("--url", default=None,
                   help="base URL of a running server; default runs in-process")
    if with_updates:
        p.add_argument("--graph", required=True)
        p.add_argument("--updates", required=True)
        p.add_argument("--bulk-init", dest="bulk_init", action="store_true",
                       help="build the initial graph in one pass")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="dynapprox",
        description="dynamic approximate MWIS/MWDS on planar graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="replay a stream, print one value per Q")
    _add_common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("verify",
                       help="replay and check every answer against an oracle")
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="amortized update timing, CSV output")
    _add_common(p, with_updates=False)
    p.add_argument("--sizes", default="4096,16384",
                   help="comma separated host sizes")
    p.add_argument("--ops", type=int, default=64)
    p.add_argument("--kind", default="grid",
                   choices=["grid", "tree", "outerplanar", "path"])
    p.add_argument("--rows", type=int, default=None)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen", help="generate a host graph and update stream")
    p.add_argument("--kind", default="grid",
                   choices=["grid", "tree", "outerplanar", "path"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-weight", dest="max_weight", type=int,
                   default=1 << 20)
    p.add_argument("--deg-cap", dest="deg_cap", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--stream-out", dest="stream_out", default=None)
    p.add_argument("--ops", type=int, default=64)
    p.add_argument("--query-every", dest="query_every", type=int, default=1)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
