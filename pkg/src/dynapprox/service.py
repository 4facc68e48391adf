"""HTTP service wrapping the dynamic hierarchy.

Sessions hold live structures; /run, /verify and /bench are one-shot
endpoints over the same text formats the command line uses.
"""

import itertools
import time
from fractions import Fraction

from fastapi import FastAPI, HTTPException

from . import schemas
from .csp import encode_mwis
from .errors import DynApproxError, InvalidEpsilon, ParameterOverflow, \
    PromiseViolation, WidthExceeded
from .exactdp import solve_csp, solve_domination
from .gendom import encode_mwds
from .graph import ParseError, parse_graph, parse_stream
from .hierarchy import Hierarchy
from .oracle import MAX_BRUTE, brute_mwds, brute_mwis, gen_host, gen_stream

PARSE_ERRORS = (ParseError, InvalidEpsilon, ParameterOverflow, ValueError,
                ZeroDivisionError)
PROMISE_ERRORS = (PromiseViolation, WidthExceeded)


def parse_eps(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError("bad epsilon %r" % text)


def answer_text(h):
    """Render a query answer: plain integer for mwis, num/den for mwds."""
    p = h.query()
    if h.kind == "mwis":
        return str(p)
    return "%d/%d" % (p.numerator, p.denominator)


def oracle_optimum(g, mode):
    """Exact optimum on the current host, brute force when small enough."""
    if len(g.vertices()) <= MAX_BRUTE:
        return brute_mwis(g) if mode == "mwis" else brute_mwds(g)
    if mode == "mwis":
        return solve_csp(encode_mwis(g))
    return solve_domination(encode_mwds(g))


def answer_in_bounds(mode, eps, text, opt):
    if mode == "mwis":
        p = int(text)
        return (1 - eps) * opt <= p <= opt
    num, den = text.split("/")
    val = Fraction(int(num), int(den))
    return opt <= val <= (1 + eps) * opt


def _build(mode, eps_text, graph_text, delta_cap, force_L, budget, bulk_init):
    eps = parse_eps(eps_text)
    g = parse_graph(graph_text)
    return Hierarchy(g, eps, mode, delta_cap=delta_cap, force_L=force_L,
                     budget=budget, bulk_init=bulk_init)


def _replay(h, updates_text, collect):
    """Apply a stream verbatim; call collect() at every Q."""
    for op in parse_stream(updates_text):
        if op[0] == "Q":
            collect()
        else:
            h.update(op)


def create_app():
    app = FastAPI(title="dynapprox")
    sessions = {}
    ids = itertools.count(1)

    def guard(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PROMISE_ERRORS as e:
            raise HTTPException(409, detail={"error": "promise",
                                             "message": str(e)})
        except PARSE_ERRORS as e:
            raise HTTPException(400, detail={"error": "parse",
                                             "message": str(e)})
        except DynApproxError as e:
            raise HTTPException(422, detail={"error": type(e).__name__,
                                             "message": str(e)})

    def session_info(sid, h):
        return schemas.SessionInfo(
            session_id=sid, mode=h.kind, eps=str(h.eps),
            n=len(h.host.vertices()), m=len(h.host.edge_ends),
            levels=h.cfg.L)

    def get_session(sid):
        if sid not in sessions:
            raise HTTPException(404, detail={"error": "no such session"})
        return sessions[sid]

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", response_model=schemas.SessionInfo)
    def create_session(req: schemas.SessionCreate):
        h = guard(_build, req.mode, req.eps, req.graph, req.delta_cap,
                  req.force_L, req.budget, req.bulk_init)
        sid = next(ids)
        sessions[sid] = h
        return session_info(sid, h)

    @app.get("/sessions/{sid}", response_model=schemas.SessionInfo)
    def show_session(sid: int):
        return session_info(sid, get_session(sid))

    @app.delete("/sessions/{sid}")
    def delete_session(sid: int):
        get_session(sid)
        del sessions[sid]
        return {"deleted": sid}

    @app.post("/sessions/{sid}/update", response_model=schemas.UpdateResult)
    def apply_update(sid: int, req: schemas.UpdateRequest):
        h = get_session(sid)

        def step():
            ops = parse_stream(req.op)
            if len(ops) != 1 or ops[0][0] == "Q":
                raise ParseError("expected exactly one update line")
            h.update(ops[0])

        guard(step)
        return schemas.UpdateResult(applied=True, n=len(h.host.vertices()),
                                    m=len(h.host.edge_ends))

    @app.get("/sessions/{sid}/query", response_model=schemas.QueryResult)
    def query(sid: int):
        return schemas.QueryResult(value=answer_text(get_session(sid)))

    @app.post("/run", response_model=schemas.RunResult)
    def run(req: schemas.RunRequest):
        def go():
            h = _build(req.mode, req.eps, req.graph, req.delta_cap,
                       req.force_L, req.budget, req.bulk_init)
            answers = []
            _replay(h, req.updates, lambda: answers.append(answer_text(h)))
            return answers

        return schemas.RunResult(answers=guard(go))

    @app.post("/verify", response_model=schemas.VerifyResult)
    def verify(req: schemas.RunRequest):
        def go():
            eps = parse_eps(req.eps)
            h = _build(req.mode, req.eps, req.graph, req.delta_cap,
                       req.force_L, req.budget, req.bulk_init)
            lines = []

            def check():
                text = answer_text(h)
                opt = oracle_optimum(h.host, req.mode)
                lines.append(schemas.VerifyLine(
                    answer=text, optimum=opt,
                    ok=answer_in_bounds(req.mode, eps, text, opt)))

            _replay(h, req.updates, check)
            return lines

        lines = guard(go)
        return schemas.VerifyResult(ok=all(l.ok for l in lines), lines=lines)

    @app.post("/bench", response_model=schemas.BenchResult)
    def bench(req: schemas.BenchRequest):
        def go():
            eps = parse_eps(req.eps)
            rows = []
            for n in req.sizes:
                host = gen_host(req.kind, n, req.seed, rows=req.rows,
                                deg_cap=req.delta_cap
                                if req.mode == "mwds" else None)
                h = Hierarchy(host, eps, req.mode, delta_cap=req.delta_cap,
                              force_L=req.force_L, budget=req.budget,
                              bulk_init=True)
                stream = gen_stream(host, req.ops, req.seed + 1)
                count = 0
                t0 = time.perf_counter_ns()
                for op in stream:
                    if op[0] == "Q":
                        h.query()
                    elif op[0] == "AE":
                        if h.host.has_edge(op[1], op[2]):
                            continue
                        if req.mode == "mwds" and (
                                h.host.degree(op[1]) >= req.delta_cap
                                or h.host.degree(op[2]) >= req.delta_cap):
                            continue
                        h.update(op)
                    elif op[0] == "RE":
                        if not h.host.has_edge(op[1], op[2]):
                            continue
                        h.update(op)
                    else:
                        h.update(op)
                    count += 1
                total = time.perf_counter_ns() - t0
                rows.append(schemas.BenchRow(
                    n=n, ops=count, total_ns=total,
                    amortized_ns=total // max(1, count)))
            return rows

        return schemas.BenchResult(rows=guard(go))

    return app


app = create_app()
