"""Request and response models for the HTTP service."""

from typing import List, Optional

from pydantic import BaseModel


class SessionCreate(BaseModel):
    mode: str               # "mwis" or "mwds"
    eps: str                # rational like "1/2" or "0.5"
    graph: str              # graph text, "n m" header then "v ..." / "e ..." lines
    delta_cap: int = 4
    force_L: Optional[int] = None
    budget: int = 1 << 26
    bulk_init: bool = False


class SessionInfo(BaseModel):
    session_id: int
    mode: str
    eps: str
    n: int
    m: int
    levels: int


class UpdateRequest(BaseModel):
    op: str                 # one stream line, e.g. "AE 3 7" or "UW 2 90"


class UpdateResult(BaseModel):
    applied: bool
    n: int
    m: int


class QueryResult(BaseModel):
    value: str              # mwis: decimal integer; mwds: "numerator/denominator"


class RunRequest(BaseModel):
    mode: str
    eps: str
    graph: str
    updates: str            # stream text, one op per line
    delta_cap: int = 4
    force_L: Optional[int] = None
    budget: int = 1 << 26
    bulk_init: bool = False


class RunResult(BaseModel):
    answers: List[str]      # one entry per Q in the stream


class VerifyLine(BaseModel):
    answer: str
    optimum: int
    ok: bool


class VerifyResult(BaseModel):
    ok: bool
    lines: List[VerifyLine]


class BenchRequest(BaseModel):
    mode: str
    eps: str
    sizes: List[int]
    ops: int = 64
    seed: int = 0
    kind: str = "grid"
    rows: Optional[int] = None
    delta_cap: int = 4
    force_L: Optional[int] = None
    budget: int = 1 << 26


class BenchRow(BaseModel):
    n: int
    ops: int
    total_ns: int
    amortized_ns: int


class BenchResult(BaseModel):
    rows: List[BenchRow]
