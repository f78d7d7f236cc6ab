"""HTTP service exposing the verification suites.

All computation happens in the core package; the service wraps each
suite in a pydantic response model so reports can be consumed by
multiple clients.  Check failures are ordinary results (HTTP 200 with
``passed: false``); only malformed requests map to error status codes.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, render
from .algebra import UnsupportedOperation
from .parser import ParseError
from .suites import (Report, run_classify, run_eval, run_reduce, run_table,
                     run_verify_solutions, run_verify_symmetries,
                     run_verify_system)

app = FastAPI(
    title="susyfluid",
    version=__version__,
    description="Grassmann-valued symbolic verification suites for a "
                "supersymmetric two-phase fluid system.")


class CheckModel(BaseModel):
    name: str
    passed: bool
    details: str = ""
    payload: Optional[dict[str, Any]] = None


class ReportModel(BaseModel):
    suite: str
    passed: bool
    checks: list[CheckModel]


class EvalRequest(BaseModel):
    source: str = Field(description="program text: declarations and expressions")


class HealthModel(BaseModel):
    status: str
    version: str


def _model(report: Report) -> ReportModel:
    return ReportModel(
        suite=report.suite, passed=report.passed,
        checks=[CheckModel(name=c.name, passed=c.passed, details=c.details,
                           payload=c.payload) for c in report.checks])


@app.get("/health", response_model=HealthModel)
def health() -> HealthModel:
    return HealthModel(status="ok", version=__version__)


@app.get("/table", response_model=ReportModel)
def table() -> ReportModel:
    return _model(run_table())


@app.get("/verify/system", response_model=ReportModel)
def verify_system() -> ReportModel:
    return _model(run_verify_system())


@app.get("/verify/symmetries", response_model=ReportModel)
def verify_symmetries() -> ReportModel:
    return _model(run_verify_symmetries())


@app.get("/classify/{level}", response_model=ReportModel)
def classify(level: str, sample_conjugacy: int = 0, seed: int = 0) -> ReportModel:
    if level not in ("A", "B", "C", "G", "L"):
        raise HTTPException(status_code=404, detail=f"unknown level {level!r}")
    return _model(run_classify(level, sample_conjugacy, seed))


@app.get("/reduce/{subalgebra_id}", response_model=ReportModel)
def reduce(subalgebra_id: str) -> ReportModel:
    try:
        return _model(run_reduce(subalgebra_id))
    except UnsupportedOperation as err:
        report = Report(f"reduce-{subalgebra_id}")
        report.add("reduction available", False, details=str(err))
        return _model(report)


@app.get("/solutions/verify", response_model=ReportModel)
def verify_solutions(id: Optional[str] = None) -> ReportModel:
    try:
        return _model(run_verify_solutions(id))
    except KeyError as err:
        raise HTTPException(status_code=404, detail=str(err)) from None


@app.post("/eval", response_model=ReportModel)
def eval_program(request: EvalRequest) -> ReportModel:
    try:
        return _model(run_eval(request.source))
    except ParseError as err:
        raise HTTPException(status_code=422, detail=str(err)) from None


@app.get("/schema/expr")
def expr_schema() -> dict:
    return render.EXPR_SCHEMA
