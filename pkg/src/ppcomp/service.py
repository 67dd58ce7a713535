"""HTTP service exposing the decision and reduction handlers.

Every endpoint accepts grammar texts inline in the request body, calls
the same handlers the CLI uses, and returns the structured report
(schema "ppcomp/1").  Parse and validation problems map to 422, budget
exhaustion to 413.

Run with: uvicorn ppcomp.service:app
"""

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import api
from .errors import BudgetExceededError, PPCompError
from .evaluate import DEFAULT_VAR_BUDGET


class CompareRequest(BaseModel):
    structure: str
    phi: str
    psi: str
    budget: int = DEFAULT_VAR_BUDGET


class EntailRequest(BaseModel):
    phi: str
    psi: str
    pentagons: list[str]
    budget: int = DEFAULT_VAR_BUDGET


class DNFRequest(BaseModel):
    dnf: str


class LatIneqRequest(BaseModel):
    lhs: str
    rhs: str
    pentagons: list[str]
    generators_only: bool = False


class AnalyzeRequest(BaseModel):
    text: str = Field(description="a structure or algebra in grammar form")


class ValidateRequest(BaseModel):
    kind: str = Field(pattern="^(pentagon|unary|amalgam)$")
    payload: dict


class ReduceRequest(BaseModel):
    pipeline: str = Field(pattern="^(unary|latterm|sorted)$")
    payload: dict
    verify: bool = False
    budget: int = DEFAULT_VAR_BUDGET


class VerdictResponse(BaseModel):
    schema_: str = Field(alias="schema")
    command: str
    verdict: str
    witness: dict | str | None = None

    model_config = {"populate_by_name": True}


class ValidateResponse(BaseModel):
    schema_: str = Field(alias="schema")
    command: str
    kind: str
    ok: bool
    failures: list[str]

    model_config = {"populate_by_name": True}


class ReduceResponse(BaseModel):
    schema_: str = Field(alias="schema")
    command: str
    pipeline: str
    outputs: dict[str, str]
    verification: dict | None = None

    model_config = {"populate_by_name": True}


app = FastAPI(
    title="ppcomp",
    description="Equivalence and containment of primitive positive formulas "
    "over finite structures, with reduction pipelines.",
    version="0.1.0",
)


def _call(handler, *args):
    try:
        return handler(*args)
    except BudgetExceededError as exc:
        raise HTTPException(status_code=413, detail=str(exc))
    except (PPCompError, KeyError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health():
    return {"schema": api.SCHEMA, "status": "ok"}


@app.post("/ppeq", response_model=VerdictResponse, response_model_by_alias=True)
def ppeq(req: CompareRequest):
    return _call(api.run_ppeq, req.structure, req.phi, req.psi, req.budget)


@app.post("/ppcon", response_model=VerdictResponse, response_model_by_alias=True)
def ppcon(req: CompareRequest):
    return _call(api.run_ppcon, req.structure, req.phi, req.psi, req.budget)


@app.post("/entail", response_model=VerdictResponse, response_model_by_alias=True)
def entail(req: EntailRequest):
    return _call(api.run_entail, req.phi, req.psi, req.pentagons, req.budget)


@app.post("/dnf", response_model=VerdictResponse, response_model_by_alias=True)
def dnf(req: DNFRequest):
    return _call(api.run_dnf, req.dnf)


@app.post("/latineq", response_model=VerdictResponse, response_model_by_alias=True)
def latineq(req: LatIneqRequest):
    return _call(
        api.run_latineq, req.lhs, req.rhs, req.pentagons, req.generators_only
    )


@app.post("/analyze")
def analyze(req: AnalyzeRequest):
    return _call(api.run_analyze, req.text)


@app.post("/validate", response_model=ValidateResponse, response_model_by_alias=True)
def validate(req: ValidateRequest):
    return _call(api.run_validate, req.kind, req.payload)


@app.post("/reduce", response_model=ReduceResponse, response_model_by_alias=True)
def reduce(req: ReduceRequest):
    return _call(api.run_reduce, req.pipeline, req.payload, req.verify, req.budget)
