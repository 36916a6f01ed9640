"""dcmlab HTTP service: response tables and identifiability checks over JSON."""

from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from errors import DCMError, DomainError
from identifiability import THEOREMS, ItemPartition, check_identifiability
from logging_config import get_logger
from models import AttributeSpace, QMatrix, ResponseProbTable, parse_model, table_for
from simulation import MixtureWeights

log = get_logger(__name__)

app = FastAPI(title="dcmlab")


@app.exception_handler(DCMError)
async def dcm_error_handler(request: Request, exc: DCMError) -> JSONResponse:
    log.warning("request_failed", path=request.url.path, error=str(exc))
    return JSONResponse(status_code=422, content={"error": str(exc)})


# =============================================================================
# Request models
# =============================================================================


class ModelRequest(BaseModel):
    q: list[list[int]]
    model: dict[str, Any]


class IdentifiabilityRequest(ModelRequest):
    pi: list[float] | None = None
    theorem: str = Field(default="auto", description=f"one of {', '.join(THEOREMS)}")
    partition: list[list[int]] | None = Field(default=None, description="1-based item subsets")
    support_only: bool = False


def _table(req: ModelRequest) -> tuple[QMatrix, AttributeSpace, ResponseProbTable]:
    try:
        entries = np.array(req.q, dtype=int)
    except ValueError as e:
        raise DomainError(f"Q-matrix rows must all have the same length: {e}") from e
    q = QMatrix(entries)
    model = parse_model(req.model, q)
    space = AttributeSpace.binary(q.n_attributes)
    return q, space, table_for(model, q, space)


# =============================================================================
# Endpoints
# =============================================================================


@app.get("/api/health")
def health():
    return {"status": "ok"}


@app.post("/api/prob-table")
def prob_table(req: ModelRequest) -> dict[str, Any]:
    """Response probabilities p[j][alpha][y] over the 2^K profiles."""
    _, space, table = _table(req)
    return {
        "classes": ["".join(str(v) for v in row) for row in space.profiles()],
        "probs": table.to_list(),
    }


@app.post("/api/identifiability")
def identifiability(req: IdentifiabilityRequest) -> dict[str, Any]:
    """Sufficient-condition verdicts for the posted model."""
    q, space, table = _table(req)
    weights = MixtureWeights.normalized(req.pi) if req.pi is not None else MixtureWeights.uniform(space.size)
    partition = ItemPartition.from_one_based(req.partition) if req.partition is not None else None
    verdicts = check_identifiability(
        req.theorem, table, weights, q, space, partition=partition, support_only=req.support_only
    )
    log.info("identifiability_checked", theorem=req.theorem, passed=[v.passed for v in verdicts])
    return {"verdicts": [v.model_dump() for v in verdicts]}
