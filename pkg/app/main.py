"""
FastAPI Backend
Exposes the Smith normal form, partition analysis and computation-rate
reports over HTTP.
"""

import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn
from pydantic import ValidationError

from app.analysis import partition_report, rate_report, snf_report
from app.config import API_HOST, API_PORT
from app.data_models import (
    AnalyzePartitionRequest,
    AnalyzePartitionResponse,
    RateRequest,
    RateResponse,
    SnfRequest,
    SnfResponse,
)
from app.errors import PncError

logger = logging.getLogger(__name__)

app = FastAPI(title="Lattice Network Coding API")

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# -----------------------------------------------------------------------------
# API Routes
# -----------------------------------------------------------------------------
@app.post("/snf", response_model=SnfResponse)
async def snf(request: SnfRequest):
    """Smith normal form P J Q = D with its witnesses."""
    try:
        return snf_report(request.J)
    except (PncError, ValidationError) as e:
        logger.info("[api] snf failed: %s", e)
        return SnfResponse(success=False, error=str(e))


@app.post("/analyze-partition", response_model=AnalyzePartitionResponse)
async def analyze_partition(request: AnalyzePartitionRequest):
    """Index, invariant factors and vector-space verdict of G_coarse = J G_fine."""
    try:
        return partition_report(request.G, request.J)
    except (PncError, ValidationError) as e:
        logger.info("[api] analyze-partition failed: %s", e)
        return AnalyzePartitionResponse(success=False, error=str(e))


@app.post("/rate", response_model=RateResponse)
async def rate(request: RateRequest):
    """Best integer coefficients and their computation rate for a channel vector."""
    try:
        h = [complex(re, im) for re, im in request.h]
        return rate_report(h, request.snr_db)
    except (PncError, ValidationError) as e:
        logger.info("[api] rate failed: %s", e)
        return RateResponse(success=False, error=str(e))


@app.get("/health")
async def health_check():
    return {"status": "healthy"}


def serve(host: str = API_HOST, port: int = API_PORT):
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    serve()
