"""
Analysis Reports
Builds the Smith normal form, partition and computation-rate reports shared
by the command line and the HTTP API.
"""

from typing import Sequence

from app.cfwd import ChannelVector, computation_rate, select_coefficients
from app.data_models import AnalyzePartitionResponse, RateResponse, SnfResponse
from app.lattice import annihilator_factorization, build_partition, index, is_vector_space
from app.snf import GMatrix, smith_normal_form


def snf_report(J_nested: Sequence) -> SnfResponse:
    J = GMatrix.from_nested(J_nested)
    s = smith_normal_form(J)
    return SnfResponse(
        P=s.P.to_nested(),
        D=s.D.to_nested(),
        Q=s.Q.to_nested(),
        invariant_factors=[str(d) for d in s.invariant_factors],
        success=True,
    )


def partition_report(G_nested: Sequence, J_nested: Sequence) -> AnalyzePartitionResponse:
    G = [[complex(re, im) for re, im in row] for row in G_nested]
    p = build_partition(G, GMatrix.from_nested(J_nested))
    ann, factors = annihilator_factorization(p)
    verdict = is_vector_space(p)
    return AnalyzePartitionResponse(
        index=index(p),
        invariant_factors=[str(d) for d in p.snf.invariant_factors],
        annihilator=str(ann),
        factorization=[f"({pi})^{e}" for pi, e in factors],
        q=verdict[0] if verdict else None,
        k=verdict[1] if verdict else None,
        vector_space=verdict is not None,
        success=True,
    )


def rate_report(h: Sequence[complex], snr_db: float) -> RateResponse:
    chan = ChannelVector.from_db(h, snr_db)
    a = select_coefficients(chan)
    return RateResponse(
        a=[g.to_pair() for g in a],
        rate=computation_rate(chan, a),
        success=True,
    )
