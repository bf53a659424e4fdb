"""Request/response schemas of the matching service.

Images travel as base64-encoded PBM bytes so that the wire format matches the
on-disk format exactly; all probabilities are exact branch probabilities.
"""

from __future__ import annotations

import base64

from pydantic import BaseModel, Field


class FilterParams(BaseModel):
    """Sharp-cutoff noise filter settings."""

    k_max: float = Field(gt=0, description="radial cutoff in cycles per image")
    remove_dc: bool = True
    aliased: bool = True


def encode_pbm(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def decode_pbm(payload: str) -> bytes:
    return base64.b64decode(payload.encode("ascii"))


class MatchRequest(BaseModel):
    image_pbm: str
    template_pbm: str
    filter: FilterParams | None = None
    sample_seed: int | None = None
    return_amplitude_map: bool = False


class MatchResponse(BaseModel):
    p_reflect: float
    p_filter: float
    p_accept: float
    iterations: int
    sampled_outcome: str | None = None
    amplitude_map_pgm: str | None = None


class SweepRequest(BaseModel):
    image_a_pbm: str
    image_b_pbm: str
    template_a_pbm: str
    template_b_pbm: str
    noise_levels: list[float]
    trials: int = Field(default=1, ge=1)
    seed: int = 0
    filter: FilterParams | None = None


class SweepRowModel(BaseModel):
    noise_level: float
    image_label: str
    template_label: str
    filtered: bool
    p_accept_mean: float
    p_accept_stderr: float
    second_try_accept_mean: float
    inconclusive_mean: float
    projector_overlap_mean: float
    trials: int
    seed: int


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    template_overlap: float


class DiscriminateRequest(SweepRequest):
    p_a: float = 0.5
    p_b: float = 0.5


class DiscriminationRowModel(BaseModel):
    noise_level: float
    p_a: float
    p_b: float
    helstrom_bound: float
    algorithm_error: float
    naive_projector_error_a: float
    naive_projector_error_b: float
    extended_error: float
    p_inconclusive: float


class DiscriminateResponse(BaseModel):
    rows: list[DiscriminationRowModel]


class OpticsRequest(BaseModel):
    max_bits: int = Field(default=6, ge=1, le=6)


class OpticsResult(BaseModel):
    num_bits: int
    deviation_from_qft: float
    deviation_from_hadamard: float
    preparation_splitters: int
    qft_splitters: int
    shifter_phases: list[float]


class OpticsResponse(BaseModel):
    results: list[OpticsResult]
    schedule_table: str
