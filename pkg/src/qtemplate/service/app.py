"""FastAPI application wrapping the matching pipeline.

The handler functions are plain functions over the pydantic models so the CLI
can call them in process; the routes only add HTTP plumbing.  Domain errors
map to 400 (bad input) and impossible post-selections to 409, each tagged
with a machine-readable ``kind``.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..circuit_ops import FilterSpec
from ..discrimination import build_report
from ..errors import PbmParseError, PostSelectionImpossibleError
from ..image_io import parse_pbm, render_amplitude_map, write_pgm
from ..optics_layout import composition_deviation, qft_phase_schedule, resource_counts
from ..pipeline import MatchOptions, filtered_point_state, run_match, sweep_noise
from . import models


def _filter_spec(params: models.FilterParams | None) -> FilterSpec | None:
    if params is None:
        return None
    return FilterSpec(k_max=params.k_max, remove_dc=params.remove_dc, aliased=params.aliased)


def handle_match(request: models.MatchRequest) -> models.MatchResponse:
    image = parse_pbm(models.decode_pbm(request.image_pbm))
    template = parse_pbm(models.decode_pbm(request.template_pbm))
    options = MatchOptions(filter=_filter_spec(request.filter), sample_seed=request.sample_seed)
    outcome = run_match(image, template, options)

    amplitude_map = None
    if request.return_amplitude_map:
        _, _, state = filtered_point_state(image, options.filter)
        amap = render_amplitude_map(state, image.qubits_x, image.qubits_y)
        amplitude_map = models.encode_pbm(write_pgm(amap, "P5", half_max_highlight=True))

    return models.MatchResponse(
        p_reflect=outcome.p_reflect,
        p_filter=outcome.p_filter,
        p_accept=outcome.p_accept,
        iterations=outcome.iterations,
        sampled_outcome=outcome.sampled_outcome,
        amplitude_map_pgm=amplitude_map,
    )


def _run_sweep(request: models.SweepRequest):
    template_a = parse_pbm(models.decode_pbm(request.template_a_pbm))
    template_b = parse_pbm(models.decode_pbm(request.template_b_pbm))
    image_a = parse_pbm(models.decode_pbm(request.image_a_pbm))
    image_b = parse_pbm(models.decode_pbm(request.image_b_pbm))
    options = MatchOptions(filter=_filter_spec(request.filter))
    return sweep_noise(
        image_a,
        image_b,
        template_a,
        template_b,
        noise_levels=request.noise_levels,
        trials=request.trials,
        base_seed=request.seed,
        options=options,
    )


def handle_sweep(request: models.SweepRequest) -> models.SweepResponse:
    table = _run_sweep(request)
    rows = [models.SweepRowModel(**row.__dict__) for row in table.rows]
    return models.SweepResponse(rows=rows, template_overlap=table.template_overlap)


def handle_discriminate(request: models.DiscriminateRequest) -> models.DiscriminateResponse:
    table = _run_sweep(request)
    reports = build_report(table, request.p_a, request.p_b)
    return models.DiscriminateResponse(
        rows=[models.DiscriminationRowModel(**report.__dict__) for report in reports]
    )


def handle_optics(request: models.OpticsRequest) -> models.OpticsResponse:
    results = []
    for n in range(1, request.max_bits + 1):
        dev_qft, dev_h = composition_deviation(n)
        counts = resource_counts(n, n)
        results.append(
            models.OpticsResult(
                num_bits=n,
                deviation_from_qft=dev_qft,
                deviation_from_hadamard=dev_h,
                preparation_splitters=counts.preparation_splitters,
                qft_splitters=counts.qft_splitters,
                shifter_phases=qft_phase_schedule(n).shifter_phases(),
            )
        )
    table = qft_phase_schedule(request.max_bits).format_table()
    return models.OpticsResponse(results=results, schedule_table=table)


def create_app() -> FastAPI:
    app = FastAPI(title="qtemplate", version="0.1.0")

    @app.exception_handler(PostSelectionImpossibleError)
    async def post_selection_error(_, exc: PostSelectionImpossibleError):
        return JSONResponse(
            status_code=409,
            content={"detail": str(exc), "kind": "post-selection-impossible"},
        )

    @app.exception_handler(PbmParseError)
    async def parse_error(_, exc: PbmParseError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "parse-error"})

    @app.exception_handler(ValueError)
    async def value_error(_, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "invalid-input"})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/match", response_model=models.MatchResponse)
    def match(request: models.MatchRequest):
        return handle_match(request)

    @app.post("/sweep", response_model=models.SweepResponse)
    def sweep(request: models.SweepRequest):
        return handle_sweep(request)

    @app.post("/discriminate", response_model=models.DiscriminateResponse)
    def discriminate(request: models.DiscriminateRequest):
        return handle_discriminate(request)

    @app.post("/optics", response_model=models.OpticsResponse)
    def optics(request: models.OpticsRequest):
        return handle_optics(request)

    return app


app = create_app()
