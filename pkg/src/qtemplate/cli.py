"""Command-line front end.

The CLI is a thin client of the HTTP service: it builds the service's request
models, executes them either in process (default) or against a running server
(``--server URL``), and renders the responses as CSV tables, PGM images and
terse stdout lines.  Exit codes: 0 success, 2 bad input (missing files, parse
or domain errors), 3 impossible post-selection.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx

from .errors import PostSelectionImpossibleError
from .fixtures import RECOMMENDED_K_MAX
from .service import models
from .service.app import handle_discriminate, handle_match, handle_optics, handle_sweep

EXIT_BAD_INPUT = 2
EXIT_POST_SELECTION = 3

SWEEP_CSV_HEADER = (
    "noise_level,image_label,template_label,filtered,p_accept_mean,"
    "p_accept_stderr,second_try_accept_mean,inconclusive_mean,trials,seed"
)
DISCRIMINATE_CSV_HEADER = (
    "noise_level,p_a,p_b,helstrom_bound,algorithm_error,"
    "naive_projector_error_a,naive_projector_error_b,extended_error,p_inconclusive"
)


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class Client:
    """Executes service requests in process or over HTTP."""

    def __init__(self, server: str | None):
        self.server = server

    def _remote(self, path: str, payload: dict) -> dict:
        response = httpx.post(f"{self.server.rstrip('/')}{path}", json=payload, timeout=600.0)
        if response.status_code >= 400:
            body = response.json()
            kind = body.get("kind", "")
            code = EXIT_POST_SELECTION if kind == "post-selection-impossible" else EXIT_BAD_INPUT
            raise CliError(body.get("detail", response.text), code)
        return response.json()

    def _call(self, path: str, handler, request, response_model):
        if self.server:
            return response_model(**self._remote(path, request.model_dump()))
        try:
            return handler(request)
        except PostSelectionImpossibleError as exc:
            raise CliError(str(exc), EXIT_POST_SELECTION) from exc
        except ValueError as exc:
            raise CliError(str(exc), EXIT_BAD_INPUT) from exc

    def match(self, request: models.MatchRequest) -> models.MatchResponse:
        return self._call("/match", handle_match, request, models.MatchResponse)

    def sweep(self, request: models.SweepRequest) -> models.SweepResponse:
        return self._call("/sweep", handle_sweep, request, models.SweepResponse)

    def discriminate(self, request: models.DiscriminateRequest) -> models.DiscriminateResponse:
        return self._call("/discriminate", handle_discriminate, request, models.DiscriminateResponse)

    def optics(self, request: models.OpticsRequest) -> models.OpticsResponse:
        return self._call("/optics", handle_optics, request, models.OpticsResponse)


def _read_pbm_b64(path: str) -> str:
    file = Path(path)
    if not file.is_file():
        raise CliError(f"input file not found: {path}", EXIT_BAD_INPUT)
    return models.encode_pbm(file.read_bytes())


def _image_width(path: str) -> int:
    from .image_io import parse_pbm

    return parse_pbm(Path(path).read_bytes()).width


def _filter_params(args) -> models.FilterParams | None:
    if args.no_filter:
        return None
    k_max = args.k_max
    if k_max is None:
        width = _image_width(args.template)
        k_max = RECOMMENDED_K_MAX.get(width, width / 8)
    if k_max <= 0:
        # Surface the degenerate cutoff as a post-selection failure up front.
        raise CliError(f"k_max {k_max} removes every frequency", EXIT_POST_SELECTION)
    return models.FilterParams(k_max=k_max, remove_dc=not args.keep_dc)


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_match(args) -> int:
    client = Client(args.server)
    out = _out_dir(args)
    request = models.MatchRequest(
        image_pbm=_read_pbm_b64(args.image),
        template_pbm=_read_pbm_b64(args.template),
        filter=_filter_params(args),
        sample_seed=args.sample_seed,
        return_amplitude_map=out is not None,
    )
    response = client.match(request)
    print("p_reflect,p_filter,p_accept")
    print(f"{response.p_reflect:.12f},{response.p_filter:.12f},{response.p_accept:.12f}")
    if response.sampled_outcome is not None:
        print(f"sampled_outcome={response.sampled_outcome}")
    if out is not None and response.amplitude_map_pgm is not None:
        target = out / f"{Path(args.image).stem}_amplitude.pgm"
        target.write_bytes(models.decode_pbm(response.amplitude_map_pgm))
        print(f"wrote {target}")
    return 0


def _sweep_request(args, cls):
    template_a = _read_pbm_b64(args.template)
    template_b = _read_pbm_b64(args.template2)
    image_a = _read_pbm_b64(args.image) if args.image else template_a
    return cls(
        image_a_pbm=image_a,
        image_b_pbm=template_b,
        template_a_pbm=template_a,
        template_b_pbm=template_b,
        noise_levels=args.noise or [0.0],
        trials=args.trials,
        seed=args.seed,
        filter=_filter_params(args),
    )


def _write_csv(out: Path | None, name: str, text: str) -> int:
    if out is None:
        sys.stdout.write(text)
    else:
        target = out / name
        target.write_bytes(text.encode("ascii"))
        print(f"wrote {target}")
    return 0


def cmd_sweep(args) -> int:
    client = Client(args.server)
    response = client.sweep(_sweep_request(args, models.SweepRequest))
    lines = [SWEEP_CSV_HEADER]
    for row in response.rows:
        lines.append(
            ",".join(
                [
                    repr(row.noise_level),
                    row.image_label,
                    row.template_label,
                    "true" if row.filtered else "false",
                    repr(row.p_accept_mean),
                    repr(row.p_accept_stderr),
                    repr(row.second_try_accept_mean),
                    repr(row.inconclusive_mean),
                    str(row.trials),
                    str(row.seed),
                ]
            )
        )
    return _write_csv(_out_dir(args), "sweep.csv", "\n".join(lines) + "\n")


def cmd_discriminate(args) -> int:
    client = Client(args.server)
    request = _sweep_request(args, models.DiscriminateRequest)
    request.p_a = args.p_a
    request.p_b = 1.0 - args.p_a
    response = client.discriminate(request)
    lines = [DISCRIMINATE_CSV_HEADER]
    for row in response.rows:
        lines.append(
            ",".join(
                repr(v)
                for v in [
                    row.noise_level,
                    row.p_a,
                    row.p_b,
                    row.helstrom_bound,
                    row.algorithm_error,
                    row.naive_projector_error_a,
                    row.naive_projector_error_b,
                    row.extended_error,
                    row.p_inconclusive,
                ]
            )
        )
    return _write_csv(_out_dir(args), "discriminate.csv", "\n".join(lines) + "\n")


def cmd_optics(args) -> int:
    client = Client(args.server)
    response = client.optics(models.OpticsRequest(max_bits=args.max_bits))
    for result in response.results:
        print(
            f"n={result.num_bits}: qft_deviation={result.deviation_from_qft:.3e} "
            f"hadamard_deviation={result.deviation_from_hadamard:.3e}"
        )
        print(
            f"n={result.num_bits}: prep={result.preparation_splitters} "
            f"qft={result.qft_splitters}"
        )
    out = _out_dir(args)
    if out is not None:
        target = out / "phase_schedule.txt"
        target.write_bytes(response.schedule_table.encode("ascii"))
        print(f"wrote {target}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _add_filter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k-max", type=float, default=None,
                        help="sharp-cutoff radius in cycles per image "
                             "(default: recommended value for the template size)")
    parser.add_argument("--keep-dc", action="store_true",
                        help="keep the constant k-component instead of removing it")
    parser.add_argument("--no-filter", action="store_true",
                        help="skip the QFT/filter stage entirely")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: run in process)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtemplate",
        description="Quantum template matching simulator: single runs, noise "
                    "sweeps, discrimination reports, and optics verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    match = sub.add_parser("match", help="run one image/template match")
    match.add_argument("--image", required=True)
    match.add_argument("--template", required=True)
    match.add_argument("--sample-seed", type=int, default=None,
                       help="also draw one sampled outcome with this seed")
    _add_filter_flags(match)
    _add_common_flags(match)
    match.set_defaults(func=cmd_match)

    sweep = sub.add_parser("sweep", help="noise sweep over all image/template pairings")
    sweep.add_argument("--template", required=True, help="first letter template (A)")
    sweep.add_argument("--template2", required=True, help="second letter template (B)")
    sweep.add_argument("--image", default=None,
                       help="override the noiseless input for A (default: the template)")
    sweep.add_argument("--noise", type=float, action="append", default=None,
                       help="noise level in [0,1]; repeatable")
    sweep.add_argument("--trials", type=int, default=1)
    sweep.add_argument("--seed", type=int, default=0)
    _add_filter_flags(sweep)
    _add_common_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    disc = sub.add_parser("discriminate", help="error report vs optimal two-state bounds")
    disc.add_argument("--template", required=True)
    disc.add_argument("--template2", required=True)
    disc.add_argument("--image", default=None)
    disc.add_argument("--noise", type=float, action="append", default=None)
    disc.add_argument("--trials", type=int, default=1)
    disc.add_argument("--seed", type=int, default=0)
    disc.add_argument("--p-a", type=float, default=0.5, help="prior of the first letter")
    _add_filter_flags(disc)
    _add_common_flags(disc)
    disc.set_defaults(func=cmd_discriminate)

    optics = sub.add_parser("optics", help="verify the linear-optics transform network")
    optics.add_argument("--max-bits", type=int, default=6)
    _add_common_flags(optics)
    optics.set_defaults(func=cmd_optics)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
