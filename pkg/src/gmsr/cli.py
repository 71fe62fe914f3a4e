"""Command-line front end.

Every command builds the same request models the HTTP service accepts
and runs them in-process by default; ``--server URL`` sends them to a
running service instead. Exit codes: 0 success, 1 usage error, 2 data
error (unreadable/malformed inputs, server failures).
"""

from __future__ import annotations

import csv
import json
import sys
from io import StringIO
from pathlib import Path

import click
import httpx
from pydantic import ValidationError

from .service import handlers, schemas
from .service.app import create_app


class DataError(click.ClickException):
    exit_code = 2


# ---------------------------------------------------------------------------
# input plumbing


def _mesh_payload(path: Path) -> schemas.MeshPayload:
    suffix = path.suffix.lower()
    if suffix not in (".off", ".obj"):
        raise DataError(
            f"unrecognized mesh format {path.suffix!r} (expected .off or .obj)"
        )
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(str(exc))
    return schemas.MeshPayload(name=path.stem, format=suffix[1:], text=text)


def _mesh_dir_payloads(directory: Path) -> list:
    paths = sorted(
        p for p in directory.glob("*") if p.suffix.lower() in (".off", ".obj")
    )
    if not paths:
        raise DataError(f"no .off or .obj meshes found in {directory}")
    payloads = []
    seen = set()
    for path in paths:
        if path.stem in seen:
            raise DataError(f"duplicate mesh id {path.stem!r} in {directory}")
        seen.add(path.stem)
        payloads.append(_mesh_payload(path))
    return payloads


def _load_detections(directory: Path) -> dict:
    """Read detection JSON files: {'model': id, 'points': [{'vertex': i}...]}.

    A bare list of integers is also accepted as the points value, so
    hand-written or replayed files stay easy to produce.
    """
    detections = {}
    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise DataError(f"no detection .json files found in {directory}")
    for path in paths:
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"{path}: {exc}")
        if not isinstance(doc, dict) or "points" not in doc:
            raise DataError(f"{path}: expected an object with a 'points' list")
        model = doc.get("model", path.stem)
        try:
            indices = [
                int(entry["vertex"]) if isinstance(entry, dict) else int(entry)
                for entry in doc["points"]
            ]
        except (TypeError, KeyError, ValueError):
            raise DataError(f"{path}: malformed 'points' entries")
        if model in detections:
            raise DataError(f"{path}: duplicate detections for model {model!r}")
        detections[model] = indices
    return detections


def _read_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise DataError(str(exc))


# ---------------------------------------------------------------------------
# value-list parsing


def _parse_ints(text: str) -> list:
    """Comma list with inclusive ranges: '1,3:5,8' -> [1, 3, 4, 5, 8]."""
    values = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ":" in part:
                lo, hi = part.split(":")
                values.extend(range(int(lo), int(hi) + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise click.UsageError(f"cannot parse integer list entry {part!r}")
    if not values:
        raise click.UsageError("empty integer list")
    return values


def _parse_floats(text: str) -> list:
    """Comma list of numbers; 'start:step:stop' expands inclusively.

    Range entries are rounded to 10 decimals so grids like
    0.005:0.005:0.12 land on the exact decimal values.
    """
    values = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ":" in part:
                pieces = part.split(":")
                if len(pieces) != 3:
                    raise click.UsageError(
                        f"float ranges use start:step:stop, got {part!r}"
                    )
                start, step, stop = (float(p) for p in pieces)
                if step <= 0:
                    raise click.UsageError(f"range step must be positive in {part!r}")
                i = 0
                while True:
                    value = round(start + i * step, 10)
                    if value > stop + step * 1e-9:
                        break
                    values.append(value)
                    i += 1
            else:
                values.append(float(part))
        except ValueError:
            raise click.UsageError(f"cannot parse number list entry {part!r}")
    if not values:
        raise click.UsageError("empty number list")
    return values


# ---------------------------------------------------------------------------
# shared options


def _detector_options(f):
    for option in reversed(
        [
            click.option(
                "--scales",
                default="1,3,5",
                show_default=True,
                help="smoothing width multipliers (comma list)",
            ),
            click.option(
                "--rings",
                default=6,
                show_default=True,
                help="neighborhood depth of the distance/angle measures",
            ),
            click.option(
                "--alpha",
                default=2.5,
                show_default=True,
                help="weight of the angle term in the response",
            ),
            click.option(
                "--nms-rings",
                default=10,
                show_default=True,
                help="neighborhood depth of non-maxima suppression",
            ),
            click.option(
                "--beta",
                default=0.03,
                show_default=True,
                help="sparsity penalty of the refinement stage",
            ),
        ]
    ):
        f = option(f)
    return f


def _grid_options(f):
    for option in reversed(
        [
            click.option(
                "--grid-n",
                default=None,
                help="subject counts to evaluate, e.g. '2:23' (default: all in the ground truth)",
            ),
            click.option(
                "--grid-sigma",
                default=None,
                help="region radii to evaluate, e.g. '0.01:0.01:0.1' (default: all)",
            ),
            click.option(
                "--grid-r",
                default="0.005:0.005:0.12",
                show_default=True,
                help="localization tolerances",
            ),
        ]
    ):
        f = option(f)
    return f


def _server_option(f):
    return click.option(
        "--server",
        default=None,
        help="base URL of a running service; default runs in-process",
    )(f)


def _params(scales, rings, alpha, nms_rings, beta) -> schemas.DetectorParams:
    try:
        return schemas.DetectorParams(
            rings=rings,
            alpha=alpha,
            nms_rings=nms_rings,
            beta=beta,
            scales=_parse_ints(scales),
        )
    except ValidationError as exc:
        raise click.UsageError(f"invalid detector parameters: {exc}")


def _run(server, path, request, response_model, local):
    if server is None:
        try:
            return local(request)
        except ValueError as exc:
            raise DataError(str(exc))
    url = server.rstrip("/") + path
    try:
        resp = httpx.post(
            url,
            content=request.model_dump_json(),
            headers={"Content-Type": "application/json"},
            timeout=None,
        )
    except httpx.HTTPError as exc:
        raise DataError(f"request to {url} failed: {exc}")
    if resp.status_code != 200:
        raise DataError(f"server returned {resp.status_code}: {resp.text}")
    return response_model.model_validate_json(resp.text)


def _write_text(out: Path, text: str) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    except OSError as exc:
        raise DataError(str(exc))


def _echo_warnings(warnings) -> None:
    for message in warnings:
        click.echo(f"warning: {message}", err=True)


# ---------------------------------------------------------------------------
# commands


@click.group()
def cli():
    """Mesh interest point detection and benchmark evaluation."""


@cli.command()
@click.argument("mesh_path", type=click.Path(path_type=Path))
@_detector_options
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="output JSON path (default: stdout)")
@_server_option
def detect(mesh_path, scales, rings, alpha, nms_rings, beta, out, server):
    """Detect interest points on one mesh; write vertex indices + responses."""
    request = schemas.DetectRequest(
        mesh=_mesh_payload(mesh_path),
        params=_params(scales, rings, alpha, nms_rings, beta),
    )
    response = _run(server, "/detect", request, schemas.DetectResponse,
                    handlers.run_detect)
    _write_text(out, response.model_dump_json(indent=2) + "\n")


@cli.command("export-saliency")
@click.argument("mesh_path", type=click.Path(path_type=Path))
@_detector_options
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="output PLY path; a .json sidecar lists candidate and final points")
@_server_option
def export_saliency(mesh_path, scales, rings, alpha, nms_rings, beta, out, server):
    """Export the response field as a colored ASCII PLY mesh."""
    request = schemas.SaliencyRequest(
        mesh=_mesh_payload(mesh_path),
        params=_params(scales, rings, alpha, nms_rings, beta),
    )
    response = _run(server, "/saliency", request, schemas.SaliencyResponse,
                    handlers.run_saliency)
    _write_text(out, response.ply)
    sidecar = {
        "model": response.model,
        "params": response.params.model_dump(),
        "candidates": [p.model_dump() for p in response.candidates],
        "points": [p.model_dump() for p in response.points],
    }
    _write_text(out.with_suffix(".json"), json.dumps(sidecar, indent=2) + "\n")


@cli.command()
@click.argument("detections_dir", type=click.Path(path_type=Path))
@click.argument("ground_truth", type=click.Path(path_type=Path))
@click.argument("mesh_dir", type=click.Path(path_type=Path))
@_grid_options
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="per-cell CSV path; the aggregate summary lands next to it as .summary.json")
@_server_option
def evaluate(detections_dir, ground_truth, mesh_dir, grid_n, grid_sigma, grid_r,
             out, server):
    """Score detections against ground truth over the (n, sigma, r) grid."""
    request = schemas.EvaluateRequest(
        meshes=_mesh_dir_payloads(mesh_dir),
        ground_truth=_read_text(ground_truth),
        detections=_load_detections(detections_dir),
        r_values=_parse_floats(grid_r),
        n_values=_parse_ints(grid_n) if grid_n else None,
        sigma_values=_parse_floats(grid_sigma) if grid_sigma else None,
    )
    response = _run(server, "/evaluate", request, schemas.EvaluateResponse,
                    handlers.run_evaluate)
    _echo_warnings(response.warnings)
    _write_text(out, _cells_csv(response.cells))
    summary = {
        "summary": response.summary.model_dump() if response.summary else None,
        "warnings": response.warnings,
    }
    _write_text(out.with_suffix(".summary.json"), json.dumps(summary, indent=2) + "\n")


def _cells_csv(cells) -> str:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["model", "n", "sigma", "r", "tp", "fp", "fn", "iou", "f1"])
    for c in cells:
        writer.writerow([c.model, c.n, c.sigma, c.r, c.tp, c.fp, c.fn, c.iou, c.f1])
    return buffer.getvalue()


@cli.command()
@click.argument("mesh_dir", type=click.Path(path_type=Path))
@click.argument("ground_truth", type=click.Path(path_type=Path))
@click.option("--param", "parameter", required=True,
              type=click.Choice(schemas.SWEEPABLE),
              help="detector parameter to sweep")
@click.option("--values", required=True,
              help="values to try (comma list or start:step:stop)")
@_detector_options
@_grid_options
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="output CSV path (one row per swept value)")
@_server_option
def sweep(mesh_dir, ground_truth, parameter, values, scales, rings, alpha,
          nms_rings, beta, grid_n, grid_sigma, grid_r, out, server):
    """Detect + evaluate once per parameter value; write mean scores."""
    request = schemas.SweepRequest(
        parameter=parameter,
        values=_parse_floats(values),
        meshes=_mesh_dir_payloads(mesh_dir),
        ground_truth=_read_text(ground_truth),
        r_values=_parse_floats(grid_r),
        n_values=_parse_ints(grid_n) if grid_n else None,
        sigma_values=_parse_floats(grid_sigma) if grid_sigma else None,
        params=_params(scales, rings, alpha, nms_rings, beta),
    )
    response = _run(server, "/sweep", request, schemas.SweepResponse,
                    handlers.run_sweep)
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["parameter", "value", "mean_iou", "mean_f1"])
    for row in response.rows:
        writer.writerow([response.parameter, row.value, row.mean_iou, row.mean_f1])
    _write_text(out, buffer.getvalue())


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted.", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
