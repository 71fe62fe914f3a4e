"""Request handlers — plain functions so the CLI can call them in-process."""

from __future__ import annotations

from ..detector import DetectorConfig, detect
from ..evaluation import evaluate_detections, parse_ground_truth
from ..mesh import Mesh, parse_obj, parse_off
from ..visualize import saliency_ply
from . import schemas


def mesh_from_payload(payload: schemas.MeshPayload) -> Mesh:
    if payload.format == "off":
        return parse_off(payload.text)
    return parse_obj(payload.text)


def _points(point_set) -> list:
    return [
        schemas.InterestPoint(vertex=v, response=value)
        for v, value in point_set.as_pairs()
    ]


def run_detect(request: schemas.DetectRequest) -> schemas.DetectResponse:
    mesh = mesh_from_payload(request.mesh)
    result = detect(mesh, request.params.to_config())
    return schemas.DetectResponse(
        model=request.mesh.name,
        params=request.params,
        base_scale=result.base_scale,
        points=_points(result.points),
    )


def run_saliency(request: schemas.SaliencyRequest) -> schemas.SaliencyResponse:
    mesh = mesh_from_payload(request.mesh)
    result = detect(mesh, request.params.to_config())
    return schemas.SaliencyResponse(
        model=request.mesh.name,
        params=request.params,
        ply=saliency_ply(mesh, result.response.combined),
        candidates=_points(result.candidates),
        points=_points(result.points),
    )


def _parsed_meshes(payloads) -> dict:
    meshes = {}
    for payload in payloads:
        if payload.name in meshes:
            raise ValueError(f"duplicate mesh id {payload.name!r}")
        meshes[payload.name] = mesh_from_payload(payload)
    return meshes


def run_evaluate(request: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
    meshes = _parsed_meshes(request.meshes)
    ground_truth = parse_ground_truth(request.ground_truth, source="<ground-truth>")
    report = evaluate_detections(
        meshes,
        ground_truth,
        request.detections,
        request.r_values,
        n_values=request.n_values,
        sigma_values=request.sigma_values,
    )
    return schemas.EvaluateResponse(
        cells=[
            schemas.CellRow(
                model=c.model, n=c.n, sigma=c.sigma, r=c.r,
                tp=c.tp, fp=c.fp, fn=c.fn, iou=c.iou, f1=c.f1,
            )
            for c in report.cells
        ],
        summary=_summary_model(report.summary),
        warnings=list(report.warnings),
    )


def _summary_model(summary):
    if summary is None:
        return None

    def curve(points):
        return [
            schemas.CurveRow(
                value=p.value, mean_iou=p.mean_iou, mean_f1=p.mean_f1, cells=p.cells
            )
            for p in points
        ]

    return schemas.SummaryModel(
        mean_iou=summary.mean_iou,
        mean_f1=summary.mean_f1,
        cell_count=summary.cell_count,
        defined_cell_count=summary.defined_cell_count,
        per_r=curve(summary.per_r),
        per_n=curve(summary.per_n),
        per_sigma=curve(summary.per_sigma),
    )


def _config_with(base: schemas.DetectorParams, parameter: str, value: float) -> DetectorConfig:
    params = base.model_copy()
    if parameter in ("rings", "nms-rings"):
        if value != int(value):
            raise ValueError(f"{parameter} takes integer values, got {value}")
        setattr(params, parameter.replace("-", "_"), int(value))
    else:
        setattr(params, parameter, value)
    return params.to_config()


def run_sweep(request: schemas.SweepRequest) -> schemas.SweepResponse:
    if not request.values:
        raise ValueError("at least one sweep value is required")
    meshes = _parsed_meshes(request.meshes)
    ground_truth = parse_ground_truth(request.ground_truth, source="<ground-truth>")
    rows = []
    for value in request.values:
        config = _config_with(request.params, request.parameter, value)
        detections = {
            name: detect(mesh, config).points.indices.tolist()
            for name, mesh in meshes.items()
        }
        report = evaluate_detections(
            meshes,
            ground_truth,
            detections,
            request.r_values,
            n_values=request.n_values,
            sigma_values=request.sigma_values,
        )
        summary = report.summary
        rows.append(
            schemas.SweepRow(
                value=value,
                mean_iou=summary.mean_iou if summary else None,
                mean_f1=summary.mean_f1 if summary else None,
            )
        )
    return schemas.SweepResponse(parameter=request.parameter, rows=rows)
