"""Request/response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, model_validator

from ..detector import DetectorConfig


class DetectorParams(BaseModel):
    """Detector knobs; defaults mirror DetectorConfig."""

    rings: int = 6
    alpha: float = 2.5
    nms_rings: int = 10
    beta: float = 0.03
    scales: list[int] = [1, 3, 5]

    @model_validator(mode="after")
    def _check(self):
        self.to_config()
        return self

    def to_config(self) -> DetectorConfig:
        return DetectorConfig(
            rings=self.rings,
            alpha=self.alpha,
            nms_rings=self.nms_rings,
            beta=self.beta,
            scales=tuple(self.scales),
        )


class MeshPayload(BaseModel):
    """A mesh shipped as text, with the id used to key results."""

    name: str
    format: Literal["off", "obj"]
    text: str


class InterestPoint(BaseModel):
    vertex: int
    response: float


class DetectRequest(BaseModel):
    mesh: MeshPayload
    params: DetectorParams = DetectorParams()


class DetectResponse(BaseModel):
    model: str
    params: DetectorParams
    base_scale: float
    points: list[InterestPoint]


class SaliencyRequest(BaseModel):
    mesh: MeshPayload
    params: DetectorParams = DetectorParams()


class SaliencyResponse(BaseModel):
    model: str
    params: DetectorParams
    ply: str
    candidates: list[InterestPoint]
    points: list[InterestPoint]


class EvaluateRequest(BaseModel):
    meshes: list[MeshPayload]
    ground_truth: str
    detections: dict[str, list[int]]
    r_values: list[float]
    n_values: Optional[list[int]] = None
    sigma_values: Optional[list[float]] = None


class CellRow(BaseModel):
    model: str
    n: int
    sigma: float
    r: float
    tp: int
    fp: int
    fn: int
    iou: Optional[float] = None
    f1: Optional[float] = None


class CurveRow(BaseModel):
    value: float
    mean_iou: Optional[float] = None
    mean_f1: Optional[float] = None
    cells: int


class SummaryModel(BaseModel):
    mean_iou: Optional[float] = None
    mean_f1: Optional[float] = None
    cell_count: int
    defined_cell_count: int
    per_r: list[CurveRow]
    per_n: list[CurveRow]
    per_sigma: list[CurveRow]


class EvaluateResponse(BaseModel):
    cells: list[CellRow]
    summary: Optional[SummaryModel] = None
    warnings: list[str]


SWEEPABLE = ("rings", "alpha", "nms-rings", "beta")


class SweepRequest(BaseModel):
    parameter: Literal["rings", "alpha", "nms-rings", "beta"]
    values: list[float]
    meshes: list[MeshPayload]
    ground_truth: str
    r_values: list[float]
    n_values: Optional[list[int]] = None
    sigma_values: Optional[list[float]] = None
    params: DetectorParams = DetectorParams()


class SweepRow(BaseModel):
    value: float
    mean_iou: Optional[float] = None
    mean_f1: Optional[float] = None


class SweepResponse(BaseModel):
    parameter: str
    rows: list[SweepRow]
