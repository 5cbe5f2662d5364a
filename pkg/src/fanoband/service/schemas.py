"""Request and response models of the band-selection service.

Raster inputs are referenced by path on the server's filesystem; each raster
carries a text sidecar descriptor (defaults to ``<path>.dsc``).  Outputs are
written under the request's ``out_dir`` and echoed back in the response.
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class RasterRef(BaseModel):
    path: str
    descriptor: Optional[str] = None  # default: path + ".dsc"


class GroundTruthRef(RasterRef):
    n_classes: int = Field(16, ge=2)


class HealthResponse(BaseModel):
    status: str
    version: str


class RankEntry(BaseModel):
    band: int
    mi_bits: float


class RankRequest(BaseModel):
    cube: RasterRef
    gt: GroundTruthRef
    bins: int = Field(256, ge=1, le=65536)
    out_dir: str


class RankApproxRequest(BaseModel):
    cube: RasterRef
    band_start: int = Field(ge=0)
    band_stop: int = Field(ge=0)
    bins: int = Field(256, ge=1, le=65536)
    out_dir: str


class RankResponse(BaseModel):
    by_rank: List[RankEntry]
    files: List[str]


class TraceStepModel(BaseModel):
    step: int
    band: int
    mi_bits: float
    pe: float
    accepted: bool


class ClassAccuracyModel(BaseModel):
    class_id: int
    pixels: int
    accuracy_pct: float


class ReportModel(BaseModel):
    scope: str
    overall_pct: float
    n_evaluated: int
    per_class: List[ClassAccuracyModel]


class SelectRequest(BaseModel):
    cube: RasterRef
    gt: GroundTruthRef
    threshold: float
    max_bands: int = Field(ge=1)
    bins: int = Field(256, ge=1, le=65536)
    classifier: str = "centroid"
    seed: int = 0
    train_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    initial_pe: Optional[float] = None
    out_dir: str


class SelectResponse(BaseModel):
    selected: List[int]
    steps: List[TraceStepModel]
    report_test: ReportModel
    files: List[str]


class SweepRequest(BaseModel):
    cube: RasterRef
    gt: GroundTruthRef
    thresholds: List[float] = Field(min_length=1)
    checkpoints: List[int] = Field(min_length=1)
    bins: int = Field(256, ge=1, le=65536)
    classifier: str = "centroid"
    seed: int = 0
    train_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    out_dir: str


class SweepCell(BaseModel):
    threshold: float
    n_bands: int
    accuracy_pct: Optional[float]  # None when the run never reached n_bands


class SweepResponse(BaseModel):
    cells: List[SweepCell]
    files: List[str]


class RenderRequest(BaseModel):
    map: RasterRef
    second: Optional[RasterRef] = None  # side-by-side when given
    palette: str = "classic16"
    out_path: str


class RenderResponse(BaseModel):
    files: List[str]
    width: int
    height: int


class SynthRequest(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    n_classes: int = Field(8, ge=2)
    informative_bands: int = Field(ge=1)
    copies_per_informative: int = Field(0, ge=0)
    noise_bands: int = Field(0, ge=0)
    noise_level: float = Field(0.0, ge=0.0)
    seed: int = 0
    out_dir: str


class SynthResponse(BaseModel):
    bands: int
    rows: int
    cols: int
    n_classes: int
    files: List[str]
