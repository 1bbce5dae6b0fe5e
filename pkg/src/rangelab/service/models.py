"""Request and response shapes for the HTTP service."""

from typing import Literal

from pydantic import BaseModel, Field

IndexKind = Literal["fixed", "adaptive", "kdtree", "quadtree", "str"]
ModeName = Literal["learned", "binary"]


class Box(BaseModel):
    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float


class DatasetGenerateRequest(BaseModel):
    kind: Literal["uniform", "clusters"] = "clusters"
    n: int = Field(ge=1)
    seed: int = 0
    domain: Box | None = None
    clusters: int = Field(default=8, ge=1)
    spread: float = Field(default=2.0, gt=0)


class DatasetInfo(BaseModel):
    id: str
    n: int
    bounds: Box


class WorkloadGenerateRequest(BaseModel):
    dataset_id: str
    kind: Literal["skewed", "uniform"]
    selectivity: float = Field(gt=0, le=1)
    count: int = Field(ge=1)
    seed: int = 0
    tolerance: float = Field(default=0.1, gt=0)


class WorkloadInfo(BaseModel):
    id: str
    kind: str
    selectivity: float
    count: int
    seed: int
    flagged: int


class IndexBuildRequest(BaseModel):
    dataset_id: str
    kind: IndexKind
    param: int | None = Field(default=None, ge=1)
    max_error: int = Field(default=32, ge=1)
    radix_bits: int | None = Field(default=None, ge=1, le=18)
    max_depth: int = Field(default=32, ge=1)


class IndexInfo(BaseModel):
    id: str
    dataset_id: str
    kind: str
    param: int
    partitions: int
    build_ns: int
    size_bytes: int


class QueryRequest(BaseModel):
    index_id: str
    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float
    mode: ModeName = "learned"
    include_points: bool = True
    max_points: int = Field(default=10000, ge=0)


class QueryStatsOut(BaseModel):
    index_ns: int
    refine_ns: int
    scan_ns: int
    total_ns: int
    partitions_intersected: int
    points_scanned: int
    result_count: int
    search_consults: int


class QueryResponse(BaseModel):
    count: int
    points: list[tuple[float, float]] | None
    truncated: bool
    stats: QueryStatsOut


class IndexSpec(BaseModel):
    kind: IndexKind
    param: int | None = Field(default=None, ge=1)


class RunRequest(BaseModel):
    dataset_id: str
    workload_id: str
    indexes: list[IndexSpec] = Field(min_length=1)
    modes: list[ModeName] = ["learned", "binary"]
    reps: int = Field(default=3, ge=1)
    warmup: int = Field(default=1, ge=0)
    max_error: int = Field(default=32, ge=1)
    per_query: bool = False


class AggregateRowOut(BaseModel):
    index: str
    mode: str
    param: int
    selectivity: float
    kind: str
    mean_ns: float
    median_ns: float
    p99_ns: float
    index_ns: float
    refine_ns: float
    scan_ns: float
    partitions_mean: float
    scanned_mean: float
    result_checksum: str


class RunResponse(BaseModel):
    rows: list[AggregateRowOut]
    csv: str
    per_query_csv: str | None = None


class TuneRequest(BaseModel):
    dataset_id: str
    workload_id: str
    kind: IndexKind
    mode: ModeName = "binary"
    lo: int | None = Field(default=None, ge=1)
    hi: int | None = Field(default=None, ge=1)
    reps: int = Field(default=3, ge=1)
    warmup: int = Field(default=1, ge=0)
    max_error: int = Field(default=32, ge=1)


class TuneRowOut(BaseModel):
    param: int
    mean_ns: float
    partitions_mean: float
    scanned_mean: float
    best: bool


class TuneResponse(BaseModel):
    kind: str
    mode: str
    rows: list[TuneRowOut]
    best_param: int
    csv: str


class BuildStatsRequest(BaseModel):
    dataset_id: str
    indexes: list[IndexSpec] = Field(min_length=1)
    reps: int = Field(default=3, ge=1)
    max_error: int = Field(default=32, ge=1)


class BuildStatsRowOut(BaseModel):
    index: str
    param: int
    build_ns: int
    size_bytes: int
    partitions: int


class BuildStatsResponse(BaseModel):
    rows: list[BuildStatsRowOut]
    csv: str
