"""The HTTP service: in-memory registries plus endpoints over the core API.

Benchmark loops execute inside the endpoint process; requests and responses
carry only configuration and aggregated results, never per-point traffic, so
measurements are not polluted by transport.  Ids are content hashes, which
makes registration idempotent: re-uploading the same bytes or re-requesting
the same build returns the same id.
"""

import hashlib
import json
import threading
import time

from fastapi import FastAPI, HTTPException, Query, Request, Response

from .. import bench
from ..dataset import (DEFAULT_DOMAIN, Dataset, DatasetSpec, dataset_from_binary,
                       dataset_from_csv, dataset_to_binary, dataset_to_csv,
                       generate_dataset)
from ..engine import SearchMode, range_query
from ..errors import ChecksumMismatchError, RangelabError
from ..geometry import BoundingBox, RangeQuery
from ..indexes import build_index
from ..workload import (Workload, WorkloadSpec, generate_workload,
                        workload_from_csv, workload_to_csv)
from .models import (AggregateRowOut, Box, BuildStatsRequest, BuildStatsResponse,
                     BuildStatsRowOut, DatasetGenerateRequest, DatasetInfo,
                     IndexBuildRequest, IndexInfo, QueryRequest, QueryResponse,
                     QueryStatsOut, RunRequest, RunResponse, TuneRequest,
                     TuneResponse, TuneRowOut, WorkloadGenerateRequest,
                     WorkloadInfo)


def _hash_id(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()[:12]


def _box_out(b: BoundingBox) -> Box:
    return Box(min_lon=b.min_lon, min_lat=b.min_lat,
               max_lon=b.max_lon, max_lat=b.max_lat)


class _IndexEntry:
    __slots__ = ("id", "dataset_id", "index", "build_ns", "size_bytes")

    def __init__(self, id, dataset_id, index, build_ns, size_bytes):
        self.id = id
        self.dataset_id = dataset_id
        self.index = index
        self.build_ns = build_ns
        self.size_bytes = size_bytes


def create_app() -> FastAPI:
    app = FastAPI(title="rangelab", version="0.1.0")
    datasets: dict[str, Dataset] = {}
    workloads: dict[str, Workload] = {}
    indexes: dict[str, _IndexEntry] = {}
    index_by_key: dict[tuple, str] = {}
    lock = threading.Lock()

    def _dataset(dataset_id: str) -> Dataset:
        ds = datasets.get(dataset_id)
        if ds is None:
            raise HTTPException(404, f"no dataset {dataset_id!r}")
        return ds

    def _workload(workload_id: str) -> Workload:
        wl = workloads.get(workload_id)
        if wl is None:
            raise HTTPException(404, f"no workload {workload_id!r}")
        return wl

    def _index(index_id: str) -> _IndexEntry:
        entry = indexes.get(index_id)
        if entry is None:
            raise HTTPException(404, f"no index {index_id!r}")
        return entry

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/datasets/generate", response_model=DatasetInfo)
    def datasets_generate(req: DatasetGenerateRequest):
        domain = DEFAULT_DOMAIN
        if req.domain is not None:
            try:
                domain = BoundingBox(req.domain.min_lon, req.domain.min_lat,
                                     req.domain.max_lon, req.domain.max_lat).validated()
            except RangelabError as e:
                raise HTTPException(422, str(e)) from None
        spec = DatasetSpec(req.kind, req.n, req.seed, domain, req.clusters, req.spread)
        descriptor = json.dumps([req.kind, req.n, req.seed, list(domain),
                                 req.clusters, req.spread]).encode()
        ds_id = _hash_id(b"gen:" + descriptor)
        with lock:
            if ds_id not in datasets:
                datasets[ds_id] = generate_dataset(spec)
        ds = datasets[ds_id]
        return DatasetInfo(id=ds_id, n=ds.n, bounds=_box_out(ds.bounds))

    @app.post("/datasets", response_model=DatasetInfo)
    async def datasets_upload(request: Request,
                              format: str = Query(default="binary")):
        body = await request.body()
        try:
            if format == "csv":
                ds = dataset_from_csv(body.decode("utf-8", errors="strict"))
            elif format == "binary":
                ds = dataset_from_binary(body)
            else:
                raise HTTPException(422, f"unknown format {format!r}")
        except (RangelabError, UnicodeDecodeError, ValueError) as e:
            raise HTTPException(400, f"unparseable dataset: {e}") from None
        ds_id = _hash_id(body)
        with lock:
            datasets.setdefault(ds_id, ds)
        return DatasetInfo(id=ds_id, n=ds.n, bounds=_box_out(ds.bounds))

    @app.get("/datasets/{dataset_id}", response_model=DatasetInfo)
    def datasets_info(dataset_id: str):
        ds = _dataset(dataset_id)
        return DatasetInfo(id=dataset_id, n=ds.n, bounds=_box_out(ds.bounds))

    @app.get("/datasets/{dataset_id}/export")
    def datasets_export(dataset_id: str, format: str = Query(default="binary")):
        ds = _dataset(dataset_id)
        if format == "csv":
            return Response(dataset_to_csv(ds), media_type="text/csv")
        if format == "binary":
            return Response(dataset_to_binary(ds),
                            media_type="application/octet-stream")
        raise HTTPException(422, f"unknown format {format!r}")

    @app.post("/workloads/generate", response_model=WorkloadInfo)
    def workloads_generate(req: WorkloadGenerateRequest):
        ds = _dataset(req.dataset_id)
        spec = WorkloadSpec(req.kind, req.selectivity, req.count, req.seed,
                            req.tolerance)
        try:
            wl = generate_workload(ds, spec)
        except ValueError as e:
            raise HTTPException(422, str(e)) from None
        wl_id = _hash_id(workload_to_csv(wl).encode())
        with lock:
            workloads.setdefault(wl_id, wl)
        return WorkloadInfo(id=wl_id, kind=wl.spec.kind,
                            selectivity=wl.spec.selectivity, count=len(wl.queries),
                            seed=wl.spec.seed, flagged=wl.flagged_count)

    @app.post("/workloads", response_model=WorkloadInfo)
    async def workloads_upload(request: Request):
        body = await request.body()
        try:
            wl = workload_from_csv(body.decode("utf-8", errors="strict"))
        except (RangelabError, UnicodeDecodeError) as e:
            raise HTTPException(400, f"unparseable workload: {e}") from None
        wl_id = _hash_id(body)
        with lock:
            workloads.setdefault(wl_id, wl)
        return WorkloadInfo(id=wl_id, kind=wl.spec.kind,
                            selectivity=wl.spec.selectivity, count=len(wl.queries),
                            seed=wl.spec.seed, flagged=wl.flagged_count)

    @app.get("/workloads/{workload_id}/export")
    def workloads_export(workload_id: str):
        wl = _workload(workload_id)
        return Response(workload_to_csv(wl), media_type="text/csv")

    @app.post("/indexes", response_model=IndexInfo)
    def indexes_build(req: IndexBuildRequest):
        ds = _dataset(req.dataset_id)
        key = (req.dataset_id, req.kind, req.param, req.max_error,
               req.radix_bits, req.max_depth)
        with lock:
            idx_id = index_by_key.get(key)
        if idx_id is None:
            t0 = time.perf_counter_ns()
            try:
                index = build_index(ds, req.kind, req.param, req.max_error,
                                    req.radix_bits, req.max_depth)
            except ValueError as e:
                raise HTTPException(422, str(e)) from None
            build_ns = time.perf_counter_ns() - t0
            idx_id = _hash_id(repr(key).encode())
            entry = _IndexEntry(idx_id, req.dataset_id, index, build_ns,
                                index.size_bytes())
            with lock:
                indexes.setdefault(idx_id, entry)
                index_by_key.setdefault(key, idx_id)
        entry = indexes[idx_id]
        return IndexInfo(id=entry.id, dataset_id=entry.dataset_id,
                         kind=entry.index.kind, param=entry.index.param,
                         partitions=entry.index.partition_count,
                         build_ns=entry.build_ns, size_bytes=entry.size_bytes)

    @app.post("/query", response_model=QueryResponse)
    def query(req: QueryRequest):
        entry = _index(req.index_id)
        try:
            q = RangeQuery.of(req.min_lon, req.min_lat, req.max_lon, req.max_lat)
        except RangelabError as e:
            raise HTTPException(422, str(e)) from None
        out, st = range_query(entry.index, q, SearchMode(req.mode))
        points = None
        truncated = False
        if req.include_points:
            if len(out) > req.max_points:
                points = out[:req.max_points]
                truncated = True
            else:
                points = out
        return QueryResponse(count=st.result_count, points=points,
                             truncated=truncated,
                             stats=QueryStatsOut(**{
                                 f: getattr(st, f) for f in QueryStatsOut.model_fields}))

    @app.post("/bench/run", response_model=RunResponse)
    def bench_run(req: RunRequest):
        ds = _dataset(req.dataset_id)
        wl = _workload(req.workload_id)
        specs = [(s.kind, s.param) for s in req.indexes]
        try:
            rows, pq = bench.run_suite(ds, wl, specs, req.modes, req.reps,
                                       req.warmup, req.max_error, req.per_query)
        except ChecksumMismatchError as e:
            raise HTTPException(409, {"error": "checksum_mismatch",
                                      "message": str(e)}) from None
        except ValueError as e:
            raise HTTPException(422, str(e)) from None
        out_rows = [AggregateRowOut(**{f: getattr(r, f)
                                       for f in AggregateRowOut.model_fields})
                    for r in rows]
        return RunResponse(rows=out_rows, csv=bench.render_aggregate_csv(rows),
                           per_query_csv=(bench.render_per_query_csv(pq)
                                          if req.per_query else None))

    @app.post("/bench/tune", response_model=TuneResponse)
    def bench_tune(req: TuneRequest):
        ds = _dataset(req.dataset_id)
        wl = _workload(req.workload_id)
        try:
            result = bench.tune(ds, wl, req.kind, SearchMode(req.mode), req.lo,
                                req.hi, req.reps, req.warmup, req.max_error)
        except ValueError as e:
            raise HTTPException(422, str(e)) from None
        rows = [TuneRowOut(param=r.param, mean_ns=r.mean_ns,
                           partitions_mean=r.partitions_mean,
                           scanned_mean=r.scanned_mean, best=r.best)
                for r in result.rows]
        return TuneResponse(kind=result.kind, mode=result.mode, rows=rows,
                            best_param=result.best_param, csv=result.csv())

    @app.post("/bench/build-stats", response_model=BuildStatsResponse)
    def bench_build_stats(req: BuildStatsRequest):
        ds = _dataset(req.dataset_id)
        specs = [(s.kind, s.param) for s in req.indexes]
        try:
            rows = bench.build_stats(ds, specs, req.reps, req.max_error)
        except ValueError as e:
            raise HTTPException(422, str(e)) from None
        out_rows = [BuildStatsRowOut(index=r.index, param=r.param,
                                     build_ns=r.build_ns, size_bytes=r.size_bytes,
                                     partitions=r.partitions) for r in rows]
        return BuildStatsResponse(rows=out_rows,
                                  csv=bench.render_build_stats_csv(rows))

    return app
