"""HTTP surface of the band-selection pipeline.

Every compute endpoint reads rasters from server-side paths, writes its
output files (CSV, PPM, rasters, run records) under the request's out_dir,
and returns the structured results.  Core errors map to HTTP 400 with a
``kind`` of "validation" (bad values) or "io" (unreadable/mismatched files).
"""

from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..classify import build_estimated_map, evaluate, report_to_csv
from ..cube import (CubeDescriptor, GroundTruth, HyperCube, SynthSpec,
                    approximate_gt, band_roles_csv, load_cube,
                    load_label_raster, quantize_map, random_split,
                    read_descriptor, save_cube, save_labels, synth_cube,
                    write_descriptor)
from ..records import format_run_record
from ..render import ppm_bytes, render_labels, side_by_side
from ..selection import (SelectionConfig, mi_curve, mi_ranking, ranking_to_csv,
                         sweep_to_csv, sweep_to_long_csv, threshold_sweep,
                         trace_to_csv, wrapper_select)
from . import schemas


def _descriptor_path(ref: schemas.RasterRef) -> str:
    return ref.descriptor if ref.descriptor is not None else ref.path + ".dsc"


def _load_cube_ref(ref: schemas.RasterRef) -> HyperCube:
    return load_cube(ref.path, read_descriptor(_descriptor_path(ref)))


def _load_labels_ref(ref: schemas.RasterRef):
    desc = read_descriptor(_descriptor_path(ref))
    if desc.bands != 1:
        raise ValueError("label raster must have a single band")
    return load_label_raster(ref.path, desc.rows, desc.cols,
                             dtype=desc.dtype, byteorder=desc.byteorder)


def _load_gt_ref(ref: schemas.GroundTruthRef) -> GroundTruth:
    return GroundTruth(_load_labels_ref(ref), ref.n_classes)


def _write_text(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return str(path)


def _rank_entries(ranking):
    return [schemas.RankEntry(band=b, mi_bits=m) for b, m in ranking]


def _trace_models(trace):
    return [schemas.TraceStepModel(step=s.step, band=s.band, mi_bits=s.mi_bits,
                                   pe=s.pe_after, accepted=s.accepted)
            for s in trace.steps]


def _report_model(report) -> schemas.ReportModel:
    return schemas.ReportModel(
        scope=report.scope,
        overall_pct=report.overall_pct,
        n_evaluated=report.n_evaluated,
        per_class=[schemas.ClassAccuracyModel(
            class_id=r.class_id, pixels=r.pixels, accuracy_pct=r.accuracy_pct)
            for r in report.per_class])


def _report_record(report) -> dict:
    return {
        "overall_pct": report.overall_pct,
        "n_evaluated": report.n_evaluated,
        "per_class": [{"class": r.class_id, "pixels": r.pixels,
                       "accuracy_pct": r.accuracy_pct} for r in report.per_class],
    }


def _ranking_record(ranking):
    return [{"band": b, "mi_bits": m} for b, m in ranking]


def _trace_record(trace):
    return [{"step": s.step, "band": s.band, "mi_bits": s.mi_bits,
             "pe": s.pe_after, "accepted": s.accepted} for s in trace.steps]


def create_app() -> FastAPI:
    app = FastAPI(title="fanoband service", version=__version__)

    @app.exception_handler(ValueError)
    async def _on_value_error(request, exc):
        return JSONResponse(status_code=400, content={
            "detail": {"kind": "validation", "message": str(exc)}})

    @app.exception_handler(OSError)
    async def _on_os_error(request, exc):
        return JSONResponse(status_code=400, content={
            "detail": {"kind": "io", "message": str(exc)}})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/rank", response_model=schemas.RankResponse)
    def rank(req: schemas.RankRequest):
        cube = _load_cube_ref(req.cube)
        gt = _load_gt_ref(req.gt)
        ranking = mi_ranking(cube, gt, req.bins)
        out = Path(req.out_dir)
        files = [
            _write_text(out / "mi_by_band.csv", ranking_to_csv(ranking, "band")),
            _write_text(out / "mi_by_rank.csv", ranking_to_csv(ranking, "rank")),
        ]
        return schemas.RankResponse(by_rank=_rank_entries(ranking), files=files)

    @app.post("/rank-approx", response_model=schemas.RankResponse)
    def rank_approx(req: schemas.RankApproxRequest):
        cube = _load_cube_ref(req.cube)
        reference = quantize_map(approximate_gt(cube, req.band_start,
                                                req.band_stop), req.bins)
        ranking = mi_curve(cube, reference, req.bins)
        out = Path(req.out_dir)
        files = [
            _write_text(out / "mi_approx_by_band.csv", ranking_to_csv(ranking, "band")),
            _write_text(out / "mi_approx_by_rank.csv", ranking_to_csv(ranking, "rank")),
        ]
        return schemas.RankResponse(by_rank=_rank_entries(ranking), files=files)

    @app.post("/select", response_model=schemas.SelectResponse)
    def select(req: schemas.SelectRequest):
        cube = _load_cube_ref(req.cube)
        gt = _load_gt_ref(req.gt)
        split = random_split(gt, req.train_fraction, req.seed)
        ranking = mi_ranking(cube, gt, req.bins)
        config = SelectionConfig(threshold=req.threshold, max_bands=req.max_bands,
                                 n_bins=req.bins, classifier_spec=req.classifier,
                                 initial_pe=req.initial_pe)
        trace = wrapper_select(cube, gt, split, config, ranking=ranking)
        c_est = build_estimated_map(cube, gt, trace.selected, split, req.classifier)
        report = evaluate(c_est, gt, split, "test")

        out = Path(req.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        est_path = out / "c_est.u8"
        save_labels(c_est.to_full_map(), est_path, dtype="u8")
        est_desc = CubeDescriptor(1, gt.rows, gt.cols, "u8", "le", "bsq")
        write_descriptor(out / "c_est.u8.dsc", est_desc)

        record = {
            "run": {"command": "select", "version": __version__},
            "config": {
                "cube": req.cube.path,
                "cube_descriptor": _descriptor_path(req.cube),
                "gt": req.gt.path,
                "gt_descriptor": _descriptor_path(req.gt),
                "n_classes": gt.n_classes,
                "bins": req.bins,
                "threshold": req.threshold,
                "max_bands": req.max_bands,
                "classifier": req.classifier,
                "seed": req.seed,
                "train_fraction": req.train_fraction,
                "initial_pe": req.initial_pe,
                "out_dir": req.out_dir,
            },
            "split": {
                "n_labeled": int(gt.labeled_indices().size),
                "n_train": int(split.train_indices.size),
                "n_test": int(split.test_indices.size),
            },
            "ranking": _ranking_record(ranking),
            "trace": _trace_record(trace),
            "selected": list(trace.selected),
            "reports": {"test": _report_record(report)},
            "counters": {
                "bands_examined": len(trace.steps),
                "classifier_fits": len(trace.steps) + 1,
            },
        }
        files = [
            _write_text(out / "trace.csv", trace_to_csv(trace)),
            _write_text(out / "report_test.csv", report_to_csv(report)),
            str(est_path),
            str(out / "c_est.u8.dsc"),
            _write_text(out / "run_record.txt", format_run_record(record)),
        ]
        return schemas.SelectResponse(selected=list(trace.selected),
                                      steps=_trace_models(trace),
                                      report_test=_report_model(report),
                                      files=files)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        cube = _load_cube_ref(req.cube)
        gt = _load_gt_ref(req.gt)
        split = random_split(gt, req.train_fraction, req.seed)
        ranking = mi_ranking(cube, gt, req.bins)
        table = threshold_sweep(cube, gt, split, req.thresholds, req.checkpoints,
                                n_bins=req.bins, classifier_spec=req.classifier,
                                ranking=ranking)
        cells = [schemas.SweepCell(threshold=th, n_bands=ckpt,
                                   accuracy_pct=table.cells[(th, ckpt)])
                 for th in table.thresholds for ckpt in table.checkpoints]
        record = {
            "run": {"command": "sweep", "version": __version__},
            "config": {
                "cube": req.cube.path,
                "cube_descriptor": _descriptor_path(req.cube),
                "gt": req.gt.path,
                "gt_descriptor": _descriptor_path(req.gt),
                "n_classes": gt.n_classes,
                "bins": req.bins,
                "thresholds": [float(t) for t in req.thresholds],
                "checkpoints": [int(c) for c in req.checkpoints],
                "classifier": req.classifier,
                "seed": req.seed,
                "train_fraction": req.train_fraction,
                "out_dir": req.out_dir,
            },
            "split": {
                "n_labeled": int(gt.labeled_indices().size),
                "n_train": int(split.train_indices.size),
                "n_test": int(split.test_indices.size),
            },
            "ranking": _ranking_record(ranking),
            "runs": [{"threshold": float(th),
                      "selected": list(table.traces[th].selected),
                      "trace": _trace_record(table.traces[th])}
                     for th in table.thresholds],
            "table": [{"threshold": float(c.threshold), "n_bands": c.n_bands,
                       "accuracy_pct": c.accuracy_pct} for c in cells],
            "counters": {
                "wrapper_runs": len(table.thresholds),
                "bands_examined": sum(len(table.traces[th].steps)
                                      for th in table.thresholds),
            },
        }
        out = Path(req.out_dir)
        files = [
            _write_text(out / "sweep_table.csv", sweep_to_csv(table)),
            _write_text(out / "sweep_long.csv", sweep_to_long_csv(table)),
            _write_text(out / "run_record.txt", format_run_record(record)),
        ]
        return schemas.SweepResponse(cells=cells, files=files)

    @app.post("/render", response_model=schemas.RenderResponse)
    def render(req: schemas.RenderRequest):
        image = render_labels(_load_labels_ref(req.map), req.palette)
        if req.second is not None:
            image = side_by_side(image, render_labels(_load_labels_ref(req.second),
                                                      req.palette))
        out = Path(req.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(ppm_bytes(image))
        return schemas.RenderResponse(files=[str(out)], width=image.shape[1],
                                      height=image.shape[0])

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest):
        spec = SynthSpec(n_classes=req.n_classes, rows=req.rows, cols=req.cols,
                         informative_bands=req.informative_bands,
                         copies_per_informative=req.copies_per_informative,
                         noise_bands=req.noise_bands,
                         noise_level=req.noise_level, seed=req.seed)
        cube, gt, roles = synth_cube(spec)
        out = Path(req.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cube_desc = CubeDescriptor(cube.bands, cube.rows, cube.cols,
                                   "u16", "le", "bsq")
        save_cube(cube, out / "cube.u16", cube_desc)
        write_descriptor(out / "cube.u16.dsc", cube_desc)
        gt_desc = CubeDescriptor(1, gt.rows, gt.cols, "u8", "le", "bsq")
        save_labels(gt.labels, out / "gt.u8", dtype="u8")
        write_descriptor(out / "gt.u8.dsc", gt_desc)
        files = [str(out / "cube.u16"), str(out / "cube.u16.dsc"),
                 str(out / "gt.u8"), str(out / "gt.u8.dsc"),
                 _write_text(out / "band_roles.txt", band_roles_csv(roles))]
        return schemas.SynthResponse(bands=cube.bands, rows=cube.rows,
                                     cols=cube.cols, n_classes=gt.n_classes,
                                     files=files)

    return app


app = create_app()
