"""Thin command-line client of the band-selection service.

Each subcommand builds one request, posts it to the service, and prints a
short summary.  By default the request goes to an in-process instance of
the service (identical code path to a live server); --url targets a remote
server instead, in which case all paths are resolved on that machine.

Exit codes: 0 success, 1 validation error, 2 I/O or transport error.
"""

import argparse
import sys

import httpx


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _float_list(text: str):
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _int_list(text: str):
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _band_range(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected start:stop, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop integers, got {text!r}")


def _client(url):
    if url:
        return httpx.Client(base_url=url, timeout=None)
    # in-process transport through the full service stack
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app
    return TestClient(create_app())


def _post(url, path, payload) -> dict:
    try:
        with _client(url) as client:
            response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)
    if response.status_code == 200:
        return response.json()
    detail = response.json().get("detail")
    if isinstance(detail, dict) and "kind" in detail:
        print(f"error: {detail['message']}", file=sys.stderr)
        raise SystemExit(2 if detail["kind"] == "io" else 1)
    print(f"error: {detail}", file=sys.stderr)
    raise SystemExit(1)


def _raster(path, descriptor=None):
    return {"path": path, "descriptor": descriptor}


def _gt_ref(args):
    return dict(_raster(args.gt, args.gt_descriptor), n_classes=args.classes)


def _print_files(result):
    for name in result["files"]:
        print(f"wrote {name}")


def _cmd_rank(args):
    payload = {"cube": _raster(args.cube, args.cube_descriptor),
               "gt": _gt_ref(args), "bins": args.bins, "out_dir": args.out}
    result = _post(args.url, "/rank", payload)
    top = result["by_rank"][0]
    print(f"top band {top['band']} at {top['mi_bits']:.4f} bits "
          f"({len(result['by_rank'])} bands ranked)")
    _print_files(result)


def _cmd_rank_approx(args):
    start, stop = args.range
    payload = {"cube": _raster(args.cube, args.cube_descriptor),
               "band_start": start, "band_stop": stop,
               "bins": args.bins, "out_dir": args.out}
    result = _post(args.url, "/rank-approx", payload)
    top = result["by_rank"][0]
    print(f"top band {top['band']} at {top['mi_bits']:.4f} bits "
          f"(reference: mean of bands {start}..{stop})")
    _print_files(result)


def _cmd_select(args):
    payload = {"cube": _raster(args.cube, args.cube_descriptor),
               "gt": _gt_ref(args),
               "threshold": args.threshold, "max_bands": args.max_bands,
               "bins": args.bins, "classifier": args.classifier,
               "seed": args.seed, "train_fraction": args.train_fraction,
               "initial_pe": args.initial_pe, "out_dir": args.out}
    result = _post(args.url, "/select", payload)
    selected = result["selected"]
    print(f"selected {len(selected)} bands: {' '.join(str(b) for b in selected)}")
    print(f"test accuracy {result['report_test']['overall_pct']:.2f}%")
    _print_files(result)


def _cmd_sweep(args):
    payload = {"cube": _raster(args.cube, args.cube_descriptor),
               "gt": _gt_ref(args),
               "thresholds": args.thresholds, "checkpoints": args.checkpoints,
               "bins": args.bins, "classifier": args.classifier,
               "seed": args.seed, "train_fraction": args.train_fraction,
               "out_dir": args.out}
    result = _post(args.url, "/sweep", payload)
    for cell in result["cells"]:
        acc = cell["accuracy_pct"]
        shown = f"{acc:.2f}%" if acc is not None else "-"
        print(f"Th={cell['threshold']} bands={cell['n_bands']} accuracy={shown}")
    _print_files(result)


def _cmd_render(args):
    payload = {"map": _raster(args.map, args.map_descriptor),
               "second": _raster(args.second, args.second_descriptor)
               if args.second else None,
               "palette": args.palette, "out_path": args.out}
    result = _post(args.url, "/render", payload)
    print(f"rendered {result['width']}x{result['height']} image")
    _print_files(result)


def _cmd_synth(args):
    payload = {"rows": args.rows, "cols": args.cols, "n_classes": args.classes,
               "informative_bands": args.informative,
               "copies_per_informative": args.copies,
               "noise_bands": args.noise_bands, "noise_level": args.noise_level,
               "seed": args.seed, "out_dir": args.out}
    result = _post(args.url, "/synth", payload)
    print(f"generated {result['bands']}-band {result['rows']}x{result['cols']} "
          f"cube with {result['n_classes']} classes")
    _print_files(result)


def _cmd_serve(args):
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port)


def _add_cube_gt(parser):
    parser.add_argument("cube", help="cube raster path (sidecar: <path>.dsc)")
    parser.add_argument("gt", help="ground-truth raster path")
    parser.add_argument("--cube-descriptor", default=None)
    parser.add_argument("--gt-descriptor", default=None)
    parser.add_argument("--classes", type=_positive_int, default=16,
                        help="number of ground-truth classes (default 16)")


def build_parser() -> _Parser:
    parser = _Parser(prog="fanoband",
                     description="hyperspectral band selection service client")
    parser.add_argument("--url", default=None,
                        help="service base URL; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank bands by MI with the ground truth")
    _add_cube_gt(p)
    p.add_argument("--bins", type=_positive_int, default=256)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("rank-approx",
                       help="rank bands by MI with a band-average reference")
    p.add_argument("cube")
    p.add_argument("--cube-descriptor", default=None)
    p.add_argument("--range", type=_band_range, required=True,
                   metavar="START:STOP", help="inclusive band range to average")
    p.add_argument("--bins", type=_positive_int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rank_approx)

    p = sub.add_parser("select", help="wrapper band selection (Fano score)")
    _add_cube_gt(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--max-bands", type=_positive_int, required=True)
    p.add_argument("--bins", type=_positive_int, default=256)
    p.add_argument("--classifier", default="centroid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=_fraction, default=0.5)
    p.add_argument("--initial-pe", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("sweep", help="selection sweep over thresholds")
    _add_cube_gt(p)
    p.add_argument("--thresholds", type=_float_list, required=True)
    p.add_argument("--checkpoints", type=_int_list, required=True)
    p.add_argument("--bins", type=_positive_int, default=256)
    p.add_argument("--classifier", default="centroid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=_fraction, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("render", help="render a class map to PPM")
    p.add_argument("map", help="label raster (ground truth or estimated map)")
    p.add_argument("--map-descriptor", default=None)
    p.add_argument("--second", default=None,
                   help="second map for side-by-side rendering")
    p.add_argument("--second-descriptor", default=None)
    p.add_argument("--palette", default="classic16")
    p.add_argument("--out", required=True, help="output PPM path")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("synth", help="generate a synthetic cube")
    p.add_argument("--rows", type=_positive_int, required=True)
    p.add_argument("--cols", type=_positive_int, required=True)
    p.add_argument("--classes", type=_positive_int, default=8)
    p.add_argument("--informative", type=_positive_int, required=True)
    p.add_argument("--copies", type=int, default=0)
    p.add_argument("--noise-bands", type=int, default=0)
    p.add_argument("--noise-level", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="run the service under uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
