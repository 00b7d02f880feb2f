"""Command-line interface: extract, fit, angles, eval, serve.

All outputs are JSON with sorted keys so identical inputs produce
byte-identical files. Exit codes: 0 success, 2 unreadable/missing input,
3 invalid geometry or configuration, 4 empty evaluation intersection.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bspline import BSplineCurve, BSplineError
from .cobb import AngleTriple, CobbError, EvalRecord, mae, smape
from .fitting import FitError, fit_clamped_bspline
from .mask import ContourError, MaskError, load_mask
from .pipeline import (
    PipelineConfig,
    analyze_curve,
    analyze_mask,
    analyze_points,
    centerline_from_mask,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IO = 2
EXIT_INVALID = 3
EXIT_EMPTY_EVAL = 4


class EmptyEvalError(ValueError):
    """No matching prediction/ground-truth file pairs."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinecurve",
        description="Spinal curvature estimation from binary spine masks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file mirroring PipelineConfig")
        p.add_argument("--controls", type=int, help="number of control points")
        p.add_argument("--degree", type=int, help="curve degree")
        p.add_argument("--samples", type=int, help="equal-arc slope sample count")
        p.add_argument("--resamples", type=int, help="uniform resample count")
        p.add_argument("--epsilon", type=float, help="slope parameter offset")
        p.add_argument("--alpha-mt", type=float, help="MT blend weight")
        p.add_argument("--alpha-pt", type=float, help="PT blend weight")
        p.add_argument("--alpha-tl", type=float, help="TL blend weight")
        p.add_argument("--out", help="output path (default: stdout)")

    p_extract = sub.add_parser("extract", help="mask image -> centerline JSON")
    p_extract.add_argument("mask", help="PNG/PGM mask image")
    add_common(p_extract)

    p_fit = sub.add_parser("fit", help="centerline JSON or mask -> curve JSON")
    p_fit.add_argument("input", help="centerline JSON or mask image")
    add_common(p_fit)

    p_angles = sub.add_parser(
        "angles", help="curve/centerline JSON or mask -> angles JSON"
    )
    p_angles.add_argument("input", help="curve JSON, centerline JSON, or mask image")
    p_angles.add_argument(
        "--regression", help="JSON with externally regressed mt/pt/tl angles"
    )
    add_common(p_angles)

    p_eval = sub.add_parser("eval", help="compare angle JSON directories")
    p_eval.add_argument("pred_dir", help="directory of predicted angle JSONs")
    p_eval.add_argument("gt_dir", help="directory of ground-truth angle JSONs")
    add_common(p_eval)

    p_serve = sub.add_parser("serve", help="run the HTTP annotation service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui-dir", help="static UI directory to mount at /ui")
    add_common(p_serve)
    return parser


def load_config(args) -> PipelineConfig:
    """Resolve the pipeline config: flags > config file > defaults."""
    config = PipelineConfig()
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            config = PipelineConfig.from_dict(json.load(fh), base=config)
    overrides: dict = {}
    fit_overrides: dict = {}
    if getattr(args, "controls", None) is not None:
        fit_overrides["n_control"] = args.controls
    if getattr(args, "degree", None) is not None:
        fit_overrides["degree"] = args.degree
    if fit_overrides:
        overrides["fit"] = fit_overrides
    if getattr(args, "samples", None) is not None:
        overrides["sample_count"] = args.samples
    if getattr(args, "resamples", None) is not None:
        overrides["resample_count"] = args.resamples
    if getattr(args, "epsilon", None) is not None:
        overrides["epsilon"] = args.epsilon
    alpha = config.alpha.to_dict()
    alpha_set = False
    for key in ("mt", "pt", "tl"):
        value = getattr(args, f"alpha_{key}", None)
        if value is not None:
            alpha[key] = value
            alpha_set = True
    if alpha_set:
        overrides["alpha"] = alpha
    if overrides:
        config = PipelineConfig.from_dict(overrides, base=config)
    return config


def _write_payload(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_points_or_mask(path: str, config: PipelineConfig):
    """A .json input is a centerline; anything else is a mask image."""
    if path.endswith(".json"):
        data = _load_json(path)
        if "points" not in data:
            raise FitError(f"{path}: centerline JSON must contain a 'points' list")
        return data["points"]
    return centerline_from_mask(load_mask(path), config)


def cmd_extract(args) -> dict:
    config = load_config(args)
    points = centerline_from_mask(load_mask(args.mask), config)
    return {"points": [[float(x), float(y)] for x, y in points]}


def cmd_fit(args) -> dict:
    config = load_config(args)
    points = _load_points_or_mask(args.input, config)
    return fit_clamped_bspline(points, config.fit).to_dict()


def cmd_angles(args) -> dict:
    config = load_config(args)
    regression = None
    if args.regression:
        regression = AngleTriple.from_dict(_load_json(args.regression))
    if args.input.endswith(".json"):
        data = _load_json(args.input)
        if "control_points" in data:
            analysis = analyze_curve(BSplineCurve.from_dict(data), config, regression)
        elif "points" in data:
            analysis = analyze_points(data["points"], config, regression)
        else:
            raise FitError(
                f"{args.input}: JSON input must be a curve or a centerline"
            )
    else:
        analysis = analyze_mask(load_mask(args.input), config, regression)
    return analysis.angles.to_dict()


def cmd_eval(args) -> dict:
    pred_dir, gt_dir = Path(args.pred_dir), Path(args.gt_dir)
    for d in (pred_dir, gt_dir):
        if not d.is_dir():
            raise FileNotFoundError(str(d))
    pred_names = {p.name for p in pred_dir.glob("*.json")}
    gt_names = {p.name for p in gt_dir.glob("*.json")}
    matched = sorted(pred_names & gt_names)
    unmatched_pred = sorted(pred_names - gt_names)
    unmatched_gt = sorted(gt_names - pred_names)
    for name in unmatched_pred + unmatched_gt:
        print(f"warning: {name} present on one side only; excluded", file=sys.stderr)
    if not matched:
        raise EmptyEvalError("no matching prediction/ground-truth filename pairs")
    records = []
    for name in matched:
        predicted = AngleTriple.from_dict(_load_json(str(pred_dir / name)))
        ground_truth = AngleTriple.from_dict(_load_json(str(gt_dir / name)))
        records.append(EvalRecord(predicted=predicted, ground_truth=ground_truth))
    return {
        "count": len(records),
        "mae": {key: mae(records, key) for key in ("mt", "pt", "tl")},
        "smape": smape(records),
        "unmatched_pred": unmatched_pred,
        "unmatched_gt": unmatched_gt,
    }


def cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app, resolve_ui_dir

    config = load_config(args)
    app = create_app(config, ui_dir=resolve_ui_dir(args.ui_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "serve":
            cmd_serve(args)
            return EXIT_OK
        handler = {
            "extract": cmd_extract,
            "fit": cmd_fit,
            "angles": cmd_angles,
            "eval": cmd_eval,
        }[args.command]
        payload = handler(args)
    except FileNotFoundError as exc:
        name = getattr(exc, "filename", None) or str(exc)
        print(f"error: file not found: {name}", file=sys.stderr)
        return EXIT_IO
    except (IsADirectoryError, PermissionError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_IO
    except EmptyEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_EVAL
    except (
        MaskError,
        ContourError,
        FitError,
        CobbError,
        BSplineError,
        ValueError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write_payload(payload, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
