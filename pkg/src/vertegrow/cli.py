"""Command-line entry point.

Machine-readable JSON goes to stdout; human-readable notes go to stderr, so
pipelines can parse results directly. Exit codes: 0 success, 2 usage error,
3 data error (bad or missing input files, dimension mismatches, missing
seeds), 4 internal error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import experiment, metrics, phantom, seeds, volume
from .engine import ALGORITHMS, EngineConfig, segment
from .errors import DataError
from .volume import crop_to_seeds, uncrop_labels

_ALGO_CHOICE = click.Choice(ALGORITHMS)
_FMT_CHOICE = click.Choice(["mhd", "raw"])


def _fmt_for(path: Path, fmt: str | None) -> str:
    if fmt:
        return "metaimage" if fmt == "mhd" else "raw"
    return "metaimage" if path.suffix == ".mhd" else "raw"


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload))


def _note(message: str) -> None:
    click.echo(message, err=True)


def _parse_distances(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"cannot parse distances {text!r}") from None
    if not values or min(values) < 0:
        raise click.UsageError(f"bad distances {text!r}")
    return values


def _load_seed_input(path: Path, dims) -> tuple[np.ndarray, seeds.AnnotationSession | None]:
    """A seeds argument is either a session JSON or a label volume."""
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise DataError(f"no such file: {path}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed JSON {path}: {exc}") from None
        if "strokes" in data:
            session = seeds.session_from_dict(data)
            return seeds.rasterize(session, dims), session
    return volume.load_labels(path), None


@click.group()
def cli():
    """Seeded cellular-automaton segmentation tools."""


@cli.command("segment")
@click.argument("volume_path")
@click.argument("seeds_path")
@click.option("--algorithm", type=_ALGO_CHOICE, default="bgrowth3d",
              show_default=True)
@click.option("--max-iters", type=int, default=50, show_default=True)
@click.option("--neighborhood", type=int, default=None,
              help="26 or 6 for 3D algorithms, 8 or 4 for bgrowth2d.")
@click.option("--out", "out_path", required=True, help="Label mask output.")
@click.option("--format", "fmt", type=_FMT_CHOICE, default=None,
              help="Output format; inferred from --out extension otherwise.")
@click.option("--gt", "gt_path", default=None,
              help="Optional ground-truth labels; adds metrics to the summary.")
def cmd_segment(volume_path, seeds_path, algorithm, max_iters, neighborhood,
                out_path, fmt, gt_path):
    """Grow seeds through a volume and write the resulting label mask.

    SEEDS_PATH is either a label volume or a session JSON with strokes.
    """
    vol = volume.load_volume(volume_path)
    cfg = EngineConfig(algorithm=algorithm, max_iterations=max_iters,
                       neighborhood=neighborhood)
    labels, session = _load_seed_input(Path(seeds_path), vol.dims)
    if labels.shape != vol.shape:
        raise DataError(f"seed dims {labels.shape} do not match volume "
                        f"{vol.shape}")
    sub_vol, sub_labels, region = crop_to_seeds(vol, labels)
    result = segment(sub_vol, sub_labels, cfg)
    full = uncrop_labels(result.labels, region, vol.shape)

    out = Path(out_path)
    volume.save_labels(volume.narrow_labels(full, np.int8), out,
                       fmt=_fmt_for(out, fmt), spacing=vol.spacing)
    summary = {"iterations": result.iterations_run,
               "converged": result.converged,
               "elapsed_s": round(result.elapsed, 6)}
    if gt_path:
        gt = volume.load_labels(gt_path) > 0
        rep = metrics.report(full == 1, gt, result.elapsed)
        summary["metrics"] = {"dsc": rep.dsc, "jac": rep.jac, "hd": rep.hd}
    out.with_suffix(".summary.json").write_text(json.dumps(summary) + "\n")
    _emit(summary)
    _note(f"wrote {out} ({result.iterations_run} iterations, "
          f"converged={result.converged})")


@cli.command("sweep")
@click.argument("volume_path")
@click.argument("session_path")
@click.argument("gt_path")
@click.option("--distances", default="0..7", show_default=True,
              help="Range a..b or comma list.")
@click.option("--threshold", type=float, default=-1.0, show_default=True)
@click.option("--max-iters", type=int, default=50, show_default=True)
@click.option("--out", "out_csv", required=True, help="CSV output path.")
def cmd_sweep(volume_path, session_path, gt_path, distances, threshold,
              max_iters, out_csv):
    """Sweep slice distances for both 3D algorithms and pick the best one."""
    vol = volume.load_volume(volume_path)
    session = seeds.load_session(session_path)
    gt = volume.load_labels(gt_path) > 0
    dists = _parse_distances(distances)

    series_by_algo = {}
    for algorithm in ("bgrowth3d", "growcut"):
        cfg = EngineConfig(algorithm=algorithm, max_iterations=max_iters)
        series_by_algo[algorithm] = experiment.run_sweep(
            vol, session, dists, cfg, gt)

    with open(out_csv, "w") as fh:
        fh.write("algorithm,slice_distance,annotation_s,runtime_s,dsc,jac,hd\n")
        for algorithm in ("bgrowth3d", "growcut"):
            for p in series_by_algo[algorithm].points:
                fh.write(f"{algorithm},{p.slice_distance},"
                         f"{p.annotation_seconds:.6f},{p.runtime_seconds:.6f},"
                         f"{p.dsc:.6f},{p.jac:.6f},{p.hd:.6f}\n")

    selected = experiment.select_distance(series_by_algo["bgrowth3d"],
                                          threshold)
    _emit({"selected_distance": selected, "threshold": threshold,
           "csv": str(out_csv)})
    _note(f"selected slice distance {selected} (threshold {threshold})")


@cli.command("metrics")
@click.argument("mask_a")
@click.argument("mask_b")
def cmd_metrics(mask_a, mask_b):
    """Print dice, jaccard and hausdorff between two mask volumes."""
    a = volume.load_labels(mask_a) > 0
    b = volume.load_labels(mask_b) > 0
    _emit({"dsc": metrics.dice(a, b), "jac": metrics.jaccard(a, b),
           "hd": metrics.hausdorff(a, b)})


@cli.command("phantom")
@click.argument("spec_path")
@click.option("--out-volume", required=True)
@click.option("--out-gt", default=None)
@click.option("--out-session", default=None)
@click.option("--seed-style", type=click.Choice(phantom.SEED_STYLES),
              default="skeleton-line", show_default=True)
@click.option("--seed", type=int, default=None, envvar="VERTEGROW_SEED",
              help="Override the spec's rng seed (env: VERTEGROW_SEED).")
@click.option("--format", "fmt", type=_FMT_CHOICE, default=None)
def cmd_phantom(spec_path, out_volume, out_gt, out_session, seed_style, seed,
                fmt):
    """Generate a synthetic volume (and optionally gt + auto seeds)."""
    spec = phantom.load_spec(spec_path)
    if seed is not None:
        spec.rng_seed = seed
    vol, gt = phantom.generate(spec)
    out_vol = Path(out_volume)
    volume.save_volume(vol, out_vol, fmt=_fmt_for(out_vol, fmt))
    payload = {"dims": list(vol.dims), "body": spec.body,
               "rng_seed": spec.rng_seed, "gt_voxels": int(gt.sum()),
               "volume": str(out_vol)}
    if out_gt:
        gt_path = Path(out_gt)
        volume.save_labels(gt.astype(np.int8), gt_path,
                           fmt=_fmt_for(gt_path, fmt))
        payload["gt"] = str(gt_path)
    if out_session:
        session = phantom.auto_seed(gt, style=seed_style)
        seeds.save_session(session, out_session)
        payload["session"] = str(out_session)
    _emit(payload)


@cli.command("serve")
@click.option("--exams", "exam_dir", required=True,
              help="Directory of exam volumes (see the service docs).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(exam_dir, host, port):
    """Run the annotation backend over the exams in a directory."""
    import uvicorn

    from .service import create_app

    app = create_app(exam_dir)
    _note(f"serving exams from {exam_dir} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        _note(f"usage error: {exc.format_message()}")
        return 2
    except click.ClickException as exc:
        _note(exc.format_message())
        return 2
    except click.exceptions.Abort:
        return 130
    except DataError as exc:
        _note(f"data error: {exc}")
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        _note(f"internal error: {exc.__class__.__name__}: {exc}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
