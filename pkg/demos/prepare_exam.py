"""Build an exam directory and drive the annotation service against it.

Creates `demo_exam/` with a phantom volume, its ground truth, and an empty
annotation session, then (optionally) exercises the HTTP API in-process:
list exams, draw strokes, segment, and fetch the mask back as run-length
rows. Run with `python3 demos/prepare_exam.py`.

To poke the same exam from a browser or curl instead, run
`vertegrow serve --exams demo_exam --port 8000` afterwards.
"""
import json
from pathlib import Path

from vertegrow import PhantomSpec, auto_seed, generate, save_labels, save_volume
from vertegrow.seeds import save_session
from vertegrow.service import create_app, rle_decode


def build(root: Path) -> str:
    exam_id = "L3"
    spec = PhantomSpec(
        dims=(64, 64, 9), body="ellipsoid",
        params={"center": [32, 32, 4], "radii": [14, 14, 3],
                "edge_sigma": 0.8},
        noise_sigma=10.0, rng_seed=5)
    vol, gt = generate(spec)
    root.mkdir(exist_ok=True)
    save_volume(vol, root / f"{exam_id}.mhd")
    save_labels(gt.astype("int8"), root / f"{exam_id}_gt.mhd")
    save_session(auto_seed(gt, style="sloppy-rect"),
                 root / f"{exam_id}.session.json")
    print(f"wrote {root}/: {exam_id}.mhd + raw, {exam_id}_gt.mhd, "
          f"{exam_id}.session.json")
    return exam_id


def drive(root: Path, exam_id: str):
    from fastapi.testclient import TestClient

    client = TestClient(create_app(root))
    exams = client.get("/exams").json()
    print(f"\nGET /exams -> {json.dumps(exams)}")

    r = client.post(f"/exams/{exam_id}/segment",
                    json={"algorithm": "bgrowth3d", "slice_distance": 0})
    body = r.json()
    print(f"POST /segment -> result {body['result_id']}, "
          f"{body['iterations']} sweeps, metrics {body.get('metrics')}")

    z = 4
    mask = client.get(f"/exams/{exam_id}/mask/{z}").json()
    grid = rle_decode(mask["runs"], tuple(mask["dims"]))
    print(f"GET /mask/{z} -> {len(mask['runs'])} rows of runs, "
          f"{int(grid.sum())} voxels set")


def main():
    root = Path("demo_exam")
    exam_id = build(root)
    try:
        drive(root, exam_id)
    except ImportError:
        print("httpx not installed; skipping the in-process API walkthrough")
    print(f"\nnext: vertegrow serve --exams {root} --port 8000")


if __name__ == "__main__":
    main()
