#!/usr/bin/env python3
"""Build a predictions JSONL for a manifest using a toy predictor.

Modes:
  gt        always return the caption's ground-truth box (pure approximator)
  monotone  IoU increases strictly with the sample's recorded similarity
  noisy     gt box jittered by a seeded random offset
"""

import argparse
import json

import numpy as np

from cfground.corpus import load_captions
from cfground.generator import read_manifest


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--manifest", required=True)
    ap.add_argument("--corpus", required=True)
    ap.add_argument("--mode", choices=("gt", "monotone", "noisy"), default="gt")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    manifest = read_manifest(args.manifest)
    captions = {r.caption_id: r for r in load_captions(args.corpus)}
    rng = np.random.Generator(np.random.PCG64(args.seed))

    with open(args.out, "w", encoding="utf-8") as fh:
        for s in manifest.samples:
            gt = captions[s.caption_id].gt_box
            if args.mode == "gt" or s.kind == "original":
                box = [gt.x_min, gt.y_min, gt.x_max, gt.y_max]
            elif args.mode == "monotone":
                fraction = 0.55 + 0.4 * (s.similarity + 1.0) / 2.0
                box = [gt.x_min, gt.y_min, gt.x_min + (gt.x_max - gt.x_min) * fraction, gt.y_max]
            else:
                dx = float(rng.uniform(0, 8))
                dy = float(rng.uniform(0, 8))
                box = [gt.x_min + dx, gt.y_min + dy, gt.x_max + dx, gt.y_max + dy]
            fh.write(json.dumps({"sample_id": s.sample_id, "bbox": box}) + "\n")
    print(f"wrote predictions for {len(manifest.samples)} samples to {args.out}")


if __name__ == "__main__":
    main()
