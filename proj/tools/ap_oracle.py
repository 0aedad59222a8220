#!/usr/bin/env python3
# Copyright 2026 The OVC Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Brute-force box AP in exact rational arithmetic.

Reads a fixture directory written by `ovc gen-fixture` (vocab.jsonl,
detections.jsonl, groundtruth.jsonl) and prints per-class AP at every IoU
threshold as exact fractions. With --check, compares against the
expected.json stored in the same directory and exits non-zero on mismatch.
"""

import argparse
import json
import pathlib
import sys
from fractions import Fraction

THRESHOLDS = [Fraction(50 + 5 * i, 100) for i in range(10)]


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def exact_box(values):
    return [Fraction(float(v)) for v in values]


def iou(a, b):
    ix = max(Fraction(0), min(a[0] + a[2], b[0] + b[2]) - max(a[0], b[0]))
    iy = max(Fraction(0), min(a[1] + a[3], b[1] + b[3]) - max(a[1], b[1]))
    inter = ix * iy
    union = a[2] * a[3] + b[2] * b[3] - inter
    return inter / union if union > 0 else Fraction(0)


def ranked_hits(dets, gts, thr):
    # Stable sort by descending score keeps input order among ties.
    order = sorted(range(len(dets)), key=lambda i: -dets[i]["score"])
    taken = [False] * len(gts)
    hits = []
    for i in order:
        d = dets[i]
        best, best_j = None, None
        for j, g in enumerate(gts):
            if taken[j] or g["image"] != d["image"]:
                continue
            v = iou(d["box"], g["box"])
            if v >= thr and (best is None or v > best):
                best, best_j = v, j
        if best_j is not None:
            taken[best_j] = True
        hits.append(best_j is not None)
    return hits


def ap101(hits, num_gt):
    points = []
    tp = 0
    for n, h in enumerate(hits, start=1):
        tp += h
        points.append((Fraction(tp, num_gt), Fraction(tp, n)))
    total = Fraction(0)
    for t in range(101):
        r = Fraction(t, 100)
        eligible = [p for rec, p in points if rec >= r]
        total += max(eligible) if eligible else Fraction(0)
    return total / 101


def evaluate(fixture_dir):
    vocab = read_jsonl(fixture_dir / "vocab.jsonl")
    dets = read_jsonl(fixture_dir / "detections.jsonl")
    gts = read_jsonl(fixture_dir / "groundtruth.jsonl")
    for rec in dets + gts:
        rec["box"] = exact_box(rec["box"])
    per_class = {}
    for entry in vocab:
        cid = entry["id"]
        class_gts = [g for g in gts if g["class"] == cid]
        if not class_gts:
            continue
        class_dets = [d for d in dets if d["class"] == cid]
        per_class[cid] = [ap101(ranked_hits(class_dets, class_gts, t), len(class_gts))
                          for t in THRESHOLDS]
    return vocab, per_class


def mean(values):
    return sum(values, Fraction(0)) / len(values) if values else None


def summary(vocab, per_class):
    buckets = {e["id"]: (e.get("bucket"), bool(e.get("weak", False))) for e in vocab}
    ap = {c: mean(v) for c, v in per_class.items()}
    rare = [ap[c] for c in ap if buckets[c][0] == "rare"]
    return {
        "mAP": mean(list(ap.values())),
        "AP50": mean([v[0] for v in per_class.values()]),
        "AP75": mean([v[5] for v in per_class.values()]),
        "APr": mean(rare),
        "APc": mean([ap[c] for c in ap if buckets[c][0] == "common"]),
        "APf": mean([ap[c] for c in ap if buckets[c][0] == "frequent"]),
        "APr-w": mean([ap[c] for c in ap if buckets[c] == ("rare", True)]),
        "APr-z": mean([ap[c] for c in ap if buckets[c] == ("rare", False)]),
    }


def check(fixture_dir, per_class, totals):
    expected = json.loads((fixture_dir / "expected.json").read_text(encoding="utf-8"))
    problems = []
    if set(expected["per_class"]) != set(per_class):
        problems.append("class sets differ: %s vs %s"
                        % (sorted(expected["per_class"]), sorted(per_class)))
    for cid, values in per_class.items():
        got = expected["per_class"].get(cid, {}).get("per_threshold", [])
        want = [float(v) for v in values]
        if got != want:
            problems.append("%s per-threshold %s, oracle %s" % (cid, got, want))
    for key, value in totals.items():
        got = expected.get(key)
        if value is None or got is None:
            if (value is None) != (got is None):
                problems.append("%s: expected %s, oracle %s" % (key, got, value))
        elif abs(got - float(value)) > 1e-12:
            problems.append("%s: expected %r, oracle %s" % (key, got, value))
    return problems


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("fixtures", nargs="+", type=pathlib.Path)
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()
    failed = False
    for fixture_dir in args.fixtures:
        vocab, per_class = evaluate(fixture_dir)
        totals = summary(vocab, per_class)
        if args.check:
            problems = check(fixture_dir, per_class, totals)
            status = "ok" if not problems else "MISMATCH"
            print("%s: %s" % (fixture_dir.name, status))
            for p in problems:
                print("  " + p)
            failed = failed or bool(problems)
        else:
            print(json.dumps({
                "fixture": fixture_dir.name,
                "per_class": {c: [str(v) for v in vals] for c, vals in per_class.items()},
                "totals": {k: (str(v) if v is not None else None) for k, v in totals.items()},
            }, indent=2))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
