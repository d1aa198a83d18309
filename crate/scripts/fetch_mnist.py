#!/usr/bin/env python3
"""Write MNIST as IDX files under data/mnist/.

Uses the official IDX archives when they are reachable. Otherwise falls back
to the `mnist` npm package, which bundles the 10,000-image MNIST test set as
per-digit JSON (pixel / 255, rounded to 3 decimals); round(v * 255) recovers
the original bytes exactly. The fallback writes t10k-* files only.
"""

import argparse
import gzip
import json
import struct
import subprocess
import sys
import tarfile
import tempfile
import urllib.request
from pathlib import Path

MIRRORS = [
    "https://storage.googleapis.com/cvdf-datasets/mnist/",
    "https://ossci-datasets.s3.amazonaws.com/mnist/",
]
FILES = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
]


def try_official(out: Path) -> bool:
    for base in MIRRORS:
        try:
            for name in FILES:
                with urllib.request.urlopen(base + name + ".gz", timeout=20) as r:
                    (out / name).write_bytes(gzip.decompress(r.read()))
            return True
        except OSError as e:
            print(f"{base}: {e}", file=sys.stderr)
    return False


def write_idx(out: Path, prefix: str, images: list, labels: list) -> None:
    n = len(labels)
    with open(out / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28))
        for img in images:
            f.write(bytes(img))
    with open(out / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, n))
        f.write(bytes(labels))


def from_npm(out: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=tmp, check=True, capture_output=True)
        tgz = next(Path(tmp).glob("mnist-*.tgz"))
        with tarfile.open(tgz) as t:
            t.extractall(tmp, filter="data")
        digits = Path(tmp) / "package" / "src" / "digits"
        per_digit = []
        for d in range(10):
            flat = json.loads((digits / f"{d}.json").read_text())["data"]
            assert len(flat) % 784 == 0
            imgs = [
                [round(v * 255) for v in flat[i : i + 784]]
                for i in range(0, len(flat), 784)
            ]
            per_digit.append(imgs)
    # interleave digits so the file is not sorted by label
    images, labels = [], []
    k = 0
    while any(k < len(p) for p in per_digit):
        for d, p in enumerate(per_digit):
            if k < len(p):
                images.append(p[k])
                labels.append(d)
        k += 1
    write_idx(out, "t10k", images, labels)
    print(f"wrote {len(labels)} test-set images; counts:",
          [len(p) for p in per_digit])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data" / "mnist", type=Path)
    ap.add_argument("--offline", action="store_true", help="skip the official mirrors")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    if not args.offline and try_official(args.out):
        print(f"official IDX files in {args.out}")
        return
    from_npm(args.out)


if __name__ == "__main__":
    main()
