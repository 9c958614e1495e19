"""Rebuild the sample IDX files in this directory.

Source: the `mnist` npm package (MIT, Juan Cazala), which bundles 10k MNIST
digits as JSON arrays of pixel intensities scaled to [0, 1] with three
decimals. Pixels are mapped back to bytes with round(v * 255).

    npm pack mnist && tar xzf mnist-*.tgz
    python3 build_samples.py package/src/digits
"""

import gzip
import json
import random
import struct
import sys
from pathlib import Path


def load(digits_dir, digit):
    data = json.loads((Path(digits_dir) / f"{digit}.json").read_text())["data"]
    pixels = [min(255, max(0, round(v * 255))) for v in data]
    return [bytes(pixels[i : i + 784]) for i in range(0, len(pixels), 784)]


def write(prefix, items):
    images = struct.pack(">IIII", 0x803, len(items), 28, 28) + b"".join(i for i, _ in items)
    labels = struct.pack(">II", 0x801, len(items)) + bytes(l for _, l in items)
    out = Path(__file__).parent
    with gzip.GzipFile(out / f"{prefix}-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(images)
    with gzip.GzipFile(out / f"{prefix}-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(labels)


def main(digits_dir):
    by_digit = {d: load(digits_dir, d) for d in range(10)}
    train, test = [], []
    for d, imgs in by_digit.items():
        if d in (3, 6):
            train += [(img, d) for img in imgs[:400]]
            test += [(img, d) for img in imgs[600:750]]
        else:
            train += [(img, d) for img in imgs[:10]]
            test += [(img, d) for img in imgs[600:606]]
    rng = random.Random(2020)
    rng.shuffle(train)
    rng.shuffle(test)
    write("train", train)
    write("t10k", test)


if __name__ == "__main__":
    main(sys.argv[1])
