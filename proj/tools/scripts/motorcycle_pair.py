#!/usr/bin/env python3
"""Write scikit-image's Motorcycle stereo pair in the Middlebury 2014 layout.

Produces im0.png, im1.png and disp0.pfm in the target directory.
"""
import argparse
import pathlib
import sys

import numpy as np
from PIL import Image
from skimage import data


def write_pfm(path, disparity):
    rows = np.flipud(disparity.astype("<f4"))
    with open(path, "wb") as f:
        f.write(b"Pf\n%d %d\n-1.0\n" % (disparity.shape[1], disparity.shape[0]))
        f.write(rows.tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=pathlib.Path)
    args = parser.parse_args()
    left, right, disp = data.stereo_motorcycle()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    Image.fromarray(left).save(args.out_dir / "im0.png")
    Image.fromarray(right).save(args.out_dir / "im1.png")
    write_pfm(args.out_dir / "disp0.pfm", np.where(np.isfinite(disp), disp, np.inf))
    print(f"wrote {args.out_dir} ({left.shape[1]}x{left.shape[0]})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
