"""Regenerate the 256x256 P6 test images under crates/core/tests/data.

Sources are the CC0 / public-domain samples bundled with scikit-image.
"""
import pathlib

import numpy as np
from PIL import Image
import skimage.data

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "data"


def square(img, size=256):
    h, w = img.shape[:2]
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    crop = Image.fromarray(img[top:top + s, left:left + s])
    return np.asarray(crop.resize((size, size), Image.LANCZOS))


def save_ppm(path, img):
    h, w = img.shape[:2]
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name in ("astronaut", "chelsea", "rocket"):
        img = square(getattr(skimage.data, name)())
        save_ppm(OUT / f"{name}_256.ppm", img)
        print(name, img.shape, img.reshape(-1, 3).mean(axis=0).round(1))


if __name__ == "__main__":
    main()
