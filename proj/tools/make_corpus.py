"""Writes the bundled test corpus: ten scikit-image sample images, center-cropped and
resized to 512x512 RGB PNGs."""

import argparse
from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

IMAGES = [
    "astronaut",
    "camera",
    "chelsea",
    "coffee",
    "coins",
    "hubble_deep_field",
    "rocket",
    "retina",
    "logo",
    "immunohistochemistry",
]


def square(img: np.ndarray, side: int) -> Image.Image:
    if img.ndim == 2:
        img = np.stack([img] * 3, axis=-1)
    if img.shape[2] == 4:
        rgb = img[..., :3].astype(np.float64)
        alpha = img[..., 3:4].astype(np.float64) / 255.0
        img = (rgb * alpha + 255.0 * (1.0 - alpha)).round().astype(np.uint8)
    h, w = img.shape[:2]
    s = min(h, w)
    y0, x0 = (h - s) // 2, (w - s) // 2
    crop = Image.fromarray(np.ascontiguousarray(img[y0 : y0 + s, x0 : x0 + s]))
    return crop.resize((side, side), Image.BICUBIC)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "corpus")
    parser.add_argument("--size", type=int, default=512)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in IMAGES:
        square(getattr(data, name)(), args.size).save(args.out / f"{name}.png", optimize=False)
        print(name)


if __name__ == "__main__":
    main()
