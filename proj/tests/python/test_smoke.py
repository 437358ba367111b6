from pathlib import Path

import numpy as np
import pytest

import artup

CORPUS = Path(__file__).resolve().parents[2] / "data" / "corpus"


def test_encode_render_scan_round_trip():
    m = artup.encode("HELLO", ec="H")
    assert m.shape == (21, 21)
    assert artup.decode(m)["payload"] == b"HELLO"
    img = artup.render(m, module_px=8)
    assert img.shape == (29 * 8, 29 * 8)
    report = artup.scan(img, truth=m)
    assert report["outcome"] == "decoded"
    assert report["payload"] == b"HELLO"
    assert report["errors"] == 0


def test_binarize_uniform_is_light():
    out = artup.hybrid_binarize(np.full((48, 64), 90, np.uint8))
    assert out.shape == (48, 64)
    assert out.min() == 1


def test_beautify_scans_back():
    from PIL import Image

    image = np.asarray(Image.open(CORPUS / "chelsea.png").convert("RGB"))
    res = artup.beautify(image, "https://example.org/artup", eta=0.9, size=400, verify=True)
    qc = res["qc"]
    assert qc.ndim == 3 and qc.shape[2] == 3
    assert res["converged"]
    assert artup.scan(qc)["payload"] == b"https://example.org/artup"
    rotated = artup.perturb(qc, "z", 90)
    assert artup.scan(rotated)["outcome"] == "decoded"


def test_errors_are_raised():
    with pytest.raises(artup.Error):
        artup.encode("x" * 400)
    with pytest.raises(ValueError):
        artup.scan(np.zeros((4, 4, 2), np.uint8))
    assert artup.scan(np.full((100, 100), 255, np.uint8))["outcome"] == "detect_failed"
