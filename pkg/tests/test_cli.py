import json
import subprocess
import sys

import numpy as np
import pytest

from gaussimage.cli import main
from gaussimage.modelfile import load_model
from gaussimage.raster import read_image, sample_face, save_surface


@pytest.fixture
def small_image(tmp_path):
    path = tmp_path / "face.png"
    save_surface(path, sample_face().data[30:62, 40:72])
    return path


def run(*argv):
    return main([str(a) for a in argv])


def quick_fit(image, out, *extra):
    return run("fit", image, "--elements", 6, "--iters", 40, "--out", out, *extra)


def test_fit_writes_model_and_trace(small_image, tmp_path, capsys):
    out, trace = tmp_path / "m.json", tmp_path / "t.csv"
    assert quick_fit(small_image, out, "--trace", trace) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("mse=") and "termination=" in line
    m = load_model(out)
    assert m.n_elements == 6 and m.source_dims == (32, 32)
    assert m.provenance["fit_config"]["max_iters"] == 40
    rows = trace.read_text().splitlines()
    assert rows[0] == "iteration,l2,pae,total" and len(rows) == 42


def test_fit_is_deterministic(small_image, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert quick_fit(small_image, a, "--seed", 3) == 0
    assert quick_fit(small_image, b, "--seed", 3) == 0
    assert a.read_bytes() == b.read_bytes()
    ra, rb = tmp_path / "a.png", tmp_path / "b.png"
    run("render", a, "--out", ra)
    run("render", b, "--out", rb)
    assert ra.read_bytes() == rb.read_bytes()


def test_render_sizes(small_image, tmp_path):
    model = tmp_path / "m.json"
    quick_fit(small_image, model)
    for size in (32, 128):
        out = tmp_path / f"r{size}.pgm"
        assert run("render", model, "--width", size, "--height", size, "--out", out) == 0
        pixels, depth = read_image(out)
        assert pixels.shape == (size, size) and depth == 8
    assert run("render", model, "--out", tmp_path / "default.png") == 0
    assert read_image(tmp_path / "default.png")[0].shape == (32, 32)


def test_scale_one_keeps_elements(small_image, tmp_path):
    model, out = tmp_path / "m.json", tmp_path / "s.json"
    quick_fit(small_image, model)
    assert run("transform", model, "--scale", 1, "--out", out) == 0
    assert json.loads(out.read_text())["elements"] == json.loads(model.read_text())["elements"]


def test_transform_translate_and_rotate(small_image, tmp_path):
    model = tmp_path / "m.json"
    quick_fit(small_image, model)
    assert run("transform", model, "--translate", 0, 0.2, "--out", tmp_path / "t.json") == 0
    assert run("transform", model, "--rotate", 90, "--center", 0.5, 0.5, "--out", tmp_path / "r.json") == 0
    a = load_model(model).arrays()[1]
    b = load_model(tmp_path / "t.json").arrays()[1]
    np.testing.assert_allclose(b - a, np.tile([0, 0.2], (len(a), 1)), atol=1e-15)


def test_corrupt_zero_sigma_reproduces_input(small_image, tmp_path):
    out = tmp_path / "n.png"
    assert run("corrupt", small_image, "--mode", "awgn", "--sigma", 0, "--out", out) == 0
    np.testing.assert_array_equal(read_image(out)[0], read_image(small_image)[0])


def test_corrupt_occlusion_mask_feeds_fit(small_image, tmp_path, capsys):
    noisy, mask = tmp_path / "o.png", tmp_path / "mask.png"
    assert run("corrupt", small_image, "--mode", "occlude", "--patch", 8, 8, "--seed", 2, "--out", noisy, "--mask-out", mask) == 0
    assert "affected=64" in capsys.readouterr().out
    m = read_image(mask)[0]
    assert (m == 0).sum() == 64 and (m == 255).sum() == 32 * 32 - 64
    assert quick_fit(noisy, tmp_path / "m.json", "--mask", mask) == 0


def test_eval_output(small_image, capsys):
    assert run("eval", small_image, small_image) == 0
    assert capsys.readouterr().out.strip() == "mse=0.0 pae=0.0 psnr=inf"


def test_salt_pepper_fit_with_extremes_excluded(small_image, tmp_path):
    noisy = tmp_path / "sp.png"
    assert run("corrupt", small_image, "--mode", "saltpepper", "--ratio", 0.25, "--out", noisy) == 0
    assert quick_fit(noisy, tmp_path / "m.json", "--exclude-extremes") == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["fit"],
        ["fit", "x.png", "--elements", "0", "--out", "m.json"],
        ["fit", "x.png", "--out", "m.json", "--lr", "-1"],
        ["render"],
        ["transform", "m.json", "--scale", "2", "--rotate", "3", "--out", "o.json"],
        ["nonsense"],
    ],
)
def test_bad_flags_exit_1(argv, small_image, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    argv = [str(small_image) if a == "x.png" else a for a in argv]
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_scale_zero_exit_1(small_image, tmp_path):
    model = tmp_path / "m.json"
    quick_fit(small_image, model)
    assert run("transform", model, "--scale", 0, "--out", tmp_path / "z.json") == 1


def test_bad_input_exit_2(small_image, tmp_path):
    bogus = tmp_path / "bogus.png"
    bogus.write_text("not an image")
    assert run("fit", tmp_path / "missing.png", "--out", tmp_path / "m.json") == 2
    assert run("fit", bogus, "--out", tmp_path / "m.json") == 2
    assert run("render", bogus, "--out", tmp_path / "r.png") == 2
    other = tmp_path / "other.png"
    save_surface(other, np.zeros((10, 10)))
    assert run("eval", small_image, other) == 2
    assert run("fit", small_image, "--mask", other, "--out", tmp_path / "m.json") == 2


def test_empty_mask_exit_3(small_image, tmp_path):
    blank = tmp_path / "blank.png"
    save_surface(blank, np.zeros((32, 32)))
    assert quick_fit(small_image, tmp_path / "m.json", "--mask", blank) == 3


def test_experiment_sweep(small_image, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = run("experiment", "--suite", "elements-sweep", "--input", small_image.parent, "--out", out, "--iters", 5)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "suite,image,setting,n_elements,mse_input,mse_fit,pae_fit,psnr_fit,iterations"
    assert [l.split(",")[3] for l in lines[1:]] == ["40", "50", "60", "70", "80", "90"]


def test_experiment_empty_directory_exit_3(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run("experiment", "--suite", "restore", "--input", tmp_path / "empty", "--out", tmp_path / "r.csv") == 3


def test_console_script(small_image):
    proc = subprocess.run([sys.executable, "-m", "gaussimage.cli", "eval", str(small_image), str(small_image)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("mse=0.0")


def test_single_element_on_constant_image(tmp_path, capsys):
    flat = tmp_path / "flat.pgm"
    save_surface(flat, np.full((24, 24), 128 / 255))
    assert run("fit", flat, "--elements", 1, "--out", tmp_path / "m.json") == 0
    mse = float(capsys.readouterr().out.split()[0].split("=")[1])
    assert mse < 1e-4


def test_zero_weight_model_renders_black(tmp_path):
    model = tmp_path / "zero.json"
    model.write_text(json.dumps({"format_version": 1, "n_elements": 1,
                                 "elements": [{"w": 0.0, "mu": [0.5, 0.5], "A": [[4.0, 0.0], [0.0, 4.0]]}]}))
    assert run("render", model, "--width", 16, "--height", 8, "--out", tmp_path / "z.png") == 0
    pixels = read_image(tmp_path / "z.png")[0]
    assert pixels.shape == (8, 16) and not pixels.any()


def test_eval_awgn_matches_noise_power(tmp_path, capsys):
    flat, noisy = tmp_path / "flat.png", tmp_path / "noisy.png"
    save_surface(flat, np.full((200, 200), 0.5))
    run("corrupt", flat, "--mode", "awgn", "--sigma", 25, "--seed", 4, "--out", noisy)
    capsys.readouterr()
    run("eval", flat, noisy)
    mse = float(capsys.readouterr().out.split()[0].split("=")[1])
    assert mse == pytest.approx((25 / 255) ** 2, rel=0.1)
