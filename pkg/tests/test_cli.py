import json

import numpy as np
import pytest

from paramism.cli import main
from paramism.evaluate import (
    align,
    bin_mask,
    energy_fraction,
    estimate_delay,
    evaluate,
    localization_overlap,
)
from paramism.presets import PRESETS, get_preset, synthesize_scene
from paramism.reference import render_reference
from paramism.scene import ObjectMetadataFrame as MD
from paramism.scene import write_metadata_csv
from paramism.wavio import read_wav, write_wav


@pytest.fixture
def scene_files(tmp_path):
    x, md = synthesize_scene(PRESETS["i2"], 0.4, seed=3)
    wavs, csvs = [], []
    for i in range(4):
        wavs.append(str(tmp_path / f"o{i}.wav"))
        csvs.append(str(tmp_path / f"o{i}.csv"))
        write_wav(wavs[-1], x[i:i + 1])
        write_metadata_csv(csvs[-1], md[i])
    return tmp_path, wavs, csvs


def test_presets_geometry():
    assert [(o.azimuth_start, o.elevation) for o in PRESETS["i2"].objects] == [
        (60, 0), (30, 0), (-30, 0), (-60, 0)]
    assert len(PRESETS) == 12
    moving = [name for name, p in PRESETS.items() if any(o.moving for o in p.objects)]
    assert moving == ["i3", "i10"]
    track = PRESETS["i3"].metadata(50)[2]
    assert track[0].azimuth_deg == -30 and track[-1].azimuth_deg == -150
    with pytest.raises(ValueError):
        get_preset("i13")


def test_wav_round_trip(tmp_path, rng):
    x = rng.uniform(-0.9, 0.9, (3, 1000))
    for bits, tol in ((24, 2**-22), (16, 2**-14)):
        write_wav(tmp_path / "a.wav", x, bits=bits)
        rate, y = read_wav(tmp_path / "a.wav")
        assert rate == 48000 and y.shape == x.shape
        assert np.max(np.abs(x - y)) <= tol


def test_reference_energy_preserved(rng):
    x = rng.standard_normal((3, 960 * 5))
    md = [[MD(a, e)] for a, e in ((20, 10), (-100, 0), (170, 40))]
    r = render_reference(x, md, "7_1_4")
    assert abs(10 * np.log10(np.sum(r**2) / np.sum(x**2))) < 0.01
    assert not np.any(render_reference(np.zeros((3, 960)), md, "5_1"))


def test_reference_object_at_speaker(rng):
    x = np.zeros((2, 960 * 2))
    x[0] = rng.standard_normal(1920)
    r = render_reference(x, [[MD(110, 0)], [MD(0, 0)]], "5_1")
    assert np.sum(r[4] ** 2) == pytest.approx(np.sum(r**2))


def test_evaluate_identities(rng):
    x = rng.standard_normal((6, 48000))
    rep = evaluate(x, x)
    assert rep.broadband_error_db == 0.0 and rep.localization == pytest.approx(1.0)
    assert np.allclose(rep.band_error_db, 0.0)
    assert evaluate(0.5 * x, x).broadband_error_db == pytest.approx(-6.0206, abs=1e-4)
    with pytest.raises(ValueError, match="layout mismatch"):
        evaluate(x[:5], x)


def test_delay_alignment(rng):
    x = rng.standard_normal((2, 20000))
    d = np.concatenate([np.zeros((2, 123)), x], axis=1)
    assert estimate_delay(d, x) == 123
    a, b, lag = align(d, x)
    assert np.allclose(a, b)


def test_localization_overlap_range(rng):
    a, b = rng.random((5, 11)), rng.random((5, 11))
    ov = localization_overlap(a, b)
    assert np.all((ov >= 0) & (ov <= 1))
    assert np.allclose(localization_overlap(a, a), 1.0)


def test_energy_fraction_band(rng):
    x = np.zeros((3, 960 * 4))
    x[1] = np.cos(2 * np.pi * 1000 * np.arange(3840) / 48000)
    assert energy_fraction(x, 1, bin_mask(600, 1400)) == pytest.approx(1.0)


def test_randomized_scene_report_is_finite():
    x, md = synthesize_scene(PRESETS["i8"], 1.0, seed=9)
    from paramism.codec import decode_frames, encode_signals
    y = decode_frames(encode_signals(x, md), "5_1_4")
    rep = evaluate(y, render_reference(x, md, "5_1_4"))
    assert np.all(np.isfinite(rep.band_error_db))
    assert 0 <= rep.localization <= 1


def test_cli_pipeline(scene_files, capsys):
    d, wavs, csvs = scene_files
    assert main(["encode", "-i", *wavs, "-m", *csvs, "-o", str(d / "s.pism")]) == 0
    assert "6450 bit/s" in capsys.readouterr().out
    assert main(["encode", "-i", *wavs[:3], "-m", *csvs[:3], "-o", str(d / "s3.pism")]) == 0
    assert "5800 bit/s" in capsys.readouterr().out
    assert main(["decode", "-i", str(d / "s.pism"), "--layout", "7_1_4", "-o", str(d / "dec.wav")]) == 0
    assert "540 samples" in capsys.readouterr().out
    rate, y = read_wav(d / "dec.wav")
    assert y.shape[0] == 12
    assert main(["reference", "-i", *wavs, "-m", *csvs, "--layout", "7_1_4",
                 "-o", str(d / "ref.wav")]) == 0
    assert main(["eval", "--decoded", str(d / "dec.wav"), "--reference", str(d / "ref.wav"),
                 "--json", str(d / "r.json")]) == 0
    report = json.loads((d / "r.json").read_text())
    assert len(report["band_error_db"]) == 12 and len(report["band_error_db"][0]) == 11


def test_cli_errors(scene_files, tmp_path, capsys):
    d, wavs, csvs = scene_files
    write_wav(tmp_path / "slow.wav", np.zeros((1, 100)), rate=44100)
    assert main(["encode", "-i", str(tmp_path / "slow.wav"), wavs[1], "-m", *csvs[:2],
                 "-o", str(tmp_path / "x.pism")]) == 2
    assert "44100" in capsys.readouterr().err
    write_wav(tmp_path / "st.wav", np.zeros((2, 100)))
    assert main(["encode", "-i", str(tmp_path / "st.wav"), wavs[1], "-m", *csvs[:2],
                 "-o", str(tmp_path / "x.pism")]) == 2
    assert "mono" in capsys.readouterr().err
    write_wav(tmp_path / "short.wav", np.zeros((1, 100)))
    assert main(["encode", "-i", str(tmp_path / "short.wav"), wavs[1], "-m", *csvs[:2],
                 "-o", str(tmp_path / "x.pism")]) == 2
    assert "length" in capsys.readouterr().err
    (tmp_path / "bad.pism").write_bytes(b"NOPE" + bytes(60))
    assert main(["decode", "-i", str(tmp_path / "bad.pism"), "--layout", "5_1",
                 "-o", str(tmp_path / "o.wav")]) == 2
    assert "magic" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["decode", "-i", "x", "--layout", "9_1", "-o", "y"])


def test_cli_presets(tmp_path, capsys):
    assert main(["presets", "i5", "--seconds", "0.4", "--layout", "5_1", "-o", str(tmp_path)]) == 0
    assert "i5" in capsys.readouterr().out
    assert (tmp_path / "i5.json").exists() and (tmp_path / "summary.json").exists()
