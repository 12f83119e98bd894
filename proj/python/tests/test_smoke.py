import json

import numpy as np
import pytest

import wixup


def walk(frames=100, seed=3):
    return wixup.generate({"sequences": 1, "frames_per_sequence": frames}, seed)


def test_self_mix_without_jitter_is_identity():
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(-1, 1, 12), rng.uniform(1, 5, 12), rng.uniform(-1, 1, 12)])
    label = rng.uniform(-1, 1, (4, 3))
    out_pts, out_label = wixup.mix(pts, label, pts, label, {"jitter_sigma": 0}, seed=5)
    assert out_pts.shape == pts.shape
    np.testing.assert_allclose(np.sort(out_pts, axis=0), np.sort(pts, axis=0), atol=1e-9)
    np.testing.assert_array_equal(out_label, label)


def test_mix_is_deterministic_and_five_d_keeps_width():
    rng = np.random.default_rng(1)
    a = np.column_stack([rng.uniform(-1, 1, 6), rng.uniform(1, 5, 6), np.zeros(6), rng.normal(size=6), rng.uniform(size=6)])
    b = a + [0.05, 0.1, 0, 0, 0]
    probs = np.array([0.0, 1.0, 0.0])
    first = wixup.mix(a, probs, b, probs, None, 9)
    second = wixup.mix(a, probs, b, probs, None, 9)
    assert first[0].shape == (6, 5)
    np.testing.assert_array_equal(first[0], second[0])
    np.testing.assert_array_equal(first[1], probs)


def test_wrong_label_length_raises():
    pts = np.array([[0.0, 2.0, 0.0]])
    with pytest.raises(ValueError):
        wixup.mix(pts, np.zeros((2, 3)), pts, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        wixup.mix(np.zeros((1, 4)), np.zeros((2, 3)), pts, np.zeros((2, 3)))


def test_augment_counts_and_determinism():
    frames = walk()
    out = wixup.augment(frames, {"method": "wixup", "scale": 1, "seed": 7})
    assert len(out) == 199
    again = wixup.augment(frames, {"method": "wixup", "scale": 1, "seed": 7})
    for x, y in zip(out, again):
        assert x["seq"] == y["seq"] and x["t"] == y["t"]
        np.testing.assert_array_equal(x["points"], y["points"])


def test_augment_matches_cli_output(tmp_path):
    src = tmp_path / "in.jsonl"
    dst = tmp_path / "out.jsonl"
    frames = walk()
    wixup.write_jsonl(frames, str(src))
    code, _, err = wixup.cli(["augment", "--input", str(src), "--output", str(dst), "--method", "wixup", "--scale", "2", "--seed", "7"])
    assert code == 0, err
    from_cli = wixup.read_jsonl(str(dst))
    in_process = wixup.augment(wixup.read_jsonl(str(src)), {"method": "wixup", "scale": 2, "seed": 7})
    assert len(from_cli) == len(in_process)
    for x, y in zip(from_cli, in_process):
        assert x["seq"] == y["seq"] and x["t"] == y["t"]
        np.testing.assert_array_equal(x["points"], y["points"])
        np.testing.assert_array_equal(x["label"], y["label"])


def test_run_uda_report():
    source = wixup.generate({"sequences": 2, "frames_per_sequence": 30, "seq_prefix": "src"}, 1)
    target = wixup.generate({"sequences": 2, "frames_per_sequence": 30, "seq_prefix": "tgt", "shift_x": 0.2}, 2)
    report = wixup.run_uda(source, target, {"seed": 3})
    assert report["metric"] == "mle_cm"
    assert report["source_frames"] == 60
    assert report["target_train_frames"] + report["target_test_frames"] == 60
    json.dumps(report)


def test_bad_config_raises():
    with pytest.raises(ValueError, match="bogus"):
        wixup.augment(walk(10), {"method": "bogus"})
    with pytest.raises(ValueError):
        wixup.augment(walk(10), {"no_such_key": 1})
