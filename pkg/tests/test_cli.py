import csv
import io
import json

import numpy as np
import pytest

from hv3d.cli import BASELINE_COLUMNS, TABLE_COLUMNS, main
from hv3d.core import REPORT_COLUMNS
from hv3d.distort import DistortionSpec, apply_distortion
from hv3d.metrics import psnr, ssim
from hv3d.synthetic import make_stereo_sequence
from hv3d.video_io import write_stereo_sequence


@pytest.fixture(scope="module")
def manifests(tmp_path_factory, small_seq):
    d = tmp_path_factory.mktemp("seqs")
    dist = apply_distortion(small_seq, DistortionSpec("dct_quantize", 2.0))
    other = make_stereo_sequence(384, 192, frames=2, seed=5)
    return {
        "ref": write_stereo_sequence(d, small_seq, "ref"),
        "dist": write_stereo_sequence(d, dist, "dist"),
        "wide": write_stereo_sequence(d, other, "wide"),
        "seq": small_seq,
        "dist_seq": dist,
    }


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# -- score ------------------------------------------------------------------------

def test_score_identity(manifests, capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, err = run(["score", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["ref"],
                        "--out", out], capsys)
    assert code == 0
    assert "uncalibrated" in err
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(REPORT_COLUMNS)
    pooled = rows_of(text)[-1]
    assert pooled["frame"] == "mean" and pooled["hv3d"] == "1.000000"


def test_score_stdout_and_weights(manifests, capsys, tmp_path):
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps({"w1": 1, "w2": 0, "w3": 0, "w4": 0, "beta": 0.7}))
    code, out, err = run(["score", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["dist"],
                          "--weights", wfile], capsys)
    assert code == 0 and "uncalibrated" not in err
    rows = rows_of(out)
    assert len(rows) == 3
    assert 0 < float(rows[-1]["hv3d"]) < 1


def test_score_missing_stream(manifests, capsys, tmp_path):
    m = json.loads(manifests["ref"].read_text())
    m["left"] = str(tmp_path / "gone.yuv")
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(m))
    out = tmp_path / "r.csv"
    code, _, err = run(["score", "--manifest-ref", broken, "--manifest-dist", manifests["ref"], "--out", out],
                       capsys)
    assert code == 3
    assert "MissingFile" in err
    assert not out.exists()
    assert list(tmp_path.glob("*.tmp")) == []


def test_score_zero_weights(manifests, capsys, tmp_path):
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps({"w1": 0, "w2": 0, "w3": 0, "w4": 0}))
    code, _, _ = run(["score", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["ref"],
                      "--weights", wfile], capsys)
    assert code == 2


def test_score_bad_weights_json(manifests, capsys, tmp_path):
    wfile = tmp_path / "w.json"
    wfile.write_text("{not json")
    code, _, _ = run(["score", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["ref"],
                      "--weights", wfile], capsys)
    assert code == 2


def test_geometry_mismatch(manifests, capsys):
    for cmd in ("score", "baselines"):
        code, _, err = run([cmd, "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["wide"]], capsys)
        assert code == 2 and "384x192" in err


def test_threads_do_not_change_output(manifests, capsys, tmp_path, monkeypatch):
    texts = []
    for n in ("1", "8"):
        monkeypatch.setenv("HV3D_THREADS", n)
        out = tmp_path / f"r{n}.csv"
        assert run(["score", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["dist"],
                    "--out", out], capsys)[0] == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


# -- baselines --------------------------------------------------------------------

def test_baselines_identity(manifests, capsys):
    code, out, _ = run(["baselines", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["ref"]],
                       capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(BASELINE_COLUMNS)
    pooled = rows_of(out)[-1]
    assert pooled["psnr_l"] == "inf"
    assert pooled["ssim_r"] == "1.000000" and pooled["vifp_l"] == "1.000000"


def test_baselines_match_kernels(manifests, capsys):
    code, out, _ = run(["baselines", "--manifest-ref", manifests["ref"], "--manifest-dist", manifests["dist"]],
                       capsys)
    assert code == 0
    row = rows_of(out)[0]
    seq, dist = manifests["seq"], manifests["dist_seq"]
    assert float(row["psnr_l"]) == pytest.approx(psnr(seq.left[0].y, dist.left[0].y), abs=1e-6)
    assert float(row["ssim_r"]) == pytest.approx(ssim(seq.right[0].y, dist.right[0].y), abs=1e-6)


# -- calibrate --------------------------------------------------------------------

def write_feature_csv(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sequence", "f_luma", "f_chroma", "f_cyclopean", "f_depth", "mos"])
        w.writerows(rows)


def synthetic_feature_rows(n, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(n):
        f = [rng.uniform(0, 2), rng.uniform(0, 4), rng.uniform(0, 1), rng.uniform(0, 1)]
        mos = 0.2 * f[0] + 0.05 * f[1] + 0.3 * f[2] + 0.1 * f[3]
        rows.append([f"s{k}", *(repr(x) for x in f), repr(mos)])
    return rows


def test_calibrate_recovers_weights(capsys, tmp_path):
    src = tmp_path / "mos.csv"
    write_feature_csv(src, synthetic_feature_rows(10))
    out = tmp_path / "w.json"
    code, stdout, _ = run(["calibrate", "--mos-csv", src, "--out", out], capsys)
    assert code == 0 and "residual_rms" in stdout
    w = json.loads(out.read_text())
    assert w["calibrated"] is True
    got = [w["w1"], w["w4"], w["w2"], w["w3"]]
    assert max(abs(a - b) for a, b in zip(got, [0.2, 0.05, 0.3, 0.1])) < 1e-9


def test_calibrate_too_few_rows(capsys, tmp_path):
    src = tmp_path / "mos.csv"
    write_feature_csv(src, synthetic_feature_rows(3))
    assert run(["calibrate", "--mos-csv", src], capsys)[0] == 2


def test_calibrate_duplicate_columns(capsys, tmp_path):
    rows = synthetic_feature_rows(8)
    for r in rows:
        r[2] = r[1]
    src = tmp_path / "mos.csv"
    write_feature_csv(src, rows)
    code, _, err = run(["calibrate", "--mos-csv", src], capsys)
    assert code == 2 and "RankDeficient" in err


def test_calibrate_rejects_out_of_range_mos(capsys, tmp_path):
    rows = synthetic_feature_rows(6)
    rows[0][-1] = "7.5"
    src = tmp_path / "mos.csv"
    write_feature_csv(src, rows)
    assert run(["calibrate", "--mos-csv", src], capsys)[0] == 2


def test_calibrate_from_manifests(manifests, capsys, tmp_path):
    d = tmp_path
    seq = manifests["seq"]
    lines = ["sequence,manifest_ref,manifest_dist,mos"]
    for k, level in enumerate((0.5, 1.0, 2.0, 4.0, 8.0)):
        m = write_stereo_sequence(d, apply_distortion(seq, DistortionSpec("dct_quantize", level)), f"d{k}")
        lines.append(f"s,{manifests['ref']},{m.name},{9 - k}")
    src = d / "mos.csv"
    src.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["calibrate", "--mos-csv", src, "--mos-scale", "1-10"], capsys)
    assert code == 0
    w = json.loads(out)
    assert min(w["w1"], w["w2"], w["w3"], w["w4"]) >= 0


# -- evaluate ---------------------------------------------------------------------

@pytest.mark.filterwarnings("error")
def test_evaluate_table(capsys, tmp_path):
    rng = np.random.default_rng(0)
    mos = np.linspace(0.1, 0.9, 12)
    x = np.linspace(0, 1, 12)
    cols = {
        "hv3d": mos,
        "psnr": 20 + 25 / (1 + np.exp(-8 * (x - 0.5))),
        "ssim": np.sqrt(mos) + rng.normal(0, 0.02, 12),
        "ms_ssim": mos + rng.normal(0, 0.05, 12),
        "vifp": x,
    }
    src = tmp_path / "scores.csv"
    with open(src, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sequence", "mos", *cols])
        for k in range(12):
            w.writerow([f"s{k}", mos[k], *(cols[c][k] for c in cols)])
    out = tmp_path / "table.csv"
    code, _, _ = run(["evaluate", "--mos-csv", src, "--out", out], capsys)
    assert code == 0
    table = rows_of(out.read_text())
    assert out.read_text().splitlines()[0] == ",".join(TABLE_COLUMNS)
    assert [r["metric"] for r in table] == ["PSNR", "SSIM", "VIFp", "MS-SSIM", "HV3D"]
    by = {r["metric"]: r for r in table}
    assert by["HV3D"]["scc"] == "1.000000" and by["HV3D"]["pcc"] == "1.000000"
    assert by["PSNR"]["scc"] == "1.000000"
    assert float(by["PSNR"]["pcc"]) < 1
    assert float(by["PSNR"]["pcc_logistic"]) >= float(by["PSNR"]["pcc"])
    for r in table:
        assert -1 <= float(r["scc"]) <= 1 and -1 <= float(r["pcc"]) <= 1
    curves = rows_of((tmp_path / "table_curves.csv").read_text())
    assert len(curves) == 5 * 12


def test_evaluate_needs_mos(capsys, tmp_path):
    src = tmp_path / "scores.csv"
    src.write_text("sequence,psnr\na,1\nb,2\nc,3\n")
    assert run(["evaluate", "--mos-csv", src], capsys)[0] == 2


def test_evaluate_missing_file(capsys, tmp_path):
    assert run(["evaluate", "--mos-csv", tmp_path / "nope.csv"], capsys)[0] == 3


# -- distort ----------------------------------------------------------------------

def test_distort_round_trip(manifests, capsys, tmp_path):
    out = tmp_path / "noisy.json"
    code, _, _ = run(["distort", "--manifest-ref", manifests["ref"], "--kind", "gaussian_noise",
                      "--level", "3", "--seed", "2", "--out", out], capsys)
    assert code == 0 and out.exists()
    code, text, _ = run(["baselines", "--manifest-ref", manifests["ref"], "--manifest-dist", out], capsys)
    assert code == 0
    assert 30 < float(rows_of(text)[-1]["psnr_l"]) < 45


def test_distort_bad_level(manifests, capsys, tmp_path):
    code, _, _ = run(["distort", "--manifest-ref", manifests["ref"], "--kind", "gaussian_blur",
                      "--level", "-1", "--out", tmp_path / "x.json"], capsys)
    assert code == 2


def test_usage_error(capsys):
    assert run(["score"], capsys)[0] == 2
