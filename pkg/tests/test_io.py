import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bradykde import io
from bradykde.conformal import fit_prediction_set
from bradykde.evaluation import ConfusionMatrix, SplitSpec, TrialResult
from bradykde.synthetic import SyntheticSpec, generate_synthetic

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 10**6), finite, finite), max_size=30))
def test_peaks_round_trip_is_lossless(tmp_path_factory, rows):
    p = tmp_path_factory.mktemp("io") / "peaks.csv"
    io.write_peaks(p, rows)
    t = io.read_peaks(p, 500.0)
    assert t.event_id.tolist() == [r[0] for r in rows]
    assert t.t_sample.tolist() == [r[1] for r in rows]
    assert t.amplitude.tolist() == [r[2] for r in rows]


def test_signal_onsets_labels_round_trip(tmp_path):
    x = np.array([16, -3, 1.25, 1e-300])
    io.write_signal(tmp_path / "s.txt", x)
    np.testing.assert_array_equal(io.read_signal(tmp_path / "s.txt"), x)
    io.write_onsets(tmp_path / "o.txt", [5, 10])
    assert io.read_onsets(tmp_path / "o.txt").tolist() == [5, 10]
    io.write_labels(tmp_path / "l.csv", [True, False])
    assert io.read_labels(tmp_path / "l.csv").tolist() == [True, False]


def test_crlf_equals_lf(tmp_path):
    text = "event_id,t_sample,amplitude\n0,1,0.5\n\n1,2.5,-1\n"
    (tmp_path / "lf.csv").write_bytes(text.encode())
    (tmp_path / "crlf.csv").write_bytes(text.replace("\n", "\r\n").encode())
    a, b = io.read_peaks(tmp_path / "lf.csv", 500), io.read_peaks(tmp_path / "crlf.csv", 500)
    np.testing.assert_array_equal(a.peaks(), b.peaks())


@pytest.mark.parametrize(
    "body, where",
    [
        ("event_id,t_sample,amplitude\n0,1,2\n0,1\n", ":3:"),
        ("event_id,t_sample,amplitude\n0,x,2\n", ":2:"),
        ("event_id,t_sample,amplitude\n0.5,1,2\n", ":2:"),
        ("event_id,t_sample,amplitude\n0,inf,2\n", ":2:"),
        ("t,r\n", ":1:"),
        ("", "empty"),
    ],
)
def test_malformed_peaks_name_the_line(tmp_path, body, where):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(io.FormatError, match=where):
        io.read_peaks(p, 500)


def test_labels_must_align(tmp_path):
    io.write_peaks(tmp_path / "p.csv", [(0, 1, 1), (0, 2, 2)])
    io.write_labels(tmp_path / "l.csv", [1])
    with pytest.raises(io.FormatError):
        io.read_peaks(tmp_path / "p.csv", 500, labels_path=tmp_path / "l.csv")


def test_grid_and_hull_round_trip(tmp_path):
    X = np.random.default_rng(0).normal(size=(40, 2))
    pset = fit_prediction_set(X, "gaussian", 0.5, grid_size=12)
    io.write_grid(tmp_path / "g.csv", pset.grid)
    x, y, v = io.read_grid(tmp_path / "g.csv")
    np.testing.assert_array_equal(x, pset.grid.x_axis)
    np.testing.assert_array_equal(v, pset.grid.values)
    io.write_hull(tmp_path / "h.csv", pset, (0.5, 0.25), "gaussian")
    meta, hull = io.read_hull(tmp_path / "h.csv")
    np.testing.assert_array_equal(hull, pset.hull)
    assert float(meta["c_k"]) == pset.c_k
    assert meta["h"] == "0.5;0.25" and meta["kernel"] == "gaussian" and meta["n"] == "40"


def test_trials_csv():
    r = TrialResult(ConfusionMatrix(1, 2, 3, 4), 0.5, 0.01, 7, SplitSpec(0.6, 0.2, 0.2))
    lines = io.trials_csv([r, r]).splitlines()
    assert lines[0] == "trial,seed,h,c_k,tp,fp,fn,tn,epe"
    assert lines[1] == "0,7,0.5,0.01,1,2,3,4,0.5"
    assert len(lines) == 3


def test_atomic_write_leaves_no_temp_files(tmp_path):
    io.atomic_write(tmp_path / "sub" / "f.txt", "a")
    io.atomic_write(tmp_path / "sub" / "f.txt", "b")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["f.txt"]
    assert (tmp_path / "sub" / "f.txt").read_text() == "b"


def test_curve_per_axis(tmp_path):
    io.write_curve(tmp_path / "c.csv", np.array([[0.1, 0.2], [0.3, 0.4]]), [1.0, 2.0])
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "h_1,h_2,score"


def test_synthetic_peaks_round_trip(tmp_path):
    t = generate_synthetic(SyntheticSpec(n_points=50, n_anomalies=3), seed=0)
    io.write_peaks(tmp_path / "p.csv", t)
    io.write_labels(tmp_path / "l.csv", t.truth)
    back = io.read_peaks(tmp_path / "p.csv", t.fs, labels_path=tmp_path / "l.csv")
    np.testing.assert_array_equal(back.peaks(), t.peaks())
    np.testing.assert_array_equal(back.truth, t.truth)
