"""Figure sweeps: CSV format, crossings and summaries."""

import numpy as np
import pytest

from gensqueeze.figures import Sweep, crossings, fig1a, fig1b, fig2a, fig2b


def test_crossings_linear():
    xs = [0, 1, 2, 3]
    ys = [0, 2, 0, 2]
    assert crossings(xs, ys, 1) == pytest.approx([0.5, 1.5, 2.5])
    assert crossings(xs, [np.nan, 0, 2, 2], 1) == pytest.approx([1.5])


def test_csv_format():
    sw = Sweep(["n", "p"], [[0, 0.1234567890123456], [1, 1e-20]])
    text = sw.to_csv()
    assert text == "n,p\n0,0.123456789012\n1,1e-20\n"


@pytest.fixture(scope="module")
def f1a():
    return fig1a()


def test_fig1a(f1a):
    s = f1a.summary
    assert f1a.columns == ["x", "var_p", "var_Ktilde2", "ref_p", "ref_K"]
    assert len(f1a.rows) == 121
    assert s["Ktilde2_crossing"] == pytest.approx(1.8, abs=0.1)
    assert s["p_crossing"] == pytest.approx(3.8, abs=0.1)
    assert s["joint_interval"] is not None
    assert not s["row_errors"]


def test_fig1a_deterministic(f1a):
    assert fig1a(step=0.5).to_csv() == fig1a(step=0.5).to_csv()


def test_fig1b():
    sw = fig1b(step=0.02)
    s = sw.summary
    assert s["q_interval"][0] == pytest.approx(0.17, abs=0.02)
    assert s["q_interval"][1] == pytest.approx(0.51, abs=0.02)
    assert s["Ktilde1_interval"][0] == pytest.approx(0.10, abs=0.02)
    assert s["Ktilde1_interval"][1] == pytest.approx(0.31, abs=0.02)
    assert s["joint_interval"][0] == pytest.approx(0.17, abs=0.02)
    assert s["joint_interval"][1] == pytest.approx(0.31, abs=0.02)


def test_fig2a():
    sw = fig2a()
    s = sw.summary
    assert s["Q"] == pytest.approx(-0.21, abs=0.01)
    assert s["mean_n"] == pytest.approx(7.06, abs=0.02)
    assert s["odd_mass"] == 0
    p = np.array([r[1] for r in sw.rows])
    ref = np.array([r[2] for r in sw.rows])
    assert p.sum() == pytest.approx(1, abs=1e-10)
    assert np.sum(np.arange(len(ref)) * ref) == pytest.approx(s["mean_n"], abs=1e-8)


def test_fig2b_super_poissonian():
    s = fig2b().summary
    assert s["Q"] > 0
    assert s["odd_mass"] == 0
