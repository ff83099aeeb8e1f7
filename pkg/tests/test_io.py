import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbspaces import gabor as gb
from bbspaces import io as bio
from bbspaces import signal as sg
from bbspaces import wilson as wl
from bbspaces.errors import ValidationError

finite = st.floats(-1e300, 1e300, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=8, max_size=8), st.sampled_from(bio.FORMATS))
def test_signal_round_trip_exact(vals, fmt):
    grid = sg.GridSpec(2, 8)
    f = sg.SampledSignal(grid, np.array([complex(*v) for v in vals]))
    back = bio.signal_from_text(bio.signal_to_text(f, fmt), fmt)
    assert back.grid == grid
    assert np.array_equal(back.values, f.values)


@pytest.mark.parametrize("fmt", bio.FORMATS)
def test_coefficient_round_trip(fmt):
    rng = np.random.default_rng(3)
    lat = gb.LatticeSpec(0.5, 1.0, 2, 3)
    cs = [gb.GaborCoefficients(lat, rng.standard_normal(lat.shape) + 1j * rng.standard_normal(lat.shape)),
          wl.WilsonCoefficients(2, 3, rng.standard_normal((5, 4))),
          wl.GridCoefficients2D(1, 2, 1j * rng.standard_normal((3, 3)))]
    for c in cs:
        back = bio.coefficients_from_text(bio.coefficients_to_text(c, fmt), fmt)
        assert type(back) is type(c)
        assert np.array_equal(back.entries, c.entries)
    assert bio.coefficients_from_text(bio.coefficients_to_text(cs[0], fmt), fmt).lattice == lat


def test_csv_layout():
    f = sg.SampledSignal(sg.GridSpec(1, 4), np.arange(4.0))
    text = bio.signal_to_text(f, "csv", config={"x": 1})
    lines = text.splitlines()
    assert json.loads(lines[0][2:]) == {"grid": {"N": 4, "T": 1.0}}
    assert json.loads(lines[1][2:]) == {"config": {"x": 1}}
    assert lines[2] == "x,re,im"
    assert lines[3].split(",") == ["-1", "0", "0"]


def test_csv_without_grid_header():
    text = "x,re,im\n-1,1,0\n-0.5,2,0\n0,3,0\n0.5,4,0\n"
    f = bio.signal_from_text(text, "csv")
    assert f.grid == sg.GridSpec(1, 4)
    assert f.values.real.tolist() == [1, 2, 3, 4]


def test_bad_inputs():
    with pytest.raises(ValidationError):
        bio.signal_from_text("x,re\n0,1\n", "csv")
    with pytest.raises(ValidationError):
        bio.signal_from_text("{}", "json")
    with pytest.raises(ValidationError):
        bio.signal_to_text(sg.gaussian(sg.GridSpec(1, 4)), "xml")
    with pytest.raises(ValidationError):
        bio.coefficients_from_text('{"domain": "other", "k": [], "n": [], "re": [], "im": []}')
    with pytest.raises(ValidationError):
        bio.coefficients_to_text(np.zeros(3))


def test_dumps_non_finite():
    d = json.loads(bio.dumps({"a": float("inf"), "b": np.float64(np.nan), "c": np.int64(3)}))
    assert d == {"a": "inf", "b": "nan", "c": 3}


def test_files(tmp_path):
    f = sg.hermite(2, sg.GridSpec(4, 64))
    p = bio.write_signal(tmp_path / "sub" / "h.csv", f)
    assert p.read_text().startswith("# ")
    assert np.array_equal(bio.read_signal(p).values, f.values)
    assert bio.format_of("x.JSON") == "json" and bio.format_of("x.txt", "csv") == "csv"


def test_table_to_csv():
    text = bio.table_to_csv(["s", "nu"], [(1, 2), (3, 4)], [{"k": 1}])
    assert text == '# {"k": 1}\ns,nu\n1,2\n3,4\n'
