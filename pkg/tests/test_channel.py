"""Channel traces: dB conversion, replay, parsing, synthesis."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from splitedge.channel import (ChannelTrace, EmptyTrace, ParseError, db_to_linear, gain_at,
                               linear_to_db, load_trace, synth_trace, write_trace)


def test_db_definition():
    assert db_to_linear(-100.0) == pytest.approx(1e-10, rel=1e-15)
    assert linear_to_db(1e-10) == pytest.approx(-100.0)


@given(st.floats(-200, 50))
def test_db_roundtrip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-9)


def test_gain_at_wraps():
    trace = ChannelTrace((0.0, -10.0, -20.0))
    assert gain_at(trace, 0) == 1.0
    assert gain_at(trace, 4) == pytest.approx(0.1)
    assert gain_at(ChannelTrace((0.0,)), 1234) == 1.0


def test_load_roundtrip(tmp_path):
    trace = synth_trace(12, -101.5, fading_scale_db=2.0, seed=3)
    path = tmp_path / "t.csv"
    write_trace(trace, path)
    again = load_trace(path)
    assert again.gains_db == trace.gains_db
    assert again.source == "file"


@pytest.mark.parametrize("body, exc", [
    ("frame,gain\n0,-100\n", ParseError),
    ("frame,gain_db\n1,-100\n", ParseError),
    ("frame,gain_db\n0,abc\n", ParseError),
    ("frame,gain_db\n0,nan\n", ParseError),
    ("frame,gain_db\n", EmptyTrace),
    ("", EmptyTrace),
])
def test_bad_files(tmp_path, body, exc):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(exc):
        load_trace(path)


class TestSynth:
    def test_deterministic(self):
        a = synth_trace(30, -100, 2.0, 0.2, 8.0, seed=9)
        b = synth_trace(30, -100, 2.0, 0.2, 8.0, seed=9)
        assert a.gains_db == b.gains_db
        assert a.gains_db != synth_trace(30, -100, 2.0, 0.2, 8.0, seed=10).gains_db

    def test_full_blockage(self):
        t = synth_trace(20, -100, 0.0, 1.0, 8.0, seed=1)
        assert all(g == -108.0 for g in t.gains_db)

    def test_no_fading_is_constant(self):
        assert set(synth_trace(10, -95.0, seed=4).gains_db) == {-95.0}

    def test_statistics(self):
        t = np.array(synth_trace(20000, -100, 2.0, 0.15, 8.0, seed=0).gains_db)
        assert t.mean() == pytest.approx(-100 - 0.15 * 8, abs=0.06)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            synth_trace(0, -100)
        with pytest.raises(ValueError):
            synth_trace(5, -100, blockage_prob=1.5)


def test_empty_trace_rejected():
    with pytest.raises(EmptyTrace):
        ChannelTrace(())
