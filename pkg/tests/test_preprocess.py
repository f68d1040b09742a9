import numpy as np
import pytest

from shapeletkit import InvalidInput, LabeledDataset, TimeSeries
from shapeletkit.preprocess import (SegmentationSpec, balance_by_downsampling, bandpass,
                                    decimate, demean, rms_envelope, run_pipeline, segment,
                                    zero_upcross_waves)


def _rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


def _tone(freq, fs=100.0, seconds=20.0):
    t = np.arange(int(fs * seconds)) / fs
    return TimeSeries(np.sin(2 * np.pi * freq * t), fs, "tone")


def test_bandpass_keeps_in_band_and_rejects_out_of_band():
    passed = bandpass(_tone(7.0), 4.0, 10.0)
    rejected = bandpass(_tone(25.0), 4.0, 10.0)
    assert abs(_rms(passed.values) / _rms(_tone(7.0).values) - 1) < 0.02
    assert _rms(rejected.values) / _rms(_tone(25.0).values) < 0.01


def test_bandpass_limits():
    with pytest.raises(InvalidInput):
        bandpass(_tone(7.0), 10.0, 4.0)
    with pytest.raises(InvalidInput):
        bandpass(_tone(7.0), 4.0, 60.0)
    with pytest.raises(InvalidInput):
        bandpass(TimeSeries(np.zeros(10)), 1.0, 2.0)


def test_decimate():
    x = TimeSeries(np.arange(10.0), 100.0, "s")
    d = decimate(x, 5)
    np.testing.assert_array_equal(d.values, [0.0, 5.0])
    assert d.sample_rate_hz == 20.0
    with pytest.raises(InvalidInput):
        decimate(x, 0)


def test_segment_drop_and_keep():
    x = TimeSeries(np.arange(25.0), 1.0, "p")
    segs = segment(x, SegmentationSpec(10, 1.0))
    assert [s.id for s in segs] == ["p#0", "p#1"]
    assert len(segment(x, SegmentationSpec(10, 1.0, "keep"))[-1]) == 5


def test_segment_too_long_window_warns(caplog):
    x = TimeSeries(np.arange(5.0), 1.0, "p")
    assert segment(x, SegmentationSpec(10, 1.0)) == []
    assert "shorter" in caplog.text


def test_segmentation_spec_needs_whole_samples():
    with pytest.raises(InvalidInput):
        SegmentationSpec(0.125, 20.0)
    with pytest.raises(InvalidInput):
        SegmentationSpec(-1, 20.0)


def test_segment_rate_mismatch():
    with pytest.raises(InvalidInput):
        segment(TimeSeries(np.zeros(40), 20.0), SegmentationSpec(1, 10.0))


def test_rms_envelope_of_sine():
    t = np.arange(4000) / 100.0
    upper, lower = rms_envelope(TimeSeries(np.sin(2 * np.pi * 2.0 * t), 100.0), 100)
    core = upper.values[100:-100]
    assert np.max(np.abs(core - 1 / np.sqrt(2))) < 0.01 / np.sqrt(2)
    np.testing.assert_array_equal(lower.values, -upper.values)


def test_rms_envelope_window_bounds():
    with pytest.raises(InvalidInput):
        rms_envelope(TimeSeries(np.ones(5)), 6)
    up, _ = rms_envelope(TimeSeries([3.0, -4.0]), 1)
    np.testing.assert_allclose(up.values, [3.0, 4.0])


def test_three_periods_give_three_waves():
    t = np.linspace(0, 3, 301)
    waves = zero_upcross_waves(TimeSeries(np.sin(2 * np.pi * t), 100.0, "w"))
    assert [len(w) for w in waves] == [100, 100, 100]
    assert [w.id for w in waves] == ["w#0", "w#1", "w#2"]


def test_partial_head_and_tail_dropped():
    t = np.linspace(0, 3, 300, endpoint=False)
    waves = zero_upcross_waves(TimeSeries(np.sin(2 * np.pi * t + 1.0), 100.0))
    assert len(waves) == 2
    assert all(w.values[0] >= 0 for w in waves)


def test_single_crossing_gives_no_wave():
    t = np.linspace(0, 1, 100, endpoint=False)
    assert zero_upcross_waves(TimeSeries(np.sin(2 * np.pi * t))) == []


def test_exact_zero_starts_new_wave():
    x = np.array([1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 2.0, -1.0])
    waves = zero_upcross_waves(TimeSeries(x))
    np.testing.assert_array_equal(waves[0].values, [0.0, 1.0, -1.0])


def test_positive_series_has_no_waves():
    assert zero_upcross_waves(TimeSeries(np.ones(10))) == []


def test_demean():
    np.testing.assert_allclose(demean(TimeSeries([1.0, 2.0, 3.0])).values, [-1, 0, 1])


def test_balance():
    data = LabeledDataset.from_arrays([[float(i)] * 3 for i in range(7)],
                                      ["A"] * 5 + ["B"] * 2)
    out = balance_by_downsampling(data, seed=1)
    assert out.class_counts == {"A": 2, "B": 2}
    assert out.ids == sorted(out.ids, key=int)


def test_pipeline_chain():
    x = TimeSeries(np.random.default_rng(0).normal(size=12000), 100.0, "day")
    steps = [{"op": "bandpass", "low_hz": 4, "high_hz": 10}, {"op": "decimate", "factor": 5},
             {"op": "segment", "window_seconds": 30}]
    out = run_pipeline([x], steps)
    assert len(out) == 4 and all(len(s) == 600 for s in out)
    assert out[0].sample_rate_hz == 20.0


def test_pipeline_without_steps_is_identity():
    x = TimeSeries([1.0, 2.0], 1.0, "a")
    assert run_pipeline([x], []) == [x]


def test_pipeline_unknown_op():
    with pytest.raises(InvalidInput):
        run_pipeline([TimeSeries([1.0])], [{"op": "fft"}])


def test_keep_segments_concatenate_to_original():
    x = TimeSeries(np.random.default_rng(1).normal(size=47), 2.0, "p")
    segs = segment(x, SegmentationSpec(5, 2.0, "keep"))
    np.testing.assert_array_equal(np.concatenate([s.values for s in segs]), x.values)


def test_bandpass_then_decimate_keeps_in_band_component():
    fs = 100.0
    t = np.arange(6000) / fs
    low = np.sin(2 * np.pi * 1.0 * t)
    high = np.sin(2 * np.pi * 7.0 * t)
    out = decimate(bandpass(TimeSeries(low + high, fs), 4.0, 10.0), 5)
    want = high[::5]
    assert _rms(out.values - want) / _rms(want) < 0.02


def test_bandpass_of_zero_is_zero():
    out = bandpass(TimeSeries(np.zeros(64), 100.0), 4.0, 10.0)
    np.testing.assert_array_equal(out.values, 0.0)
