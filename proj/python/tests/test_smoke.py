import numpy as np
import pytest

import gridhtm

SCENARIO = """
scenario.frame_size = 24x48
scenario.frame_count = 40
scenario.seed = 3
scenario.object.0.shape = 8x8
scenario.object.0.path = loop
scenario.object.0.start = 2,0
scenario.object.0.velocity = 0,4
"""


def small_config():
    config = gridhtm.GridConfig()
    config.encoder.frame_size = (24, 48)
    config.default_sp.column_count = 64
    config.default_sp.active_columns = 4
    return config


def test_aggregation_examples():
    assert gridhtm.aggregate_mean([0, 0, 0.5, 1.0]) == 0.375
    assert gridhtm.aggregate_nonzero_mean([0, 0, 0.5, 1.0]) == 0.75
    assert gridhtm.aggregate_nonzero_mean([0, 0, 0]) == 0.0
    assert gridhtm.moving_average([1.0, 3.0, 5.0], 2) == [1.0, 2.0, 4.0]


def test_sdr_operations():
    a = gridhtm.Sdr(8, [1, 3])
    b = gridhtm.Sdr(8, [3, 5])
    assert gridhtm.overlap(a, b) == 1
    joined = gridhtm.concatenate([a, b])
    assert joined.width == 16
    assert joined.active == [1, 3, 11, 13]
    with pytest.raises(ValueError):
        gridhtm.Sdr(4, [9])


def test_generate_and_step():
    scenario = gridhtm.scenario_from_config(SCENARIO)
    frames = gridhtm.generate(scenario)
    assert frames.shape == (40, 1, 24, 48)
    model = gridhtm.GridModel(small_config())
    assert model.grid_size == (2, 4)
    results = [model.step(f) for f in frames]
    assert results[0].raw_scores.shape == (2, 4)
    assert results[0].raw_scores.mean() == 1.0
    assert results[-1].raw_scores.mean() < results[0].raw_scores.mean()
    image = gridhtm.render_heatmap(results[0], (12, 12))
    assert image.shape == (24, 48, 3)


def test_snapshot_round_trip():
    frames = gridhtm.generate(gridhtm.scenario_from_config(SCENARIO))
    model = gridhtm.GridModel(small_config())
    for f in frames[:20]:
        model.step(f)
    restored = gridhtm.GridModel.restore(model.snapshot())
    assert restored == model
    for f in frames[20:]:
        a, b = model.step(f), restored.step(f)
        assert np.array_equal(a.raw_scores, b.raw_scores)
        assert a.aggregate_smoothed == b.aggregate_smoothed
    with pytest.raises(gridhtm.SnapshotError):
        gridhtm.GridModel.restore(b"GHGM" + bytes(40))


def test_run_writes_csv(tmp_path):
    csv = tmp_path / "scores.csv"
    summary = gridhtm.run(SCENARIO, [f"run.scores_csv={csv}", "run.calibration_frames=10"])
    assert summary == {"frames_processed": 40, "rows_written": 30}
    lines = csv.read_text().splitlines()
    assert lines[0] == "frame,aggregate,aggregate_smoothed"
    assert len(lines) == 31


def test_bad_config_raises():
    with pytest.raises(gridhtm.ConfigError, match="unknown key"):
        gridhtm.run(SCENARIO, ["run.nonsense=1"])
