"""Grid HTM anomaly detection over binary mask streams."""

from ._core import (
    AggregationKind,
    CellOverride,
    ConfigError,
    ContractError,
    EncoderConfig,
    FrameResult,
    GridConfig,
    GridModel,
    IoError,
    Scenario,
    Sdr,
    SnapshotError,
    SpatialPooler,
    SpParams,
    TemporalMemory,
    TmParams,
    TmStepResult,
    UnsupportedVersionError,
    active_pixel_stats,
    aggregate,
    aggregate_mean,
    aggregate_nonzero_mean,
    concatenate,
    encode_cell,
    generate,
    moving_average,
    overlap,
    render_heatmap,
    run,
    scenario_from_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]
