from .grid import GridResult, derive_seed, expand, grid_search
from .io import load_checkpoint, save_checkpoint, write_forecast_csv, write_report_csv
from .model import CELLS, Parameters, RnnConfig, backward, expected_shapes, forward, init_params
from .train import (
    ForecastSeries, SequenceSample, TrainReport, average_percent_error, clip_gradients,
    forecast, loss_and_grads, make_windows, stack, train,
)

__all__ = [
    "GridResult", "derive_seed", "expand", "grid_search", "load_checkpoint", "save_checkpoint",
    "write_forecast_csv", "write_report_csv", "CELLS", "Parameters", "RnnConfig", "backward",
    "expected_shapes", "forward", "init_params", "ForecastSeries", "SequenceSample",
    "TrainReport", "average_percent_error", "clip_gradients", "forecast", "loss_and_grads",
    "make_windows", "stack", "train",
]
