"""Figure rendering for simulator trace/summary/sweep artifacts."""

from .plots import (
    EmptyInput,
    MalformedRow,
    MissingColumns,
    PlotRequest,
    PlotvizError,
    build_sweep_figure,
    build_trial_figure,
    phase_regions,
    plot_sweep,
    plot_trial,
)

__version__ = "0.1.0"
