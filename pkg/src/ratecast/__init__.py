"""ratecast: interest-rate forecasting with partition-calibrated short-rate models.

Observed rate series are segmented into distribution-homogeneous sub-samples
(Normal or noncentral chi-square, by sequential goodness-of-fit testing),
Vasicek/CIR parameters are calibrated per sub-sample with closed-form
estimating functions, and next-period expected rates are forecast over
rolling windows against an EWMA baseline.
"""

__version__ = "0.1.0"

from ratecast._kernels import BACKEND as KERNEL_BACKEND
from ratecast.backtest import (
    EwmaConfig,
    FitReport,
    ForecastReport,
    ewma_forecast,
    fit_sample,
    forecast_rolling,
    rmse,
    total_rmse,
)
from ratecast.distributions import (
    JohnsonFit,
    NoncentralChiSquareParams,
    fit_johnson,
    fit_ncx2,
    johnson_forward,
    johnson_inverse,
    ncx2_cdf,
    normal_cdf,
    sample_ncx2,
)
from ratecast.errors import (
    ClassificationError,
    FitError,
    GofTestError,
    LoadError,
    NumericError,
    PipelineError,
    RatecastError,
    ShiftError,
)
from ratecast.goftests import GofResult, ks_ncx2_test, lilliefors_test
from ratecast.marketdata import (
    DatasetSplit,
    RateMatrix,
    RateSeries,
    load_rate_matrix,
    series_for,
    split_datasets,
    write_rate_matrix,
)
from ratecast.models import (
    CalibrationResult,
    ModelParams,
    ShiftSpec,
    apply_shift,
    calibrate_cir,
    calibrate_vasicek,
    forecast_expected,
    make_shift,
    simulate_exact,
    unapply_shift,
)
from ratecast.partition import (
    Partition,
    WindowSelection,
    backward_window,
    forward_partition,
)
from ratecast.synthetic import ColumnSpec, Segment, simulate_piecewise, synthetic_matrix

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "CalibrationResult",
    "ClassificationError",
    "ColumnSpec",
    "DatasetSplit",
    "EwmaConfig",
    "FitError",
    "FitReport",
    "ForecastReport",
    "GofResult",
    "GofTestError",
    "JohnsonFit",
    "LoadError",
    "ModelParams",
    "NoncentralChiSquareParams",
    "NumericError",
    "Partition",
    "PipelineError",
    "RateMatrix",
    "RateSeries",
    "RatecastError",
    "Segment",
    "ShiftError",
    "ShiftSpec",
    "WindowSelection",
    "apply_shift",
    "backward_window",
    "calibrate_cir",
    "calibrate_vasicek",
    "ewma_forecast",
    "fit_johnson",
    "fit_ncx2",
    "fit_sample",
    "forecast_expected",
    "forecast_rolling",
    "forward_partition",
    "johnson_forward",
    "johnson_inverse",
    "ks_ncx2_test",
    "lilliefors_test",
    "load_rate_matrix",
    "make_shift",
    "ncx2_cdf",
    "normal_cdf",
    "rmse",
    "sample_ncx2",
    "series_for",
    "simulate_exact",
    "simulate_piecewise",
    "split_datasets",
    "synthetic_matrix",
    "total_rmse",
    "unapply_shift",
    "write_rate_matrix",
]
