"""Self-correlation metrics and classification for binary files."""

from .bitstring import BitString, Origin, from_bits, from_bytes, from_file, random_slice
from .classifier import FeatureVector, GroupLabel, Thresholds, calibrate, classify, features
from .errors import (
    BitspectraError,
    CalibrationError,
    InternalCheckError,
    NumericalPrecisionError,
    SizeLimitError,
)
from .metrics import (
    LagProfile,
    MetricsRecord,
    adj_mf,
    analyze,
    corr_xor,
    df,
    df_spectral,
    lag_profile_bitparallel,
    lag_profile_fft,
    lag_profile_reference,
    mf_closed_form,
    mf_total,
    shannon_entropy_bytes,
)

__version__ = "0.1.0"

__all__ = [
    "BitString", "Origin", "from_bits", "from_bytes", "from_file", "random_slice",
    "FeatureVector", "GroupLabel", "Thresholds", "calibrate", "classify", "features",
    "BitspectraError", "CalibrationError", "InternalCheckError",
    "NumericalPrecisionError", "SizeLimitError",
    "LagProfile", "MetricsRecord", "adj_mf", "analyze", "corr_xor", "df",
    "df_spectral", "lag_profile_bitparallel", "lag_profile_fft",
    "lag_profile_reference", "mf_closed_form", "mf_total", "shannon_entropy_bytes",
    "__version__",
]
