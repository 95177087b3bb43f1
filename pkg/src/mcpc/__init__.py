"""Multi-component progressive-precision compression of scalar fields.

A field is stored as a sequence of independently compressed error components
with geometrically shrinking tolerances. Summing any prefix gives a bounded
approximation; summing enough of them reproduces the input bit for bit.
"""

__version__ = "0.1.0"

from .errors import (
    ArgumentError,
    DataError,
    FormatError,
    IntegrityError,
    McpcError,
    RangeError,
    SequencingError,
    ShapeError,
)
from .field import ScalarField, FieldStats, load_raw, save_raw, subtract, add_in_place, stats, max_abs_error
from .codec import CodecId, EncodedPayload, compress, decompress
from .multicomp import (
    ToleranceSchedule,
    ComponentRecord,
    RefineState,
    Retrieval,
    build_schedule,
    construct,
    reconstruct,
    refine,
    components_needed,
    reconstruct_to_tolerance,
    construct_lossless,
    split_scalar,
)
from .archive import Archive, read_archive, write_archive
from .metrics import (
    RateDistortionRecord,
    accuracy_gain,
    snr,
    rmse,
    component_rates,
    error_ratio_table,
    axis_autocorrelation,
    synth_field,
    derivative_error_study,
    rd_sweep,
    write_csv,
)

__all__ = [
    "ArgumentError",
    "DataError",
    "FormatError",
    "IntegrityError",
    "McpcError",
    "RangeError",
    "SequencingError",
    "ShapeError",
    "ToleranceSchedule",
    "ComponentRecord",
    "RefineState",
    "Retrieval",
    "build_schedule",
    "construct",
    "reconstruct",
    "refine",
    "components_needed",
    "reconstruct_to_tolerance",
    "construct_lossless",
    "split_scalar",
    "RateDistortionRecord",
    "accuracy_gain",
    "snr",
    "rmse",
    "component_rates",
    "error_ratio_table",
    "axis_autocorrelation",
    "synth_field",
    "derivative_error_study",
    "rd_sweep",
    "write_csv",
    "ScalarField",
    "FieldStats",
    "load_raw",
    "save_raw",
    "subtract",
    "add_in_place",
    "stats",
    "max_abs_error",
    "CodecId",
    "EncodedPayload",
    "compress",
    "decompress",
    "Archive",
    "read_archive",
    "write_archive",
]
