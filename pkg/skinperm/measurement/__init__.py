from .dataset import DatasetFailure, DatasetIndex, align_trace, load_dataset
from .touchstone import (
    MAX_ABS_GAMMA,
    MeasurementTrace,
    parse_touchstone,
    read_touchstone,
    serialize_touchstone,
    write_touchstone,
    write_trace_csv,
)
