from skinperm._version import __version__
from skinperm.base import BaseForwardSolver, BaseInverseSolver
from skinperm.em import (
    ComplexPermittivity,
    FrequencyGrid,
    HalfSpace,
    Layer,
    LayerStack,
    PerfectConductor,
    Polarization,
    WaveguideSpec,
    characteristic_admittance,
    default_stack,
    skin_model_default,
    stack_input_admittance,
    transverse_wavenumber,
)
from skinperm.forward import (
    ApertureForwardSolver,
    ForwardConfig,
    QuadratureConfig,
    SweepBox,
    TrainingTable,
    aperture_admittance,
    aperture_spectrum,
    generate_training_table,
    load_table,
    reflection_coefficient,
    save_table,
)
from skinperm.handlers import LogResultHandler, NoOpResultHandler, ResultHandler, SaveToFileResultHandler
from skinperm.inverse import (
    BankInverseSolver,
    ModelBank,
    RbnModel,
    evaluate_holdout,
    load_bank,
    predict,
    save_bank,
    train_rbn,
)
from skinperm.measurement import DatasetIndex, MeasurementTrace, align_trace, load_dataset, parse_touchstone
from skinperm.stats import PermittivityTrace, emit_report, invert_trace, repeatability, variation_report, volunteer_mean

__all__ = [
    "__version__",
    "BaseForwardSolver",
    "BaseInverseSolver",
    "ComplexPermittivity",
    "FrequencyGrid",
    "HalfSpace",
    "Layer",
    "LayerStack",
    "PerfectConductor",
    "Polarization",
    "WaveguideSpec",
    "characteristic_admittance",
    "default_stack",
    "skin_model_default",
    "stack_input_admittance",
    "transverse_wavenumber",
    "ApertureForwardSolver",
    "ForwardConfig",
    "QuadratureConfig",
    "SweepBox",
    "TrainingTable",
    "aperture_admittance",
    "aperture_spectrum",
    "generate_training_table",
    "load_table",
    "reflection_coefficient",
    "save_table",
    "LogResultHandler",
    "NoOpResultHandler",
    "ResultHandler",
    "SaveToFileResultHandler",
    "BankInverseSolver",
    "ModelBank",
    "RbnModel",
    "evaluate_holdout",
    "load_bank",
    "predict",
    "save_bank",
    "train_rbn",
    "DatasetIndex",
    "MeasurementTrace",
    "align_trace",
    "load_dataset",
    "parse_touchstone",
    "PermittivityTrace",
    "emit_report",
    "invert_trace",
    "repeatability",
    "variation_report",
    "volunteer_mean",
]
