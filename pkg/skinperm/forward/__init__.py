from .aperture import (
    aperture_admittance,
    aperture_admittance_dense,
    aperture_spectrum,
    mode_normalization,
    radial_breakpoints,
    reflection_from_admittance,
)
from .quadrature import QuadratureResult, composite_gauss, gauss_legendre, integrate_adaptive
from .solver import (
    ApertureForwardSolver,
    ForwardConfig,
    QuadratureConfig,
    SkinModel,
    reflection_coefficient,
    reflection_sweep,
    stack_reflection,
)
from .training import (
    TABLE_COLUMNS,
    ReflectionSample,
    SweepBox,
    TableHeader,
    TrainingTable,
    generate_training_table,
    load_table,
    save_table,
)
