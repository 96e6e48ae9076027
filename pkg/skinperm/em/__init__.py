from skinperm.em.constants import C0, EPS0, MU0, WR5_A, WR5_B
from skinperm.em.materials import (
    REFERENCE_TISSUES,
    SHEET_PERMITTIVITY,
    SHEET_THICKNESS,
    SKIN_THICKNESS,
    ComplexPermittivity,
    FrequencyGrid,
    HalfSpace,
    Layer,
    LayerStack,
    PerfectConductor,
    WaveguideSpec,
    check_backing_depth,
    check_sheet_thickness,
    default_sheet,
    default_stack,
    penetration_depth,
    skin_model_default,
)
from skinperm.em.layered import (
    INFINITE_ADMITTANCE,
    Polarization,
    characteristic_admittance,
    is_infinite_admittance,
    stack_admittance_array,
    stack_input_admittance,
    transverse_wavenumber,
)
