# materials.py

import cmath
import logging
import math
from typing import Annotated, Dict, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from skinperm.em.constants import C0, EPS0, WR5_A, WR5_B
from skinperm.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


class ComplexPermittivity(BaseModel):
    """
    Relative permittivity eps = eps_real - j*eps_imag (e^{+jwt} time convention).

    eps_imag is the loss factor and is stored non-negative.
    """

    model_config = ConfigDict(frozen=True)

    eps_real: float = Field(gt=0, allow_inf_nan=False)
    eps_imag: float = Field(ge=0, allow_inf_nan=False)

    @classmethod
    def of(cls, eps_real: float, eps_imag: float) -> "ComplexPermittivity":
        return cls(eps_real=eps_real, eps_imag=eps_imag)

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexPermittivity":
        return cls(eps_real=float(value.real), eps_imag=float(-value.imag))

    @property
    def value(self) -> complex:
        return complex(self.eps_real, -self.eps_imag)

    def __str__(self) -> str:
        return f"{self.eps_real:.6g}-{self.eps_imag:.6g}j"


class Layer(BaseModel):
    model_config = ConfigDict(frozen=True)

    permittivity: ComplexPermittivity
    thickness: float = Field(gt=0, allow_inf_nan=False)  # m


class HalfSpace(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["half_space"] = "half_space"
    permittivity: ComplexPermittivity


class PerfectConductor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["pec"] = "pec"


Termination = Annotated[Union[HalfSpace, PerfectConductor], Field(discriminator="kind")]


class LayerStack(BaseModel):
    """
    Planar dielectric layers ordered from the aperture outward, closed by a termination.

    The material that stands for the skin is the half-space when the stack ends in one,
    otherwise the outermost layer (PEC-backed skin block).
    """

    model_config = ConfigDict(frozen=True)

    # an empty list is either the flush short circuit or a bare half-space
    layers: Tuple[Layer, ...] = ()
    termination: Termination = Field(default_factory=PerfectConductor)

    @property
    def is_short_circuit(self) -> bool:
        return not self.layers and isinstance(self.termination, PerfectConductor)

    @property
    def aperture_permittivity(self) -> ComplexPermittivity:
        """
        Material touching the aperture plane; sets the high-k_rho behaviour.
        """
        if self.layers:
            return self.layers[0].permittivity
        if isinstance(self.termination, HalfSpace):
            return self.termination.permittivity
        raise InvalidArgumentError("short-circuit stack has no aperture material")

    @property
    def skin_permittivity(self) -> ComplexPermittivity:
        if isinstance(self.termination, HalfSpace):
            return self.termination.permittivity
        if not self.layers:
            raise InvalidArgumentError("short-circuit stack has no skin layer")
        return self.layers[-1].permittivity

    def replace_skin(self, eps: ComplexPermittivity) -> "LayerStack":
        if isinstance(self.termination, HalfSpace):
            return self.model_copy(update={"termination": HalfSpace(permittivity=eps)})
        if not self.layers:
            raise InvalidArgumentError("short-circuit stack has no skin layer to replace")
        skin = self.layers[-1].model_copy(update={"permittivity": eps})
        return self.model_copy(update={"layers": self.layers[:-1] + (skin,)})


class WaveguideSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: float = Field(default=WR5_A, gt=0, allow_inf_nan=False)  # broad wall, m
    b: float = Field(default=WR5_B, gt=0, allow_inf_nan=False)  # narrow wall, m

    @model_validator(mode="after")
    def _check_walls(self) -> "WaveguideSpec":
        if not self.a > self.b:
            raise ValueError(f"broad wall a={self.a} must exceed narrow wall b={self.b}")
        return self

    @property
    def te10_cutoff(self) -> float:
        return C0 / (2.0 * self.a)

    @property
    def next_cutoff(self) -> float:
        """
        Lowest cutoff among TE20 and TE01.
        """
        return min(C0 / self.a, C0 / (2.0 * self.b))

    def check_frequency(self, freq: float) -> None:
        if not freq > self.te10_cutoff:
            raise InvalidArgumentError(
                f"TE10 is cut off at {freq:.6g} Hz (cutoff {self.te10_cutoff:.6g} Hz)"
            )

    def check_band(self, f_min: float, f_max: float) -> None:
        """
        Single-mode operation: TE10 propagates and TE20/TE01 are evanescent.
        """
        self.check_frequency(f_min)
        if not f_max < self.next_cutoff:
            raise InvalidArgumentError(
                f"higher-order modes propagate above {self.next_cutoff:.6g} Hz "
                f"(grid reaches {f_max:.6g} Hz)"
            )


class FrequencyGrid(BaseModel):
    """
    Uniform inclusive frequency grid.
    """

    model_config = ConfigDict(frozen=True)

    start: float = Field(gt=0, allow_inf_nan=False)  # Hz
    stop: float = Field(gt=0, allow_inf_nan=False)  # Hz
    n_points: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_order(self) -> "FrequencyGrid":
        if not self.start < self.stop:
            raise ValueError(f"grid start {self.start} must be below stop {self.stop}")
        return self

    @classmethod
    def parse(cls, text: str) -> "FrequencyGrid":
        """
        Parse `start:stop:npoints` with frequencies in Hz, e.g. `140e9:220e9:101`.
        """
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidArgumentError(f"grid must look like start:stop:npoints, got {text!r}")
        try:
            start, stop = float(parts[0]), float(parts[1])
            n_points = int(parts[2])
        except ValueError as e:
            raise InvalidArgumentError(f"bad grid {text!r}: {e}") from e
        return cls(start=start, stop=stop, n_points=n_points)

    @property
    def spacing(self) -> float:
        return (self.stop - self.start) / (self.n_points - 1)

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n_points)

    def __str__(self) -> str:
        return f"{self.start:.17g}:{self.stop:.17g}:{self.n_points}"


SKIN_THICKNESS = 3.0e-3  # m, depth of the simulated skin block
SHEET_THICKNESS = 0.1e-3  # m
SHEET_PERMITTIVITY = ComplexPermittivity(eps_real=3.33, eps_imag=0.123)

# effective sub-THz permittivities of the skin sub-layers
REFERENCE_TISSUES: Dict[str, ComplexPermittivity] = {
    "stratum_corneum": ComplexPermittivity(eps_real=2.7, eps_imag=0.1),
    "epidermis": ComplexPermittivity(eps_real=3.3, eps_imag=5.2),
    "dermis": ComplexPermittivity(eps_real=3.9, eps_imag=5.2),
}


def skin_model_default(freq: float) -> ComplexPermittivity:
    """
    Finger-skin prior eps = 4.0 - j*16.0/(eps0*omega).

    :param freq: frequency in Hz, must be positive
    """
    if not freq > 0:
        raise InvalidArgumentError(f"frequency must be positive, got {freq!r}")
    return ComplexPermittivity(eps_real=4.0, eps_imag=16.0 / (EPS0 * 2.0 * math.pi * freq))


def default_sheet() -> Layer:
    return Layer(permittivity=SHEET_PERMITTIVITY, thickness=SHEET_THICKNESS)


def default_stack(
    eps_skin: Optional[ComplexPermittivity] = None,
    termination: Literal["pec", "half_space"] = "pec",
) -> LayerStack:
    """
    Sheet on skin. `pec` mirrors the 3 mm PEC-backed skin block, `half_space` extends the
    skin to infinity.
    """
    eps_skin = eps_skin or ComplexPermittivity(eps_real=4.7, eps_imag=2.4)
    if termination == "pec":
        return LayerStack(
            layers=(default_sheet(), Layer(permittivity=eps_skin, thickness=SKIN_THICKNESS)),
            termination=PerfectConductor(),
        )
    if termination == "half_space":
        return LayerStack(layers=(default_sheet(),), termination=HalfSpace(permittivity=eps_skin))
    raise InvalidArgumentError(f"unknown termination {termination!r}")


def penetration_depth(eps: ComplexPermittivity, freq: float) -> float:
    """
    Field 1/e depth of a plane wave in the material, in metres.
    """
    if not freq > 0:
        raise InvalidArgumentError(f"frequency must be positive, got {freq!r}")
    k0 = 2.0 * math.pi * freq / C0
    alpha = abs(cmath.sqrt(eps.value).imag) * k0
    return math.inf if alpha == 0.0 else 1.0 / alpha


def check_sheet_thickness(stack: LayerStack, f_max: float) -> bool:
    """
    Warn when the aperture-adjacent layer is not thinner than a tenth of the free-space
    wavelength at f_max.
    """
    if not stack.layers:
        return True
    sheet = stack.layers[0]
    wavelength = C0 / f_max
    if sheet.thickness >= 0.1 * wavelength:
        logger.warning(
            "sheet thickness %.4g m exceeds 0.1 wavelength (%.4g m) at %.6g Hz; "
            "surface waves along the flange are no longer negligible",
            sheet.thickness, 0.1 * wavelength, f_max,
        )
        return False
    return True


def check_backing_depth(stack: LayerStack, f_min: float, n_depths: float = 3.0) -> bool:
    """
    Warn when a PEC-backed skin layer is too thin to hide its backing.
    """
    if not isinstance(stack.termination, PerfectConductor) or not stack.layers:
        return True
    skin = stack.layers[-1]
    depth = penetration_depth(skin.permittivity, f_min)
    if skin.thickness < n_depths * depth:
        logger.warning(
            "skin layer %.4g m is thinner than %g penetration depths (%.4g m) at %.6g Hz; "
            "the PEC backing will show in the reflection",
            skin.thickness, n_depths, depth, f_min,
        )
        return False
    return True
