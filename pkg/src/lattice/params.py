"""
Model parameters and validity rules.

``ModelParams`` is the raw, typed parameter record (parsed with pydantic);
``validate_params`` checks the scale rules and returns ``ValidatedParams``
carrying the derived quantities every other module needs.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..utils.errors import ParameterValidationError
from ..utils.logger import get_logger

logger = get_logger(__name__)

# Tolerance for "M is an integer multiple of L"
_GRID_TOL = 1e-9


class Variant(str, Enum):
    """Street-system variants."""

    DEL = "DEL"
    DEL_GRID = "DEL_GRID"
    WIDTH = "WIDTH"
    CAPPED = "CAPPED"

    @property
    def uses_grid(self) -> bool:
        return self is not Variant.DEL

    @property
    def has_segments(self) -> bool:
        return self is not Variant.WIDTH


def parse_fraction(value: Any) -> Fraction:
    """
    Parse a fine scale given as Fraction, int, float or string ("1/21", "0.2").

    Floats are converted through their shortest decimal representation, so
    ``0.2`` becomes exactly ``1/5``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("b must be a number")
    if isinstance(value, (int, float, str)):
        return Fraction(str(value).strip()).limit_denominator(10**6)
    raise ValueError(f"Cannot interpret {value!r} as a rational number")


class ModelParams(BaseModel):
    """All scalar parameters of the model."""

    model_config = ConfigDict(
        frozen=True,
        populate_by_name=True,
        arbitrary_types_allowed=True,
        use_enum_values=False,
    )

    d: int = 2
    M: float
    b: Fraction
    lambda_: float = Field(default=0.0, alias="lambda")
    lambda_del: float = 1.0
    L: float = 1.0
    rho: float = 1.0
    w0: float = 0.0
    eta: float = 0.1
    variant: Variant = Variant.DEL_GRID
    ball_radius: float = 0.5

    @field_validator("b", mode="before")
    @classmethod
    def _parse_b(cls, value: Any) -> Fraction:
        return parse_fraction(value)

    @field_validator("variant", mode="before")
    @classmethod
    def _parse_variant(cls, value: Any) -> Variant:
        if isinstance(value, Variant):
            return value
        return Variant(str(value).strip().upper())


@dataclass(frozen=True)
class ValidatedParams:
    """
    Parameters that passed ``validate_params``, with derived quantities.

    ``rho`` is already normalized: for the WIDTH variant it equals the cube
    area ``(M b)^2``.
    """

    d: int
    M: float
    b: Fraction
    inv_b: int
    lam: float
    lambda_del: float
    L: float
    rho: float
    w0: float
    eta: float
    variant: Variant
    ball_radius: float
    m_prime: Optional[int]

    @property
    def cube_side(self) -> float:
        """Side length ``M b`` of every site cube."""
        return self.M / self.inv_b

    @property
    def sites_per_block(self) -> int:
        """Number of sites per block, ``b^{-d}``."""
        return self.inv_b ** self.d

    @property
    def dependency_range(self) -> Optional[int]:
        """
        Range of dependence of the environment in blocks, or None if unbounded.

        With the grid superimposed every Delaunay triangle has circumradius at
        most ``L/sqrt(2)``, so site data depend on seeds within ``sqrt(2) L``
        (plus ``w0`` for thickened streets).
        """
        if not self.variant.uses_grid:
            return None
        reach = math.sqrt(2.0) * self.L + (self.w0 if self.variant is Variant.WIDTH else 0.0)
        return max(1, math.ceil(reach / self.M - 1e-12))

    @property
    def finite_range(self) -> bool:
        """True when the environment is 1-dependent on the block lattice."""
        return self.dependency_range == 1

    @property
    def pad_blocks(self) -> int:
        """Blocks of seed padding around an environment window."""
        reach = 4.0 * self.L
        if self.variant is Variant.WIDTH:
            reach += self.w0
        pad = max(1, math.ceil(reach / self.M - 1e-12))
        rng = self.dependency_range
        if rng is not None:
            pad = max(pad, 2 * rng)
        return pad

    def lambda_star(self, lam: Optional[float] = None) -> float:
        """Mean number of driver marks per block, ``lambda rho b^{-d}``."""
        lam = self.lam if lam is None else lam
        return lam * self.rho * self.sites_per_block

    def with_lambda(self, lam: float) -> "ValidatedParams":
        return replace(self, lam=float(lam))

    def same_scales(self, other: "ValidatedParams") -> bool:
        """True if both parameter sets describe the same lattice and marks."""
        return (
            self.d == other.d
            and self.M == other.M
            and self.inv_b == other.inv_b
            and self.rho == other.rho
            and self.variant is other.variant
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "M": self.M,
            "b": str(self.b),
            "lambda": self.lam,
            "lambda_del": self.lambda_del,
            "L": self.L,
            "rho": self.rho,
            "w0": self.w0,
            "eta": self.eta,
            "variant": self.variant.value,
            "ball_radius": self.ball_radius,
        }


def _collect_violations(p: ModelParams) -> List[Tuple[str, str]]:
    violations: List[Tuple[str, str]] = []

    if p.d != 2:
        violations.append(("INVALID_SCALE", f"dimension d={p.d} is not supported (only d=2)"))
    if not p.M > 0:
        violations.append(("NONPOSITIVE", f"M must be positive, got {p.M}"))

    b = p.b
    if b <= 0 or b.numerator != 1:
        violations.append(
            ("INVALID_SCALE", f"b={b} must be the reciprocal of a positive integer")
        )
    elif p.M > 0 and not b.denominator > 2 * p.d * p.M:
        violations.append(
            (
                "INVALID_SCALE",
                f"b^-1={b.denominator} must be an integer exceeding 2dM={2 * p.d * p.M:g}",
            )
        )

    if p.variant.uses_grid:
        if not p.L >= 1:
            violations.append(("INVALID_GRID", f"grid spacing L={p.L} must be at least 1"))
        elif p.M > 0:
            ratio = p.M / p.L
            if ratio < 1 - _GRID_TOL or abs(ratio - round(ratio)) > _GRID_TOL * max(1.0, ratio):
                violations.append(
                    ("INVALID_GRID", f"M={p.M} is not a positive integer multiple of L={p.L}")
                )

    if not p.lambda_ >= 0:
        violations.append(("NONPOSITIVE", f"lambda must be nonnegative, got {p.lambda_}"))
    if not p.lambda_del > 0:
        violations.append(("NONPOSITIVE", f"lambda_del must be positive, got {p.lambda_del}"))
    if p.variant is not Variant.WIDTH and not p.rho > 0:
        violations.append(("NONPOSITIVE", f"rho must be positive, got {p.rho}"))
    if not p.eta > 0:
        violations.append(("NONPOSITIVE", f"eta must be positive, got {p.eta}"))
    if not p.ball_radius > 0:
        violations.append(("NONPOSITIVE", f"ball_radius must be positive, got {p.ball_radius}"))

    if p.variant is Variant.WIDTH:
        if not p.w0 > 0:
            violations.append(("NONPOSITIVE", f"w0 must be positive for WIDTH, got {p.w0}"))
    elif p.w0 < 0:
        violations.append(("NONPOSITIVE", f"w0 must be nonnegative, got {p.w0}"))

    return violations


def validate_params(p: ModelParams) -> ValidatedParams:
    """
    Check the validity rules and derive the normalized parameter set.

    Args:
        p: Raw model parameters

    Returns:
        ValidatedParams with derived fields

    Raises:
        ParameterValidationError: Listing every violated rule
    """
    violations = _collect_violations(p)

    m_prime: Optional[int] = None
    rho = float(p.rho)
    if not violations:
        inv_b = p.b.denominator
        if p.variant.uses_grid:
            m_prime = int(round(p.M / p.L))
        if p.variant is Variant.WIDTH:
            rho = (p.M / inv_b) ** 2
            if p.rho != rho:
                logger.debug(f"WIDTH variant: rho normalized to cube area {rho:g}")
        if not p.eta <= rho:
            violations.append(("RANGE", f"eta={p.eta} must not exceed rho={rho:g}"))

    if violations:
        raise ParameterValidationError(violations)

    return ValidatedParams(
        d=p.d,
        M=float(p.M),
        b=p.b,
        inv_b=p.b.denominator,
        lam=float(p.lambda_),
        lambda_del=float(p.lambda_del),
        L=float(p.L),
        rho=rho,
        w0=float(p.w0),
        eta=float(p.eta),
        variant=p.variant,
        ball_radius=float(p.ball_radius),
        m_prime=m_prime,
    )


def make_params(**kwargs: Any) -> ValidatedParams:
    """Build and validate parameters in one step (keyword ``lambda`` allowed)."""
    return validate_params(ModelParams(**kwargs))
