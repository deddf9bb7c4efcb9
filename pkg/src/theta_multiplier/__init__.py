"""Theta character on theta subgroups of Sp(2g, Z/4), the Johnson-Millson
pairing, and a numerical check against Riemann's theta function."""

from .character import character_table_g1, factor_orthogonal, lambda_report, qtilde, theta_lambda
from .lagrangian import OrientedLagrangian, lambda_jm, m_jm, sigma, transport_gamma
from .symplectic import (
    QuadraticForm,
    SymplecticSpace,
    ThetaGroupElement,
    gamma2_element,
    make_standard,
    random_element,
    standard_form,
    transvection,
)
from .theta import IntSymplectic, SiegelPoint, functional_equation_residual, theta_value

__all__ = [
    "IntSymplectic",
    "OrientedLagrangian",
    "QuadraticForm",
    "SiegelPoint",
    "SymplecticSpace",
    "ThetaGroupElement",
    "character_table_g1",
    "factor_orthogonal",
    "functional_equation_residual",
    "gamma2_element",
    "lambda_jm",
    "lambda_report",
    "m_jm",
    "make_standard",
    "qtilde",
    "random_element",
    "sigma",
    "standard_form",
    "theta_lambda",
    "theta_value",
    "transport_gamma",
    "transvection",
]
