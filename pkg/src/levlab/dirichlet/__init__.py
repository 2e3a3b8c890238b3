"""Dirichlet characters, L-functions, and critical-line zeros."""

from .characters import (
    DirichletCharacter,
    RootNumber,
    enumerate_characters,
    euler_phi,
    gauss_sum,
    primitive_count,
    root_number,
)
from .lfunctions import (
    completed_l,
    fe_residual,
    hurwitz_zeta,
    l_and_deriv_values,
    l_derivative,
    l_value,
    l_values,
    q_tilde,
    rotated_real_form,
    rotated_real_form_batch,
)
from .zeros import (
    CriticalZero,
    CriticalZeroList,
    count_zeros_argument,
    find_critical_zeros,
    mean_zero_gap,
)

__all__ = [
    "DirichletCharacter", "RootNumber", "enumerate_characters", "euler_phi",
    "gauss_sum", "primitive_count", "root_number",
    "completed_l", "fe_residual", "hurwitz_zeta", "l_and_deriv_values",
    "l_derivative", "l_value", "l_values", "q_tilde",
    "rotated_real_form", "rotated_real_form_batch",
    "CriticalZero", "CriticalZeroList", "count_zeros_argument",
    "find_critical_zeros", "mean_zero_gap",
]
