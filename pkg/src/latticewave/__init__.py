"""Operational calculus for Klein-Gordon and Dirac equations on periodic lattices.

Clifford-algebra-valued fields over h*Z^n with momentum-zone Fourier
multipliers, continuous and central-difference time evolution (umbral delta
operators), wave/heat/fractional propagators, and a CSV-exporting CLI.  Every
closed-form path has an independent brute-force twin used by the test suite
and by ``latticewave selftest``.
"""

from .clifford import (
    Multivector,
    Signature,
    blade_indices,
    blade_mask,
    dagger,
    geometric_product,
    mul_arrays,
    pseudoscalar,
)
from .fractional import (
    FracParams,
    bessel_i,
    erfc,
    frac_power,
    fractional_kernels,
    heat_kernel_bessel,
    heat_kernel_spectral,
    heat_semigroup,
    mittag_leffler,
    p_t_operator,
    riesz,
    riesz_inverse,
    solve_kg_fractional,
)
from .lattice import (
    GridSpec,
    LatticeField,
    dirac_kahler,
    dirac_kahler_dagger,
    discrete_laplacian,
    inner_product,
    norm,
    random_field,
    relative_gap,
    shift,
)
from .propagators import (
    CauchyData,
    TimeModel,
    chebyshev_solve,
    chebyshev_t,
    chebyshev_u,
    continuous_dirac_residual,
    continuous_kg_residual,
    dirac_data,
    dirac_residual,
    kg_residual,
    lambda_field,
    lambda_max,
    leapfrog_march,
    solve_dirac,
    solve_kg,
    solve_kg_by_kernels,
    wave_kernels,
)
from .spectral import (
    SpectralField,
    apply_multiplier,
    convolve,
    convolve_direct,
    d2_field,
    dft,
    dft_direct,
    dirac_h_alpha,
    factorization_check,
    idft,
    idft_direct,
    momentum_pairing,
    multiplier_d2,
    multiplier_z,
    z_field,
)
from .umbral import (
    CflViolationError,
    DeltaOperator,
    PowerSeries,
    basic_sequence,
    compositional_inverse,
    egf_eval,
    egf_series_eval,
    wave_multiplier_arrays,
    wave_multipliers,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # clifford
    "Signature",
    "Multivector",
    "blade_mask",
    "blade_indices",
    "geometric_product",
    "mul_arrays",
    "dagger",
    "pseudoscalar",
    # lattice
    "GridSpec",
    "LatticeField",
    "shift",
    "discrete_laplacian",
    "dirac_kahler",
    "dirac_kahler_dagger",
    "inner_product",
    "norm",
    "relative_gap",
    "random_field",
    # spectral
    "SpectralField",
    "dft",
    "idft",
    "dft_direct",
    "idft_direct",
    "apply_multiplier",
    "multiplier_d2",
    "multiplier_z",
    "d2_field",
    "z_field",
    "dirac_h_alpha",
    "factorization_check",
    "convolve",
    "convolve_direct",
    "momentum_pairing",
    # umbral
    "PowerSeries",
    "DeltaOperator",
    "compositional_inverse",
    "basic_sequence",
    "egf_eval",
    "egf_series_eval",
    "wave_multipliers",
    "wave_multiplier_arrays",
    "CflViolationError",
    # propagators
    "TimeModel",
    "CauchyData",
    "lambda_field",
    "lambda_max",
    "solve_kg",
    "solve_kg_by_kernels",
    "wave_kernels",
    "kg_residual",
    "continuous_kg_residual",
    "dirac_data",
    "solve_dirac",
    "dirac_residual",
    "continuous_dirac_residual",
    "chebyshev_solve",
    "chebyshev_t",
    "chebyshev_u",
    "leapfrog_march",
    # fractional
    "FracParams",
    "heat_semigroup",
    "heat_kernel_spectral",
    "heat_kernel_bessel",
    "bessel_i",
    "mittag_leffler",
    "erfc",
    "frac_power",
    "riesz",
    "riesz_inverse",
    "fractional_kernels",
    "solve_kg_fractional",
    "p_t_operator",
]
