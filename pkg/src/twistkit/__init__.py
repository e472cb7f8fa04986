"""Twisted free-boson numerics: partition functions, symmetry
implementations on truncated Fock spaces, and twisted thermal kernels."""

from .errors import (
    AdmissibilityError,
    CapacityError,
    ConfigError,
    DomainError,
    InternalConsistencyError,
    KindError,
    PreconditionError,
    TwistkitError,
)
from .spectrum import (
    ModeSpectrum,
    SymmetrySpec,
    TwistAngle,
    load_config,
    parse_config,
    principal_angle,
    symmetry_angles,
    twisted_circle_spectrum,
    validate_spectrum,
)
from .fock import (
    DenseOperator,
    TruncatedFockSpace,
    antiunitary_partition_trace,
    build_space,
    creation,
    creation_functional,
    hamiltonian,
    imaginary_time_field,
    implement_symmetry,
    number_operator,
    partition_trace,
    tc_operator,
    truncation_tail_bound,
    twisted_trace,
)
from .partition import (
    positivity_lower_bound,
    z_twisted_antiunitary,
    z_twisted_unitary,
    z_untwisted,
)
from .correlation import (
    KernelGrid,
    TwistedKernel,
    apply_inverse,
    kernel_closed_form,
    kernel_fourier,
    kernel_grid,
    kernel_oracle,
    kernel_twist_angle,
    twisted_frequencies,
    verify_resolvent,
)
from .realfield import (
    ExtendedSpectrum,
    diagonalize_induced,
    extend,
    extended_kernel,
    extended_kernel_grid,
    real_field_checks,
    z_via_realfield,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "CapacityError",
    "ConfigError",
    "DomainError",
    "InternalConsistencyError",
    "KindError",
    "PreconditionError",
    "TwistkitError",
    "ModeSpectrum",
    "SymmetrySpec",
    "TwistAngle",
    "load_config",
    "parse_config",
    "principal_angle",
    "symmetry_angles",
    "twisted_circle_spectrum",
    "validate_spectrum",
    "DenseOperator",
    "TruncatedFockSpace",
    "antiunitary_partition_trace",
    "build_space",
    "creation",
    "creation_functional",
    "hamiltonian",
    "imaginary_time_field",
    "implement_symmetry",
    "number_operator",
    "partition_trace",
    "tc_operator",
    "truncation_tail_bound",
    "twisted_trace",
    "positivity_lower_bound",
    "z_twisted_antiunitary",
    "z_twisted_unitary",
    "z_untwisted",
    "KernelGrid",
    "TwistedKernel",
    "apply_inverse",
    "kernel_closed_form",
    "kernel_fourier",
    "kernel_grid",
    "kernel_oracle",
    "kernel_twist_angle",
    "twisted_frequencies",
    "verify_resolvent",
    "ExtendedSpectrum",
    "diagonalize_induced",
    "extend",
    "extended_kernel",
    "extended_kernel_grid",
    "real_field_checks",
    "z_via_realfield",
]
