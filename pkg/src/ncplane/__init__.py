"""Numerics for classical and quantum mechanics on the noncommutative plane.

Position coordinates carry a constant deformation theta: {x, y} = theta,
with canonical q-p pairs untouched.  The package covers the deformed
bracket and its Galilei algebra, classical flows against closed forms,
bilinear conserved quantities, the oscillator spectrum and eigenfunctions
in momentum-type representations, Wigner functions, and the thermodynamics
of a solid of such oscillators.
"""

from .params import NCParams
from .duals import Dual, derivative, value
from .phasespace import (
    PhasePoint,
    ScalarField,
    poisson_bracket,
    bracket_field,
    jacobi_residual,
    galilei_generators,
    verify_algebra,
    sample_points,
    FieldEvaluationError,
)
from .dynamics import (
    Trajectory,
    DivergenceError,
    hamiltonian_flow,
    free_particle_solution,
    free_particle_hamiltonian,
    oscillator_hamiltonian,
    oscillator_solution,
    oscillator_frequencies,
    oscillator_path,
    OscillatorClosedForm,
    noether_charges,
    charge_drift,
    discrete_action,
)
from .symmetries import (
    BilinearForm,
    SymmetryBasis,
    conserved_bilinears,
    membership_check,
    structure_constants,
    hamiltonian_form,
    angular_momentum_form,
    su2_standard_forms,
)
from .grids import GridError, GridFunction, uniform_axis, trapezoid_weights
from .spectra import (
    AliasingError,
    GaugeChoice,
    SpectrumEntry,
    TruncationError,
    effective_frequency,
    energy,
    spectrum,
    eigenfunction,
    eigen_residuals,
    momentum_grid,
    apply_hamiltonian,
    apply_angular_momentum,
    transform,
)
from .wigner import (
    WignerError,
    WignerTable,
    wigner_from_state,
    wigner_ground_state,
    wigner_table,
    evolve_liouville,
    negativity_witness,
)
from .thermo import (
    ThermoParams,
    ThermoPoint,
    level_scales,
    partition_single,
    partition_single_direct,
    free_energy,
    entropy,
    internal_energy,
    heat_capacity,
    boltzmann_weight,
    entropy_sweep,
    thermo_point,
)
from .selftest import CheckResult, run_all

__version__ = "0.1.0"
