"""Covariance-matrix simulation of decoherence in Gaussian fermionic systems."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    EmptyGroundSpaceError,
    FermidecError,
    InvariantError,
    MarginalSteadyStateError,
    NonStationaryBathError,
    PhysicsContractError,
    StructuralError,
    ToleranceError,
)
from .majorana_core import (
    ModeLayout,
    NormalForm,
    PartitionedSystem,
    direct_sum,
    joint_matrix,
    reduce_to_system,
    skew_normal_form,
    thermal_covariance,
    validate_covariance,
)
from .closed_dynamics import delta_trace, evolve_closed, expm, joint_evolve_and_reduce, propagator_slice
from .lindblad_channel import GaussianChannel, LindbladSpec, build_channel, propagate, steady_state
from .weak_coupling import BathCorrelation, block_decompose, derive_generator, system_eigenbasis
from .spectral_analysis import bhatia_bound_check, decoherence_bound, rate_report
from .models import KitaevParams, BathParams, bath_lattice, endpoint_coupling, kitaev_wire, uniform_loss_spec
from .markov_db import build_p_eta, converge, gaussian_to_transition

__all__ = [name for name in dir() if not name.startswith("_")]
