"""Occupation-clock exit, resolvent and last-passage laws for spectrally
negative Levy processes with rational transforms, plus a Monte Carlo
oracle and a batch CLI."""

from .models import ExponentialJumps, GenericJumps, LevyModel
from .scale import CLOSED, INVERSION, ScaleEval
from .inversion import InversionConfig, euler_inversion
from ._quad import QuadSettings, integrate_smooth
from .kernels import KernelEval, OccupationWindow
from .lastpassage import (Corridor, LastInftyValue, LastPassageQuery,
                          MeasureValue, SigmaKind, classical_exit,
                          classical_potential_density,
                          corridor_resolvent_apply,
                          corridor_resolvent_density, example_pq_equal,
                          first_passage_occupation, global_resolvent_density,
                          joint_laws, last_down_creep, last_down_density,
                          last_hit, last_infty, last_totals,
                          last_up_jump_density, last_up_measure, mu_hat,
                          mu_measure, prob_sigma_zero)
from .mc import (FUNCTIONALS, McEstimate, PathRecord, SimConfig,
                 density_histogram, sample_path, simulate_functional,
                 simulate_paths)

__version__ = "0.1.0"

__all__ = [
    "ExponentialJumps", "GenericJumps", "LevyModel",
    "CLOSED", "INVERSION", "ScaleEval",
    "InversionConfig", "euler_inversion",
    "QuadSettings", "integrate_smooth",
    "KernelEval", "OccupationWindow",
    "Corridor", "LastInftyValue", "LastPassageQuery", "MeasureValue",
    "SigmaKind", "classical_exit", "classical_potential_density",
    "corridor_resolvent_apply", "corridor_resolvent_density",
    "example_pq_equal", "first_passage_occupation",
    "global_resolvent_density", "joint_laws", "last_down_creep",
    "last_down_density", "last_hit", "last_infty", "last_totals",
    "last_up_jump_density", "last_up_measure", "mu_hat", "mu_measure",
    "prob_sigma_zero",
    "FUNCTIONALS", "McEstimate", "PathRecord", "SimConfig",
    "density_histogram", "sample_path", "simulate_functional",
    "simulate_paths",
    "__version__",
]
