"""Integral functionals of Levy processes.

Simulation of exponential functionals int_0^inf e^{-xi_{s-}} d eta_s and of
integrals int_0^inf g(xi_t) dY_t, analytic criteria for convergence and for
the structure of their laws (constant, atomic, continuous, absolutely
continuous), and statistical tests that confront pools of Monte Carlo
samples with the analytic verdicts.
"""

from .criteria import (Classification, ConvergenceReport, DegeneracyCheck,
                       RuleCheck, check_convergence, check_degenerate,
                       classify_exponential, classify_g_integral,
                       degeneracy_report)
from .experiment import (ExperimentSpec, RunResult, SpecError, load_spec,
                         parse_spec, run)
from .functionals import (GDescriptor, HorizonPolicy, SamplePool,
                          YProcessSpec, integrate_exponential, integrate_g,
                          sample_exponential_functional,
                          sample_fixed_point_split, sample_g_functional)
from .measures import (CurveSupported, Interval, JointAtoms, LevyMeasure1D,
                       ProductIndependent, integrate_against)
from .path_sim import PathBuilder, PathGrid, SimConfig, simulate_path
from .quadrature import NumericsError, QuadratureConfig
from .rng import RngStream
from .stats import (AtomCandidate, AtomReport, detect_atoms, emit_histogram,
                    fixed_point_test, ks_test)
from .triplets import (LevyTriplet1D, LevyTriplet2D, a_xi,
                       doleans_xi_from_eta)

__version__ = "0.1.0"

__all__ = [
    "AtomCandidate", "AtomReport", "Classification", "ConvergenceReport",
    "CurveSupported", "DegeneracyCheck", "ExperimentSpec", "GDescriptor",
    "HorizonPolicy", "Interval", "JointAtoms", "LevyMeasure1D",
    "LevyTriplet1D", "LevyTriplet2D", "NumericsError", "PathBuilder",
    "PathGrid", "ProductIndependent", "QuadratureConfig", "RngStream",
    "RuleCheck", "RunResult", "SamplePool", "SimConfig", "SpecError",
    "YProcessSpec", "a_xi", "check_convergence", "check_degenerate",
    "classify_exponential", "classify_g_integral", "degeneracy_report",
    "detect_atoms", "doleans_xi_from_eta", "emit_histogram",
    "fixed_point_test", "integrate_against", "integrate_exponential",
    "integrate_g", "ks_test", "load_spec", "parse_spec", "run",
    "sample_exponential_functional", "sample_fixed_point_split",
    "sample_g_functional", "simulate_path",
]
