"""Exceptional points in small non-Hermitian Hamiltonians: closed forms,
biorthogonal eigenvectors, EP location, sweeps and S-matrix line shapes."""
from .closedform import cardano_eigenvalues, classify_two_level, two_level_eigenvalues
from .eploc import refine_ep_1d, refine_ep_2d, scan_coalescence
from .ham import ModelMatrix, build_pt, build_three_level_doorway, build_two_level
from .scenario import Scenario, get_scenario, list_scenarios
from .spectral import eigendecompose
from .sweep import run_ep_search, run_smatrix, run_sweep

__version__ = "0.1.0"
