"""Numerics for the semirelativistic Choquard equation with a Coulomb term.

    sqrt(-Delta + m^2) u - m u + V u - (mu/|x|) u = (I_alpha * F(u)) f(u) - K |u|^(q-2) u

on a periodic box. Submodules hold the constants and the discrete operators;
the solver descends on the Nehari manifold.
"""
from .constants import c_n_half, hardy_sharp, mu_star, verify_c_n_half
from .energy import EnergyBreakdown, energy_per, first_variation, gradient_field
from .model import ModelParams, Problem, validate
from .nehari import nehari_residual, project
from .nonlinearity import NonlinearitySpec
from .riesz import RieszPlan
from .solver import SolveOptions, ground_state
from .spectral import Grid

__version__ = "0.1.0"

__all__ = [
    "EnergyBreakdown", "Grid", "ModelParams", "NonlinearitySpec", "Problem", "RieszPlan", "SolveOptions",
    "c_n_half", "energy_per", "first_variation", "gradient_field", "ground_state", "hardy_sharp",
    "mu_star", "nehari_residual", "project", "validate", "verify_c_n_half",
]
