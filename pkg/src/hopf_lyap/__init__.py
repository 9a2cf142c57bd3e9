"""First Lyapunov coefficient of a 4D fast-slow population model at its Hopf point.

Two routes are provided: a numerical normal-form pipeline
(:func:`hopf_lyap.lyapunov.first_lyapunov`) and the closed-form small-epsilon
expansion (:mod:`hopf_lyap.asymptotics`).
"""

from .asymptotics import A0_REFERENCE, a0_closed_form, coefficients
from .hopf import MU0, HopfPoint, solve_hopf_mu
from .lyapunov import first_lyapunov, lyapunov_vs_eps
from .model import ModelParams, equilibrium, eval_field

__version__ = "0.1.0"

__all__ = [
    "A0_REFERENCE",
    "MU0",
    "HopfPoint",
    "ModelParams",
    "a0_closed_form",
    "coefficients",
    "equilibrium",
    "eval_field",
    "first_lyapunov",
    "lyapunov_vs_eps",
    "solve_hopf_mu",
]
