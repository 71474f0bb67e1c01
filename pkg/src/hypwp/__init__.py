"""Weight calculus lab for weakly hyperbolic Cauchy problems.

Shape functions, Levi weights, moduli of continuity, hypothesis audits,
mollification, per-mode spectral integration and the conjugation weight.
"""

from .analysis import ProblemSpec, WeightFunction, classify, loss_weight, total_weight
from .conjugator import ConjugatorConfig, phi_addends, verify_phi_reduction
from .errors import DomainError, HypwpError, NumericalError, SpecError
from .leviweight import LeviWeight, ZonePartition, check_decay_condition, levi_part, rho, t_xi, verify_weight_integrals, verify_rho_bounds
from .moduli import Modulus, WeightSequence, check_sequence_inequality
from .mollify import TimeCoefficient, bump_kernel, mollify, verify_mollifier_bounds
from .shape import ShapeFunction, check_shape_conditions
from .spectral import ModelProblem, char_roots, first_order_system, h_symbol, integrate_mode, measure_loss

__version__ = "0.1.0"
