"""Idempotent splittings and finite decompositions in semi-additive process theories."""
from . import constructions, decompose, errors, matcat, quant, theory
from .errors import *  # noqa: F401,F403
from .matcat import CLASS, FREL, MatMorphism, MatTheory, SemiringSpec, class_theory, frel
from .quant import QUANT, Channel, CompositeSystem, QuantTheory, system, validate_channel
from .theory import DEFAULT_TOL, Splitting, Theory, check_theory_laws, is_causal, is_idempotent, is_subcausal

__version__ = "0.1.0"
