"""Contextuality hierarchy of empirical models built from qubit states."""
from ._kernels import BACKEND
from .boolfn import BooleanPolynomial, PredictedClass, parse_poly, predicted_class
from .contextuality import (ContextualityClass, GlobalAssignment, Label, classify, consistent_assignments,
                            dicke_certificate, lp_noncontextual, non_extendable_sections)
from .empirical import EmpiricalModel, Relabeling, Scenario, SupportTable, build_model, pr_box, relabel, support
from .qcore import AmplitudeScalar, Observable, StateVector, born_probability, tensor
from .states import StateSpec, parse_spec

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BooleanPolynomial", "PredictedClass", "parse_poly", "predicted_class",
    "ContextualityClass", "GlobalAssignment", "Label", "classify", "consistent_assignments",
    "dicke_certificate", "lp_noncontextual", "non_extendable_sections",
    "EmpiricalModel", "Relabeling", "Scenario", "SupportTable", "build_model", "pr_box", "relabel", "support",
    "AmplitudeScalar", "Observable", "StateVector", "born_probability", "tensor",
    "StateSpec", "parse_spec",
]
