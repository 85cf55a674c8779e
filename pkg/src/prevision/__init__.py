"""Coherence engine for conditional events and compound conditionals.

Checks probability-prevision assessments for coherence (no Dutch book),
computes coherent extension bounds, decides p-consistency and p-entailment,
and evaluates the closed-form propagation rules against the exact-rational
LP oracle.
"""

from .bounds import (BoundPair, CoherentSetDescriptor, MatchedRule,
                     biconditional_bounds, centering_bounds,
                     coherent_set_membership, counterfactual_prevision,
                     frechet_bounds, hamacher_propagation, match_rule,
                     reverse_biconditional_set, unconditional_centering_bounds)
from .coherence import (CoherenceVerdict, ConstituentClass, ExtensionBounds,
                        PointSystem, SigmaSolution, Witness, build_points,
                        check_coherence, compute_I0, extension_bounds,
                        family_classes, solve_sigma, verify_witness)
from .crq import (Assessment, CompoundQuantity, Param, ValueExpr, as_quantity,
                  biconditional, conjoin, embed_conditional, iterate,
                  quasi_conjunction, value_function, value_table)
from .document import Document, parse_document
from .errors import (DomainError, EngineError, IncoherentPremisesError,
                     ParseError, PrevisionError, UnresolvedParameterError)
from .expressions import parse_cexpr, parse_formula
from .logic import (ConditionalEvent, Formula, Workspace, constituents,
                    gn_inclusion, implies)
from .pvalid import (EntailmentResult, InferenceRule, p_consistent, p_entails,
                     p_entails_family, rule_catalogue)

__version__ = "0.1.0"

__all__ = [
    "Assessment", "BoundPair", "CoherenceVerdict", "CoherentSetDescriptor",
    "CompoundQuantity", "ConditionalEvent", "ConstituentClass", "Document",
    "DomainError", "EngineError", "EntailmentResult", "ExtensionBounds",
    "Formula", "IncoherentPremisesError", "InferenceRule", "MatchedRule",
    "Param", "ParseError", "PointSystem", "PrevisionError", "SigmaSolution",
    "UnresolvedParameterError", "ValueExpr", "Witness", "Workspace",
    "as_quantity", "biconditional", "biconditional_bounds", "build_points",
    "centering_bounds", "check_coherence", "coherent_set_membership",
    "compute_I0", "conjoin", "constituents", "counterfactual_prevision",
    "embed_conditional", "extension_bounds", "family_classes",
    "frechet_bounds", "gn_inclusion", "hamacher_propagation", "implies",
    "iterate", "match_rule", "p_consistent", "p_entails", "p_entails_family",
    "parse_cexpr", "parse_document", "parse_formula", "quasi_conjunction",
    "reverse_biconditional_set", "rule_catalogue", "solve_sigma",
    "unconditional_centering_bounds", "value_function", "value_table",
    "verify_witness",
]
