"""2-generated graded Lie algebras over small prime fields: construction,
analysis, enumeration and verification of maximal-class and thin algebras."""

from .core import (ExtensionSpace, GradedAlgebra, HomogeneousElement, bracket,
                   canonical_form, change_generators, check_bigrading,
                   check_jacobi, eval_word, extend_degree, free_start,
                   impose_quotient, quotient_extension, terminate)
from .constructions import (BiZassenhausParams, bi_zassenhaus_quotient,
                            metabelian_maxclass, one_dim_central_extensions)
from .errors import (CapExceeded, DegreeOutOfRange, DimensionTooLarge,
                     GradalgError, Inadmissible, InconsistentBase,
                     NoSecondDiamond, NotTwoGenerated, ParseError)
from .fp import RowMatrix, lucas_binomial
from .maxclass import (CentralizerPoint, ConstituentAnalysis,
                       centralizer_sequence, constituent_lengths,
                       enumerate_maxclass, from_centralizers,
                       is_metabelian_through)
from .thin import (DiamondReport, SearchResult, TheoremReport,
                   build_M_quotient, check_covering, diamond_scan,
                   second_diamond, thin_search, verify_structure_theorem)

__version__ = "0.1.0"

__all__ = [
    "BiZassenhausParams", "CapExceeded", "CentralizerPoint",
    "ConstituentAnalysis", "DegreeOutOfRange", "DiamondReport",
    "DimensionTooLarge", "ExtensionSpace", "GradalgError", "GradedAlgebra",
    "HomogeneousElement", "Inadmissible", "InconsistentBase",
    "NoSecondDiamond", "NotTwoGenerated", "ParseError", "RowMatrix",
    "SearchResult", "TheoremReport", "bi_zassenhaus_quotient", "bracket",
    "build_M_quotient", "canonical_form", "centralizer_sequence",
    "change_generators", "check_bigrading", "check_covering", "check_jacobi",
    "constituent_lengths", "diamond_scan", "enumerate_maxclass", "eval_word",
    "extend_degree", "free_start", "from_centralizers", "impose_quotient",
    "is_metabelian_through", "lucas_binomial", "metabelian_maxclass",
    "one_dim_central_extensions", "quotient_extension", "second_diamond",
    "terminate", "thin_search", "verify_structure_theorem",
]
