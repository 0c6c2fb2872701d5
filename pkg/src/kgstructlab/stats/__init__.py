from .correlation import UndefinedCorrelationError, correlation_table, pearson, spearman
from .surrogate import Surrogate, SurrogateError, fit_surrogate
from .sobol import SobolResult, sobol_indices, sobol_over_records

__all__ = [
    "SobolResult",
    "Surrogate",
    "SurrogateError",
    "UndefinedCorrelationError",
    "correlation_table",
    "fit_surrogate",
    "pearson",
    "sobol_indices",
    "sobol_over_records",
    "spearman",
]
