"""Failure cascades among banks linked by interbank claims and shared assets.

Interbank exposure matrices are rebuilt from aggregate claims and turned
into an interdependency matrix; a price shock then sets off rounds of
failures that the package traces to a fixed point.
"""

__version__ = "0.1.0"

from .cascade import CascadeResult, FailureParams, ShockScenario, apply_shock, failure_thresholds, run_cascade
from .errors import (
    ColumnOverflow,
    ContagionError,
    DimensionMismatch,
    InfeasibleMarginals,
    InputError,
    Insolvent,
    NonHollow,
    NotConverged,
    NumericalError,
    ParseError,
    SingularSystem,
    ValidationError,
)
from .model import (
    CapitalRatios,
    FractionMatrix,
    InterdependencyMatrix,
    PortfolioMatrix,
    balance_sheet_equity,
    capital_ratios,
    equity_values,
    interdependency,
    to_fraction_matrix,
    total_values,
)
from .netstats import NetworkStats, core_periphery_fit, network_statistics
from .reconstruct import (
    ExposureMatrix,
    Marginals,
    reconstruct,
    reconstruct_anan,
    reconstruct_hala,
    reconstruct_maxe,
    validate_marginals,
)
