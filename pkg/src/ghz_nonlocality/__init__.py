"""Entanglement classes and Bell-inequality maxima for the GHZ-symmetric three-qubit family rho(p, q)."""

from .bell import BellExpression, builtin, evaluate, parse, parse_all, render
from .entanglement import EntanglementClass, cgm_closed_form, cgm_x, classify
from .optimize import (
    MeasurementScenario,
    ObservableDirection,
    OptimizationResult,
    correlations,
    observable,
    random_search_oracle,
    seesaw,
    seesaw_batch,
)
from .regions import (
    NonlocalityReport,
    genuine_nonlocal,
    genuinely_entangled_local,
    l15_max,
    mermin_max,
    ns99_max,
    report,
    scan,
    standard_nonlocal,
    svetlichny_max,
)
from .states import GhzParams, InvalidStateError, XStateElements, density_matrix, validate, x_elements

__version__ = "0.1.0"
