"""Entanglement measures, their assistance versions, and polygamy checks
for small multi-qubit pure states."""
__version__ = "0.1.0"

from .assistance import (Ensemble, OptimizerConfig, assistance_value,
                         assisted_measure, ca_two_qubit_closed)
from .measures import (CONCURRENCE, TANGLE, MeasureSpec, concurrence_pure,
                       eof_pure, measure_eval, negativity_pure, renyi_pure,
                       schmidt_spectrum, tangle_pure, tsallis_pure)
from .polygamy import (KKind, KSolution, def1_check, k_solution,
                       polygamy_power_state)
from .qcore import (Bipartition, DensityMatrix, PureState, RngSeed,
                    partial_trace, random_pure_state, reduced_state)

__all__ = [
    "__version__", "Bipartition", "CONCURRENCE", "DensityMatrix", "Ensemble",
    "KKind", "KSolution", "MeasureSpec", "OptimizerConfig", "PureState",
    "RngSeed", "TANGLE", "assistance_value", "assisted_measure",
    "ca_two_qubit_closed", "concurrence_pure", "def1_check", "eof_pure",
    "k_solution", "measure_eval", "negativity_pure", "partial_trace",
    "polygamy_power_state", "random_pure_state", "reduced_state", "renyi_pure",
    "schmidt_spectrum", "tangle_pure", "tsallis_pure",
]
