"""
dualax: action-angle duality between the hyperbolic Sutherland model and the
rational Ruijsenaars-Schneider model, realized by symplectic reduction.
"""

from dualax.duality import map_state, rs_to_suth, suth_to_rs
from dualax.models import Coupling, Family, HamiltonianId, RSState, SutherlandState

__version__ = "0.1.0"

__all__ = [
    "Coupling",
    "Family",
    "HamiltonianId",
    "RSState",
    "SutherlandState",
    "map_state",
    "rs_to_suth",
    "suth_to_rs",
]
