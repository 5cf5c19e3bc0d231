"""Analysis, generation and swapping of polarization-spatial hyperentangled GHZ states
with quantum-dot spins in microcavities."""

from .analyzer import AnalysisRecord, Classification, decode, run_hgsa
from .cavity import CavityParams, DoubleSidedCoeffs, InteractionMode, SingleSidedCoeffs
from .generator import GenerationResult, run_hgsg
from .states import PureState, make_hyper_ghz, make_pol_ghz, make_spatial_ghz

__all__ = [
    "AnalysisRecord",
    "CavityParams",
    "Classification",
    "DoubleSidedCoeffs",
    "GenerationResult",
    "InteractionMode",
    "PureState",
    "SingleSidedCoeffs",
    "decode",
    "make_hyper_ghz",
    "make_pol_ghz",
    "make_spatial_ghz",
    "run_hgsa",
    "run_hgsg",
]
__version__ = "0.1.0"
