"""Exact Faithful Shapley Interaction scores via a low-rank matrix product operator."""
from .correction import (
    BondState,
    CorrectionMpo,
    CorrectionWeight,
    build_correction_mpo,
    correction_weight,
    enumerate_states,
    precontract,
)
from .fsi import FsiConfig, InteractionScores, VerificationReport, fsi_baseline, fsi_tt, verify
from .lattice import MoebiusVector, ValueFunction, mobius_transform, subsets_up_to, zeta_transform
from .sweep import MemoryCapExceeded, apply_mpo, apply_mpo_instrumented

__version__ = "0.1.0"
