"""Lossy beam splitters, dilation and MZI mesh compilation."""

from .clements import (
    MeshProgram,
    MziSetting,
    compile_cpa,
    cpa_phases,
    decompose,
    mzi_matrix,
    output_phase_relation,
    reconstruct,
)
from .dilation import DilatedUnitary, cpa_dilation, dilate, reduce_ancillas
from .lossybs import (
    BeamSplitterKind,
    Constraint,
    LossyBeamSplitter,
    absorbed_intensity,
    singular_value_pair,
    solve,
    solve_custom,
    solve_type1,
    solve_type2,
    validate,
)

__all__ = [
    "BeamSplitterKind",
    "Constraint",
    "DilatedUnitary",
    "LossyBeamSplitter",
    "MeshProgram",
    "MziSetting",
    "absorbed_intensity",
    "compile_cpa",
    "cpa_dilation",
    "cpa_phases",
    "decompose",
    "dilate",
    "mzi_matrix",
    "output_phase_relation",
    "reconstruct",
    "reduce_ancillas",
    "singular_value_pair",
    "solve",
    "solve_custom",
    "solve_type1",
    "solve_type2",
    "validate",
]
