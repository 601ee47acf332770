"""Band structures of tight-binding models from simulated quantum algorithms."""

from ._qbands import (
    ConfigError,
    Model,
    ansatz_state,
    band_structure,
    commuting_groups,
    exact_bands,
    excitation_block,
    load_model,
    parse_model,
    pauli_image,
    polonium_model,
    qpe_energy,
    solve_k,
)

__all__ = [
    "ConfigError",
    "Model",
    "ansatz_state",
    "band_structure",
    "commuting_groups",
    "exact_bands",
    "excitation_block",
    "load_model",
    "parse_model",
    "pauli_image",
    "polonium_model",
    "qpe_energy",
    "solve_k",
]
