"""Monte Carlo graph search for quantum circuits."""

from ._qmcgs import (
    ConfigError,
    bench,
    ca_evolution,
    ca_sweep,
    circuit_unitary,
    default_config,
    dft_matrix,
    frobenius_distance,
    gate_set,
    gate_set_names,
    qml,
    synth,
    wolfram_code,
)

__all__ = [
    "ConfigError",
    "bench",
    "ca_evolution",
    "ca_sweep",
    "circuit_unitary",
    "default_config",
    "dft_matrix",
    "frobenius_distance",
    "gate_set",
    "gate_set_names",
    "qml",
    "synth",
    "wolfram_code",
]
