"""
Synthesis Constants

Numeric tolerances, simulation caps, gate-cost figures and default settings
shared across all modules.
"""

# Tolerances
AMPLITUDE_TOL = 1e-10
UNITARY_TOL = 1e-12
ANGLE_EPS = 1e-14
FIDELITY_THRESHOLD = 1.0 - 1e-9
ANCILLA_RESIDUAL_TOL = 1e-10

# Simulation caps (qubits)
DENSE_WIDTH_CAP = 26
PERMUTATION_WIDTH_CAP = 24
UNITARY_WIDTH_CAP = 10

# Smallest last batch the ancilla-free path pads to; a lone transposition
# leaves its block swap nothing to borrow
MIN_PADDED_BATCH = 2

# A 3-qubit Toffoli lowers to 10 single-qubit gates and 6 CNOTs
TOFFOLI_SINGLE = 10
TOFFOLI_CNOT = 6

# Environment
SEED_ENV = "SPARSEPREP_SEED"
SETTINGS_FILENAME = "sparseprep_settings.json"

# Synthesis modes accepted by the CLI and the settings file
MODES = ("auto", "no-ancilla", "ancilla")

DEFAULT_SETTINGS = {
    'mode': 'auto',
    'ancillas': 0,
    'strict_dispatch': False,
    'bench_workers': 1,
    'seed': 0,
    'expand_output': False,
}

# Bench methods
BENCH_METHODS = ("no_ancilla", "ancilla", "naive_baseline")


def is_power_of_two(value: int) -> bool:
    """True for 1, 2, 4, ..."""
    return value > 0 and (value & (value - 1)) == 0


def ceil_log2(value: int) -> int:
    """Smallest k with 2**k >= value (0 for value <= 1)."""
    return max(0, (value - 1).bit_length())
