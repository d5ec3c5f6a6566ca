"""Closed-form linear-entropy classical correlation of qudit-qubit states and
the tight discord upper bound it induces."""

from .qmat import (
    DensityMatrix,
    GeneratorBasis,
    InvariantViolation,
    bloch_to_matrix,
    bloch_vector,
    gellmann_basis,
    herm_eig,
    inv_sqrt_on_range,
    linear_entropy,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from .chanext import (
    AffineQubitMap,
    QubitSpectralData,
    SymmetricPurification,
    apply_map,
    extract_map,
    qubit_spectral,
    symmetric_purify,
)
from .lincorr import (
    LinCorrResult,
    OptimalDecomposition,
    TwoOutcomeMeasurement,
    classical_corr_linear,
    i2_at_measurement,
    optimal_decomposition,
    povm_from_decomposition,
)
from .discord import (
    BoundReport,
    MeasurementDirection,
    bell_diagonal_oracle,
    discord_numerical,
    discord_upper_bound,
    eof_upper_bound,
    measured_cond_entropy,
    mutual_information,
)
from .states import (
    KrausChannel,
    amplitude_damping,
    apply_channel,
    apply_channel_each,
    bell_diagonal,
    general_two_qubit,
    ghz,
    make_state,
    random_density,
    regroup_bipartition,
    w,
    x_state,
)

__version__ = "0.1.0"
