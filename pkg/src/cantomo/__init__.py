"""cantomo: simulated Wigner-function readout of a nanomechanical oscillator.

A two-level detector atom couples simultaneously to a cantilever phonon
mode (magnetically) and to a Raman optical field; its excited-state
probability reads out the cantilever's Wigner characteristic function.
The package covers the device-parameter calculations, exact truncated-
Fock-space dynamics, the tomography pipeline from synthesized records to
the reconstructed Wigner function, and the measurement back-action on
the oscillator state.
"""

from .device import (
    DeviceParams,
    RamanParams,
    coupling_g_ac,
    magnetic_gradient,
    match_couplings,
    raman_coupling,
    reference_device,
    reference_raman,
    resonance_report,
)
from .dynamics import (
    AtomMixture,
    CouplingSet,
    MatchedRamanModel,
    composite_mode,
    jc_hamiltonian,
    pe_closed_form,
    pe_exact_unitary,
    pe_matched_exact,
    two_mode_hamiltonian,
)
from .errors import (
    ConfigError,
    IllConditionedError,
    ImprobableOutcomeError,
    NumericalContractError,
    TruncationError,
    UnmatchableError,
    UnobservableError,
    ValidityWarning,
)
from .fockspace import (
    HilbertSpec,
    ModeOperator,
    QuantumState,
    annihilation,
    cat_state,
    coherent_state,
    creation,
    displacement,
    evolve,
    fock_state,
    identity,
    make_state,
    number_operator,
    partial_trace,
    tensor,
    thermal_state,
)
from .backaction import (
    MeasurementStep,
    TrajectoryLog,
    conditional_update,
    disturbance_report,
    run_sequence,
)
from .tomography import (
    CharFnGrid,
    PolarGridSpec,
    ProbePoint,
    ProbeRecord,
    WignerGrid,
    WignerGridSpec,
    char_fn,
    char_fn_batch,
    charfn_cartesian,
    extract_char_fn,
    pe_approx,
    probe_grid,
    resample_to_cartesian,
    synthesize_records,
    wigner_direct,
    wigner_from_charfn,
)

__version__ = "0.1.0"
