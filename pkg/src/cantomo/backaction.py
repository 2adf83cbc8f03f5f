"""Conditional evolution of the cantilever under repeated atom readouts.

Each detector atom starts in its ground state, couples for a time tau
with the Raman drive at (I, phi), and is then measured.  In the
classical-field (large-I) limit the ground- and excited-outcome branches
act on the cantilever alone through displacement combinations

    M_g = ( e^{+i theta/2} D(+mu/2) + e^{-i theta/2} D(-mu/2) ) / 2
    M_e = -e^{-i phi} ( e^{+i theta/2} D(+mu/2) - e^{-i theta/2} D(-mu/2) ) / 2

with theta = 2 g tau sqrt(I) and mu = i g tau e^{i phi}.  The pair is
exactly trace preserving (M_g+ M_g + M_e+ M_e = 1), a pure state stays
pure, and successive ground outcomes push the state into superpositions
of increasingly separated phase-space components.

The maps above are derived from the composite-mode Jaynes-Cummings
evolution with the photon operators replaced by the classical amplitude,
and validated numerically against that reference.  The "exact" mode
instead evolves the full atom x photon x phonon system with a quantized
coherent field and returns the reduced cantilever density matrix; its
purity is genuinely below one, because
the field is displaced by +-mu/2 alongside the phonon and so carries
which-path information that suppresses the cat coherence by
e^{-|mu|^2/2} independent of I.  The reduced state therefore converges
to the large-I map only in the observable statistics, not in fidelity;
``conditional_update`` reports purity so callers can see this.
"""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import MatchedRamanModel, photon_truncation
from .errors import ImprobableOutcomeError
from .fockspace import QuantumState, displacement
from .tomography import WignerGrid

__all__ = [
    "MeasurementStep",
    "TrajectoryLog",
    "conditional_update",
    "run_sequence",
    "disturbance_report",
    "DisturbanceReport",
]


@dataclass(frozen=True)
class MeasurementStep:
    outcome: str              # "ground" | "excited"
    tau: float
    intensity: float
    phi: float
    probability: float        # Born probability of the recorded outcome

    def __post_init__(self):
        if self.outcome not in ("ground", "excited"):
            raise ValueError(f"outcome must be ground or excited, got {self.outcome!r}")
        if not 0.0 < self.probability <= 1.0 + 1e-12:
            raise ValueError(f"outcome probability {self.probability} outside (0, 1]")


@dataclass
class TrajectoryLog:
    """Snapshots and bookkeeping of one measurement sequence."""

    initial_label: str
    g: float
    policy: str
    seed: int | None
    steps: list[MeasurementStep] = field(default_factory=list)
    snapshots: list[QuantumState] = field(default_factory=list)   # step 0 first
    purities: list[float] = field(default_factory=list)
    mean_phonons: list[float] = field(default_factory=list)
    joint_probability: float = 1.0

    def record(self, state: QuantumState):
        self.snapshots.append(state)
        self.purities.append(state.purity())
        n = np.arange(state.dim)
        self.mean_phonons.append(float(np.sum(state.number_populations() * n)))


def _large_i_branches(dim: int, g: float, tau: float, intensity: float, phi: float):
    theta = 2.0 * g * tau * np.sqrt(intensity)
    mu = 1j * g * tau * np.exp(1j * phi)
    d_plus = displacement(dim, mu / 2.0).matrix
    d_minus = displacement(dim, -mu / 2.0).matrix
    m_g = 0.5 * (np.exp(1j * theta / 2.0) * d_plus + np.exp(-1j * theta / 2.0) * d_minus)
    m_e = -0.5 * np.exp(-1j * phi) * (
        np.exp(1j * theta / 2.0) * d_plus - np.exp(-1j * theta / 2.0) * d_minus
    )
    return m_g, m_e


def conditional_update(psi_c: QuantumState, outcome: str, g: float, tau: float,
                       raman: tuple[float, float], mode: str = "largeI",
                       dim_photon: int | None = None) -> tuple[QuantumState, float]:
    """State of the cantilever after one atom readout with the given outcome.

    ``raman`` is (intensity, phi).  In ``largeI`` mode the classical-field
    branch operators above act on the pure state directly; in ``exact``
    mode the quantized two-mode system is evolved and the reduced
    cantilever density matrix is returned (the photon stays entangled, so
    no pure state exists to return; check ``.purity()``).

    Returns (state, probability of the outcome).
    """
    if outcome not in ("ground", "excited"):
        raise ValueError(f"outcome must be ground or excited, got {outcome!r}")
    if mode not in ("largeI", "exact"):
        raise ValueError(f"mode must be largeI or exact, got {mode!r}")
    if not psi_c.is_pure or psi_c.space.has_atom or len(psi_c.space.mode_dims) != 1:
        raise ValueError("conditional_update expects a pure single-mode cantilever state")
    intensity, phi = raman
    if intensity < 0:
        raise ValueError("intensity must be nonnegative")

    if mode == "largeI":
        m_g, m_e = _large_i_branches(psi_c.dim, g, tau, intensity, phi)
        branch = m_g if outcome == "ground" else m_e
        vec = branch @ psi_c.data
        prob = float(np.real(vec.conj() @ vec))
        if prob < 1e-12:
            raise ImprobableOutcomeError(
                f"{outcome} outcome has probability {prob:.3e}; renormalization unstable"
            )
        return QuantumState(psi_c.space, vec / np.sqrt(prob)), prob

    dk = photon_truncation(intensity) if dim_photon is None else dim_photon
    model = MatchedRamanModel(dk, psi_c.dim)
    amp_g, amp_e = model.conditional_amplitudes(psi_c.data, g, tau, intensity, phi)
    amp = amp_g if outcome == "ground" else amp_e
    prob = float(np.sum(np.abs(amp) ** 2))
    if prob < 1e-12:
        raise ImprobableOutcomeError(
            f"{outcome} outcome has probability {prob:.3e}; renormalization unstable"
        )
    rho = np.einsum("kn,km->nm", amp, amp.conj()) / prob
    rho = 0.5 * (rho + rho.conj().T)
    return QuantumState(psi_c.space, rho), prob


def run_sequence(psi0: QuantumState, steps: int, schedule, policy: str, g: float,
                 seed: int | None = None, initial_label: str = "") -> TrajectoryLog:
    """Iterate large-I conditional updates over a per-step (tau, I, phi) schedule.

    policy "condition-on-ground" forces every outcome to ground and
    accumulates the joint probability; "sample-outcomes" draws each
    outcome from its Born probability using the stated seed.  Dissipation
    and free evolution between atoms are not modeled.
    """
    if policy not in ("condition-on-ground", "sample-outcomes"):
        raise ValueError(f"unknown policy {policy!r}")
    schedule = list(schedule)
    if len(schedule) != steps:
        raise ValueError(f"schedule length {len(schedule)} != steps {steps}")
    if policy == "sample-outcomes" and seed is None:
        raise ValueError("sample-outcomes policy requires a seed")

    rng = np.random.default_rng(seed) if policy == "sample-outcomes" else None
    log = TrajectoryLog(initial_label=initial_label, g=g, policy=policy,
                        seed=seed if rng is not None else None)
    log.record(psi0)
    state = psi0
    for tau, intensity, phi in schedule:
        if rng is None:
            state, prob = conditional_update(state, "ground", g, tau, (intensity, phi))
            outcome = "ground"
        else:
            m_g, m_e = _large_i_branches(state.dim, g, tau, intensity, phi)
            vec_g = m_g @ state.data
            p_g = float(np.real(vec_g.conj() @ vec_g))
            if rng.random() < p_g:
                outcome, vec, prob = "ground", vec_g, p_g
            else:
                vec_e = m_e @ state.data
                p_e = float(np.real(vec_e.conj() @ vec_e))
                outcome, vec, prob = "excited", vec_e, p_e
            if prob < 1e-12:
                raise ImprobableOutcomeError(
                    f"{outcome} outcome has probability {prob:.3e}; renormalization unstable"
                )
            state = QuantumState(state.space, vec / np.sqrt(prob))
        log.steps.append(MeasurementStep(outcome, tau, intensity, phi, prob))
        log.joint_probability *= prob
        log.record(state)
    return log


@dataclass(frozen=True)
class DisturbanceRow:
    step: int
    outcome: str | None
    probability: float | None
    fidelity_initial: float
    mean_phonon: float
    purity: float
    wigner_negativity: float | None


@dataclass(frozen=True)
class DisturbanceReport:
    rows: tuple[DisturbanceRow, ...]

    def as_text(self) -> str:
        header = (
            f"{'step':>4} {'outcome':>8} {'prob':>12} {'fid(initial)':>14} "
            f"{'<n>':>12} {'purity':>12} {'neg.volume':>12}"
        )
        lines = [header]
        for r in self.rows:
            lines.append(
                f"{r.step:>4} {r.outcome or '-':>8} "
                f"{('-' if r.probability is None else format(r.probability, '.6f')):>12} "
                f"{r.fidelity_initial:>14.10f} {r.mean_phonon:>12.6f} {r.purity:>12.10f} "
                f"{('-' if r.wigner_negativity is None else format(r.wigner_negativity, '.6f')):>12}"
            )
        return "\n".join(lines) + "\n"


def disturbance_report(log: TrajectoryLog,
                       wigner_grids: list[WignerGrid] | None = None) -> DisturbanceReport:
    """Per-step disturbance summary of a trajectory.

    ``wigner_grids``, when given, must hold one grid per snapshot and
    supplies the Wigner-negativity-volume column.
    """
    if not log.snapshots:
        raise ValueError("trajectory log holds no snapshots")
    if wigner_grids is not None and len(wigner_grids) != len(log.snapshots):
        raise ValueError("need one Wigner grid per snapshot")
    psi0 = log.snapshots[0]
    rows = []
    for i, snap in enumerate(log.snapshots):
        fid = psi0.overlap(snap) if (psi0.is_pure or snap.is_pure) else float("nan")
        rows.append(
            DisturbanceRow(
                step=i,
                outcome=None if i == 0 else log.steps[i - 1].outcome,
                probability=None if i == 0 else log.steps[i - 1].probability,
                fidelity_initial=float(fid),
                mean_phonon=log.mean_phonons[i],
                purity=log.purities[i],
                wigner_negativity=None if wigner_grids is None
                else wigner_grids[i].negativity_volume(),
            )
        )
    return DisturbanceReport(tuple(rows))
