"""Physical device parameters and coupling-rate calculators.

This is the only module that touches SI units.  It converts magnet
geometry, oscillator properties and Raman drive settings into the two
coupling rates that the dynamics modules consume (rad/s, hbar absorbed):

  * the magnetic atom-oscillator rate  g_ac = mu_B g_F m_Fx |G_B| x_zp / hbar,
    with the point-dipole gradient |G_B| = 3 mu0 |mu_c| / (4 pi r^4) and the
    zero-point amplitude x_zp = sqrt(hbar / (2 omega_c m_c));
  * the effective Raman rate  g = -Omega_L Omega_k / delta_L.

The readout scheme needs the two rates to be equal; ``match_couplings``
solves the matching condition for one free parameter in closed form.
"""

import math
import warnings
from dataclasses import dataclass

from scipy import constants as _const

from .errors import UnmatchableError, ValidityWarning

__all__ = [
    "MU_B",
    "MU_0",
    "HBAR",
    "DeviceParams",
    "RamanParams",
    "magnetic_gradient",
    "zero_point_amplitude",
    "coupling_g_ac",
    "raman_coupling",
    "match_couplings",
    "resonance_report",
    "ResonanceReport",
    "reference_device",
    "reference_raman",
    "load_device_file",
]

MU_B = _const.value("Bohr magneton")  # J/T
MU_0 = _const.mu_0                    # N/A^2
HBAR = _const.hbar                    # J s

#: detuning warning threshold: the adiabatic elimination behind the Raman
#: rate wants |delta_L| >> omega_0; warn below 10x.
DETUNING_RATIO_MIN = 10.0

#: resonance reporting threshold (fraction of omega_c); at or above it the
#: report flags the device off-resonant (strict: the boundary is flagged).
OFF_RESONANCE_FRACTION = 1e-3


@dataclass(frozen=True)
class DeviceParams:
    """Oscillator + magnet + atom parameters, SI units throughout."""

    m_c: float      # effective oscillator mass, kg
    omega_c: float  # oscillator angular frequency, rad/s
    omega_0: float  # atomic two-level splitting, rad/s
    mu_c: float     # magnet dipole moment, J/T
    r: float        # atom-magnet distance, m
    g_F: float      # Lande factor (dimensionless)
    m_Fx: float     # projection quantum number along x (dimensionless)

    def __post_init__(self):
        for name in ("m_c", "omega_c", "omega_0", "r"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"device parameter {name} must be positive, got {v}")


@dataclass(frozen=True)
class RamanParams:
    """Raman drive: classical Rabi rate, vacuum Rabi rate, detuning (rad/s)."""

    omega_L_rabi: float
    omega_k_rabi: float
    delta_L: float

    def __post_init__(self):
        if self.delta_L == 0 or not math.isfinite(self.delta_L):
            raise ValueError("Raman detuning delta_L must be nonzero and finite")

    def warn_if_detuning_small(self, omega_0: float) -> bool:
        """Warn when |delta_L| < 10 * omega_0; returns True if it warned."""
        if abs(self.delta_L) < DETUNING_RATIO_MIN * omega_0:
            warnings.warn(
                f"|delta_L| = {abs(self.delta_L):.3e} rad/s is below "
                f"{DETUNING_RATIO_MIN:g} x omega_0 = {DETUNING_RATIO_MIN * omega_0:.3e}; "
                "the adiabatic elimination behind the Raman rate is strained",
                ValidityWarning,
                stacklevel=2,
            )
            return True
        return False


def magnetic_gradient(mu_c: float, r: float) -> float:
    """Point-dipole field gradient magnitude 3 mu0 |mu_c| / (4 pi r^4), T/m."""
    if not (r > 0 and math.isfinite(r)):
        raise ValueError(f"atom-magnet distance r must be positive, got {r}")
    return 3.0 * MU_0 * abs(mu_c) / (4.0 * math.pi * r**4)


def zero_point_amplitude(p: DeviceParams) -> float:
    """x_zp = sqrt(hbar / (2 omega_c m_c)), m."""
    return math.sqrt(HBAR / (2.0 * p.omega_c * p.m_c))


def coupling_g_ac(p: DeviceParams) -> float:
    """Magnetic coupling rate in rad/s; sign follows g_F * m_Fx."""
    g_b = magnetic_gradient(p.mu_c, p.r)
    return MU_B * p.g_F * p.m_Fx * g_b * zero_point_amplitude(p) / HBAR


def raman_coupling(rp: RamanParams) -> float:
    """Effective Raman rate  -Omega_L Omega_k / delta_L  (rad/s, signed)."""
    if rp.delta_L == 0:
        raise ZeroDivisionError("Raman detuning delta_L is zero")
    return -rp.omega_L_rabi * rp.omega_k_rabi / rp.delta_L


def match_couplings(p: DeviceParams, rp: RamanParams, free: str) -> float:
    """Solve g_ac = -Omega_L Omega_k / delta_L for one free parameter.

    ``free`` is one of ``"omega_L_rabi"``, ``"delta_L"``, ``"r"``.  The
    matching is on signed values.  Returns the solved parameter value;
    raises :class:`UnmatchableError` when no admissible (positive drive
    strength / positive distance / nonzero detuning) solution exists.
    """
    if free == "omega_L_rabi":
        target = coupling_g_ac(p)
        if rp.omega_k_rabi == 0:
            raise UnmatchableError("omega_k_rabi is zero; no drive strength can match")
        val = -target * rp.delta_L / rp.omega_k_rabi
        if not (val > 0 and math.isfinite(val)):
            raise UnmatchableError(
                f"solved omega_L_rabi = {val!r} is not a positive drive strength "
                "(flip the sign of delta_L or of m_Fx * g_F)"
            )
        return val
    if free == "delta_L":
        target = coupling_g_ac(p)
        if target == 0:
            raise UnmatchableError("g_ac is zero; no finite detuning can match")
        val = -rp.omega_L_rabi * rp.omega_k_rabi / target
        if val == 0 or not math.isfinite(val):
            raise UnmatchableError("solved delta_L is zero; Raman rates vanish")
        return val
    if free == "r":
        target = raman_coupling(rp)
        prefactor = (
            MU_B * p.g_F * p.m_Fx
            * 3.0 * MU_0 * abs(p.mu_c) / (4.0 * math.pi)
            * zero_point_amplitude(p) / HBAR
        )  # g_ac = prefactor / r^4
        if target == 0 or prefactor == 0:
            raise UnmatchableError("vanishing target or magnetic prefactor; r drops out")
        if (target > 0) != (prefactor > 0):
            raise UnmatchableError(
                "g_ac and the Raman rate have opposite signs for every r > 0"
            )
        return (abs(prefactor) / abs(target)) ** 0.25
    raise ValueError(f"free parameter must be omega_L_rabi, delta_L or r, got {free!r}")


@dataclass(frozen=True)
class ResonanceReport:
    omega_c: float
    omega_0: float
    detuning: float        # omega_c - omega_0, rad/s
    off_resonant: bool     # |detuning| >= OFF_RESONANCE_FRACTION * omega_c


def resonance_report(p: DeviceParams) -> ResonanceReport:
    """Report the atom-oscillator detuning and flag the resonance condition."""
    detuning = p.omega_c - p.omega_0
    off = abs(detuning) >= OFF_RESONANCE_FRACTION * p.omega_c
    return ResonanceReport(p.omega_c, p.omega_0, detuning, off)


def reference_device() -> DeviceParams:
    """Illustrative 6Li-based preset (not measured data).

    The hyperfine splitting 2 pi x 228 MHz is the 6Li value; mass, magnet
    moment and distance are chosen so the magnetic coupling lands in the
    kHz range (g_ac ~ 2 pi x 27 kHz).
    """
    return DeviceParams(
        m_c=1e-18,                     # 1 fg doubly clamped beam
        omega_c=2 * math.pi * 228e6,   # resonant with the atom
        omega_0=2 * math.pi * 228e6,
        mu_c=1e-14,                    # ~(200 nm)^3 ferromagnetic domain
        r=1e-7,                        # 100 nm standoff
        g_F=2.0 / 3.0,
        m_Fx=0.5,
    )


def reference_raman() -> RamanParams:
    """Raman drive preset near the matched point of the reference device."""
    return RamanParams(
        omega_L_rabi=2 * math.pi * 65e6,
        omega_k_rabi=2 * math.pi * 1e6,
        delta_L=-2 * math.pi * 2.4e9,
    )


_DEVICE_KEYS = ("m_c", "omega_c", "omega_0", "mu_c", "r", "g_F", "m_Fx")
_RAMAN_KEYS = ("omega_L_rabi", "omega_k_rabi", "delta_L")


def device_params_from_dict(d: dict, where: str = "device") -> DeviceParams:
    unknown = set(d) - set(_DEVICE_KEYS)
    if unknown:
        raise ValueError(f"unknown key {sorted(unknown)[0]!r} in [{where}]")
    missing = [k for k in _DEVICE_KEYS if k not in d]
    if missing:
        raise ValueError(f"missing key {missing[0]!r} in [{where}]")
    return DeviceParams(**{k: float(d[k]) for k in _DEVICE_KEYS})


def raman_params_from_dict(d: dict, where: str = "raman") -> RamanParams:
    unknown = set(d) - set(_RAMAN_KEYS)
    if unknown:
        raise ValueError(f"unknown key {sorted(unknown)[0]!r} in [{where}]")
    missing = [k for k in _RAMAN_KEYS if k not in d]
    if missing:
        raise ValueError(f"missing key {missing[0]!r} in [{where}]")
    return RamanParams(**{k: float(d[k]) for k in _RAMAN_KEYS})


def load_device_file(path) -> tuple[DeviceParams, RamanParams]:
    """Read a device preset file: TOML with [device] and [raman] sections."""
    try:
        import tomllib as _toml  # py >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - env dependent
        import tomli as _toml
    with open(path, "rb") as fh:
        doc = _toml.load(fh)
    unknown = set(doc) - {"device", "raman"}
    if unknown:
        raise ValueError(f"unknown section {sorted(unknown)[0]!r} in device file {path}")
    if "device" not in doc or "raman" not in doc:
        raise ValueError(f"device file {path} needs [device] and [raman] sections")
    return (
        device_params_from_dict(doc["device"]),
        raman_params_from_dict(doc["raman"]),
    )
