"""Characteristic-function readout and Wigner reconstruction.

The measurement chain simulated here:

  1. ``probe_grid`` lays out a polar raster of displacement targets mu.
     Each site is realized by an interaction time tau = |mu| / g and a
     drive phase phi = arg(mu) - pi/2, and carries two photon-intensity
     variants chosen so the fast phases theta = 2 g tau sqrt(I) differ by
     pi/2 -- one real observable per record, two records per complex
     unknown.
  2. ``synthesize_records`` produces the excited-state probabilities,
     either from the large-I readout formula
     P_e = 1/2 + (rho_e - rho_g)/2 Re[e^{i theta} C_W(mu)]
     or from the exact quantized two-mode evolution, with optional
     binomial shot noise.
  3. ``extract_char_fn`` inverts each site's 2x2 linear system back to
     C_W(mu).
  4. ``wigner_from_charfn`` resamples onto a uniform cartesian mu grid
     and applies the discrete transform
     W(x, p) = (1/pi^2) int C(mu) exp(mu* a - mu a*) d^2 mu,
     a = (x + i p) / sqrt(2), so that the grid integral
     sum W dx dp / 2 equals C(0) = 1.

Characteristic values are evaluated two ways: ``char_fn`` builds the
dense displacement operator (and inherits its truncation guard), while
``char_fn_batch`` uses the closed-form Fock matrix elements of D(mu)
(Laguerre recurrences), which are exact for any mu as long as the state
itself is fully contained in the truncation.  The two routes are tested
against each other.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import griddata
from scipy.special import gammaln

from .dynamics import AtomMixture, pe_matched_exact, photon_truncation
from .errors import (
    IllConditionedError,
    TruncationError,
    UnobservableError,
    ValidityWarning,
)
from .fockspace import QuantumState, displacement

__all__ = [
    "ProbePoint",
    "ProbeRecord",
    "PolarGridSpec",
    "ProbeGrid",
    "CharFnGrid",
    "WignerGridSpec",
    "WignerGrid",
    "char_fn",
    "char_fn_batch",
    "pe_approx",
    "probe_grid",
    "synthesize_records",
    "extract_char_fn",
    "resample_to_cartesian",
    "charfn_cartesian",
    "wigner_from_charfn",
    "wigner_direct",
]

#: condition-number ceiling for the per-site inversion
CONDITION_LIMIT = 1e3

#: boundary-decay guard for the Wigner transform input
BOUNDARY_DECAY = 1e-6

#: validity heuristic for the large-I readout formula
INTENSITY_MARGIN = 25.0


# ---------------------------------------------------------------------------
# probe geometry


@dataclass(frozen=True)
class ProbePoint:
    """One tomography setting; theta and mu are derived, not free."""

    tau: float          # interaction time, s
    phi: float          # Raman drive phase, rad
    intensity: float    # mean photon number I
    theta: float        # 2 g tau sqrt(I)
    mu: complex         # i g tau e^{i phi}

    @classmethod
    def from_settings(cls, g: float, tau: float, phi: float, intensity: float) -> "ProbePoint":
        if intensity < 0:
            raise ValueError(f"intensity must be >= 0, got {intensity}")
        theta = 2.0 * g * tau * np.sqrt(intensity)
        mu = 1j * g * tau * np.exp(1j * phi)
        return cls(tau, phi, intensity, theta, complex(mu))


@dataclass(frozen=True)
class ProbeRecord:
    """One synthesized measurement outcome."""

    point: ProbePoint
    atom: AtomMixture
    p_e: float
    shots: int | None = None
    p_e_sampled: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_e <= 1.0:
            raise ValueError(f"p_e = {self.p_e} outside [0, 1]")
        if (self.shots is None) != (self.p_e_sampled is None):
            raise ValueError("shots and p_e_sampled must be present together")

    @property
    def observed(self) -> float:
        """The value the inversion consumes: sampled if present, else exact."""
        return self.p_e if self.p_e_sampled is None else self.p_e_sampled


@dataclass(frozen=True)
class PolarGridSpec:
    """Polar probe raster: n_radial rings x n_angular spokes plus the origin.

    ``dim``, when given, enables the conservative displacement-operator
    truncation guard on mu_max (the synthesis path itself uses exact
    matrix elements and only needs the state inside its cutoff).
    """

    mu_max: float
    n_radial: int
    n_angular: int
    base_intensity: float
    dim: int | None = None

    def __post_init__(self):
        if self.mu_max <= 0:
            raise ValueError("mu_max must be positive")
        if self.n_radial < 1 or self.n_angular < 1:
            raise ValueError("need at least one ring and one spoke")
        if self.base_intensity <= 0:
            raise ValueError("base_intensity must be positive")


@dataclass(frozen=True)
class ProbeGrid:
    """Probe points (two intensity variants per site) plus the g they assume."""

    points: tuple[ProbePoint, ...]
    g: float
    spec: PolarGridSpec

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def n_sites(self) -> int:
        return self.spec.n_radial * self.spec.n_angular + 1


def probe_grid(spec: PolarGridSpec, g: float) -> ProbeGrid:
    """Lay out the polar probe raster for coupling rate g.

    Every site emits two points at the same mu whose theta values differ
    by exactly pi/2: the second intensity is (sqrt(I1) + pi/(4 g tau))^2.
    The origin emits two identical theta = 0 points (only Re C = 1 is
    observable there, which is the known normalization).
    """
    if g <= 0:
        raise ValueError(f"coupling rate g must be positive, got {g}")
    if spec.dim is not None:
        a = spec.mu_max
        if a * a + 6.0 * a > spec.dim:
            raise TruncationError(
                f"probe mu_max = {a} exceeds the displacement truncation guard "
                f"for dim = {spec.dim}"
            )
    pts: list[ProbePoint] = []
    origin = ProbePoint.from_settings(g, 0.0, 0.0, spec.base_intensity)
    pts.extend([origin, origin])
    for k in range(1, spec.n_radial + 1):
        radius = spec.mu_max * k / spec.n_radial
        tau = radius / g
        sqrt_i2 = np.sqrt(spec.base_intensity) + np.pi / (4.0 * g * tau)
        i2 = float(sqrt_i2 * sqrt_i2)
        for j in range(spec.n_angular):
            angle = 2.0 * np.pi * j / spec.n_angular
            phi = angle - np.pi / 2.0
            pts.append(ProbePoint.from_settings(g, tau, phi, spec.base_intensity))
            pts.append(ProbePoint.from_settings(g, tau, phi, i2))
    return ProbeGrid(tuple(pts), g, spec)


# ---------------------------------------------------------------------------
# characteristic function


def char_fn(rho_c: QuantumState, mu: complex) -> complex:
    """C_W(mu) = Tr(rho D(mu)) via the dense displacement operator."""
    if rho_c.space.has_atom or len(rho_c.space.mode_dims) != 1:
        raise ValueError("char_fn expects a single-mode state without atom factor")
    d = displacement(rho_c.dim, mu).matrix
    if rho_c.is_pure:
        val = complex(rho_c.data.conj() @ d @ rho_c.data)
    else:
        val = complex(np.trace(rho_c.data @ d))
    if abs(val) > 1.0 + 1e-10:
        raise ValueError(f"|C_W| = {abs(val)} exceeds 1 beyond tolerance")
    return val


def char_fn_batch(rho_c: QuantumState, mus) -> np.ndarray:
    """C_W over an array of mu via exact Fock matrix elements of D(mu).

    Uses  D_{mn}(mu) = sqrt(n!/m!) mu^{m-n} e^{-|mu|^2/2} L_n^{(m-n)}(|mu|^2)
    with the generalized Laguerre values built by upward recurrence, so no
    displaced state ever has to fit inside the truncation; the state does.
    """
    if rho_c.space.has_atom or len(rho_c.space.mode_dims) != 1:
        raise ValueError("char_fn_batch expects a single-mode state without atom factor")
    mus = np.asarray(mus, dtype=complex)
    flat = mus.ravel()
    dim = rho_c.dim
    rho = rho_c.density_matrix()
    x = np.abs(flat) ** 2
    nz = x > 0
    logmu = np.zeros_like(x)
    logmu[nz] = 0.5 * np.log(x[nz])
    phase = np.ones_like(flat)
    phase[nz] = flat[nz] / np.abs(flat[nz])
    lg = gammaln(np.arange(dim) + 1.0)
    out = np.zeros(flat.shape, dtype=complex)
    env = np.exp(-x / 2.0)

    for dd in range(dim):
        rows = np.arange(dim - dd) + dd
        cols = np.arange(dim - dd)
        lower = rho[cols, rows]   # rho[k, k+dd], pairs with D[k+dd, k]
        upper = rho[rows, cols]   # rho[k+dd, k], pairs with D[k, k+dd]
        if dd > 0 and np.max(np.abs(lower)) < 1e-18 and np.max(np.abs(upper)) < 1e-18:
            continue
        if dd == 0:
            amp_dd = env
            phase_dd = np.ones_like(flat)
        else:
            amp_dd = np.where(nz, np.exp(dd * logmu - x / 2.0), 0.0)
            phase_dd = phase**dd
        l_prev = None
        l_cur = np.ones_like(x)
        for k in range(dim - dd):
            m = k + dd
            if dd == 0:
                out += np.real(rho[k, k]) * amp_dd * l_cur
            else:
                coeff = np.exp(0.5 * (lg[k] - lg[m]))
                base = coeff * amp_dd * l_cur
                term = lower[k] * phase_dd + upper[k] * ((-1.0) ** dd) * np.conj(phase_dd)
                out += term * base
            if l_prev is None:
                l_next = dd + 1.0 - x
            else:
                l_next = ((2 * k + dd + 1 - x) * l_cur - (k + dd) * l_prev) / (k + 1.0)
            l_prev, l_cur = l_cur, l_next
    return out.reshape(mus.shape)


def pe_approx(rho_c: QuantumState, am: AtomMixture, g: float, tau: float,
              intensity: float, phi: float, theta_override: float | None = None) -> float:
    """Large-I readout formula  1/2 + (rho_e-rho_g)/2 Re[e^{i theta} C_W(mu)].

    ``theta_override`` pins the fast phase (test hook); physically
    theta = 2 g tau sqrt(I).  A ValidityWarning is raised when I is not
    comfortably larger than the phonon occupation.
    """
    if intensity <= 0:
        raise ValueError(f"intensity must be positive, got {intensity}")
    n_c = float(np.sum(rho_c.number_populations() * np.arange(rho_c.dim)))
    if intensity < INTENSITY_MARGIN * (n_c + 1.0):
        warnings.warn(
            f"I = {intensity:g} is below {INTENSITY_MARGIN:g} x (<n_c>+1) = "
            f"{INTENSITY_MARGIN * (n_c + 1):g}; the large-I readout formula is strained",
            ValidityWarning,
            stacklevel=2,
        )
    point = ProbePoint.from_settings(g, tau, phi, intensity)
    theta = point.theta if theta_override is None else float(theta_override)
    c_val = complex(char_fn_batch(rho_c, np.array([point.mu]))[0])
    p = 0.5 + 0.5 * am.contrast * float(np.real(np.exp(1j * theta) * c_val))
    if p < -1e-10 or p > 1.0 + 1e-10:
        warnings.warn(f"clamping p_e = {p!r} to [0, 1]", ValidityWarning, stacklevel=2)
    return min(1.0, max(0.0, p))


# ---------------------------------------------------------------------------
# record synthesis


def synthesize_records(rho_c: QuantumState, am: AtomMixture, grid: ProbeGrid,
                       mode: str = "closed_form", shots: int | None = None,
                       seed: int | None = None, max_photon_dim: int = 4096,
                       threads: int = 1) -> list[ProbeRecord]:
    """Simulate the measurement sequence over a probe grid.

    mode "closed_form" evaluates the large-I readout formula (one exact
    C_W value per site); mode "exact" runs the quantized two-mode
    evolution per record.  With ``shots`` set, each record also carries
    an empirical frequency binomial(shots, p_e)/shots drawn from a
    generator seeded with ``seed`` (required for reproducibility).
    ``threads`` parallelizes the exact-mode evolutions (0 = one worker
    per CPU); records come back in grid order regardless.
    """
    if mode not in ("closed_form", "exact"):
        raise ValueError(f"mode must be closed_form or exact, got {mode!r}")
    if shots is not None:
        if shots <= 0:
            raise ValueError("shots must be a positive integer")
        if seed is None:
            raise ValueError("shot sampling requires an explicit seed")

    points = grid.points
    if mode == "closed_form":
        mus = np.array([p.mu for p in points])
        thetas = np.array([p.theta for p in points])
        c_vals = char_fn_batch(rho_c, mus)
        p_es = 0.5 + 0.5 * am.contrast * np.real(np.exp(1j * thetas) * c_vals)
        p_es = np.clip(p_es, 0.0, 1.0)
    else:
        def one_point(pt: ProbePoint) -> float:
            need = photon_truncation(pt.intensity)
            if need > max_photon_dim:
                raise TruncationError(
                    f"exact mode needs photon dim {need} > limit {max_photon_dim} "
                    f"for I = {pt.intensity:g}"
                )
            # round the cutoff up to a multiple of 16: only adds headroom,
            # and keeps the block-model cache small across intensity variants
            dk = ((need + 15) // 16) * 16
            return pe_matched_exact(rho_c, am, grid.g, pt.tau, pt.intensity,
                                    pt.phi, dim_photon=dk)

        if threads == 1:
            p_es = np.array([one_point(pt) for pt in points])
        else:
            import os
            from concurrent.futures import ThreadPoolExecutor

            workers = threads if threads > 0 else (os.cpu_count() or 1)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                p_es = np.array(list(pool.map(one_point, points)))

    sampled = None
    if shots is not None:
        rng = np.random.default_rng(seed)
        sampled = rng.binomial(shots, p_es) / float(shots)

    records = []
    for i, pt in enumerate(points):
        records.append(
            ProbeRecord(
                point=pt,
                atom=am,
                p_e=float(p_es[i]),
                shots=shots,
                p_e_sampled=None if sampled is None else float(sampled[i]),
            )
        )
    return records


# ---------------------------------------------------------------------------
# inversion back to the characteristic function


@dataclass(frozen=True)
class CharFnGrid:
    """Characteristic-function samples, flat or uniform-cartesian.

    ``mu_x``/``mu_y`` are set only when the samples form a uniform
    cartesian raster (then ``values`` reshapes to (len(mu_x), len(mu_y))
    with mu = mu_x[j] + i mu_y[k]).
    """

    mu_values: np.ndarray
    values: np.ndarray
    source: str                      # "direct" | "reconstructed"
    condition_numbers: np.ndarray | None = None
    c0_deviation: float | None = None
    mu_x: np.ndarray | None = field(default=None, repr=False)
    mu_y: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mu_values", np.asarray(self.mu_values, dtype=complex))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.mu_values.shape != self.values.shape:
            raise ValueError("mu_values and values must have matching shapes")

    @property
    def is_cartesian(self) -> bool:
        return self.mu_x is not None and self.mu_y is not None

    def cartesian_values(self) -> np.ndarray:
        if not self.is_cartesian:
            raise ValueError("characteristic-function grid is not a uniform cartesian raster")
        return self.values.reshape(len(self.mu_x), len(self.mu_y))


def extract_char_fn(records: list[ProbeRecord]) -> CharFnGrid:
    """Invert records back to C_W site by site.

    Solves, per mu, the linear system
    (P_e - 1/2) / ((rho_e - rho_g)/2) = cos(theta) Re C - sin(theta) Im C
    over that site's records.  The origin (tau = 0, all theta = 0) only
    determines Re C; Im C = 0 there by Hermitian symmetry.  The deviation
    of C(0) from 1 is reported, never rescaled away.
    """
    if not records:
        raise ValueError("no records to invert")
    groups: dict[tuple[float, float], list[ProbeRecord]] = {}
    order: list[tuple[float, float]] = []
    for rec in records:
        key = (rec.point.mu.real, rec.point.mu.imag)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)

    mus = np.empty(len(order), dtype=complex)
    vals = np.empty(len(order), dtype=complex)
    conds = np.empty(len(order))
    c0_dev = None
    for idx, key in enumerate(order):
        recs = groups[key]
        mu = complex(*key)
        ys = []
        rows = []
        for rec in recs:
            contrast = rec.atom.contrast
            if contrast == 0.0:
                raise UnobservableError(
                    "signal prefactor vanishes: rho_e == rho_g leaves P_e blind to C_W"
                )
            ys.append((rec.observed - 0.5) / (0.5 * contrast))
            rows.append((np.cos(rec.point.theta), -np.sin(rec.point.theta)))
        y = np.asarray(ys)
        a = np.asarray(rows)
        if mu == 0:
            val = complex(np.mean(y), 0.0)
            cond = 1.0
        else:
            svals = np.linalg.svd(a, compute_uv=False)
            cond = float(svals[0] / svals[-1]) if svals[-1] > 0 else np.inf
            if cond > CONDITION_LIMIT:
                raise IllConditionedError(
                    f"inversion at mu = {mu:.6g} has condition number {cond:.3g} "
                    f"> {CONDITION_LIMIT:g}"
                )
            sol, *_ = np.linalg.lstsq(a, y, rcond=None)
            val = complex(sol[0], sol[1])
        mus[idx] = mu
        vals[idx] = val
        conds[idx] = cond
        if mu == 0:
            c0_dev = abs(val - 1.0)
    return CharFnGrid(mus, vals, "reconstructed", condition_numbers=conds, c0_deviation=c0_dev)


# ---------------------------------------------------------------------------
# Wigner transform


@dataclass(frozen=True)
class WignerGridSpec:
    """Uniform cartesian mu raster + output (x, p) axes for the transform.

    Defaults: square mu raster, n_x = n_mu, x_max = mu_max, p axis = x
    axis.  A rectangular raster (separate mu_y axis) suits states whose
    phase-space support is elongated along one quadrature.  The stored
    Wigner values follow  W(x, p) with a = (x + i p)/sqrt(2), normalized
    so that  sum W dx dp / 2 = 1.
    """

    n_mu: int
    mu_max: float
    n_x: int | None = None
    x_max: float | None = None
    n_p: int | None = None
    p_max: float | None = None
    n_mu_y: int | None = None
    mu_y_max: float | None = None

    def x_axis(self) -> np.ndarray:
        n_x = self.n_mu if self.n_x is None else self.n_x
        x_max = self.mu_max if self.x_max is None else self.x_max
        return np.linspace(-x_max, x_max, n_x)

    def p_axis(self) -> np.ndarray:
        x = self.x_axis()
        n_p = len(x) if self.n_p is None else self.n_p
        p_max = float(x[-1]) if self.p_max is None else self.p_max
        return np.linspace(-p_max, p_max, n_p)

    def mu_x_axis(self) -> np.ndarray:
        return np.linspace(-self.mu_max, self.mu_max, self.n_mu)

    def mu_y_axis(self) -> np.ndarray:
        n = self.n_mu if self.n_mu_y is None else self.n_mu_y
        m = self.mu_max if self.mu_y_max is None else self.mu_y_max
        return np.linspace(-m, m, n)


@dataclass(frozen=True)
class WignerGrid:
    """Real Wigner values on a rectangular (x, p) grid; rows index p."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    imag_residue: float

    def __post_init__(self):
        if self.values.shape != (len(self.p), len(self.x)):
            raise ValueError("values must have shape (len(p), len(x))")

    def spacing(self) -> tuple[float, float]:
        return float(self.x[1] - self.x[0]), float(self.p[1] - self.p[0])

    def integral(self) -> float:
        dx, dp = self.spacing()
        return float(self.values.sum() * dx * dp / 2.0)

    def negativity_volume(self) -> float:
        dx, dp = self.spacing()
        return float(np.sum(np.maximum(0.0, -self.values)) * dx * dp / 2.0)

    def value_at(self, x0: float, p0: float) -> float:
        ix = int(np.argmin(np.abs(self.x - x0)))
        ip = int(np.argmin(np.abs(self.p - p0)))
        return float(self.values[ip, ix])

    def second_moment_along_p(self) -> float:
        """Second moment of |W| along the p axis (support-extent metric)."""
        w = np.abs(self.values)
        return float(np.sum(w * self.p[:, None] ** 2) / np.sum(w))


def resample_to_cartesian(cf: CharFnGrid, n_mu: int, mu_max: float) -> CharFnGrid:
    """Bilinear resampling of scattered C_W samples onto a uniform raster.

    Linear interpolation in (Re mu, Im mu); raster points outside the
    convex hull of the samples are filled with 0 (probe rasters should
    circumscribe the target square so this does not happen).
    """
    ax = np.linspace(-mu_max, mu_max, n_mu)
    mx, my = np.meshgrid(ax, ax, indexing="ij")
    pts = np.column_stack([cf.mu_values.real, cf.mu_values.imag])
    try:
        re = griddata(pts, cf.values.real, (mx, my), method="linear", fill_value=0.0)
        im = griddata(pts, cf.values.imag, (mx, my), method="linear", fill_value=0.0)
    except Exception as exc:  # qhull rejects degenerate (collinear) site sets
        raise ValueError(
            "characteristic-function samples do not span the mu plane; "
            "use at least three non-collinear probe angles"
        ) from exc
    vals = re + 1j * im
    return CharFnGrid(
        (mx + 1j * my).ravel(), vals.ravel(), cf.source,
        condition_numbers=None, c0_deviation=cf.c0_deviation,
        mu_x=ax, mu_y=ax.copy(),
    )


def charfn_cartesian(rho_c: QuantumState, n_mu: int, mu_max: float,
                     n_mu_y: int | None = None,
                     mu_y_max: float | None = None) -> CharFnGrid:
    """Direct C_W evaluation on a uniform cartesian raster."""
    ax = np.linspace(-mu_max, mu_max, n_mu)
    ay = np.linspace(-(mu_max if mu_y_max is None else mu_y_max),
                     mu_max if mu_y_max is None else mu_y_max,
                     n_mu if n_mu_y is None else n_mu_y)
    mx, my = np.meshgrid(ax, ay, indexing="ij")
    mus = (mx + 1j * my).ravel()
    vals = char_fn_batch(rho_c, mus)
    return CharFnGrid(mus, vals, "direct", mu_x=ax, mu_y=ay)


def wigner_from_charfn(cf: CharFnGrid, spec: WignerGridSpec | None = None) -> WignerGrid:
    """Discrete Fourier transform of a cartesian C_W grid to W(x, p).

    W[i, j] = (dmu^2 / pi^2) sum_{a,b} C[a, b]
              exp(i sqrt2 (mu_x[a] p[i] - mu_y[b] x[j]))
    Warns when |C| at the raster boundary has not decayed below 1e-6.
    """
    if not cf.is_cartesian:
        raise ValueError("wigner_from_charfn needs a uniform cartesian mu raster")
    mu_x, mu_y = cf.mu_x, cf.mu_y
    c = cf.cartesian_values()
    boundary = max(
        float(np.max(np.abs(c[0, :]))), float(np.max(np.abs(c[-1, :]))),
        float(np.max(np.abs(c[:, 0]))), float(np.max(np.abs(c[:, -1]))),
    )
    if boundary > BOUNDARY_DECAY:
        warnings.warn(
            f"|C_W| = {boundary:.3g} at the mu-grid boundary exceeds {BOUNDARY_DECAY:g}; "
            "the transform window truncates the integrand",
            ValidityWarning,
            stacklevel=2,
        )
    if spec is None:
        spec = WignerGridSpec(n_mu=len(mu_x), mu_max=float(mu_x[-1]))
    x = spec.x_axis()
    p = spec.p_axis()
    dmx = float(mu_x[1] - mu_x[0])
    dmy = float(mu_y[1] - mu_y[0])
    ep = np.exp(1j * np.sqrt(2.0) * np.outer(p, mu_x))
    ex = np.exp(-1j * np.sqrt(2.0) * np.outer(mu_y, x))
    w = (dmx * dmy / np.pi**2) * (ep @ c @ ex)
    return WignerGrid(x, p, np.real(w), imag_residue=float(np.max(np.abs(np.imag(w)))))


def wigner_direct(rho_c: QuantumState, spec: WignerGridSpec) -> WignerGrid:
    """Reference Wigner function: dense C_W on the raster + same transform."""
    cf = charfn_cartesian(rho_c, spec.n_mu, spec.mu_max, spec.n_mu_y, spec.mu_y_max)
    return wigner_from_charfn(cf, spec)
