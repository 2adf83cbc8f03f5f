"""Truncated-Fock-space linear algebra.

States and operators live on a :class:`HilbertSpec`: an optional two-level
detector atom tensored with one or more bosonic modes, each truncated to
its lowest ``dim`` number states.  The tensor-product index ordering is
fixed throughout the package:

    atom (slowest index)  x  photon mode  x  phonon mode (fastest index)

i.e. the leftmost factor of a Kronecker product varies slowest.  For the
atom, basis index 0 is the ground state and index 1 the excited state.

All Hamiltonians are expressed in angular-frequency units (rad/s) with
hbar absorbed, so ``evolve`` applies exp(-i H t).  Unitaries are built by
Hermitian eigendecomposition, which keeps them unitary to machine
precision at arbitrarily large phases.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationError

__all__ = [
    "HilbertSpec",
    "QuantumState",
    "ModeOperator",
    "annihilation",
    "creation",
    "number_operator",
    "identity",
    "displacement",
    "fock_state",
    "coherent_state",
    "thermal_state",
    "cat_state",
    "make_state",
    "tensor",
    "evolve",
    "partial_trace",
    "check_truncation_guard",
]

PURE_NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10


def check_truncation_guard(dim: int, amplitude: complex) -> None:
    """Require |a|^2 + 6|a| <= dim so a displaced vacuum fits the cutoff.

    The 6|a| margin is six standard deviations of the Poisson number
    distribution of a coherent state, keeping truncation error below
    ~1e-9 for downstream tolerances.
    """
    a = abs(amplitude)
    if a * a + 6.0 * a > dim:
        raise TruncationError(
            f"amplitude {amplitude!r} needs |a|^2+6|a| = {a*a + 6*a:.1f} "
            f"levels but the truncation is dim={dim}"
        )


@dataclass(frozen=True)
class HilbertSpec:
    """Shape of a truncated Hilbert space: bosonic mode cutoffs + atom flag."""

    mode_dims: tuple[int, ...]
    has_atom: bool = False

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        object.__setattr__(self, "mode_dims", dims)
        if any(d < 2 for d in dims):
            raise ValueError(f"every mode dimension must be >= 2, got {dims}")

    @property
    def factor_dims(self) -> tuple[int, ...]:
        """Dimensions of all tensor factors, atom (dim 2) first if present."""
        return ((2,) if self.has_atom else ()) + self.mode_dims

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @classmethod
    def single_mode(cls, dim: int) -> "HilbertSpec":
        return cls((dim,))


def _as_spec(space) -> HilbertSpec:
    if isinstance(space, HilbertSpec):
        return space
    return HilbertSpec.single_mode(int(space))


@dataclass(frozen=True)
class QuantumState:
    """Pure state vector or density matrix on a :class:`HilbertSpec`.

    Invariants are enforced at construction: unit norm for vectors;
    Hermiticity, unit trace and (numerically) nonnegative spectrum for
    matrices.
    """

    space: HilbertSpec
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", arr)
        n = self.space.dim
        if arr.ndim == 1:
            if arr.shape != (n,):
                raise ValueError(f"state vector has length {arr.shape}, space dim {n}")
            norm = np.linalg.norm(arr)
            if abs(norm - 1.0) > PURE_NORM_TOL:
                raise ValueError(f"pure state norm {norm!r} is not 1 within {PURE_NORM_TOL}")
        elif arr.ndim == 2:
            if arr.shape != (n, n):
                raise ValueError(f"density matrix shape {arr.shape}, space dim {n}")
            if np.max(np.abs(arr - arr.conj().T)) > HERMITIAN_TOL:
                raise ValueError("density matrix is not Hermitian within tolerance")
            tr = np.trace(arr)
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr!r} is not 1 within {TRACE_TOL}")
            if np.min(np.linalg.eigvalsh(arr)) < EIGENVALUE_FLOOR:
                raise ValueError("density matrix has an eigenvalue below -1e-10")
        else:
            raise ValueError("state data must be a vector or a square matrix")

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.space.dim

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def purity(self) -> float:
        if self.is_pure:
            return 1.0
        rho = self.data
        return float(np.real(np.trace(rho @ rho)))

    def expectation(self, op: "ModeOperator | np.ndarray") -> complex:
        m = op.matrix if isinstance(op, ModeOperator) else np.asarray(op)
        if self.is_pure:
            return complex(self.data.conj() @ m @ self.data)
        return complex(np.trace(self.data @ m))

    def overlap(self, other: "QuantumState") -> float:
        """Fidelity |<a|b>|^2, or <psi|rho|psi> when one side is mixed."""
        if self.is_pure and other.is_pure:
            return float(abs(np.vdot(self.data, other.data)) ** 2)
        if self.is_pure:
            return float(np.real(self.data.conj() @ other.data @ self.data))
        if other.is_pure:
            return float(np.real(other.data.conj() @ self.data @ other.data))
        raise ValueError("overlap of two mixed states is not supported")

    def number_populations(self) -> np.ndarray:
        """Diagonal of the density matrix in the number basis (real)."""
        if self.is_pure:
            return np.abs(self.data) ** 2
        return np.real(np.diag(self.data)).copy()


@dataclass(frozen=True)
class ModeOperator:
    """Dense operator on a :class:`HilbertSpec`."""

    space: HilbertSpec
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        n = self.space.dim
        if m.shape != (n, n):
            raise ValueError(f"operator shape {m.shape} does not match space dim {n}")

    def dag(self) -> "ModeOperator":
        return ModeOperator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """Hermiticity relative to the operator's magnitude (floor 1)."""
        scale = max(1.0, float(np.max(np.abs(self.matrix))))
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol * scale)

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        self._check_same_space(other)
        return ModeOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "ModeOperator") -> "ModeOperator":
        self._check_same_space(other)
        return ModeOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "ModeOperator") -> "ModeOperator":
        self._check_same_space(other)
        return ModeOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "ModeOperator":
        return ModeOperator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ModeOperator":
        return ModeOperator(self.space, -self.matrix)

    def _check_same_space(self, other):
        if other.space != self.space:
            raise ValueError("operators act on different spaces")


def annihilation(dim: int) -> ModeOperator:
    """Single-mode annihilation operator: <n-1|c|n> = sqrt(n)."""
    if dim < 2:
        raise ValueError(f"mode dimension must be >= 2, got {dim}")
    m = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return ModeOperator(HilbertSpec.single_mode(dim), m)


def creation(dim: int) -> ModeOperator:
    return annihilation(dim).dag()


def number_operator(dim: int) -> ModeOperator:
    if dim < 2:
        raise ValueError(f"mode dimension must be >= 2, got {dim}")
    return ModeOperator(HilbertSpec.single_mode(dim), np.diag(np.arange(dim)).astype(complex))


def identity(space) -> ModeOperator:
    spec = _as_spec(space)
    return ModeOperator(spec, np.eye(spec.dim, dtype=complex))


def _expi_hermitian(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via eigendecomposition."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def displacement(dim: int, mu: complex) -> ModeOperator:
    """D(mu) = exp(mu c+ - mu* c), unitary within the truncation guard."""
    check_truncation_guard(dim, mu)
    c = annihilation(dim).matrix
    gen = 1j * (mu * c.conj().T - np.conjugate(mu) * c)  # Hermitian
    return ModeOperator(HilbertSpec.single_mode(dim), _expi_hermitian(gen, 1.0))


def fock_state(dim: int, n: int) -> QuantumState:
    if not 0 <= n < dim:
        raise ValueError(f"Fock index n={n} outside truncation dim={dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return QuantumState(HilbertSpec.single_mode(dim), v)


def _coherent_amplitudes(dim: int, alpha: complex) -> np.ndarray:
    if alpha == 0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    from scipy.special import gammaln

    n = np.arange(dim)
    r, ph = abs(alpha), np.angle(alpha)
    amps = np.exp(n * np.log(r) - 0.5 * gammaln(n + 1) - r * r / 2.0) * np.exp(1j * n * ph)
    return amps


def coherent_state(dim: int, alpha: complex) -> QuantumState:
    """Coherent state, renormalized over the truncation."""
    check_truncation_guard(dim, alpha)
    v = _coherent_amplitudes(dim, alpha)
    return QuantumState(HilbertSpec.single_mode(dim), v / np.linalg.norm(v))


def thermal_state(dim: int, nbar: float) -> QuantumState:
    """Thermal state: Bose-Einstein weights renormalized over the cutoff."""
    if nbar < 0:
        raise ValueError(f"mean occupation nbar must be >= 0, got {nbar}")
    if nbar == 0:
        w = np.zeros(dim)
        w[0] = 1.0
    else:
        x = nbar / (1.0 + nbar)
        w = x ** np.arange(dim)
        w = w / w.sum()
    return QuantumState(HilbertSpec.single_mode(dim), np.diag(w).astype(complex))


def cat_state(dim: int, alpha: complex, chi: float = 0.0) -> QuantumState:
    """Normalized |alpha> + e^{i chi} |-alpha>."""
    check_truncation_guard(dim, alpha)
    v = _coherent_amplitudes(dim, alpha) + np.exp(1j * chi) * _coherent_amplitudes(dim, -alpha)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cat state has zero norm for these parameters")
    return QuantumState(HilbertSpec.single_mode(dim), v / nrm)


_STATE_RE = re.compile(r"^\s*(fock|coherent|thermal|cat)\s*\(([^)]*)\)\s*$")


def make_state(dim: int, spec: str) -> QuantumState:
    """Build a single-mode state from a descriptor string.

    Accepted forms: ``fock(n)``, ``coherent(alpha)``, ``thermal(nbar)``,
    ``cat(alpha)`` or ``cat(alpha, chi)``.  ``alpha`` may be complex in
    Python syntax, e.g. ``coherent(1+0.5j)``.
    """
    m = _STATE_RE.match(spec)
    if not m:
        raise ValueError(f"unrecognized state descriptor {spec!r}")
    kind, argstr = m.group(1), m.group(2)
    args = [a.strip() for a in argstr.split(",")] if argstr.strip() else []
    if kind == "fock":
        if len(args) != 1:
            raise ValueError(f"fock() takes one argument, got {spec!r}")
        return fock_state(dim, int(args[0]))
    if kind == "coherent":
        if len(args) != 1:
            raise ValueError(f"coherent() takes one argument, got {spec!r}")
        return coherent_state(dim, complex(args[0]))
    if kind == "thermal":
        if len(args) != 1:
            raise ValueError(f"thermal() takes one argument, got {spec!r}")
        return thermal_state(dim, float(args[0]))
    if len(args) not in (1, 2):
        raise ValueError(f"cat() takes one or two arguments, got {spec!r}")
    chi = float(args[1]) if len(args) == 2 else 0.0
    return cat_state(dim, complex(args[0]), chi)


def _tensor_spaces(a: HilbertSpec, b: HilbertSpec) -> HilbertSpec:
    if b.has_atom:
        # the atom factor must stay leftmost (slowest index)
        raise ValueError("the atom factor must come first in a tensor product")
    return HilbertSpec(a.mode_dims + b.mode_dims, has_atom=a.has_atom)


def tensor(a, b):
    """Kronecker product of two operators or two states.

    The left factor varies slowest in the combined index.  Mixing a pure
    and a mixed state promotes the pure factor to a density matrix.
    """
    if isinstance(a, ModeOperator) and isinstance(b, ModeOperator):
        return ModeOperator(_tensor_spaces(a.space, b.space), np.kron(a.matrix, b.matrix))
    if isinstance(a, QuantumState) and isinstance(b, QuantumState):
        space = _tensor_spaces(a.space, b.space)
        if a.is_pure and b.is_pure:
            return QuantumState(space, np.kron(a.data, b.data))
        return QuantumState(space, np.kron(a.density_matrix(), b.density_matrix()))
    raise TypeError("tensor() needs two ModeOperators or two QuantumStates")


def atom_state(excited: bool = False) -> QuantumState:
    """Two-level detector atom basis state (index 0 ground, 1 excited)."""
    v = np.zeros(2, dtype=complex)
    v[1 if excited else 0] = 1.0
    return QuantumState(HilbertSpec((), has_atom=True), v)


def evolve(H: ModeOperator, state: QuantumState, t: float) -> QuantumState:
    """Apply U = exp(-i H t) with H in rad/s, by eigendecomposition of H."""
    if H.space != state.space:
        raise ValueError("Hamiltonian and state act on different spaces")
    if not np.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t}")
    if not H.is_hermitian(1e-10):
        raise ValueError("Hamiltonian is not Hermitian within 1e-10 (relative)")
    w, V = np.linalg.eigh(H.matrix)
    phases = np.exp(-1j * w * t)
    if state.is_pure:
        out = V @ (phases * (V.conj().T @ state.data))
        out = out / np.linalg.norm(out)
        return QuantumState(state.space, out)
    U = (V * phases) @ V.conj().T
    rho = U @ state.data @ U.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.real(np.trace(rho))
    return QuantumState(state.space, rho)


def partial_trace(state: QuantumState, keep) -> QuantumState:
    """Trace out all tensor factors except ``keep``.

    ``keep`` is a factor index or a sorted sequence of factor indices into
    ``space.factor_dims`` (atom, if present, is factor 0).  The result is
    returned as a density matrix.
    """
    dims = state.space.factor_dims
    nfac = len(dims)
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(int(k) for k in keep)
    if any(not 0 <= k < nfac for k in keep) or len(set(keep)) != len(keep):
        raise IndexError(f"keep={keep} is not a valid subset of factors 0..{nfac - 1}")
    if list(keep) != sorted(keep):
        raise IndexError("keep indices must be sorted (factor order is preserved)")

    rho = state.density_matrix().reshape(dims + dims)
    drop = [i for i in range(nfac) if i not in keep]
    for count, ax in enumerate(drop):
        k = ax - count  # axes shift as we trace
        rho = np.trace(rho, axis1=k, axis2=k + (nfac - count))
    kept_dims = tuple(dims[k] for k in keep)
    d = int(np.prod(kept_dims))
    rho = rho.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)

    has_atom = state.space.has_atom and 0 in keep
    mode_keep = [k - (1 if state.space.has_atom else 0) for k in keep]
    mode_dims = tuple(state.space.mode_dims[k] for k in mode_keep if k >= 0)
    if not mode_dims and has_atom:
        out_space = HilbertSpec((), has_atom=True)
    else:
        out_space = HilbertSpec(mode_dims, has_atom=has_atom)
    return QuantumState(out_space, rho)
