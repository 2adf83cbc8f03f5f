"""Run configuration: strict TOML schema, defaults, resolved echo.

Unknown keys are fatal (a typo must not silently change the physics).
Every run writes ``resolved_config.toml`` with all defaults made
explicit, so the artifact directory records the exact numbers used.
"""

import math
from dataclasses import dataclass, field

from . import device as dev
from .dynamics import AtomMixture
from .errors import ConfigError

try:  # py >= 3.11
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover - environment dependent
    import tomli as _toml

__all__ = ["RunConfig", "load_config", "parse_config", "resolved_echo"]

WORKFLOWS = ("device", "dynamics-convergence", "tomography", "backaction")

#: fallback coupling rate (rad/s) when no device section fixes it; this is
#: the value implied by the reference back-action point mu = 4.15i at
#: tau = 5 ms (g = |mu| / tau).
DEFAULT_G = 830.0


@dataclass
class RunConfig:
    workflow: str
    out_dir: str = "cantomo_out"
    seed: int | None = None
    threads: int = 0
    g_override: float | None = None

    device_preset: str | None = "li6"
    device_file: str | None = None
    device: dev.DeviceParams | None = None
    raman: dev.RamanParams | None = None
    matching_free: str = "delta_L"

    rho_e: float = 0.0
    state_dim: int = 64
    state_spec: str = "fock(0)"

    probe_mu_max: float | None = None   # default: sqrt(2) x grid_mu_max
    probe_n_radial: int = 96
    probe_n_angular: int = 384
    probe_base_intensity: float = 100.0
    probe_shots: int = 0                # 0 = noise free
    probe_mode: str = "closed_form"

    grid_n_mu: int = 64
    grid_mu_max: float = 4.0
    grid_n_x: int | None = None
    grid_x_max: float | None = None
    grid_n_p: int | None = None
    grid_p_max: float | None = None

    conv_g_tau_max: float = 1.0
    conv_n_tau: int = 101
    conv_intensities: list[float] = field(default_factory=lambda: [25.0, 100.0, 400.0])
    conv_dim_phonon: int = 20
    conv_include_classical: bool = True

    ba_steps: int = 4
    ba_tau: float = 0.005
    ba_intensity: float = 400.0
    ba_phi: float = 0.0
    ba_policy: str = "condition-on-ground"
    ba_g: float | None = None           # default: g override, else DEFAULT_G
    ba_dim: int = 128
    ba_exact_compare: bool = True
    ba_exact_intensities: list[float] = field(default_factory=lambda: [100.0, 400.0])
    ba_exact_dim: int = 28

    tol_roundtrip_max_abs: float = 1e-3

    def backaction_g(self) -> float:
        """Sequence coupling rate: [backaction].g, else top-level g, else 830."""
        if self.ba_g is not None:
            return self.ba_g
        if self.g_override is not None:
            return self.g_override
        return DEFAULT_G

    def resolved_device(self) -> tuple[dev.DeviceParams, dev.RamanParams]:
        """Explicit sections win; then a preset file; then the named preset."""
        d0 = r0 = None
        if self.device_file is not None:
            d0, r0 = dev.load_device_file(self.device_file)
        elif self.device_preset is not None:
            if self.device_preset != "li6":
                raise ConfigError(f"unknown device preset {self.device_preset!r}")
            d0, r0 = dev.reference_device(), dev.reference_raman()
        d = self.device if self.device is not None else d0
        r = self.raman if self.raman is not None else r0
        if d is None or r is None:
            raise ConfigError("no device parameters available: set a preset, a file, "
                              "or explicit [device]/[raman] sections")
        return d, r

    def coupling_g(self) -> float:
        """Coupling rate for the run: explicit override, else device, else default."""
        if self.g_override is not None:
            return self.g_override
        if self.device is not None or self.device_file is not None or self.device_preset:
            d, _ = self.resolved_device()
            return dev.coupling_g_ac(d)
        return DEFAULT_G

    def probe_extent(self) -> float:
        """Polar probe radius; circumscribes the cartesian mu square by default."""
        if self.probe_mu_max is not None:
            return self.probe_mu_max
        return math.sqrt(2.0) * self.grid_mu_max

    def mixture(self) -> AtomMixture:
        return AtomMixture(self.rho_e, 1.0 - self.rho_e)


def _take(section: dict, where: str, allowed: dict):
    """Pop-validate a section: allowed maps key -> (type tag, default)."""
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key '{where}.{sorted(unknown)[0]}'")
    out = {}
    for key, (kind, default) in allowed.items():
        if key not in section:
            out[key] = default
            continue
        val = section[key]
        if kind == "int":
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"'{where}.{key}' must be an integer, got {val!r}")
        elif kind == "float":
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"'{where}.{key}' must be a number, got {val!r}")
            val = float(val)
        elif kind == "str":
            if not isinstance(val, str):
                raise ConfigError(f"'{where}.{key}' must be a string, got {val!r}")
        elif kind == "bool":
            if not isinstance(val, bool):
                raise ConfigError(f"'{where}.{key}' must be a boolean, got {val!r}")
        elif kind == "floatlist":
            if not isinstance(val, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in val
            ):
                raise ConfigError(f"'{where}.{key}' must be a list of numbers, got {val!r}")
            val = [float(v) for v in val]
        out[key] = val
    return out


def parse_config(doc: dict) -> RunConfig:
    """Validate a parsed TOML document into a RunConfig (strict keys)."""
    known_sections = {"device", "raman", "matching", "mixture", "state", "probe",
                      "grid", "convergence", "backaction", "tolerances"}
    top_allowed = {
        "workflow": ("str", None),
        "out_dir": ("str", "cantomo_out"),
        "seed": ("int", None),
        "threads": ("int", 0),
        "g": ("float", None),
    }
    top = {k: v for k, v in doc.items() if not isinstance(v, dict)}
    sections = {k: v for k, v in doc.items() if isinstance(v, dict)}
    unknown = set(sections) - known_sections
    if unknown:
        raise ConfigError(f"unknown section '[{sorted(unknown)[0]}]'")
    tvals = _take(top, "<top>", top_allowed)
    if tvals["workflow"] is None:
        raise ConfigError("missing required key 'workflow'")
    if tvals["workflow"] not in WORKFLOWS:
        raise ConfigError(
            f"'workflow' must be one of {', '.join(WORKFLOWS)}, got {tvals['workflow']!r}"
        )
    cfg = RunConfig(workflow=tvals["workflow"], out_dir=tvals["out_dir"],
                    seed=tvals["seed"], threads=tvals["threads"],
                    g_override=tvals["g"])

    if "device" in sections:
        sec = dict(sections["device"])
        preset = sec.pop("preset", None)
        filename = sec.pop("file", None)
        if preset is not None and not isinstance(preset, str):
            raise ConfigError("'device.preset' must be a string")
        if filename is not None and not isinstance(filename, str):
            raise ConfigError("'device.file' must be a string")
        unknown = set(sec) - set(dev._DEVICE_KEYS)
        if unknown:
            raise ConfigError(f"unknown key 'device.{sorted(unknown)[0]}'")
        if sec and (preset or filename):
            raise ConfigError("'[device]' mixes explicit parameters with preset/file")
        if sec:
            try:
                cfg.device = dev.device_params_from_dict(sec)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        elif filename:
            cfg.device_file = filename
            cfg.device_preset = None
        elif preset:
            cfg.device_preset = preset
    if "raman" in sections:
        try:
            cfg.raman = dev.raman_params_from_dict(sections["raman"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    m = _take(sections.get("matching", {}), "matching", {"free": ("str", "delta_L")})
    if m["free"] not in ("omega_L_rabi", "delta_L", "r"):
        raise ConfigError(f"'matching.free' must be omega_L_rabi, delta_L or r, got {m['free']!r}")
    cfg.matching_free = m["free"]

    mix = _take(sections.get("mixture", {}), "mixture", {"rho_e": ("float", 0.0)})
    cfg.rho_e = mix["rho_e"]

    st = _take(sections.get("state", {}), "state",
               {"dim": ("int", 64), "spec": ("str", "fock(0)")})
    cfg.state_dim = st["dim"]
    cfg.state_spec = st["spec"]

    pr = _take(sections.get("probe", {}), "probe", {
        "mu_max": ("float", None),
        "n_radial": ("int", 96),
        "n_angular": ("int", 384),
        "base_intensity": ("float", 100.0),
        "shots": ("int", 0),
        "mode": ("str", "closed_form"),
    })
    if pr["mode"] not in ("closed_form", "exact"):
        raise ConfigError(f"'probe.mode' must be closed_form or exact, got {pr['mode']!r}")
    cfg.probe_mu_max = pr["mu_max"]
    cfg.probe_n_radial = pr["n_radial"]
    cfg.probe_n_angular = pr["n_angular"]
    cfg.probe_base_intensity = pr["base_intensity"]
    cfg.probe_shots = pr["shots"]
    cfg.probe_mode = pr["mode"]

    gr = _take(sections.get("grid", {}), "grid", {
        "n_mu": ("int", 64),
        "mu_max": ("float", 4.0),
        "n_x": ("int", None),
        "x_max": ("float", None),
        "n_p": ("int", None),
        "p_max": ("float", None),
    })
    cfg.grid_n_mu = gr["n_mu"]
    cfg.grid_mu_max = gr["mu_max"]
    cfg.grid_n_x = gr["n_x"]
    cfg.grid_x_max = gr["x_max"]
    cfg.grid_n_p = gr["n_p"]
    cfg.grid_p_max = gr["p_max"]

    cv = _take(sections.get("convergence", {}), "convergence", {
        "g_tau_max": ("float", 1.0),
        "n_tau": ("int", 101),
        "intensities": ("floatlist", [25.0, 100.0, 400.0]),
        "dim_phonon": ("int", 20),
        "include_classical": ("bool", True),
    })
    cfg.conv_g_tau_max = cv["g_tau_max"]
    cfg.conv_n_tau = cv["n_tau"]
    cfg.conv_intensities = cv["intensities"]
    cfg.conv_dim_phonon = cv["dim_phonon"]
    cfg.conv_include_classical = cv["include_classical"]

    ba = _take(sections.get("backaction", {}), "backaction", {
        "steps": ("int", 4),
        "tau": ("float", 0.005),
        "intensity": ("float", 400.0),
        "phi": ("float", 0.0),
        "policy": ("str", "condition-on-ground"),
        "g": ("float", None),
        "dim": ("int", 128),
        "exact_compare": ("bool", True),
        "exact_intensities": ("floatlist", [100.0, 400.0]),
        "exact_dim": ("int", 28),
    })
    if ba["policy"] not in ("condition-on-ground", "sample-outcomes"):
        raise ConfigError(f"'backaction.policy' is invalid: {ba['policy']!r}")
    cfg.ba_steps = ba["steps"]
    cfg.ba_tau = ba["tau"]
    cfg.ba_intensity = ba["intensity"]
    cfg.ba_phi = ba["phi"]
    cfg.ba_policy = ba["policy"]
    cfg.ba_g = ba["g"]
    cfg.ba_dim = ba["dim"]
    cfg.ba_exact_compare = ba["exact_compare"]
    cfg.ba_exact_intensities = ba["exact_intensities"]
    cfg.ba_exact_dim = ba["exact_dim"]

    tol = _take(sections.get("tolerances", {}), "tolerances",
                {"roundtrip_max_abs": ("float", 1e-3)})
    cfg.tol_roundtrip_max_abs = tol["roundtrip_max_abs"]
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} does not parse: {exc}") from exc
    return parse_config(doc)


def _toml_value(val) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, float):
        return format(val, ".17g")
    if isinstance(val, int):
        return str(val)
    if isinstance(val, str):
        return '"' + val.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(val, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in val) + "]"
    raise TypeError(f"cannot emit {val!r} into the resolved config")


def resolved_echo(cfg: RunConfig) -> str:
    """TOML text with every default made explicit for the run directory."""
    d, r = (None, None)
    try:
        d, r = cfg.resolved_device()
    except ConfigError:
        pass
    # out_dir is deliberately omitted: the echo lives inside that directory,
    # and identical runs into different directories must stay byte-identical
    lines = ["# resolved configuration (all defaults explicit)"]
    top = {
        "workflow": cfg.workflow,
        "threads": cfg.threads,
        "g": cfg.coupling_g(),
    }
    if cfg.seed is not None:
        top["seed"] = cfg.seed
    for k, v in top.items():
        lines.append(f"{k} = {_toml_value(v)}")

    def section(name: str, mapping: dict):
        lines.append("")
        lines.append(f"[{name}]")
        for k, v in mapping.items():
            if v is not None:
                lines.append(f"{k} = {_toml_value(v)}")

    if d is not None:
        section("device", {k: getattr(d, k) for k in
                           ("m_c", "omega_c", "omega_0", "mu_c", "r", "g_F", "m_Fx")})
        section("raman", {k: getattr(r, k) for k in
                          ("omega_L_rabi", "omega_k_rabi", "delta_L")})
    section("matching", {"free": cfg.matching_free})
    section("mixture", {"rho_e": cfg.rho_e})
    section("state", {"dim": cfg.state_dim, "spec": cfg.state_spec})
    section("probe", {
        "mu_max": cfg.probe_extent(),
        "n_radial": cfg.probe_n_radial,
        "n_angular": cfg.probe_n_angular,
        "base_intensity": cfg.probe_base_intensity,
        "shots": cfg.probe_shots,
        "mode": cfg.probe_mode,
    })
    section("grid", {
        "n_mu": cfg.grid_n_mu,
        "mu_max": cfg.grid_mu_max,
        "n_x": cfg.grid_n_x if cfg.grid_n_x is not None else cfg.grid_n_mu,
        "x_max": cfg.grid_x_max if cfg.grid_x_max is not None else cfg.grid_mu_max,
        "n_p": cfg.grid_n_p if cfg.grid_n_p is not None else
               (cfg.grid_n_x if cfg.grid_n_x is not None else cfg.grid_n_mu),
        "p_max": cfg.grid_p_max if cfg.grid_p_max is not None else
                 (cfg.grid_x_max if cfg.grid_x_max is not None else cfg.grid_mu_max),
    })
    section("convergence", {
        "g_tau_max": cfg.conv_g_tau_max,
        "n_tau": cfg.conv_n_tau,
        "intensities": cfg.conv_intensities,
        "dim_phonon": cfg.conv_dim_phonon,
        "include_classical": cfg.conv_include_classical,
    })
    section("backaction", {
        "steps": cfg.ba_steps,
        "tau": cfg.ba_tau,
        "intensity": cfg.ba_intensity,
        "phi": cfg.ba_phi,
        "policy": cfg.ba_policy,
        "g": cfg.backaction_g(),
        "dim": cfg.ba_dim,
        "exact_compare": cfg.ba_exact_compare,
        "exact_intensities": cfg.ba_exact_intensities,
        "exact_dim": cfg.ba_exact_dim,
    })
    section("tolerances", {"roundtrip_max_abs": cfg.tol_roundtrip_max_abs})
    return "\n".join(lines) + "\n"
