"""Scenario configuration with the default experimental setup baked in.

An empty config file (or none at all) reproduces the reference setup: a
12x7 grid of 180 kHz resources in a 1 ms slot, 8640 broadband bits and
2160/7 URLLC bits per slot at outage target 1e-5, a 500 m cell with
path-loss exponent 4 and -108 dBm receiver noise.  Config files are
plain ``key = value`` lines; ``#`` starts a comment and lists are
comma-separated.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .channel import Geometry
from .grid import ResourceGrid, Scheme, TrafficSpec

__all__ = ["ScenarioConfig", "scheme_f_u_count", "load_config", "dump_config"]

_LIST_FIELDS = {"schemes", "algorithms", "d_u", "d_e", "gamma_u_db", "gamma_e_db"}
_FLOAT_LISTS = {"d_u", "d_e", "gamma_u_db", "gamma_e_db"}


@dataclass(frozen=True)
class ScenarioConfig:
    # resource grid
    f_count: int = 12
    m_count: int = 7
    slot_duration: float = 1e-3
    delta_f: float = 180e3
    # traffic
    n_e: float = 8640.0
    n_u: float = 2160.0 / 7.0
    epsilon_u: float = 1e-5
    m_u: int = 1
    m_u_max: int = 7
    w_u: int = 0
    # geometry and noise
    antenna_gain_db: float = 17.15
    carrier_hz: float = 2e9
    d0: float = 10.0
    path_loss_exponent: float = 4.0
    cell_radius: float = 500.0
    noise_dbm: float = -108.0
    # sweep definition
    schemes: tuple = ("noma", "oma-3", "oma-6", "oma-9")
    algorithms: tuple = ("fea", "bcd")
    # sweep axes; mean-SNR values [dB] are converted to the equivalent
    # distances and merged with the distance lists
    d_u: tuple = ()
    d_e: tuple = (146.9,)
    gamma_u_db: tuple = ()
    gamma_e_db: tuple = ()
    drops: int = 2000
    seed: int = 1
    # Monte Carlo machinery
    table_dir: str = "tables"
    auto_build_tables: bool = False
    table_trials: int = 10**7
    crn_draws: int = 10**6
    mu0_fraction: float = 0.1
    tau: float = 1e-7
    evidence_trials: int = 10**6

    def grid(self) -> ResourceGrid:
        return ResourceGrid(F=self.f_count, M=self.m_count,
                            delta_f=self.delta_f, T=self.slot_duration)

    def traffic(self) -> TrafficSpec:
        return TrafficSpec(N_e=self.n_e, N_u=self.n_u, epsilon_u=self.epsilon_u,
                           M_u_max=self.m_u_max, W_u=self.w_u)

    def geometry(self) -> Geometry:
        return Geometry(G_db=self.antenna_gain_db, f0=self.carrier_hz, d0=self.d0,
                        alpha=self.path_loss_exponent, cell_radius=self.cell_radius)


def scheme_f_u_count(scheme_label: str, f_count: int) -> tuple[Scheme, int]:
    """Map a scheme label to (access scheme, URLLC frequency count).

    ``"noma"`` shares the whole band; ``"oma-3"`` reserves 3 orthogonal
    resources for the URLLC user, and so on.
    """
    label = scheme_label.strip().lower()
    if label == "noma":
        return Scheme.NOMA, f_count
    if label.startswith("oma-"):
        count = int(label.split("-", 1)[1])
        if not 1 <= count < f_count:
            raise ValueError(f"OMA reservation must be in 1..{f_count - 1}, got {count}")
        return Scheme.OMA, count
    raise ValueError(f"unknown scheme label {scheme_label!r} (use 'noma' or 'oma-<k>')")


def _parse_value(name: str, raw: str, kind):
    raw = raw.strip()
    if name in _LIST_FIELDS:
        if raw == "":
            return ()
        items = [x.strip() for x in raw.split(",") if x.strip()]
        if name in _FLOAT_LISTS:
            return tuple(float(x) for x in items)
        return tuple(items)
    if kind is bool:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"boolean field {name!r} got {raw!r}")
    if kind is int:
        return int(float(raw))
    if kind is float:
        return float(raw)
    return raw


def load_config(path=None, overrides: dict | None = None) -> ScenarioConfig:
    """Read a key=value file (missing keys keep their defaults)."""
    values: dict = {}
    kinds = {f.name: type(getattr(ScenarioConfig(), f.name)) for f in fields(ScenarioConfig)}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in kinds:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _parse_value(key, raw, kinds[key])
    cfg = ScenarioConfig(**values)
    if overrides:
        cfg = replace(cfg, **overrides)
    for label in cfg.schemes:
        scheme_f_u_count(label, cfg.f_count)  # validate early
    for algo in cfg.algorithms:
        if algo not in ("fea", "bcd"):
            raise ValueError(f"unknown algorithm {algo!r} (use 'fea' or 'bcd')")
    if cfg.drops < 1:
        raise ValueError("drops must be >= 1")
    return cfg


def dump_config(cfg: ScenarioConfig) -> str:
    """Render a config back to the key=value format (full round-trip)."""
    lines = []
    for f in fields(ScenarioConfig):
        value = getattr(cfg, f.name)
        if f.name in _LIST_FIELDS:
            rendered = ", ".join(str(x) for x in value)
        else:
            rendered = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"
