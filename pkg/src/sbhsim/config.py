"""Simulation configuration: parameter blocks, file loading, validation."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Invalid configuration file or parameter values."""


MODES = ("sbh_random", "sbh_adhoc", "da")
ACCESS_ANTENNAS = ("patch", "yagi")
PILOT_SCHEMES = ("r1", "r3")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w * 1000.0)


@dataclass
class TopologyParams:
    isd_m: float = 500.0
    n_sites: int = 19
    macro_height_m: float = 32.0
    sc_height_m: float = 5.0
    ue_height_m: float = 1.5
    min_ue_site_m: float = 35.0   # 2-D UE-to-site drop constraint
    min_sc_site_m: float = 75.0   # random SC deployment only
    min_sc_sc_m: float = 40.0     # random SC deployment only
    max_drop_retries: int = 2000


@dataclass
class PropagationParams:
    # Path loss = a + b*log10(d_km); one (a, b) pair per link type and LOS state.
    pl_macro_ue_los_a: float = 103.4
    pl_macro_ue_los_b: float = 24.2
    pl_macro_ue_nlos_a: float = 131.1
    pl_macro_ue_nlos_b: float = 42.8
    pl_macro_sc_los_a: float = 100.7
    pl_macro_sc_los_b: float = 23.5
    pl_macro_sc_nlos_a: float = 125.2
    pl_macro_sc_nlos_b: float = 36.3
    pl_sc_ue_los_a: float = 103.8
    pl_sc_ue_los_b: float = 20.9
    pl_sc_ue_nlos_a: float = 145.4
    pl_sc_ue_nlos_b: float = 37.5
    min_pl_distance_m: float = 10.0
    # Log-normal shadowing standard deviations (dB). Per-link independence is
    # assumed; whether the LOS/NLOS split applies to macro links is not settled,
    # so macro links use a single value each.
    shadow_macro_ue_db: float = 8.0
    shadow_macro_sc_db: float = 6.0
    shadow_sc_ue_los_db: float = 3.0
    shadow_sc_ue_nlos_db: float = 10.0
    # Sector antenna element and SC access patterns.
    macro_h_bw_deg: float = 70.0
    macro_v_bw_deg: float = 10.0
    macro_gain_dbi: float = 14.0
    macro_tilt_deg: float = 15.0
    patch_h_bw_deg: float = 80.0
    patch_v_bw_deg: float = 80.0
    patch_gain_dbi: float = 5.0
    yagi_h_bw_deg: float = 58.0
    yagi_v_bw_deg: float = 47.0
    yagi_gain_dbi: float = 10.0
    sc_access_tilt_deg: float = 90.0
    front_back_db: float = 25.0   # Am
    side_lobe_db: float = 20.0    # SLAv
    sc_backhaul_gain_dbi: float = 5.0
    ue_gain_dbi: float = 0.0


@dataclass
class FadingParams:
    k_intercept_db: float = 13.0
    k_slope_db_per_m: float = 0.03
    antenna_spacing_wl: float = 0.5


@dataclass
class MimoParams:
    m_antennas: int = 64
    pilot_codebook_len: int = 16   # orthogonal sequences per OFDM symbol
    p_ul_ue_dbm: float = 23.0
    p_ul_sc_dbm: float = 30.0
    cond_threshold: float = 1e8


@dataclass
class FrameParams:
    bandwidth_hz: float = 10e6
    rb_count: int = 50
    symbols_per_slot: int = 14
    t_bh_slots: int = 100
    noise_psd_dbm_hz: float = -174.0
    nf_ue_db: float = 9.0
    nf_sc_db: float = 5.0
    nf_bs_db: float = 5.0


@dataclass
class PowerParams:
    macro_tx_dbm: float = 46.0
    sc_tx_dbm: float = 30.0


@dataclass
class SimConfig:
    mode: str = "sbh_adhoc"
    seed: int = 1
    n_drops: int = 10
    slots_per_drop: int = 4
    alpha: float = 0.5
    scs_per_sector: int = 16
    ues_per_sector: int = 16
    ue_sc_distance_m: float = 0.0      # ad-hoc deployment distance d
    sc_access_antenna: str = "yagi"
    pilot_scheme: str = "r1"           # DA training scheme
    workers: int = 1
    topology: TopologyParams = field(default_factory=TopologyParams)
    propagation: PropagationParams = field(default_factory=PropagationParams)
    fading: FadingParams = field(default_factory=FadingParams)
    mimo: MimoParams = field(default_factory=MimoParams)
    frame: FrameParams = field(default_factory=FrameParams)
    power: PowerParams = field(default_factory=PowerParams)

    # Derived noise powers (watts), per receiver and measurement bandwidth.
    def noise_sc_fullband_w(self) -> float:
        f = self.frame
        return dbm_to_watts(f.noise_psd_dbm_hz + 10.0 * math.log10(f.bandwidth_hz) + f.nf_sc_db)

    def noise_ue_fullband_w(self) -> float:
        f = self.frame
        return dbm_to_watts(f.noise_psd_dbm_hz + 10.0 * math.log10(f.bandwidth_hz) + f.nf_ue_db)

    def noise_ue_rb_w(self) -> float:
        f = self.frame
        rb_bw = f.bandwidth_hz / f.rb_count * 0.9  # 180 kHz of a 200 kHz raster
        return dbm_to_watts(f.noise_psd_dbm_hz + 10.0 * math.log10(rb_bw) + f.nf_ue_db)

    def noise_bs_fullband_w(self) -> float:
        f = self.frame
        return dbm_to_watts(f.noise_psd_dbm_hz + 10.0 * math.log10(f.bandwidth_hz) + f.nf_bs_db)

    def sc_power_per_rb_w(self) -> float:
        return dbm_to_watts(self.power.sc_tx_dbm) / self.frame.rb_count


def validate(cfg: SimConfig) -> list[str]:
    """Return a list of constraint violations (empty when valid)."""
    errs = []
    if cfg.mode not in MODES:
        errs.append(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.seed < 0:
        errs.append("seed must be >= 0")
    if cfg.n_drops < 1:
        errs.append("n_drops must be >= 1")
    if cfg.slots_per_drop < 1:
        errs.append("slots_per_drop must be >= 1")
    if not 0.0 <= cfg.alpha <= 1.0:
        errs.append(f"alpha must be in [0, 1], got {cfg.alpha}")
    if cfg.scs_per_sector < 1:
        errs.append("scs_per_sector must be >= 1")
    if cfg.ues_per_sector < 1:
        errs.append("ues_per_sector must be >= 1")
    if cfg.ue_sc_distance_m < 0:
        errs.append("ue_sc_distance_m must be >= 0")
    if cfg.sc_access_antenna not in ACCESS_ANTENNAS:
        errs.append(f"sc_access_antenna must be one of {ACCESS_ANTENNAS}, got {cfg.sc_access_antenna!r}")
    if cfg.pilot_scheme not in PILOT_SCHEMES:
        errs.append(f"pilot_scheme must be one of {PILOT_SCHEMES}, got {cfg.pilot_scheme!r}")
    if cfg.workers < 1:
        errs.append("workers must be >= 1")
    if cfg.topology.isd_m <= 0:
        errs.append("topology.isd_m must be > 0")
    if cfg.topology.n_sites < 1:
        errs.append("topology.n_sites must be >= 1")
    if cfg.mimo.m_antennas < 1:
        errs.append("mimo.m_antennas must be >= 1")
    if cfg.mimo.pilot_codebook_len < 1:
        errs.append("mimo.pilot_codebook_len must be >= 1")
    if cfg.mode == "da" and cfg.ues_per_sector > cfg.mimo.pilot_codebook_len:
        errs.append(
            "da mode: ues_per_sector exceeds mimo.pilot_codebook_len "
            "(UEs per sector are limited by the number of orthogonal pilots)"
        )
    if cfg.frame.rb_count < 1:
        errs.append("frame.rb_count must be >= 1")
    if cfg.frame.symbols_per_slot < 1:
        errs.append("frame.symbols_per_slot must be >= 1")
    if cfg.frame.t_bh_slots < 1:
        errs.append("frame.t_bh_slots must be >= 1")
    if cfg.frame.bandwidth_hz <= 0:
        errs.append("frame.bandwidth_hz must be > 0")
    return errs


_BLOCKS = ("topology", "propagation", "fading", "mimo", "frame", "power")


def _coerce(raw: str, target_type: type, key: str):
    raw = raw.strip()
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        if target_type is str:
            return raw
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r} for key {key!r} as {target_type.__name__}")
    raise ConfigError(f"unsupported field type for key {key!r}")


def set_key(cfg: SimConfig, key: str, raw_value: str) -> None:
    """Assign a dotted key (e.g. 'frame.rb_count') from its string form."""
    parts = key.split(".")
    obj = cfg
    if len(parts) == 2:
        block, name = parts
        if block not in _BLOCKS:
            raise ConfigError(f"unknown config block {block!r} in key {key!r}")
        obj = getattr(cfg, block)
    elif len(parts) == 1:
        name = parts[0]
        if name in _BLOCKS:
            raise ConfigError(f"key {key!r} names a block, not a parameter")
    else:
        raise ConfigError(f"unknown key {key!r}")
    for f in fields(obj):
        if f.name == name:
            setattr(obj, name, _coerce(raw_value, type(getattr(obj, name)), key))
            return
    raise ConfigError(f"unknown key {key!r}")


def load_config(path: str | None, overrides: list[tuple[str, str]] | None = None) -> SimConfig:
    """Build a SimConfig from an optional key=value file plus overrides.

    Raises ConfigError naming the offending line or key, or listing every
    violated constraint.
    """
    cfg = SimConfig()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stmt = line.split("#", 1)[0].strip()
                if not stmt:
                    continue
                if "=" not in stmt:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
                key, _, value = stmt.partition("=")
                try:
                    set_key(cfg, key.strip(), value)
                except ConfigError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from None
    for key, value in overrides or []:
        set_key(cfg, key, value)
    errs = validate(cfg)
    if errs:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errs))
    return cfg


def to_dict(cfg: SimConfig) -> dict:
    return dataclasses.asdict(cfg)


def from_dict(data: dict) -> SimConfig:
    """Rebuild a SimConfig from to_dict output (manifest round trip)."""
    cfg = SimConfig()
    for key, value in data.items():
        if key in _BLOCKS:
            block = getattr(cfg, key)
            block_fields = {f.name for f in fields(block)}
            for name, sub in value.items():
                if name not in block_fields:
                    raise ConfigError(f"unknown key {key}.{name!r}")
                setattr(block, name, sub)
        else:
            if key not in {f.name for f in fields(cfg)}:
                raise ConfigError(f"unknown key {key!r}")
            setattr(cfg, key, value)
    errs = validate(cfg)
    if errs:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errs))
    return cfg
