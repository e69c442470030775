"""Large-scale channel state: LOS draws, path loss, shadowing, antenna gains.

Link tables hold one row of large-scale state per (transmitter, receiver)
pair, evaluated on wrap-minimal geometry. LOS and shadowing are sampled once
per link per drop; the combined linear gain beta folds in both antenna gains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigError, PropagationParams
from .topology import NetworkLayout, ScDeployment, UeDeployment, wrap_vectors

LINK_MACRO_SC = "macro_to_sc"
LINK_MACRO_UE = "macro_to_ue"
LINK_SC_UE = "sc_to_ue"


def los_probability(link_type: str, d2d_m) -> np.ndarray:
    """LOS probability vs 2-D distance (TR 36.814-style relay formulas)."""
    # The r -> 0 limit of every branch is 1, so flooring r keeps that exact.
    r = np.maximum(np.asarray(d2d_m, dtype=float), 1e-9) / 1000.0
    if link_type == LINK_MACRO_UE:
        p = np.minimum(0.018 / r, 1.0) * (1.0 - np.exp(-r / 0.063)) + np.exp(-r / 0.063)
    elif link_type == LINK_MACRO_SC:
        p = np.minimum(0.018 / r, 1.0) * (1.0 - np.exp(-r / 0.072)) + np.exp(-r / 0.072)
    elif link_type == LINK_SC_UE:
        p = 0.5 - np.minimum(0.5, 5.0 * np.exp(-0.156 / r)) + np.minimum(0.5, 5.0 * np.exp(-r / 0.03))
    else:
        raise ConfigError(f"unknown link type {link_type!r}")
    return np.clip(p, 0.0, 1.0)


def _pl_coeff(params: PropagationParams, link_type: str, los: bool) -> tuple[float, float]:
    key = {LINK_MACRO_UE: "macro_ue", LINK_MACRO_SC: "macro_sc", LINK_SC_UE: "sc_ue"}.get(link_type)
    if key is None:
        raise ConfigError(f"unknown link type {link_type!r}")
    tag = "los" if los else "nlos"
    return (
        getattr(params, f"pl_{key}_{tag}_a"),
        getattr(params, f"pl_{key}_{tag}_b"),
    )


def path_loss_db(params: PropagationParams, link_type: str, d3d_m, los) -> tuple[np.ndarray, int]:
    """Distance-power law per link type and LOS state.

    Distances below the model validity floor are clamped; the clamp count is
    returned for the run's audit counters.
    """
    d = np.asarray(d3d_m, dtype=float)
    los = np.asarray(los, dtype=bool)
    n_clamped = int(np.count_nonzero(d < params.min_pl_distance_m))
    d_km = np.maximum(d, params.min_pl_distance_m) / 1000.0
    a_los, b_los = _pl_coeff(params, link_type, True)
    a_nlos, b_nlos = _pl_coeff(params, link_type, False)
    lg = np.log10(d_km)
    pl = np.where(los, a_los + b_los * lg, a_nlos + b_nlos * lg)
    return pl, n_clamped


def shadow_sigma_db(params: PropagationParams, link_type: str, los) -> np.ndarray:
    los = np.asarray(los, dtype=bool)
    if link_type == LINK_MACRO_UE:
        return np.full(los.shape, params.shadow_macro_ue_db)
    if link_type == LINK_MACRO_SC:
        return np.full(los.shape, params.shadow_macro_sc_db)
    if link_type == LINK_SC_UE:
        return np.where(los, params.shadow_sc_ue_los_db, params.shadow_sc_ue_nlos_db)
    raise ConfigError(f"unknown link type {link_type!r}")


def draw_shadowing(params: PropagationParams, link_type: str, los, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean log-normal shadowing in dB, independent per link."""
    sigma = shadow_sigma_db(params, link_type, los)
    return rng.standard_normal(sigma.shape) * sigma


@dataclass
class AntennaPattern:
    kind: str
    h_bw_deg: float = 0.0
    v_bw_deg: float = 0.0
    max_gain_dbi: float = 0.0
    tilt_deg: float = 0.0
    am_db: float = 25.0
    sla_db: float = 20.0
    omni: bool = False


def macro_pattern(p: PropagationParams) -> AntennaPattern:
    return AntennaPattern(
        "macro_element", p.macro_h_bw_deg, p.macro_v_bw_deg, p.macro_gain_dbi,
        p.macro_tilt_deg, p.front_back_db, p.side_lobe_db,
    )


def sc_access_pattern(p: PropagationParams, kind: str) -> AntennaPattern:
    if kind == "patch":
        return AntennaPattern(
            "sc_patch", p.patch_h_bw_deg, p.patch_v_bw_deg, p.patch_gain_dbi,
            p.sc_access_tilt_deg, p.front_back_db, p.side_lobe_db,
        )
    if kind == "yagi":
        return AntennaPattern(
            "sc_yagi", p.yagi_h_bw_deg, p.yagi_v_bw_deg, p.yagi_gain_dbi,
            p.sc_access_tilt_deg, p.front_back_db, p.side_lobe_db,
        )
    raise ConfigError(f"unknown SC access antenna {kind!r}")


def sc_backhaul_pattern(p: PropagationParams) -> AntennaPattern:
    return AntennaPattern("sc_backhaul_omni", max_gain_dbi=p.sc_backhaul_gain_dbi, omni=True)


def ue_pattern(p: PropagationParams) -> AntennaPattern:
    return AntennaPattern("ue_omni", max_gain_dbi=p.ue_gain_dbi, omni=True)


def antenna_gain_dbi(pattern: AntennaPattern, az_off_deg, el_off_deg) -> np.ndarray:
    """3GPP parabolic element pattern.

    az_off_deg: azimuth offset from the antenna boresight azimuth.
    el_off_deg: depression angle of the link (positive below horizontal);
    the boresight sits at the pattern's tilt angle.
    """
    az = np.asarray(az_off_deg, dtype=float)
    el = np.asarray(el_off_deg, dtype=float)
    if pattern.omni:
        return np.full(np.broadcast(az, el).shape, pattern.max_gain_dbi)
    az = (az + 180.0) % 360.0 - 180.0
    a_h = -np.minimum(12.0 * (az / pattern.h_bw_deg) ** 2, pattern.am_db)
    a_v = -np.minimum(12.0 * ((el - pattern.tilt_deg) / pattern.v_bw_deg) ** 2, pattern.sla_db)
    return pattern.max_gain_dbi + np.maximum(a_h + a_v, -pattern.am_db)


@dataclass
class LinkTable:
    """Large-scale state for all (tx, rx) pairs of one link type."""

    link_type: str
    d2d_m: np.ndarray      # [n_tx, n_rx]
    d3d_m: np.ndarray
    az_off_deg: np.ndarray  # bearing relative to tx antenna azimuth
    los: np.ndarray         # bool
    pl_db: np.ndarray
    shadow_db: np.ndarray
    tx_gain_db: np.ndarray
    rx_gain_db: np.ndarray
    beta: np.ndarray        # combined linear power gain
    n_clamped: int = 0

    def rsrp_dbm(self, tx_power_dbm: float) -> np.ndarray:
        """Long-term received power (no fast fading), for association."""
        return tx_power_dbm + 10.0 * np.log10(self.beta)


def _finish_table(link_type, d2d, d3d, az_off, tx_gain, rx_gain, params, rng) -> LinkTable:
    los = rng.uniform(size=d2d.shape) < los_probability(link_type, d2d)
    shadow = draw_shadowing(params, link_type, los, rng)
    pl, n_clamped = path_loss_db(params, link_type, d3d, los)
    beta = 10.0 ** ((-pl - shadow + tx_gain + rx_gain) / 10.0)
    return LinkTable(
        link_type=link_type, d2d_m=d2d, d3d_m=d3d, az_off_deg=az_off, los=los,
        pl_db=pl, shadow_db=shadow, tx_gain_db=tx_gain, rx_gain_db=rx_gain,
        beta=beta, n_clamped=n_clamped,
    )


def build_macro_table(
    layout: NetworkLayout,
    rx_xyz: np.ndarray,
    link_type: str,
    pattern: AntennaPattern,
    rx_gain_dbi: float,
    params: PropagationParams,
    rng: np.random.Generator,
) -> LinkTable:
    """Sector-to-device table [n_sectors, n_rx] on wrap-minimal geometry."""
    dx, dy, d2d_site = wrap_vectors(layout, layout.site_xy, rx_xyz[:, :2])
    az_site = np.rad2deg(np.arctan2(dy, dx))
    sec = layout.sector_site
    d2d = d2d_site[sec]
    dh = layout.macro_height_m - rx_xyz[:, 2][None, :]
    d3d = np.sqrt(d2d ** 2 + dh ** 2)
    az_off = az_site[sec] - layout.sector_azimuth_deg[:, None]
    el = np.rad2deg(np.arctan2(dh, d2d))
    tx_gain = antenna_gain_dbi(pattern, az_off, el)
    rx_gain = np.full(d2d.shape, rx_gain_dbi)
    return _finish_table(link_type, d2d, d3d, az_off, tx_gain, rx_gain, params, rng)


def build_sc_ue_table(
    scs: ScDeployment,
    ues: UeDeployment,
    layout: NetworkLayout,
    pattern: AntennaPattern,
    params: PropagationParams,
    rng: np.random.Generator,
) -> LinkTable:
    """SC-to-UE table [n_sc, n_ue] including every interfering pair."""
    dx, dy, d2d = wrap_vectors(layout, scs.xyz[:, :2], ues.xyz[:, :2])
    dh = scs.xyz[:, 2][:, None] - ues.xyz[:, 2][None, :]
    d3d = np.sqrt(d2d ** 2 + dh ** 2)
    az = np.rad2deg(np.arctan2(dy, dx))
    az_off = az - scs.access_azimuth_deg[:, None]
    el = np.rad2deg(np.arctan2(dh, d2d))
    tx_gain = antenna_gain_dbi(pattern, az_off, el)
    rx_gain = np.full(d2d.shape, params.ue_gain_dbi)
    return _finish_table(LINK_SC_UE, d2d, d3d, az_off, tx_gain, rx_gain, params, rng)
