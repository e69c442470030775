"""Small-scale fading: Rician ULA channel vectors and scalar per-RB links."""

from __future__ import annotations

import numpy as np


def rician_k_db(distance_m, intercept_db: float = 13.0, slope_db_per_m: float = 0.03):
    """Distance-dependent Rician K factor in dB."""
    return intercept_db - slope_db_per_m * np.asarray(distance_m, dtype=float)


def k_linear(los, distance_m, intercept_db: float = 13.0, slope_db_per_m: float = 0.03):
    """Linear K per link: distance law for LOS links, 0 (Rayleigh) for NLOS."""
    k = 10.0 ** (rician_k_db(distance_m, intercept_db, slope_db_per_m) / 10.0)
    return np.where(np.asarray(los, dtype=bool), k, 0.0)


def steering_vectors(az_rel_deg, m_antennas: int, spacing_wl: float = 0.5) -> np.ndarray:
    """Unit-modulus ULA steering vectors, one per input azimuth.

    az_rel_deg is measured from the array broadside; output shape is
    az.shape + (m_antennas,). a(0) is the all-ones vector.
    """
    az = np.deg2rad(np.asarray(az_rel_deg, dtype=float))
    phase = (
        2.0 * np.pi * spacing_wl
        * np.sin(az)[..., None]
        * np.arange(m_antennas)[(None,) * az.ndim]
    )
    return np.exp(1j * phase)


def draw_mimo(beta, k_lin, steer: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Rician channel vectors toward a ULA, scaled by the large-scale gain.

    beta, k_lin broadcast against steer.shape[:-1]; the scatter part has
    i.i.d. CN(0, 1) entries so that E[|h_m|^2] = beta per antenna.
    """
    shape = steer.shape
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    k = np.asarray(k_lin, dtype=float)[..., None]
    h = np.sqrt(k / (k + 1.0)) * steer + np.sqrt(1.0 / (k + 1.0)) * w
    return np.sqrt(np.asarray(beta, dtype=float))[..., None] * h


def draw_scalar(beta, k_lin, psi, rng: np.random.Generator) -> np.ndarray:
    """Composite SISO coefficient: fixed LOS phasor plus fresh scatter.

    psi is the per-link LOS phase (constant within a drop); the scatter term
    is redrawn per call, i.e. per (RB, slot).
    """
    shape = np.broadcast(np.asarray(beta), np.asarray(k_lin), np.asarray(psi)).shape
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    k = np.asarray(k_lin, dtype=float)
    g = np.sqrt(k / (k + 1.0)) * np.exp(1j * np.asarray(psi)) + np.sqrt(1.0 / (k + 1.0)) * w
    return np.sqrt(np.asarray(beta, dtype=float)) * g


class BackhaulHold:
    """Caches the backhaul channel for t_bh consecutive slots.

    draw_fn(window) must return the channel for one coherence window; it is
    invoked once per window, so slot order does not affect the draws.
    """

    def __init__(self, draw_fn, t_bh: int):
        if t_bh < 1:
            raise ValueError("t_bh must be >= 1")
        self._draw_fn = draw_fn
        self._t_bh = int(t_bh)
        self._window = None
        self._channel = None

    def channel(self, slot: int):
        window = slot // self._t_bh
        if window != self._window:
            self._channel = self._draw_fn(window)
            self._window = window
        return self._channel
