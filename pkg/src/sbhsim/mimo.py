"""Uplink pilot training, contamination, ZF precoding and stream SINR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import NetworkLayout


class CapacityError(ValueError):
    """More devices than orthogonal pilot sequences."""


class PrecoderError(RuntimeError):
    """Estimated channel too ill-conditioned to invert."""


@dataclass
class PilotBook:
    matrix: np.ndarray   # [L, S], orthonormal rows
    reuse: str
    tau_symbols: int


def make_pilot_book(l_devices: int, s_length: int, reuse: str = "orthogonal_backhaul", tau_symbols: int = 1) -> PilotBook:
    """First l rows of the unitary DFT basis of length s."""
    if l_devices > s_length:
        raise CapacityError(
            f"{l_devices} devices exceed the {s_length} orthogonal pilot sequences"
        )
    grid = np.arange(s_length)
    dft = np.exp(-2j * np.pi * np.outer(grid, grid) / s_length) / np.sqrt(s_length)
    return PilotBook(matrix=dft[:l_devices], reuse=reuse, tau_symbols=tau_symbols)


def assign_pilot_groups(layout: NetworkLayout, scheme: str) -> tuple[np.ndarray, int]:
    """Pilot group per sector and the training overhead in OFDM symbols.

    r1: every sector shares one group (1 symbol). r3: co-sited sectors use
    disjoint groups keyed by the within-site sector index (3 symbols).
    """
    if scheme == "r1":
        return np.zeros(layout.n_sectors, dtype=int), 1
    if scheme == "r3":
        return np.arange(layout.n_sectors) % 3, 3
    raise ValueError(f"unknown pilot scheme {scheme!r}")


def contaminators(groups: np.ndarray, sector: int) -> np.ndarray:
    """Sectors whose devices reuse this sector's pilot sequences."""
    same = np.flatnonzero(groups == groups[sector])
    return same[same != sector]


def estimate_channel(
    h_true: np.ndarray,
    contam: list[np.ndarray],
    p_ul_w: float,
    noise_w: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Pilot-correlation channel estimate.

    With orthonormal pilot rows the post-correlation noise is i.i.d. complex
    Gaussian with per-entry variance noise_w / p_ul_w, so it is sampled
    directly; contaminating channels add in entry-wise.
    """
    h_hat = h_true.astype(complex, copy=True)
    for c in contam:
        if c.shape != h_true.shape:
            raise ValueError(f"contaminator shape {c.shape} != channel shape {h_true.shape}")
        h_hat += c
    if noise_w > 0:
        std = np.sqrt(noise_w / p_ul_w / 2.0)
        h_hat += std * (rng.standard_normal(h_true.shape) + 1j * rng.standard_normal(h_true.shape))
    return h_hat


@dataclass
class PrecoderSet:
    directions: np.ndarray  # [M, L], unit-norm columns
    powers: np.ndarray      # [L], sums to the sector DL power


def zf_precoder(h_hat: np.ndarray, p_dl_w: float, cond_threshold: float = 1e8) -> PrecoderSet:
    """Zero-forcing directions with equal per-stream power split."""
    m, l = h_hat.shape
    if l > m:
        raise PrecoderError(f"{l} streams exceed {m} antennas")
    if np.linalg.cond(h_hat) > cond_threshold:
        raise PrecoderError("estimated channel is rank deficient")
    gram = h_hat.conj().T @ h_hat
    raw = np.linalg.solve(gram, h_hat.conj().T).conj().T  # H (H^H H)^-1
    norms = np.linalg.norm(raw, axis=0)
    directions = raw / norms
    powers = np.full(l, p_dl_w / l)
    return PrecoderSet(directions=directions, powers=powers)


def mimo_sinr(
    h_rx: np.ndarray,
    precoders: list[PrecoderSet | None],
    serving: int,
    stream: int,
    noise_w: float,
) -> float:
    """Downlink stream SINR at one receiver.

    h_rx[i] is the true channel from sector i to this receiver. The serving
    sector's other streams count as intra-cell interference; every other
    sector's full precoded transmission counts as inter-cell interference.
    """
    prec = precoders[serving]
    if prec is None:
        return 0.0
    gains = np.abs(h_rx[serving].conj() @ prec.directions) ** 2
    signal = prec.powers[stream] * gains[stream]
    intra = float(np.delete(prec.powers * gains, stream).sum())
    inter = 0.0
    for i, other in enumerate(precoders):
        if i == serving or other is None:
            continue
        inter += float(other.powers @ (np.abs(h_rx[i].conj() @ other.directions) ** 2))
    return float(signal / (intra + inter + noise_w))
