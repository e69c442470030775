"""Hot numeric kernels for per-RB access fading and SINR accumulation.

Two interchangeable implementations are provided: a numba @njit kernel
(parallel over small cells) and a vectorized pure-numpy fallback. Both
consume the same counter-based random stream, so they agree to floating-point
rounding. Selection: numba is used when importable unless the environment
variable SBHSIM_NO_NUMBA is set to a truthy value.

Counter layout: the complex scatter draw of (SC l, UE k, RB q) uses counters
2*idx and 2*idx+1 with idx = (l * n_ue + k) * n_rb + q, under the slot key
from rng.kernel_key. The layout is position-based, so results do not depend
on which (UE, RB) pairs are active.
"""

from __future__ import annotations

import os

import numpy as np

from . import rng

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0 ** -53
_TWO_PI = 6.283185307179586

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

NUMBA_DISABLED = os.environ.get("SBHSIM_NO_NUMBA", "").lower() in ("1", "true", "yes")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def access_sinr_numpy(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w):
    """Per-(UE, RB) access SINR, vectorized numpy implementation.

    pb:      [n_sc, n_ue] transmit power * large-scale gain (zero = silent SC)
    a_los:   [n_sc, n_ue] sqrt(K/(K+1)) Rician LOS weight (0 for NLOS)
    b_scat:  [n_sc, n_ue] sqrt(1/(K+1)) scatter weight
    psi_re/psi_im: [n_sc, n_ue] fixed LOS phasor components
    owner:   [n_sc, n_rb] global UE index served per RB, -1 for none
    Returns sinr [n_ue, n_rb], zero where no RB is assigned.
    """
    n_sc, n_ue = pb.shape
    n_rb = owner.shape[1]
    sinr = np.zeros((n_ue, n_rb))
    l_all = np.arange(n_sc, dtype=np.uint64)
    for q in range(n_rb):
        served = owner[:, q]
        active = np.flatnonzero(served >= 0)
        if active.size == 0:
            continue
        ks = served[active]
        idx = (l_all[:, None] * np.uint64(n_ue) + ks.astype(np.uint64)[None, :]) * np.uint64(n_rb) + np.uint64(q)
        wre, wim = rng.gaussian_pair(key, idx)
        gre = a_los[:, ks] * psi_re[:, ks] + b_scat[:, ks] * wre
        gim = a_los[:, ks] * psi_im[:, ks] + b_scat[:, ks] * wim
        p = pb[:, ks] * (gre * gre + gim * gim)
        total = p.sum(axis=0)
        sig = p[active, np.arange(active.size)]
        sinr[ks, q] = sig / (total - sig + noise_w)
    return sinr


if HAVE_NUMBA:

    @njit(numba.uint64(numba.uint64), cache=True, inline="always")
    def _mix64(x):
        x ^= x >> np.uint64(30)
        x *= _MIX1
        x ^= x >> np.uint64(27)
        x *= _MIX2
        x ^= x >> np.uint64(31)
        return x

    @njit(cache=True, parallel=True)
    def _access_sinr_njit(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w, sinr):
        n_sc, n_ue = pb.shape
        n_rb = owner.shape[1]
        for l0 in prange(n_sc):
            for q in range(n_rb):
                k = owner[l0, q]
                if k < 0:
                    continue
                total = 0.0
                sig = 0.0
                for l in range(n_sc):
                    pbl = pb[l, k]
                    if pbl <= 0.0:
                        continue
                    idx = np.uint64((l * n_ue + k) * n_rb + q)
                    c0 = key + (idx * np.uint64(2)) * _GOLDEN
                    u1 = (float(_mix64(c0) >> np.uint64(11)) + 0.5) * _U53
                    u2 = (float(_mix64(c0 + _GOLDEN) >> np.uint64(11)) + 0.5) * _U53
                    r = np.sqrt(-np.log(u1))
                    ang = _TWO_PI * u2
                    gre = a_los[l, k] * psi_re[l, k] + b_scat[l, k] * (r * np.cos(ang))
                    gim = a_los[l, k] * psi_im[l, k] + b_scat[l, k] * (r * np.sin(ang))
                    p = pbl * (gre * gre + gim * gim)
                    total += p
                    if l == l0:
                        sig = p
                sinr[k, q] = sig / (total - sig + noise_w)

    def access_sinr_numba(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w):
        """Numba twin of access_sinr_numpy (same stream, same semantics)."""
        n_ue = pb.shape[1]
        sinr = np.zeros((n_ue, owner.shape[1]))
        _access_sinr_njit(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w, sinr)
        return sinr


def access_sinr(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w):
    """Dispatch to the numba kernel or the numpy fallback (SBHSIM_NO_NUMBA)."""
    if USE_NUMBA:
        return access_sinr_numba(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w)
    return access_sinr_numpy(key, pb, a_los, b_scat, psi_re, psi_im, owner, noise_w)
