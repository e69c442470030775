"""Random-number streams: keyed numpy generators plus a counter-based
splitmix64 path used inside the access-interference kernels.

Every random quantity in a drop is drawn from a stream keyed by
(seed, drop, domain[, slot]), so results do not depend on execution order
or on how drops are distributed over workers.
"""

from __future__ import annotations

import numpy as np

# Stream domains. Values are part of the reproducibility contract: changing
# them changes every simulation output.
DOM_UE_DROP = 1
DOM_SC_DROP = 2
DOM_LINKS_BH = 3      # LOS + shadowing of macro->SC tables
DOM_LINKS_AC = 4      # LOS + shadowing of SC->UE tables
DOM_LINKS_DA = 5      # LOS + shadowing of macro->UE tables
DOM_LOS_PHASE = 6     # per-link scalar LOS phases
DOM_BH_FADING = 7
DOM_BH_PILOT = 8
DOM_DA_FADING = 9
DOM_DA_PILOT = 10
DOM_ACCESS = 11       # counter-based per-(SC, UE, RB, slot) access fading

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0 ** -53
TWO_PI = 2.0 * np.pi


def substream(seed: int, drop: int, domain: int, extra: int = 0) -> np.random.Generator:
    """Independent numpy generator for one (drop, domain) slice of the run."""
    return np.random.default_rng(np.random.SeedSequence([seed, drop, domain, extra]))


def splitmix64(x):
    """Counter-to-bits mixer; accepts uint64 scalars or arrays."""
    z = np.asarray(x, dtype=np.uint64).copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z if z.ndim else np.uint64(z)


def counter_bits(key: np.uint64, counter):
    """64 random bits for each counter value under the given stream key."""
    c = np.asarray(counter, dtype=np.uint64)
    return splitmix64(key + c * _GOLDEN)


def bits_to_unit(bits) -> np.ndarray:
    """Map 64-bit words to doubles in the open interval (0, 1)."""
    b = np.asarray(bits, dtype=np.uint64)
    return ((b >> np.uint64(11)).astype(np.float64) + 0.5) * _U53


def gaussian_pair(key: np.uint64, counter):
    """Standard complex-normal components (each N(0, 1/2)) per counter.

    Box-Muller on two counter values (2*counter, 2*counter + 1); the pair has
    unit expected power, matching a CN(0, 1) draw.
    """
    c = np.asarray(counter, dtype=np.uint64)
    u1 = bits_to_unit(counter_bits(key, c * np.uint64(2)))
    u2 = bits_to_unit(counter_bits(key, c * np.uint64(2) + np.uint64(1)))
    r = np.sqrt(-np.log(u1))
    ang = TWO_PI * u2
    return r * np.cos(ang), r * np.sin(ang)


def kernel_key(seed: int, drop: int, slot: int) -> np.uint64:
    """Stream key for the counter-based access-fading draws of one slot."""
    k = np.uint64(seed)
    for v in (drop, slot, DOM_ACCESS):
        k = splitmix64(k ^ (np.uint64(v) * _GOLDEN))
    return k
