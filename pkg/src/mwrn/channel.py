"""Seeded random streams and per-slot channel coefficients.

Every random quantity is drawn from a stream keyed by
(seed, trial, slot, role, user), so a full channel tape is a pure function of
the seed and the configuration, and trials can run in any order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.special import erfc, erfcinv


class Role(IntEnum):
    BITS = 0
    MAC_NOISE = 1
    BC_NOISE = 2
    MAC_FADING = 3
    BC_FADING = 4


@dataclass(frozen=True)
class RandomStream:
    """Independent generator for one (trial, slot, role, user) key."""

    seed: int
    trial: int = 0
    slot: int = 0
    role: int = Role.BITS
    user: int = 0

    def generator(self) -> np.random.Generator:
        key = (int(self.trial), int(self.slot), int(self.role), int(self.user))
        return np.random.default_rng(np.random.SeedSequence(int(self.seed), spawn_key=key))


def gaussian_sample(stream: RandomStream, variance: float, size=None, complex_valued: bool = False):
    """Zero-mean Gaussian noise with the given (total) variance.

    Complex samples are circularly symmetric, variance/2 per dimension.
    Variance 0 returns exact zeros.
    """
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    dtype = complex if complex_valued else float
    if variance == 0:
        return np.zeros(size, dtype=dtype) if size is not None else dtype(0)
    rng = stream.generator()
    if complex_valued:
        s = np.sqrt(variance / 2.0)
        n = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return n * s
    return rng.standard_normal(size) * np.sqrt(variance)


def rayleigh_coefficient(stream: RandomStream, size=None):
    """Zero-mean unit-variance circular complex Gaussian coefficient(s)."""
    return gaussian_sample(stream, 1.0, size, complex_valued=True)


@dataclass(frozen=True)
class GaussianExceedances:
    """Sparse draw of the entries of a length-``size`` N(0, var) vector whose
    magnitude exceeds ``threshold``; every other entry is known to lie inside."""

    positions: np.ndarray
    values: np.ndarray
    size: int


def gaussian_exceedances(stream: RandomStream, variance: float, size: int, threshold: float) -> GaussianExceedances:
    """Draw only the large entries of an i.i.d. Gaussian vector.

    The count is Binomial(size, q) with q = P(|n| > threshold), positions are
    uniform without replacement and magnitudes come from the exact
    conditional tail. A non-positive threshold draws every entry.
    """
    rng = stream.generator()
    if variance == 0:
        return GaussianExceedances(np.zeros(0, dtype=np.int64), np.zeros(0), size)
    sigma = np.sqrt(variance)
    c = max(float(threshold), 0.0)
    q = float(erfc(c / (sigma * np.sqrt(2.0))))
    count = int(rng.binomial(size, q))
    positions = np.sort(rng.choice(size, size=count, replace=False)).astype(np.int64)
    u = 1.0 - rng.random(count)
    mag = sigma * np.sqrt(2.0) * erfcinv(q * u)
    sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    return GaussianExceedances(positions, sign * mag, size)


@dataclass(frozen=True)
class SlotChannel:
    """Coefficients of one slot: MAC pair (h_a, h_b) and the BC coefficient
    seen by each user (``g[u-1]`` for user u)."""

    h_a: complex
    h_b: complex
    g: np.ndarray
    model: str

    def bc(self, user: int) -> complex:
        return self.g[user - 1]


def slot_channel(config, trial: int, slot: int) -> SlotChannel:
    """Channel of slot ``slot`` (1..L-1), pairing users slot and slot+1.

    Rayleigh coefficients are fresh per phase: the MAC pair and every BC
    receiver draw from disjoint streams. With ``bc_reuse_mac_channel`` the
    two users of the pair see their own MAC coefficient on the BC link.
    """
    L = config.users
    if not 1 <= slot <= L - 1:
        raise ValueError(f"slot must be in 1..{L - 1}, got {slot}")
    if config.channel == "awgn":
        return SlotChannel(1 + 0j, 1 + 0j, np.ones(L, dtype=complex), "awgn")
    h = rayleigh_coefficient(RandomStream(config.seed, trial, slot, Role.MAC_FADING), size=2)
    g = rayleigh_coefficient(RandomStream(config.seed, trial, slot, Role.BC_FADING), size=L)
    if config.bc_reuse_mac_channel:
        g[slot - 1] = h[0]
        g[slot] = h[1]
    return SlotChannel(complex(h[0]), complex(h[1]), g, "rayleigh")
