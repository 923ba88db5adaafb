"""One frame of the two-phase multi-way relay protocol.

Users are numbered 1..L. Slot s (1..L-1) pairs users s and s+1: both
transmit to the relay in the MAC phase, and the relay broadcasts its
processed signal in the BC phase. All operations are vectorised over the T
bit indices of a frame.

Bit mapping is 0 -> +1, 1 -> -1, so the network-coded bit V = W_a xor W_b
is 0 exactly when the superposition has amplitude 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .analytics import LinkParameters, db_to_linear, link_parameters_at_snr
from .channel import RandomStream, Role, SlotChannel, gaussian_exceedances, gaussian_sample, slot_channel
from .config import SimConfig


@dataclass(frozen=True)
class FrameBits:
    """Transmitted bits, shape (L, T), row u-1 for user u."""

    bits: np.ndarray

    def __post_init__(self):
        if self.bits.ndim != 2:
            raise ValueError("bits must be an (L, T) matrix")


@dataclass(frozen=True)
class DecodedView:
    """The observer's estimates of every user's bits, shape (L, T)."""

    observer: int
    decoded: np.ndarray


@dataclass(frozen=True)
class Frame:
    bits: FrameBits
    view: DecodedView
    channel_uses: int
    # bit indices that were not simulated because no noise sample there
    # could change a decision (rare engine only); they are error free
    quiet_columns: int = 0


def modulate(w):
    """BPSK: 0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(w, dtype=float)


def mac_slot(x_a, x_b, ch: SlotChannel, noise):
    """Superposition received by the relay."""
    if ch.model == "awgn":
        return x_a + x_b + noise
    return ch.h_a * x_a + ch.h_b * x_b + noise


def df_relay_detect(r, params: LinkParameters, ch: SlotChannel) -> np.ndarray:
    """Network-coded bit estimate at the DF relay."""
    if ch.model == "awgn":
        return (np.abs(r) < params.gamma_r).astype(np.uint8)
    same = ch.h_a + ch.h_b
    diff = ch.h_a - ch.h_b
    d00 = np.abs(r - same) ** 2
    d01 = np.abs(r + same) ** 2
    d10 = np.abs(r - diff) ** 2
    d11 = np.abs(r + diff) ** 2
    n = params.noise_variance
    if n == 0:
        return (np.minimum(d10, d11) < np.minimum(d00, d01)).astype(np.uint8)
    l0 = np.logaddexp(-d00 / n, -d01 / n)
    l1 = np.logaddexp(-d10 / n, -d11 / n)
    return (l1 > l0).astype(np.uint8)


def df_broadcast(v_hat, ch: SlotChannel, noise, user: int):
    """Signal received by ``user`` when the relay re-modulates V-hat."""
    z = modulate(v_hat)
    if ch.model == "awgn":
        return z + noise
    return ch.bc(user) * z + noise


def df_user_detect(y, params: LinkParameters, ch: SlotChannel, user: int = 1) -> np.ndarray:
    """Relayed bit estimate at a DF user."""
    if ch.model == "awgn":
        return (y <= params.gamma).astype(np.uint8)
    return (np.real(np.conj(ch.bc(user)) * y) < 0).astype(np.uint8)


def _check_chain(observer: int, own, rows) -> int:
    L = rows.shape[0] + 1
    if not 1 <= observer <= L:
        raise ValueError(f"observer must be in 1..{L}, got {observer}")
    if np.shape(own) != rows.shape[1:]:
        raise ValueError(f"own bits shape {np.shape(own)} does not match {rows.shape[1:]}")
    return L


def df_extract(observer: int, own_bits, v_hat_hat) -> DecodedView:
    """XOR extraction chains up and down from the observer."""
    v = np.asarray(v_hat_hat, dtype=np.uint8)
    own = np.asarray(own_bits, dtype=np.uint8)
    L = _check_chain(observer, own, v)
    o = observer - 1
    decoded = np.empty((L,) + own.shape, dtype=np.uint8)
    decoded[o] = own
    if o < L - 1:
        decoded[o + 1 :] = np.bitwise_xor.accumulate(v[o:], axis=0) ^ own
    if o > 0:
        # user j (0-based) < o is own xor v[j] xor ... xor v[o-1]
        up = np.bitwise_xor.accumulate(v[o - 1 :: -1], axis=0) ^ own
        decoded[:o] = up[::-1]
    return DecodedView(observer, decoded)


def af_broadcast(r, alpha: float, ch: SlotChannel, noise, user: int = 1):
    """Amplified superposition received by ``user``."""
    if ch.model == "awgn":
        return alpha * r + noise
    return ch.bc(user) * alpha * r + noise


def af_extract(observer: int, own_bits, y, params: LinkParameters, csi=None) -> DecodedView:
    """Sequential self-interference cancellation with hard decisions.

    ``y[s-1]`` is slot s as received by the observer; ``csi`` lists the
    :class:`SlotChannel` of every slot (needed in fading only).
    """
    y = np.asarray(y)
    own = np.asarray(own_bits, dtype=np.uint8)
    L = _check_chain(observer, own, y)
    o = observer - 1
    alpha = params.alpha
    decoded = np.empty((L,) + own.shape, dtype=np.uint8)
    decoded[o] = own

    def step(slot_index, known, known_is_a):
        ch = None if csi is None else csi[slot_index]
        x_hat = modulate(known)
        if ch is None or ch.model == "awgn":
            return (y[slot_index] - alpha * x_hat < 0).astype(np.uint8)
        g = ch.bc(observer)
        h_known, h_new = (ch.h_a, ch.h_b) if known_is_a else (ch.h_b, ch.h_a)
        u = y[slot_index] - alpha * g * h_known * x_hat
        return (np.real(np.conj(alpha * g * h_new) * u) < 0).astype(np.uint8)

    for j in range(o, L - 1):
        decoded[j + 1] = step(j, decoded[j], True)
    for j in range(o - 1, -1, -1):
        decoded[j] = step(j, decoded[j + 1], False)
    return DecodedView(observer, decoded)


@lru_cache(maxsize=256)
def _params(L: int, snr_db: float) -> LinkParameters:
    return link_parameters_at_snr(L, db_to_linear(snr_db))


def frame_bits(config: SimConfig, trial: int, columns: int | None = None) -> FrameBits:
    T = config.bits_per_frame if columns is None else columns
    rng = RandomStream(config.seed, trial, 0, Role.BITS).generator()
    return FrameBits(rng.integers(0, 2, size=(config.users, T), dtype=np.uint8))


def simulate_frame(config: SimConfig, trial: int, snr_db: float) -> Frame:
    """Run one frame end to end and return the observer's decoded view.

    Noise streams do not depend on the SNR point, so a sweep uses common
    random numbers across SNRs.
    """
    L, T, o = config.users, config.bits_per_frame, config.observer
    params = _params(L, float(snr_db))
    fading = config.channel == "rayleigh"
    bits = frame_bits(config, trial)
    x = modulate(bits.bits)
    if config.protocol == "df":
        dtype = np.uint8
    else:
        dtype = complex if fading else float
    rows = np.empty((L - 1, T), dtype=dtype)
    csi = []
    uses = 0
    for s in range(1, L):
        ch = slot_channel(config, trial, s)
        csi.append(ch)
        n1 = gaussian_sample(RandomStream(config.seed, trial, s, Role.MAC_NOISE), params.noise_variance, T, fading)
        r = mac_slot(x[s - 1], x[s], ch, n1)
        uses += 1
        n2 = gaussian_sample(RandomStream(config.seed, trial, s, Role.BC_NOISE, o), params.noise_variance, T, fading)
        if config.protocol == "df":
            y = df_broadcast(df_relay_detect(r, params, ch), ch, n2, o)
            rows[s - 1] = df_user_detect(y, params, ch, o)
        else:
            rows[s - 1] = af_broadcast(r, params.alpha, ch, n2, o)
        uses += 1
    own = bits.bits[o - 1]
    if config.protocol == "df":
        view = df_extract(o, own, rows)
    else:
        view = af_extract(o, own, rows, params, csi)
    return Frame(bits, view, uses)


def simulate_frame_rare(config: SimConfig, trial: int, snr_db: float) -> Frame:
    """DF over AWGN, simulating only bit indices where noise can matter.

    A relay decision can only fail if |n1| > 2 - gamma_r and a user
    decision only if |n2| > 1 - |gamma|. Per slot the positions and values
    of those exceedances are drawn exactly; at every other bit index all
    decisions are correct, so those columns are counted as error free
    without being simulated. The returned view covers only the simulated
    columns.
    """
    if (config.protocol, config.channel) != ("df", "awgn"):
        raise ValueError("the rare engine supports only DF over AWGN")
    L, T, o = config.users, config.bits_per_frame, config.observer
    params = _params(L, float(snr_db))
    relay_margin = 2.0 - params.gamma_r
    user_margin = 1.0 - abs(params.gamma)
    mac, bc = [], []
    for s in range(1, L):
        mac.append(gaussian_exceedances(RandomStream(config.seed, trial, s, Role.MAC_NOISE), params.noise_variance, T, relay_margin))
        bc.append(gaussian_exceedances(RandomStream(config.seed, trial, s, Role.BC_NOISE, o), params.noise_variance, T, user_margin))
    cols = np.unique(np.concatenate([e.positions for e in mac + bc] + [np.zeros(0, dtype=np.int64)]))
    m = cols.size
    bits = frame_bits(config, trial, columns=m)
    x = modulate(bits.bits)
    rows = np.empty((L - 1, m), dtype=np.uint8)
    ch = slot_channel(config, trial, 1)
    for s in range(1, L):
        n1 = np.zeros(m)
        n1[np.searchsorted(cols, mac[s - 1].positions)] = mac[s - 1].values
        n2 = np.zeros(m)
        n2[np.searchsorted(cols, bc[s - 1].positions)] = bc[s - 1].values
        r = mac_slot(x[s - 1], x[s], ch, n1)
        y = df_broadcast(df_relay_detect(r, params, ch), ch, n2, o)
        rows[s - 1] = df_user_detect(y, params, ch, o)
    view = df_extract(o, bits.bits[o - 1], rows)
    return Frame(bits, view, 2 * (L - 1), quiet_columns=T - m)


def run_frame(config: SimConfig, trial: int, snr_db: float) -> Frame:
    if config.engine == "rare":
        return simulate_frame_rare(config, trial, snr_db)
    return simulate_frame(config, trial, snr_db)
