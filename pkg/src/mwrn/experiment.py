"""Monte Carlo campaigns, error-event histograms and exact oracles."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.stats import binomtest

from . import analytics as an
from .config import ConfigError, SimConfig
from .protocol import DecodedView, FrameBits, run_frame

__all__ = [
    "BerPoint",
    "ConfigError",
    "ErrorEventHistogram",
    "KPoint",
    "SimConfig",
    "af_markov_oracle",
    "df_enumeration_oracle",
    "empirical_average_ber",
    "run_point",
    "run_sweep",
    "tally_events",
    "wilson_interval",
]


@dataclass
class ErrorEventHistogram:
    """counts[k] = number of bit indices at which exactly k users were wrong."""

    counts: np.ndarray
    total: int = 0

    @classmethod
    def empty(cls, L: int) -> "ErrorEventHistogram":
        return cls(np.zeros(L, dtype=np.int64), 0)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if int(self.counts.sum()) != self.total:
            raise ValueError(f"counts sum {int(self.counts.sum())} != total {self.total}")

    def merge(self, other: "ErrorEventHistogram") -> "ErrorEventHistogram":
        if self.counts.shape != other.counts.shape:
            raise ValueError("histograms have different user counts")
        return ErrorEventHistogram(self.counts + other.counts, self.total + other.total)

    __add__ = merge

    @property
    def L(self) -> int:
        return self.counts.size

    def probability(self, k: int) -> float:
        return self.counts[k] / self.total

    def wrong_bits(self) -> int:
        return int(np.dot(np.arange(self.L), self.counts))


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, FrameBits):
        return x.bits
    if isinstance(x, DecodedView):
        return x.decoded
    return np.asarray(x)


def tally_events(truth, view, observer: int | None = None, quiet_columns: int = 0) -> ErrorEventHistogram:
    """Per-bit-index error-event counts of one frame.

    ``quiet_columns`` adds that many error-free bit indices (rare engine).
    """
    if observer is None:
        observer = view.observer
    t = _as_matrix(truth)
    d = _as_matrix(view)
    if t.shape != d.shape:
        raise ValueError(f"truth shape {t.shape} != view shape {d.shape}")
    L, T = t.shape
    if not 1 <= observer <= L:
        raise ValueError(f"observer must be in 1..{L}, got {observer}")
    wrong = t != d
    wrong[observer - 1] = False
    k = wrong.sum(axis=0)
    counts = np.bincount(k, minlength=L).astype(np.int64)
    counts[0] += quiet_columns
    return ErrorEventHistogram(counts, T + quiet_columns)


def empirical_average_ber(h: ErrorEventHistogram, L: int | None = None) -> float:
    """(1/(L-1)) sum_k k P(k); equals wrong bits / (total (L-1))."""
    L = h.L if L is None else L
    if h.total == 0:
        raise ValueError("histogram is empty")
    if L < 2:
        raise ValueError("L must be >= 2")
    return h.wrong_bits() / (h.total * (L - 1))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


class KPoint(NamedTuple):
    simulated: float
    ci_low: float
    ci_high: float
    exact: float | None
    asymptotic: float | None


@dataclass
class BerPoint:
    snr_db: float
    histogram: ErrorEventHistogram
    simulated_avg_ber: float
    ci_low: float
    ci_high: float
    analytic_avg_ber: float
    exact_avg_ber: float | None
    verbatim_avg_ber: float | None
    per_k: dict[int, KPoint] = field(default_factory=dict)

    @property
    def bit_decisions(self) -> int:
        return self.histogram.total * (self.histogram.L - 1)


def _threads() -> int:
    raw = os.environ.get("MWRN_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError("MWRN_THREADS", f"must be an integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError("MWRN_THREADS", f"must be >= 1, got {n}")
        return n
    return max(1, os.cpu_count() or 1)


def run_point(config: SimConfig, snr_db: float, threads: int | None = None) -> ErrorEventHistogram:
    """Histogram of all frames at one SNR point.

    Integer counts are merged, so the result does not depend on the worker
    count or completion order.
    """
    L = config.users

    def one(trial: int) -> ErrorEventHistogram:
        f = run_frame(config, trial, snr_db)
        return tally_events(f.bits, f.view, config.observer, f.quiet_columns)

    threads = _threads() if threads is None else threads
    hist = ErrorEventHistogram.empty(L)
    if threads == 1:
        for t in range(config.frames):
            hist = hist + one(t)
        return hist
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for h in pool.map(one, range(config.frames)):
            hist = hist + h
    return hist


def analytic_counterparts(config: SimConfig, snr_db: float, channel_samples: int = 100_000):
    """(high-SNR average BER, exact average BER or None, verbatim or None)."""
    L = config.users
    rho = an.db_to_linear(snr_db)
    if config.channel == "awgn":
        return (
            an.average_ber(L, rho, config.protocol),
            an.exact_average_ber(L, rho, config.protocol, config.observer),
            an.average_ber(L, rho, config.protocol, verbatim=True),
        )
    approx = an.fading_average_ber(L, rho, config.protocol, channel_samples, config.seed)
    verbatim = None
    if config.protocol == "df":
        verbatim = an.fading_average_ber(L, rho, "df", bound_variant="verbatim")
    return approx, None, verbatim


def per_k_analytics(config: SimConfig, snr_db: float, k: int) -> tuple[float | None, float | None]:
    """(exact, high-SNR) probability of a k-event for the observer in AWGN."""
    if config.channel != "awgn" or math.isinf(snr_db):
        return None, None
    L, i = config.users, config.observer
    rho = an.db_to_linear(snr_db)
    exact = None
    if config.protocol == "df":
        p = an.p_df_twrn(rho)
        if k == 1 or (k == 2 and L >= 4):
            exact = an.df_k_event(L, p, i, k).value
        return exact, an.df_asymptotic_event(L, p)
    p, pp = an.p_af_twrn(rho), an.p_af_prime_twrn(rho)
    if k == 1 or (k == 2 and L >= 4):
        exact = an.af_k_event(L, p, pp, i, k).value
    return exact, an.af_reduced_event(L, p, k)


def summarize(config: SimConfig, snr_db: float, hist: ErrorEventHistogram) -> BerPoint:
    L = config.users
    wrong = hist.wrong_bits()
    n = hist.total * (L - 1)
    lo, hi = wilson_interval(wrong, n)
    sim = empirical_average_ber(hist, L)
    if math.isinf(snr_db):
        analytic, exact, verbatim = 0.0, 0.0, None
    else:
        analytic, exact, verbatim = analytic_counterparts(config, snr_db)
    per_k = {}
    for k in range(1, L):
        klo, khi = wilson_interval(int(hist.counts[k]), hist.total)
        e, a = per_k_analytics(config, snr_db, k)
        per_k[k] = KPoint(hist.probability(k), klo, khi, e, a)
    return BerPoint(snr_db, hist, sim, min(lo, sim), max(hi, sim), analytic, exact, verbatim, per_k)


def run_sweep(config: SimConfig, threads: int | None = None) -> list[BerPoint]:
    """Simulate every SNR point of ``config`` and attach analytic values."""
    return [summarize(config, snr, run_point(config, snr, threads)) for snr in config.snr_grid_db]


# -- oracles -------------------------------------------------------------------


def df_enumeration_oracle(L: int, p: float, i: int) -> np.ndarray:
    """Exact P(k), k = 0..L-1, by enumerating all pair-flip patterns.

    User j is wrong iff an odd number of the pairs between it and the
    observer were decided wrongly.
    """
    if L < 2 or L > 14:
        raise ValueError(f"enumeration supports 2 <= L <= 14, got {L}")
    if not 1 <= i <= L:
        raise ValueError(f"observer must be in 1..{L}, got {i}")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    dist = np.zeros(L)
    for flips in itertools.product((0, 1), repeat=L - 1):
        f = sum(flips)
        weight = p**f * (1.0 - p) ** (L - 1 - f)
        k = 0
        for j in range(1, L + 1):
            lo, hi = min(i, j), max(i, j)
            # pair s joins users s and s+1 (flips[s-1])
            k += sum(flips[lo - 1 : hi - 1]) % 2
        dist[k] += weight
    return dist


def _chain_error_counts(n: int, p: float, p_prime: float) -> np.ndarray:
    """Distribution of the number of errors on an AF chain of n steps."""
    # state[c, s]: probability of c errors so far with last step state s
    state = np.zeros((n + 1, 2))
    state[0, 0] = 1.0
    for _ in range(n):
        nxt = np.zeros_like(state)
        nxt[:, 0] += state[:, 0] * (1.0 - p) + state[:, 1] * (1.0 - p_prime)
        nxt[1:, 1] += state[:-1, 0] * p + state[:-1, 1] * p_prime
        state = nxt
    return state.sum(axis=1)


def af_markov_oracle(L: int, p: float, p_prime: float, i: int) -> np.ndarray:
    """Exact P(k) for the AF extraction chains by dynamic programming.

    A step fails with ``p`` after a correct step and ``p_prime`` after a
    failed one; the up and down chains are independent.
    """
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if not 1 <= i <= L:
        raise ValueError(f"observer must be in 1..{L}, got {i}")
    if not (0.0 <= p <= 1.0 and 0.0 <= p_prime <= 1.0):
        raise ValueError("p and p_prime must lie in [0, 1]")
    up = _chain_error_counts(i - 1, p, p_prime)
    down = _chain_error_counts(L - i, p, p_prime)
    return np.convolve(up, down)
