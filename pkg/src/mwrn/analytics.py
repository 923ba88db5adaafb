"""Closed-form error probabilities for L-user multi-way relay networks.

Every function here is pure. SNR arguments are the linear SNR per bit per
user ``rho``; ``math.inf`` is accepted wherever it is meaningful and denotes
the noiseless limit.

Conventions
-----------
Users are indexed 1..L and ``i`` denotes the observer. An event of order
``k`` means the observer decodes exactly ``k`` other users wrongly at one bit
index. The per-pair error probabilities of the two-way building blocks are
``P_DF`` (DF), and ``P_AF`` / ``P'_AF`` (AF, after a correct / wrong previous
step of the extraction chain).

Literal variants of several closed forms are kept behind ``verbatim=True`` next to
their corrected counterparts so reports can show both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

PROTOCOLS = ("df", "af")
BOUND_VARIANTS = ("quarter_pi", "verbatim")

# -- helpers -----------------------------------------------------------------


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return _scalar(0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0)))


def db_to_linear(db):
    return _scalar(10.0 ** (np.asarray(db, dtype=float) / 10.0))


def linear_to_db(x):
    return _scalar(10.0 * np.log10(np.asarray(x, dtype=float)))


def _check_protocol(protocol: str) -> str:
    p = protocol.lower()
    if p not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    return p


def _check_rho(rho) -> None:
    if np.any(np.isnan(rho)) or np.any(np.asarray(rho) <= 0):
        raise ValueError(f"rho must be positive, got {rho!r}")


# -- link parameters -----------------------------------------------------------


@dataclass(frozen=True)
class LinkParameters:
    """Per-link constants shared by both hops.

    ``noise_variance`` is 1/(2 rho); it is 0 only in the noiseless limit.
    """

    rho: float
    noise_variance: float
    alpha: float
    gamma_r: float
    gamma: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be non-negative")
        if not 0 < self.alpha <= math.sqrt(0.5) + 1e-15:
            raise ValueError("alpha must lie in (0, sqrt(1/2)]")


def relay_threshold(rho):
    """MAP threshold on |r| at the DF relay."""
    rho = np.asarray(rho, dtype=float)
    _check_rho(rho)
    with np.errstate(divide="ignore", over="ignore"):
        # expm1 keeps sqrt(1 - exp(-8 rho)) accurate at small rho and
        # saturates cleanly to 1 at large rho
        val = 1.0 + np.log1p(np.sqrt(-np.expm1(-8.0 * rho))) / (4.0 * rho)
    return _scalar(val)


def user_threshold(rho, gamma_r=None):
    """MAP threshold on y at a DF user; decide V=0 when y exceeds it."""
    rho = np.asarray(rho, dtype=float)
    _check_rho(rho)
    gr = relay_threshold(rho) if gamma_r is None else np.asarray(gamma_r, dtype=float)
    sr = np.sqrt(rho)
    a = erfc((gr + 2.0) * sr)
    d = erfc((2.0 - gr) * sr)
    c = erfc(gr * sr)
    # ln(4/S - 1) with S = erfc(a) + erfc(b) + 2 erfc(c), b < 0 rewritten
    # as 2 - erfc(-b) to avoid cancellation
    s = 2.0 - d + a + 2.0 * c
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log1p((2.0 * d - 2.0 * a - 4.0 * c) / s) / (4.0 * rho)
    val = np.where(np.isinf(rho), 0.0, val)
    return _scalar(val)


def link_parameters_at_snr(L: int, rho: float) -> LinkParameters:
    """Link constants at a given SNR per bit per user (``inf`` = noiseless)."""
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    rho = float(rho)
    _check_rho(rho)
    sigma2 = 0.0 if math.isinf(rho) else 1.0 / (2.0 * rho)
    return LinkParameters(
        rho=rho,
        noise_variance=sigma2,
        alpha=math.sqrt(1.0 / (2.0 + sigma2)),
        gamma_r=relay_threshold(rho),
        gamma=user_threshold(rho),
    )


def link_parameters(L: int, n0: float) -> LinkParameters:
    """Link constants from the base noise density ``n0``.

    The per-link noise variance is ((2L-2)/L) n0 / 2, which accounts for the
    2(L-1) channel uses spent on L messages.
    """
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if not n0 > 0:
        raise ValueError(f"n0 must be positive, got {n0}")
    scale = (2.0 * L - 2.0) / L
    return link_parameters_at_snr(L, 1.0 / (scale * n0))


# -- two-way building blocks ---------------------------------------------------


def p_df_twrn(rho, verbatim: bool = False):
    """Pair error probability of a DF two-way relay link in AWGN.

    Both hops use MAP thresholds. The default is the grouping that equals the
    decision-region integrals; ``verbatim=True`` gives the historically
    literal grouping, which overstates the error by about 7% at moderate SNR.
    """
    rho = np.asarray(rho, dtype=float)
    _check_rho(rho)
    gr = np.asarray(relay_threshold(rho))
    g = np.asarray(user_threshold(rho, gr))
    sr = np.sqrt(rho)
    u = erfc((1.0 - g) * sr)
    w = erfc((1.0 + g) * sr)
    a = erfc((gr + 2.0) * sr)
    d = erfc((2.0 - gr) * sr)
    c = erfc(gr * sr)
    if verbatim:
        val = ((2.0 - w) * ((d - a) + 2.0 * c * (2.0 - u)) + u * (a + 2.0 - d + 2.0 * (1.0 - c) * w)) / 8.0
    else:
        val = (u * (a + 2.0 - d) + (2.0 - w) * (d - a) + 2.0 * c * (2.0 - u) + 2.0 * (1.0 - c) * w) / 8.0
    return _scalar(val)


def _af_scale(rho):
    rho = np.asarray(rho, dtype=float)
    _check_rho(rho)
    with np.errstate(divide="ignore"):
        sigma2 = np.where(np.isinf(rho), 0.0, 1.0 / (2.0 * rho))
        alpha = np.sqrt(1.0 / (2.0 + sigma2))
        x = alpha / np.sqrt((alpha**2 + 1.0) / rho)
    return x


def p_af_twrn(rho):
    """BER of an AF two-way relay link in AWGN."""
    return _scalar(0.5 * erfc(_af_scale(rho)))


def p_af_prime_twrn(rho):
    """AF step error probability given the previous extraction step failed."""
    x = _af_scale(rho)
    # erfc(-x) = 2 - erfc(x)
    return _scalar(0.25 * (erfc(3.0 * x) + 2.0 - erfc(x)))


@dataclass(frozen=True)
class TwrnBaselines:
    p_df: float
    p_af: float
    p_af_prime: float


def twrn_baselines(params: LinkParameters, verbatim: bool = False) -> TwrnBaselines:
    rho = params.rho
    return TwrnBaselines(
        p_df=p_df_twrn(rho, verbatim=verbatim),
        p_af=p_af_twrn(rho),
        p_af_prime=p_af_prime_twrn(rho),
    )


# -- error cases and event probabilities --------------------------------------


def _power(base: float, exp: int) -> float:
    # cases whose exponent is negative cannot occur for that L
    return 0.0 if exp < 0 else base**exp


def df_error_cases(L: int, p: float) -> dict[str, float]:
    """Probabilities of the DF error cases A1..G1 for pair error rate ``p``."""
    q = 1.0 - p
    a = _power(q, L - 3) * p * p
    b = _power(q, L - 2) * p
    return {
        "A1": a,
        "B1": b,
        "C1": a,
        "D1": b,
        "E1": _power(q, L - 5) * p**4,
        "F1": _power(q, L - 4) * p**3,
        "G1": a,
    }


def af_error_cases(L: int, p: float, p_prime: float) -> dict[str, float]:
    """Probabilities of the AF error cases A2..G2."""
    q = 1.0 - p
    r = 1.0 - p_prime
    return {
        "A2": _power(q, L - 3) * p * r,
        "B2": _power(q, L - 2) * p,
        "C2": _power(q, L - 4) * p * p_prime * r,
        "D2": _power(q, L - 3) * p * p_prime,
        "E2": _power(q, L - 5) * p * p * r * r,
        "F2": _power(q, L - 4) * p * p * r,
        "G2": _power(q, L - 3) * p * p,
    }


@dataclass(frozen=True)
class EventProbability:
    value: float
    exact: bool


def _check_event(L: int, i: int, k: int) -> None:
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if not 1 <= i <= L:
        raise ValueError(f"observer index i must be in 1..{L}, got {i}")
    if not 1 <= k <= L - 1:
        raise ValueError(f"event order k must be in 1..{L - 1}, got {k}")


def _one_event(L: int, i: int, a: float, b: float) -> float:
    if i in (1, L):
        return (L - 2) * a + b
    return (L - 3) * a + 2 * b


def _msum(lo: int, hi: int, offset: int) -> int:
    """sum_{m=lo}^{hi} (offset - m), zero when the range is empty."""
    return sum(offset - m for m in range(lo, hi + 1))


def _two_event(L: int, i: int, c: float, d: float, e: float, f: float, g: float, verbatim: bool) -> float:
    if L < 4:
        raise ValueError(f"the k=2 expression needs L >= 4, got {L}")
    # the literal branches are written for the upper half of the chain;
    # the lower half is its mirror image
    j = i if verbatim else min(i, L + 1 - i)
    if j in (1, L):
        return (L - 3) * c + d + _msum(2, L - 3, L - 2) * e + (L - 3) * f
    if j in (2, L - 1):
        val = (L - 4) * c + d + _msum(2, L - 4, L - 3) * e + 2 * (L - 4) * f + g
        return val if verbatim else val + f
    if j in (3, L - 2):
        val = (L - 5) * c + 2 * d + _msum(2, L - 4, L - 3) * e + 2 * (L - 4) * f + g
        return val if verbatim else val + e
    coef = _msum(2, j - 2, L - 4) + _msum(j - 1, L - j - 1, L - 3) + _msum(L - j, L - 3, L - 2)
    return (L - 5) * c + 2 * d + coef * e + 2 * (L - 4) * f + g


def df_k_event(L: int, p: float, i: int, k: int, verbatim: bool = False) -> EventProbability:
    """DF event probability given the pair error rate ``p`` directly."""
    _check_event(L, i, k)
    cases = df_error_cases(L, p)
    if k == 1:
        return EventProbability(_one_event(L, i, cases["A1"], cases["B1"]), True)
    if k == 2:
        val = _two_event(L, i, cases["C1"], cases["D1"], cases["E1"], cases["F1"], cases["G1"], verbatim)
        return EventProbability(val, True)
    return EventProbability(df_asymptotic_event(L, p), False)


def df_asymptotic_event(L: int, p: float) -> float:
    """High-SNR DF event probability, identical for every order and observer."""
    return (1.0 - p) ** (L - 2) * p


def df_event_probability(L: int, rho: float, i: int, k: int, verbatim: bool = False) -> EventProbability:
    """Probability that observer ``i`` decodes exactly ``k`` users wrongly (DF, AWGN).

    Orders 1 and 2 are exact; higher orders use the high-SNR form and carry
    ``exact=False``.
    """
    return df_k_event(L, p_df_twrn(rho, verbatim=verbatim), i, k, verbatim=verbatim)


def af_k_event(L: int, p: float, p_prime: float, i: int, k: int, verbatim: bool = False) -> EventProbability:
    """AF event probability given ``P_AF`` and ``P'_AF`` directly."""
    _check_event(L, i, k)
    cases = af_error_cases(L, p, p_prime)
    if k == 1:
        return EventProbability(_one_event(L, i, cases["A2"], cases["B2"]), True)
    if k == 2:
        val = _two_event(L, i, cases["C2"], cases["D2"], cases["E2"], cases["F2"], cases["G2"], verbatim)
        return EventProbability(val, True)
    return EventProbability(af_consecutive_event(L, p, p_prime, k), False)


def af_consecutive_event(L: int, p: float, p_prime: float, k: int) -> float:
    """High-SNR AF event probability from runs of ``k`` consecutive errors.

    Keeps ``P'_AF`` explicit, which matters in fading where it is far from 1/2.
    """
    q = 1.0 - p
    head = (L - k - 1) * _power(q, L - 3) * p * (1.0 - p_prime) if L - k - 1 else 0.0
    return (p_prime / q) ** (k - 1) * (head + _power(q, L - 2) * p)


def af_reduced_event(L: int, p: float, k: int) -> float:
    """AF event probability with ``P'_AF = 1/2``: (L-k+1)/2^k * P_AF."""
    if not 1 <= k <= L - 1:
        raise ValueError(f"event order k must be in 1..{L - 1}, got {k}")
    return (L - k + 1) / 2.0**k * p


def af_event_probability(L: int, rho: float, i: int, k: int, verbatim: bool = False) -> EventProbability:
    """Probability that observer ``i`` decodes exactly ``k`` users wrongly (AF, AWGN).

    Orders 1 and 2 are exact; higher orders use the consecutive-run form and
    carry ``exact=False``. See :func:`af_reduced_event` for the reduced form.
    """
    return af_k_event(L, p_af_twrn(rho), p_af_prime_twrn(rho), i, k, verbatim=verbatim)


@dataclass
class EventProbabilityTable:
    """Event probabilities keyed by (observer, order)."""

    L: int
    protocol: str
    entries: dict[tuple[int, int], EventProbability] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int]) -> EventProbability:
        return self.entries[key]


def event_probability_table(L: int, rho: float, protocol: str) -> EventProbabilityTable:
    """All (i, k) event probabilities; order 2 is omitted when L < 4."""
    protocol = _check_protocol(protocol)
    fn = df_event_probability if protocol == "df" else af_event_probability
    table = EventProbabilityTable(L, protocol)
    for i in range(1, L + 1):
        for k in range(1, L):
            if k == 2 and L < 4:
                continue
            table.entries[(i, k)] = fn(L, rho, i, k)
    return table


# -- average BER -------------------------------------------------------------


def af_average_coefficient(L: int) -> Fraction:
    """Exact coefficient c(L) with average AF BER = c(L) * P_AF at high SNR."""
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    total = sum(Fraction(k * (L - k + 1), 2**k) for k in range(1, L))
    return total / (L - 1)


def af_average_coefficient_verbatim(L: int) -> float:
    """The literal closed form of the same coefficient.

    It disagrees with the summation (about 4.4% high at L=10) and is negative
    at L=2; kept for comparison output only.
    """
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    t1 = (L + 1) / (L - 1) * (2.0 - L / 2.0 ** (L - 2))
    t2 = 3.0 / (L - 1) * (2.0 - (L * L - 3) / 2.0 ** (L - 2))
    return t1 - t2


def average_ber(L: int, rho, protocol: str, verbatim: bool = False):
    """High-SNR average BER of one user.

    DF: (L/2) P_DF, capped at 1. AF: the exact-rational coefficient from
    :func:`af_average_coefficient` times P_AF. With ``verbatim=True`` the
    literal P_DF grouping (DF) or the literal closed-form coefficient (AF)
    is used instead.
    """
    protocol = _check_protocol(protocol)
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if protocol == "df":
        val = np.minimum(1.0, (L / 2.0) * np.asarray(p_df_twrn(rho, verbatim=verbatim)))
        return _scalar(val)
    coef = af_average_coefficient_verbatim(L) if verbatim else float(af_average_coefficient(L))
    return _scalar(coef * np.asarray(p_af_twrn(rho)))


def df_error_distance_law(p: float, d: int) -> float:
    """P(odd number of flips among ``d`` independent pair decisions)."""
    return 0.5 * (1.0 - (1.0 - 2.0 * p) ** d)


def af_error_distance_law(p: float, p_prime: float, d_max: int) -> np.ndarray:
    """Marginal error probability of chain steps 1..d_max in AF."""
    out = np.empty(d_max)
    e = p
    for d in range(d_max):
        out[d] = e
        e = e * p_prime + (1.0 - e) * p
    return out


def exact_average_ber(L: int, rho: float, protocol: str, observer: int = 1) -> float:
    """Exact average BER of ``observer`` in AWGN from the chain laws.

    A decoded user at chain distance d is wrong with the DF parity law or the
    two-state AF recursion; averaging over all L-1 users gives the BER
    without any high-SNR approximation.
    """
    protocol = _check_protocol(protocol)
    if not 1 <= observer <= L:
        raise ValueError(f"observer must be in 1..{L}, got {observer}")
    up, down = observer - 1, L - observer
    dists = list(range(1, up + 1)) + list(range(1, down + 1))
    if protocol == "df":
        p = p_df_twrn(rho)
        probs = [df_error_distance_law(p, d) for d in dists]
    else:
        law = af_error_distance_law(p_af_twrn(rho), p_af_prime_twrn(rho), max(up, down))
        probs = [law[d - 1] for d in dists]
    return float(np.mean(probs))


# -- fading ------------------------------------------------------------------


@dataclass(frozen=True)
class FadingBoundTerms:
    gamma_bar: float
    phi1: float
    phi2: float
    phi3: float
    xi: float
    delta1: float
    delta2: float
    zeta1: float
    zeta2: float
    raw: float
    value: float
    clamped: bool
    variant: str


def fading_df_bound_terms(rho: float, variant: str = "quarter_pi") -> FadingBoundTerms:
    """Upper bound on the DF two-way pair error rate in Rayleigh fading.

    ``variant="quarter_pi"`` evaluates the finite-range Craig integrals at
    pi/4, i.e. zeta_j = -delta_j. ``variant="verbatim"`` uses
    zeta_j = -delta_j cot(mu) with mu = sqrt(g/(1+g)) in radians, the
    literal form, which does not decay with SNR.
    """
    if variant not in BOUND_VARIANTS:
        raise ValueError(f"variant must be one of {BOUND_VARIANTS}, got {variant!r}")
    rho = float(rho)
    _check_rho(rho)
    g = rho
    mu = 1.0 if math.isinf(g) else math.sqrt(g / (1.0 + g))
    # 1 - mu computed without cancellation
    one_minus_mu = 0.0 if math.isinf(g) else 1.0 / ((1.0 + g) * (1.0 + mu))
    phi1 = one_minus_mu / 2.0
    phi2 = (math.pi / 2.0 - 2.0 * mu * (math.pi / 2.0 - math.atan(mu))) / (2.0 * math.pi)
    delta1 = 1.0 if math.isinf(g) else math.sqrt((1.0 + g) / (3.0 + g))
    delta2 = 1.0 if math.isinf(g) else math.sqrt(g / (2.0 + g))
    cot = 1.0 if variant == "quarter_pi" else 1.0 / math.tan(mu)
    zeta1 = -delta1 * cot
    zeta2 = -delta2 * cot
    phi3 = (
        math.pi / 2.0
        - delta1 * (math.pi / 2.0 + math.atan(zeta1))
        - delta2 * (math.pi / 2.0 + math.atan(zeta2))
    ) / (2.0 * math.pi)
    xi = 2.0 * phi1 - 4.0 * phi1**2 - 2.0 * phi2 - 2.0 * mu * phi3
    raw = 2.0 * phi1 + xi / 2.0
    value = min(1.0, max(0.0, raw))
    return FadingBoundTerms(
        gamma_bar=g,
        phi1=phi1,
        phi2=phi2,
        phi3=phi3,
        xi=xi,
        delta1=delta1,
        delta2=delta2,
        zeta1=zeta1,
        zeta2=zeta2,
        raw=raw,
        value=value,
        clamped=value != raw,
        variant=variant,
    )


def fading_df_bound(rho: float, variant: str = "quarter_pi") -> float:
    return fading_df_bound_terms(rho, variant).value


def fading_af_conditional(g_i, g_mid, g_next, rho):
    """AF step error probabilities conditioned on the channel power gains.

    Returns ``(p_af_cond, p_af_prime_cond)``; arrays broadcast.
    """
    g_i = np.asarray(g_i, dtype=float)
    g_mid = np.asarray(g_mid, dtype=float)
    g_next = np.asarray(g_next, dtype=float)
    if np.any(g_i < 0) or np.any(g_mid < 0) or np.any(g_next < 0):
        raise ValueError("channel gains must be non-negative")
    _check_rho(rho)
    inv = 0.0 if math.isinf(rho) else 1.0 / rho
    with np.errstate(divide="ignore", invalid="ignore"):
        x = g_i * g_mid / (2.0 * g_i * inv + g_mid * inv + inv**2)
        y = g_i * g_next / (4.0 * g_i * g_mid + 2.0 * g_i * inv + g_next * inv + inv**2)
    # a zero gain gives 0/0 in the noiseless limit; the argument is 0 there
    x = np.where(g_i * g_mid == 0, 0.0, x)
    y = np.where(g_i * g_next == 0, 0.0, y)
    return q_function(np.sqrt(x)), q_function(np.sqrt(y))


def exponential_gains(samples: int, seed: int, dim: int = 3) -> np.ndarray:
    """Unit-mean exponential gains, shape ``(dim, samples)``, from scrambled Sobol points."""
    import warnings

    from scipy.stats import qmc

    if samples < 1:
        raise ValueError(f"channel_samples must be >= 1, got {samples}")
    sampler = qmc.Sobol(dim, scramble=True, seed=np.random.default_rng(seed))
    m = max(0, math.ceil(math.log2(samples)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = sampler.random_base2(m)[:samples]
    return -np.log1p(-u.T)


def fading_af_probabilities(rho: float, channel_samples: int = 100_000, seed: int = 0, gains=None) -> tuple[float, float]:
    """Mean of the conditional AF step error probabilities over Rayleigh gains."""
    if gains is None:
        gains = exponential_gains(channel_samples, seed)
    gains = np.asarray(gains, dtype=float)
    p, pp = fading_af_conditional(gains[0], gains[1], gains[2], rho)
    return float(np.mean(p)), float(np.mean(pp))


def _af_average_from_steps(L: int, p, p_prime):
    return sum(k * af_consecutive_event(L, p, p_prime, k) for k in range(1, L)) / (L - 1)


def fading_average_ber(
    L: int,
    rho: float,
    protocol: str,
    channel_samples: int = 100_000,
    seed: int = 0,
    gains=None,
    bound_variant: str = "quarter_pi",
    mode: str = "mean_first",
) -> float:
    """Average BER of one user in Rayleigh fading.

    DF scales the pair-error upper bound by L/2. AF averages the conditional
    step error probabilities over the gain distribution and feeds the means
    into the consecutive-run event form; ``mode="per_draw"`` instead composes
    per gain draw and averages afterwards, which is markedly optimistic.
    ``gains`` pins the draws, shape ``(3, n)``.
    """
    protocol = _check_protocol(protocol)
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if protocol == "df":
        return min(1.0, (L / 2.0) * fading_df_bound(rho, bound_variant))
    if mode == "mean_first":
        p, pp = fading_af_probabilities(rho, channel_samples, seed, gains)
        return float(min(1.0, _af_average_from_steps(L, p, pp)))
    if mode == "per_draw":
        if gains is None:
            gains = exponential_gains(channel_samples, seed)
        gains = np.asarray(gains, dtype=float)
        p, pp = fading_af_conditional(gains[0], gains[1], gains[2], rho)
        p = np.minimum(p, 1.0 - 1e-300)
        return float(min(1.0, np.mean(_af_average_from_steps(L, p, pp))))
    raise ValueError(f"mode must be 'mean_first' or 'per_draw', got {mode!r}")


# -- high SNR --------------------------------------------------------------------


@dataclass(frozen=True)
class HighSnrAsymptotics:
    p_df_inf: float
    p_af_inf: float
    penalty_db: float


def high_snr_asymptotics(rho: float) -> HighSnrAsymptotics:
    _check_rho(rho)
    return HighSnrAsymptotics(
        p_df_inf=float(erfc(math.sqrt(rho))),
        p_af_inf=float(erfc(math.sqrt(rho / 3.0))),
        penalty_db=10.0 * math.log10(3.0),
    )


@dataclass(frozen=True)
class SnrGap:
    target_ber: float
    df_snr_db: float
    af_snr_db: float

    @property
    def gap_db(self) -> float:
        return self.af_snr_db - self.df_snr_db


def snr_gap(target_ber: float = 1e-5, lo_db: float = -10.0, hi_db: float = 30.0) -> SnrGap:
    """SNRs at which the exact DF and AF two-way BERs reach ``target_ber``."""

    def solve(fn):
        return brentq(lambda db: math.log(max(fn(db_to_linear(db)), 1e-300)) - math.log(target_ber), lo_db, hi_db, xtol=1e-10)

    return SnrGap(target_ber, solve(p_df_twrn), solve(p_af_twrn))
