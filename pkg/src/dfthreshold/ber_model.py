"""Closed-form end-to-end BER of threshold-based DF best-relay selection.

The system: ``m`` relays, each joins the decoding set when its instantaneous
source-relay SNR reaches ``gamma_th``; the destination picks the decoding-set
relay with the strongest relay-destination link and combines it with the
direct path by MRC. With an empty decoding set the direct path decides alone.

All per-term helpers accept a scalar or an array of thresholds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .link_model import Scenario, average_link_snrs, erfcx, rayleigh_bpsk_ber


class OrderStatSize(str, enum.Enum):
    DECODING_SET_SIZE = "decoding_set_size"
    TOTAL_RELAYS = "total_relays"


@dataclass(frozen=True)
class FormulaVariant:
    """Selects between the two readings of the closed form.

    ``include_binomial_coeff`` weights the decoding-set size distribution by
    ``C(m, i)``; without it the probabilities do not sum to one.
    ``order_stat_size`` is the number of relays the best relay is picked from
    in the MRC term: the decoding-set size ``i`` or all ``m`` relays.
    """

    include_binomial_coeff: bool = True
    order_stat_size: OrderStatSize = OrderStatSize.DECODING_SET_SIZE

    def __post_init__(self) -> None:
        object.__setattr__(self, "order_stat_size", OrderStatSize(self.order_stat_size))

    def to_dict(self) -> dict:
        return {
            "include_binomial_coeff": self.include_binomial_coeff,
            "order_stat_size": self.order_stat_size.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FormulaVariant":
        return cls(bool(d["include_binomial_coeff"]), OrderStatSize(d["order_stat_size"]))

    @property
    def label(self) -> str:
        coeff = "binom" if self.include_binomial_coeff else "nobinom"
        return f"{coeff}/{self.order_stat_size.value}"


DEFAULT_VARIANT = FormulaVariant()
ALL_VARIANTS = (
    FormulaVariant(True, OrderStatSize.DECODING_SET_SIZE),
    FormulaVariant(True, OrderStatSize.TOTAL_RELAYS),
    FormulaVariant(False, OrderStatSize.DECODING_SET_SIZE),
    FormulaVariant(False, OrderStatSize.TOTAL_RELAYS),
)


@dataclass(frozen=True)
class BerPoint:
    gamma_th: float
    ber: float


def _as_threshold(gamma_th) -> np.ndarray:
    t = np.asarray(gamma_th, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise ValueError("threshold must be >= 0")
    return t


def _out(x: np.ndarray):
    return float(x) if np.ndim(x) == 0 else x


def decode_fail_prob(gamma_th, gamma_sr_bar: float):
    """P(instantaneous SR SNR < gamma_th) for one relay: ``1 - exp(-gamma_th/gamma_sr_bar)``."""
    t = _as_threshold(gamma_th)
    if not gamma_sr_bar > 0:
        raise ValueError("gamma_sr_bar must be positive")
    with np.errstate(invalid="ignore"):
        q = -np.expm1(-t / gamma_sr_bar)
    return _out(np.where(np.isinf(t), 1.0, q))


def decoding_set_pmf(i: int, m: int, gamma_th, gamma_sr_bar: float, variant: FormulaVariant = DEFAULT_VARIANT):
    """Probability that exactly ``i`` of ``m`` relays pass the threshold.

    Without the binomial coefficient this is the per-configuration weight
    ``p**i * (1-p)**(m-i)`` only.
    """
    if not (0 <= i <= m) or m < 1:
        raise ValueError(f"need 0 <= i <= m and m >= 1, got i={i}, m={m}")
    q = np.asarray(decode_fail_prob(gamma_th, gamma_sr_bar))
    p = np.exp(-_as_threshold(gamma_th) / gamma_sr_bar)
    w = p**i * q ** (m - i)
    if variant.include_binomial_coeff:
        w = math.comb(m, i) * w
    return _out(w)


def relay_error_given_reliable(gamma_th, gamma_sr_bar: float):
    """BPSK error probability at a relay given its SR SNR is at least ``gamma_th``.

    ``0.5*(erfc(sqrt(t)) - exp(t/g)*sqrt(g/(1+g))*erfc(sqrt(t*(1+1/g))))``,
    rewritten with the scaled erfc so that large thresholds neither overflow
    nor lose the difference.
    """
    t = _as_threshold(gamma_th)
    g = float(gamma_sr_bar)
    if not g > 0:
        raise ValueError("gamma_sr_bar must be positive")
    c = math.sqrt(g / (1.0 + g))
    with np.errstate(over="ignore", invalid="ignore"):
        bracket = erfcx(np.sqrt(t)) - c * erfcx(np.sqrt(t * (1.0 + 1.0 / g)))
        eps = 0.5 * np.exp(-t) * np.maximum(bracket, 0.0)
    return _out(np.where(np.isinf(t), 0.0, eps))


def error_propagation_weight(gamma_rd_bar: float, gamma_sd_bar: float) -> float:
    """Approximate probability that a wrongly forwarded bit flips the MRC decision."""
    if not (gamma_rd_bar >= 0 and gamma_sd_bar > 0):
        raise ValueError("average SNRs must be positive")
    return gamma_rd_bar / (gamma_rd_bar + gamma_sd_bar)


def dual_branch_mrc_ber(a: float, b: float) -> float:
    """BPSK BER of two-branch MRC over independent Rayleigh branches of mean SNR ``a`` and ``b``.

    Algebraically equal to
    ``0.5*(1 - a/(a-b)*mu(a) + b/(a-b)*mu(b))`` with ``mu(x) = sqrt(x/(1+x))``,
    but without the removable singularity at ``a == b`` and without the
    high-SNR cancellation.
    """
    mu_a = math.sqrt(a / (1.0 + a))
    mu_b = math.sqrt(b / (1.0 + b))
    num = mu_a + mu_b - b / ((1.0 + b) * (1.0 + mu_b))
    den = (1.0 + a) * (1.0 + mu_a) * (1.0 + b) * (mu_a + mu_b)
    return 0.5 * num / den


def mrc_best_of_ber(n: int, gamma_rd_bar: float, gamma_sd_bar: float) -> float:
    """BER of MRC over the direct branch and the best of ``n`` i.i.d. relay branches.

    The SNR of the best of ``n`` exponential branches has density
    ``n * sum_k (-1)**k C(n-1,k) / (k+1) * f_exp(x; gamma_rd_bar/(k+1))``,
    so the BER is the same alternating mixture of dual-branch results.
    """
    if n < 1:
        raise ValueError(f"order statistic size must be >= 1, got {n}")
    if not (gamma_rd_bar > 0 and gamma_sd_bar > 0):
        raise ValueError("average SNRs must be positive")
    terms = [
        (-1) ** k / (k + 1) * math.comb(n - 1, k) * dual_branch_mrc_ber(gamma_rd_bar / (k + 1), gamma_sd_bar)
        for k in range(n)
    ]
    # the alternating sum can round to a tiny negative number at high SNR
    return max(n * math.fsum(terms), 0.0)


def make_ber_function(s: Scenario, variant: FormulaVariant = DEFAULT_VARIANT):
    """Return ``f(gamma_th) -> BER`` for a fixed scenario.

    The MRC terms do not depend on the threshold, so they are computed once;
    the optimizer and dataset generator call ``f`` many times per scenario.
    """
    lb = average_link_snrs(s)
    m = s.m
    w_ep = error_propagation_weight(lb.gamma_rd_bar, lb.gamma_sd_bar)
    direct = rayleigh_bpsk_ber(lb.gamma_sd_bar)
    by_total = variant.order_stat_size is OrderStatSize.TOTAL_RELAYS
    mrc = [mrc_best_of_ber(m if by_total else i, lb.gamma_rd_bar, lb.gamma_sd_bar) for i in range(1, m + 1)]
    coeff = [math.comb(m, i) if variant.include_binomial_coeff else 1 for i in range(1, m + 1)]

    def ber(gamma_th):
        t = _as_threshold(gamma_th)
        q = np.asarray(decode_fail_prob(t, lb.gamma_sr_bar))
        p = np.exp(-t / lb.gamma_sr_bar)
        eps = np.asarray(relay_error_given_reliable(t, lb.gamma_sr_bar))
        total = q**m * direct
        for i in range(1, m + 1):
            pmf = coeff[i - 1] * p**i * q ** (m - i)
            total = total + pmf * (eps * w_ep + (1.0 - eps) * mrc[i - 1])
        if np.any(~(total > 0)) or np.any(total > 0.5 + 1e-12):
            raise ArithmeticError(f"closed-form BER left (0, 0.5] for {s} at gamma_th={gamma_th!r}")
        return _out(total)

    return ber


def closed_form_ber(s: Scenario, gamma_th, variant: FormulaVariant = DEFAULT_VARIANT):
    """End-to-end BER at threshold(s) ``gamma_th`` (linear SNR).

    Raises
    ------
    ValueError
        Negative threshold.
    ArithmeticError
        Result outside (0, 0.5]; signals an internal defect, not a user error.
    """
    return make_ber_function(s, variant)(gamma_th)
