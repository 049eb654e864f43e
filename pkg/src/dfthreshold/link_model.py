"""Scenario description, dB conversion, average link SNRs and scalar special functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


@dataclass(frozen=True)
class Scenario:
    """One network configuration: channel variances, relay count and Eb/N0.

    Parameters
    ----------
    sigma_sr_sq, sigma_rd_sq, sigma_sd_sq : float
        Variances of the source-relay, relay-destination and
        source-destination Rayleigh channels (linear, > 0).
    m : int
        Number of candidate relays (>= 1).
    ebn0_db : float
        Per-bit SNR in dB.
    """

    sigma_sr_sq: float
    sigma_rd_sq: float
    sigma_sd_sq: float
    m: int
    ebn0_db: float

    def __post_init__(self) -> None:
        for name in ("sigma_sr_sq", "sigma_rd_sq", "sigma_sd_sq"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m!r}")
        if not math.isfinite(self.ebn0_db):
            raise ValueError(f"ebn0_db must be finite, got {self.ebn0_db!r}")
        object.__setattr__(self, "m", int(self.m))

    def as_features(self) -> tuple[float, float, float, float, float]:
        return (self.sigma_sr_sq, self.sigma_rd_sq, self.sigma_sd_sq, float(self.m), self.ebn0_db)

    @classmethod
    def from_features(cls, features) -> "Scenario":
        sr, rd, sd, m, ebn0_db = (float(v) for v in features)
        if m != round(m):
            raise ValueError(f"relay count feature must be integral, got {m}")
        return cls(sr, rd, sd, int(round(m)), ebn0_db)


@dataclass(frozen=True)
class LinkBudget:
    """Average link SNRs in linear scale."""

    gamma_sr_bar: float
    gamma_rd_bar: float
    gamma_sd_bar: float


def db_to_linear(x_db: float) -> float:
    """Convert a power ratio in dB to linear scale."""
    if not math.isfinite(x_db):
        raise ValueError(f"dB value must be finite, got {x_db!r}")
    return 10.0 ** (x_db / 10.0)


def average_link_snrs(s: Scenario) -> LinkBudget:
    rho = db_to_linear(s.ebn0_db)
    return LinkBudget(s.sigma_sr_sq * rho, s.sigma_rd_sq * rho, s.sigma_sd_sq * rho)


def erfc(x):
    """Complementary error function.

    Accepts scalars or arrays. For ``x >= 0`` this equals the Craig form
    ``(2/pi) * int_0^{pi/2} exp(-x**2 / sin(t)**2) dt``.
    """
    out = special.erfc(x)
    return float(out) if np.ndim(out) == 0 else out


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) * erfc(x)``."""
    out = special.erfcx(x)
    return float(out) if np.ndim(out) == 0 else out


def rayleigh_bpsk_ber(gamma_bar):
    """BPSK bit error probability averaged over Rayleigh fading.

    Returns ``0.5 * (1 - sqrt(g / (1 + g)))`` for average SNR ``g > 0``.
    Evaluated as ``0.5 / ((1 + g) * (1 + sqrt(g / (1 + g))))`` so that
    the high-SNR tail keeps full relative precision.
    """
    g = np.asarray(gamma_bar, dtype=float)
    if np.any(~(g > 0)):
        raise ValueError("average SNR must be positive")
    mu = np.sqrt(g / (1.0 + g))
    out = 0.5 / ((1.0 + g) * (1.0 + mu))
    return float(out) if out.ndim == 0 else out
