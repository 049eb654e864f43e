"""Monte Carlo simulation of threshold DF best-relay selection with MRC.

Each trial draws fresh Rayleigh channels, sends one BPSK bit from the source,
lets every relay above the SNR threshold detect it from its own noisy
observation, forwards the (possibly wrong) bit from the relay with the
strongest relay-destination channel, and combines direct and relayed
observations at the destination with channel-matched MRC weights.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .ber_model import ALL_VARIANTS, DEFAULT_VARIANT, closed_form_ber
from .link_model import Scenario, db_to_linear

MIN_BITS = 10_000
BATCH = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    ber: float
    n_bits: int
    n_errors: int
    ci95_halfwidth: float

    @classmethod
    def from_counts(cls, n_errors: int, n_bits: int) -> "McEstimate":
        ber = n_errors / n_bits
        return cls(ber, n_bits, n_errors, 1.96 * math.sqrt(ber * (1.0 - ber) / n_bits))


def _cgauss(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    scale = math.sqrt(var / 2.0)
    return scale * rng.standard_normal(shape) + 1j * scale * rng.standard_normal(shape)


def simulate_trials(s: Scenario, gamma_th: float, n: int, rng: np.random.Generator, genie_relays: bool = False) -> dict:
    """Run ``n`` trials and return raw counts.

    Besides the total error count, errors and trials with an empty decoding
    set are reported separately so the direct-only sub-population can be
    checked on its own. ``genie_relays`` makes every relay forward the true
    bit, which removes error propagation (a diagnostic, not the protocol).
    """
    rho = db_to_linear(s.ebn0_db)
    n0 = 1.0 / rho  # unit bit energy
    m = s.m
    bits = rng.integers(0, 2, n)
    x = 1.0 - 2.0 * bits

    h_sd = _cgauss(rng, n, s.sigma_sd_sq)
    h_sr = _cgauss(rng, (n, m), s.sigma_sr_sq)
    h_rd = _cgauss(rng, (n, m), s.sigma_rd_sq)

    y_sd = h_sd * x + _cgauss(rng, n, n0)
    y_sr = h_sr * x[:, None] + _cgauss(rng, (n, m), n0)
    relay_x = np.sign(np.real(np.conj(h_sr) * y_sr))
    relay_x[relay_x == 0] = 1.0
    if genie_relays:
        relay_x = np.broadcast_to(x[:, None], (n, m))

    decoding = np.abs(h_sr) ** 2 * rho >= gamma_th
    rd_gain = np.where(decoding, np.abs(h_rd) ** 2, -1.0)
    best = np.argmax(rd_gain, axis=1)
    rows = np.arange(n)
    has_relay = decoding.any(axis=1)

    h_best = h_rd[rows, best]
    y_rd = h_best * relay_x[rows, best] + _cgauss(rng, n, n0)
    z = np.real(np.conj(h_sd) * y_sd) + np.where(has_relay, np.real(np.conj(h_best) * y_rd), 0.0)
    errors = np.where(z >= 0, 1.0, -1.0) != x

    empty = ~has_relay
    return {
        "n": n,
        "errors": int(errors.sum()),
        "n_empty": int(empty.sum()),
        "errors_empty": int((errors & empty).sum()),
    }


def _worker(args) -> dict:
    s, gamma_th, n, seed_seq, genie = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    total = {"n": 0, "errors": 0, "n_empty": 0, "errors_empty": 0}
    done = 0
    while done < n:
        k = min(BATCH, n - done)
        part = simulate_trials(s, gamma_th, k, rng, genie)
        for key in total:
            total[key] += part[key]
        done += k
    return total


def _partition(n_bits: int, workers: int) -> list[int]:
    base = n_bits // workers
    sizes = [base] * workers
    sizes[-1] += n_bits - base * workers
    return sizes


def run_counts(
    s: Scenario, gamma_th: float, n_bits: int, seed: int, workers: int = 1, genie_relays: bool = False
) -> dict:
    if n_bits < MIN_BITS:
        raise ValueError(f"n_bits must be >= {MIN_BITS}, got {n_bits}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if gamma_th < 0:
        raise ValueError("threshold must be >= 0")
    children = np.random.SeedSequence(seed).spawn(workers)
    jobs = [(s, float(gamma_th), k, ss, genie_relays) for k, ss in zip(_partition(n_bits, workers), children)]
    if workers == 1:
        parts = [_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_worker, jobs))
    out = {"n": 0, "errors": 0, "n_empty": 0, "errors_empty": 0}
    for part in parts:
        for key in out:
            out[key] += part[key]
    return out


def simulate_ber(
    s: Scenario, gamma_th: float, n_bits: int, seed: int, workers: int = 1, genie_relays: bool = False
) -> McEstimate:
    """Monte Carlo BER estimate.

    The result depends only on ``(seed, n_bits, workers)``: each worker draws
    from its own stream spawned from ``seed``, and the last worker takes the
    remainder of the even split.
    """
    c = run_counts(s, gamma_th, n_bits, seed, workers, genie_relays)
    return McEstimate.from_counts(c["errors"], c["n"])


@dataclass
class ValidationCell:
    scenario: Scenario
    gamma_th: float
    variant: str
    closed_form: float
    mc_ber: float
    ci95_halfwidth: float
    n_bits: int
    tolerance: float
    passed: bool


@dataclass
class ValidationReport:
    cells: list[ValidationCell]
    n_bits: int
    seed: int
    workers: int
    model_allowance: float
    passes_by_variant: dict[str, int] = field(default_factory=dict)
    best_variant: str = ""

    def to_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "seed": self.seed,
            "workers": self.workers,
            "model_allowance": self.model_allowance,
            "passes_by_variant": self.passes_by_variant,
            "best_variant": self.best_variant,
            "cells": [{**asdict(c), "scenario": asdict(c.scenario)} for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self) -> str:
        head = f"{'sr':>6} {'rd':>6} {'sd':>6} {'M':>2} {'dB':>5} {'g_th':>7} {'variant':<28} {'closed':>11} {'mc':>11} {'ci95':>10} ok"
        lines = [head, "-" * len(head)]
        for c in self.cells:
            s = c.scenario
            lines.append(
                f"{s.sigma_sr_sq:6g} {s.sigma_rd_sq:6g} {s.sigma_sd_sq:6g} {s.m:2d} {s.ebn0_db:5g} {c.gamma_th:7g} "
                f"{c.variant:<28} {c.closed_form:11.4e} {c.mc_ber:11.4e} {c.ci95_halfwidth:10.3e} {'yes' if c.passed else 'NO'}"
            )
        lines.append("")
        for label, count in self.passes_by_variant.items():
            lines.append(f"{label}: {count} passing cells")
        lines.append(f"best variant: {self.best_variant}")
        return "\n".join(lines)


def validate_pairs(
    pairs,
    n_bits: int,
    seed: int,
    workers: int = 1,
    variants=ALL_VARIANTS,
    model_allowance: float = 0.10,
) -> ValidationReport:
    """Compare each formula variant with simulation on every ``(scenario, gamma_th)`` pair.

    A cell passes when ``|closed - mc| <= 3*ci95 + model_allowance*closed``.
    The allowance absorbs the approximate error-propagation factor of the
    closed form. All variants share one simulation per pair; the pair with
    index ``k`` is simulated with seed ``seed + k``.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one (scenario, threshold) pair")
    cells: list[ValidationCell] = []
    passes = {v.label: 0 for v in variants}
    for k, (s, g) in enumerate(pairs):
        est = simulate_ber(s, g, n_bits, seed + k, workers)
        for v in variants:
            cf = closed_form_ber(s, g, v)
            tol = 3.0 * est.ci95_halfwidth + model_allowance * cf
            ok = bool(abs(cf - est.ber) <= tol)
            passes[v.label] += ok
            cells.append(ValidationCell(s, float(g), v.label, cf, est.ber, est.ci95_halfwidth, n_bits, tol, ok))
    best = max(variants, key=lambda v: (passes[v.label], v == DEFAULT_VARIANT)).label
    return ValidationReport(cells, n_bits, seed, workers, model_allowance, passes, best)


def validate_closed_form(scenarios, thresholds, n_bits: int, seed: int, **kwargs) -> ValidationReport:
    """:func:`validate_pairs` over the Cartesian product of scenarios and thresholds."""
    scenarios = list(scenarios)
    thresholds = list(thresholds)
    if not scenarios or not thresholds:
        raise ValueError("scenarios and thresholds must be nonempty")
    return validate_pairs([(s, g) for s in scenarios for g in thresholds], n_bits, seed, **kwargs)


def default_validation_pairs() -> list[tuple[Scenario, float]]:
    """Twelve pairs: symmetric unit-variance network, M in {1, 2, 4, 8}, 0/8/16 dB, each at its optimal threshold."""
    from .optimizer import optimal_threshold

    pairs = []
    for m in (1, 2, 4, 8):
        for ebn0_db in (0.0, 8.0, 16.0):
            s = Scenario(1.0, 1.0, 1.0, m, ebn0_db)
            pairs.append((s, optimal_threshold(s).gamma_th_opt))
    return pairs
