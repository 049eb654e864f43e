"""BER-minimizing threshold search and BER-vs-threshold sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ber_model import DEFAULT_VARIANT, BerPoint, FormulaVariant, make_ber_function
from .link_model import Scenario

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ThresholdSearchError(RuntimeError):
    """The minimum stayed on the upper edge of the search domain up to the cap."""


@dataclass(frozen=True)
class SearchConfig:
    gamma_max: float = 20.0
    n_grid: int = 400
    tol: float = 1e-4
    gamma_cap: float = 160.0

    def __post_init__(self) -> None:
        if not (self.gamma_max > 0 and self.gamma_cap >= self.gamma_max):
            raise ValueError("need 0 < gamma_max <= gamma_cap")
        if self.n_grid < 3:
            raise ValueError("n_grid must be >= 3")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def to_dict(self) -> dict:
        return {"gamma_max": self.gamma_max, "n_grid": self.n_grid, "tol": self.tol, "gamma_cap": self.gamma_cap}


DEFAULT_SEARCH = SearchConfig()


@dataclass(frozen=True)
class OptimalThreshold:
    gamma_th_opt: float
    ber_min: float
    scenario: Scenario
    variant: FormulaVariant
    search_resolution: float
    boundary: bool = False
    gamma_max_used: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class BerCurve:
    scenario: Scenario
    points: tuple[BerPoint, ...]

    @property
    def gamma_th(self) -> np.ndarray:
        return np.array([p.gamma_th for p in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])


def golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a scalar function on ``[lo, hi]`` until the bracket is narrower than ``tol``.

    Returns the best abscissa evaluated and its value.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    while b - a >= tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc < best_f or (fc == best_f and c < best_x):
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd < best_f or (fd == best_f and d < best_x):
                best_x, best_f = d, fd
    return best_x, best_f


def optimal_threshold(
    s: Scenario,
    variant: FormulaVariant = DEFAULT_VARIANT,
    cfg: SearchConfig = DEFAULT_SEARCH,
    on_boundary: str = "raise",
) -> OptimalThreshold:
    """Threshold minimizing the closed-form BER of ``s``.

    A uniform grid of ``cfg.n_grid`` points on ``[0, gamma_max]`` locates the
    global minimum; golden-section search then refines it inside the two
    neighboring grid cells. When the grid minimum sits on ``gamma_max`` the
    range is doubled, up to ``cfg.gamma_cap``.

    Parameters
    ----------
    on_boundary : {"raise", "flag"}
        What to do if the minimum is still on the edge at the cap: raise
        :class:`ThresholdSearchError` or return the cap with ``boundary=True``.
    """
    if on_boundary not in ("raise", "flag"):
        raise ValueError(f"on_boundary must be 'raise' or 'flag', got {on_boundary!r}")
    ber = make_ber_function(s, variant)
    gamma_max = cfg.gamma_max
    while True:
        grid = np.linspace(0.0, gamma_max, cfg.n_grid)
        values = ber(grid)
        j = int(np.argmin(values))  # first index on ties -> smaller threshold
        if j < cfg.n_grid - 1:
            break
        if gamma_max >= cfg.gamma_cap:
            if on_boundary == "raise":
                raise ThresholdSearchError(f"BER minimum at the search cap {cfg.gamma_cap} for {s}")
            return OptimalThreshold(float(grid[j]), float(values[j]), s, variant, cfg.tol, True, gamma_max)
        gamma_max = min(2.0 * gamma_max, cfg.gamma_cap)

    lo = grid[max(j - 1, 0)]
    hi = grid[j + 1]
    x, fx = golden_section(lambda g: ber(g), float(lo), float(hi), cfg.tol)
    if values[j] <= fx:
        x, fx = float(grid[j]), float(values[j])
    return OptimalThreshold(x, fx, s, variant, cfg.tol, False, gamma_max)


def threshold_sweep(s: Scenario, grid, variant: FormulaVariant = DEFAULT_VARIANT) -> BerCurve:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("grid must be a nonempty 1-D sequence")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    values = np.atleast_1d(make_ber_function(s, variant)(g))
    return BerCurve(s, tuple(BerPoint(float(a), float(b)) for a, b in zip(g, values)))
