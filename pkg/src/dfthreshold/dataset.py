"""Labeled scenario grids, min-max normalization and CSV I/O."""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ber_model import DEFAULT_VARIANT, FormulaVariant
from .link_model import Scenario
from .optimizer import DEFAULT_SEARCH, SearchConfig, optimal_threshold

FEATURE_NAMES = ("sigma_sr_sq", "sigma_rd_sq", "sigma_sd_sq", "m", "ebn0_db")
TARGET_NAME = "gamma_th_opt"
CSV_HEADER = FEATURE_NAMES + (TARGET_NAME,)


@dataclass(frozen=True)
class GridSpec:
    sigma_sr_sq: tuple[float, ...]
    sigma_rd_sq: tuple[float, ...]
    sigma_sd_sq: tuple[float, ...]
    m: tuple[int, ...]
    ebn0_db: tuple[float, ...]

    def __post_init__(self) -> None:
        for name in FEATURE_NAMES:
            levels = tuple(getattr(self, name))
            if not levels:
                raise ValueError(f"grid dimension {name} is empty")
            object.__setattr__(self, name, levels)

    def points(self):
        return itertools.product(self.sigma_sr_sq, self.sigma_rd_sq, self.sigma_sd_sq, self.m, self.ebn0_db)

    def __len__(self) -> int:
        n = 1
        for name in FEATURE_NAMES:
            n *= len(getattr(self, name))
        return n

    def to_dict(self) -> dict:
        return {name: list(getattr(self, name)) for name in FEATURE_NAMES}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(*(tuple(d[name]) for name in FEATURE_NAMES))


VARIANCE_LEVELS = (1.0, 3.25, 5.5, 7.75, 10.0)

# 5 * 5 * 5 * 4 * 25 = 12500 samples
DEFAULT_TRAIN_SPEC = GridSpec(
    VARIANCE_LEVELS, VARIANCE_LEVELS, VARIANCE_LEVELS, (2, 4, 6, 8), tuple(float(d) for d in range(25))
)

# 5**5 = 3125 samples; half-dB Eb/N0 keeps every point off the training grid
_TEST_VARIANCES = (2.125, 3.25, 4.375, 6.625, 8.875)
DEFAULT_TEST_SPEC = GridSpec(
    _TEST_VARIANCES, _TEST_VARIANCES, _TEST_VARIANCES, (2, 3, 5, 7, 8), (2.5, 7.5, 12.5, 17.5, 22.5)
)


@dataclass
class Dataset:
    features: np.ndarray  # (n, 5)
    targets: np.ndarray  # (n,)
    boundary: np.ndarray = None  # (n,) bool, optimizer hit the search cap
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float).reshape(-1, len(FEATURE_NAMES))
        self.targets = np.asarray(self.targets, dtype=float).reshape(-1)
        if len(self.features) != len(self.targets):
            raise ValueError("features and targets differ in length")
        if self.boundary is None:
            self.boundary = np.zeros(len(self.targets), dtype=bool)

    def __len__(self) -> int:
        return len(self.targets)

    def scenarios(self) -> list[Scenario]:
        return [Scenario.from_features(row) for row in self.features]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.targets[idx], self.boundary[idx], dict(self.meta))


def _label(args):
    point, variant, cfg = args
    r = optimal_threshold(Scenario(*point), variant, cfg, on_boundary="flag")
    return r.gamma_th_opt, r.boundary


def generate_grid(
    spec: GridSpec,
    variant: FormulaVariant = DEFAULT_VARIANT,
    cfg: SearchConfig = DEFAULT_SEARCH,
    workers: int = 1,
) -> Dataset:
    """Label every point of the Cartesian grid with its optimal threshold.

    Output order is the row-major order of :meth:`GridSpec.points` whatever
    the worker count.
    """
    points = [tuple(float(v) for v in p) for p in spec.points()]
    jobs = [(p, variant, cfg) for p in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            labels = list(pool.map(_label, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        labels = [_label(j) for j in jobs]
    targets = np.array([t for t, _ in labels])
    boundary = np.array([b for _, b in labels], dtype=bool)
    meta = {"grid_spec": spec.to_dict(), "formula_variant": variant.to_dict(), "search": cfg.to_dict()}
    return Dataset(np.array(points), targets, boundary, meta)


@dataclass(frozen=True)
class NormParams:
    """Per-dimension min/max mapping features and target to [-1, 1]."""

    feature_min: tuple[float, ...]
    feature_max: tuple[float, ...]
    target_min: float
    target_max: float

    def __post_init__(self) -> None:
        lo = np.asarray(self.feature_min, dtype=float)
        hi = np.asarray(self.feature_max, dtype=float)
        if lo.shape != (len(FEATURE_NAMES),) or hi.shape != lo.shape:
            raise ValueError("feature bounds must have one entry per feature")
        bad = [FEATURE_NAMES[k] for k in np.flatnonzero(~(hi > lo))]
        if not self.target_max > self.target_min:
            bad.append(TARGET_NAME)
        if bad:
            raise ValueError(f"zero spread in dimension(s): {', '.join(bad)}")
        object.__setattr__(self, "feature_min", tuple(float(v) for v in lo))
        object.__setattr__(self, "feature_max", tuple(float(v) for v in hi))
        object.__setattr__(self, "target_min", float(self.target_min))
        object.__setattr__(self, "target_max", float(self.target_max))

    @classmethod
    def fit(cls, features, targets) -> "NormParams":
        f = np.asarray(features, dtype=float).reshape(-1, len(FEATURE_NAMES))
        t = np.asarray(targets, dtype=float).reshape(-1)
        if len(f) == 0:
            raise ValueError("cannot normalize an empty dataset")
        return cls(tuple(f.min(axis=0)), tuple(f.max(axis=0)), float(t.min()), float(t.max()))

    @classmethod
    def identity(cls) -> "NormParams":
        """Bounds of [-1, 1] everywhere, so the mapping is the identity."""
        n = len(FEATURE_NAMES)
        return cls((-1.0,) * n, (1.0,) * n, -1.0, 1.0)

    def features_to_unit(self, x):
        lo = np.asarray(self.feature_min)
        hi = np.asarray(self.feature_max)
        return 2.0 * (np.asarray(x, dtype=float) - lo) / (hi - lo) - 1.0

    def features_from_unit(self, u):
        lo = np.asarray(self.feature_min)
        hi = np.asarray(self.feature_max)
        return (np.asarray(u, dtype=float) + 1.0) * (hi - lo) / 2.0 + lo

    def target_to_unit(self, t):
        return 2.0 * (np.asarray(t, dtype=float) - self.target_min) / (self.target_max - self.target_min) - 1.0

    def target_from_unit(self, u):
        return (np.asarray(u, dtype=float) + 1.0) * (self.target_max - self.target_min) / 2.0 + self.target_min

    def to_dict(self) -> dict:
        return {
            "feature_min": list(self.feature_min),
            "feature_max": list(self.feature_max),
            "target_min": self.target_min,
            "target_max": self.target_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormParams":
        return cls(tuple(d["feature_min"]), tuple(d["feature_max"]), d["target_min"], d["target_max"])


def normalize(d: Dataset, norm: NormParams | None = None) -> tuple[Dataset, NormParams]:
    """Map features and targets to [-1, 1]; bounds are fitted on ``d`` unless given."""
    if len(d) == 0:
        raise ValueError("cannot normalize an empty dataset")
    norm = norm or NormParams.fit(d.features, d.targets)
    out = Dataset(norm.features_to_unit(d.features), norm.target_to_unit(d.targets), d.boundary.copy(), dict(d.meta))
    return out, norm


def denormalize(d: Dataset, norm: NormParams) -> Dataset:
    return Dataset(norm.features_from_unit(d.features), norm.target_from_unit(d.targets), d.boundary.copy(), dict(d.meta))


def write_csv(d: Dataset, dest) -> None:
    """Write ``d`` to a path or an open text stream; floats use shortest round-trip repr."""
    if hasattr(dest, "write"):
        _write_rows(d, dest)
        return
    with open(dest, "w", newline="") as fh:
        _write_rows(d, fh)


def _write_rows(d: Dataset, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row, t in zip(d.features, d.targets):
        sr, rd, sd, m, ebn0 = (float(v) for v in row)
        w.writerow([repr(sr), repr(rd), repr(sd), str(int(m)), repr(ebn0), repr(float(t))])


def read_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected dataset header {header!r}")
        rows = [[float(v) for v in line] for line in r if line]
    arr = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))
    return Dataset(arr[:, :5], arr[:, 5])
