"""Experiment configuration: one JSON document, one field per CLI flag."""
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from wl1.config import Config
from wl1.models.signal import NoiseSet
from wl1.utils.errors import ParameterError
from wl1.utils.validators import (near_integer, validate_nonnegative,
                                  validate_positive_int, validate_unit_interval)

logger = logging.getLogger(__name__)

AMPLITUDES = ("signs", "gaussian", "compressible")
MATRICES = ("gaussian", "normalized")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    N: int
    k: int
    # "compressible" adds a decaying tail off the k-support
    amplitude: str = "signs"
    # "normalized" rescales every Gaussian column to unit norm
    matrix: str = "gaussian"
    noise_kind: str = "l2"
    # Constraint radius; noise is drawn at 0.99 of it
    eps: float = 0.0
    # When positive, Gaussian noise with this sigma and the matching radius
    sigma: float = 0.0
    omegas: tuple = (0.0, 0.3, 0.5, 1.0)
    alphas: tuple = (0.3, 0.5, 0.9)
    rho: float = 1.0
    trials: int = 1
    seed: int = 0
    t_grid: tuple = (1.5, 2.0, 2.5, 3.0)
    output_dir: str = field(default_factory=lambda: Config.OUTPUT_DIR)
    name: str = "experiment"

    def __post_init__(self):
        for name in ("n", "N", "k", "trials"):
            object.__setattr__(self, name, validate_positive_int(name, getattr(self, name)))
        if not self.k <= self.n <= self.N:
            raise ParameterError(f"need k <= n <= N, got k={self.k}, n={self.n}, N={self.N}")
        if self.amplitude not in AMPLITUDES:
            raise ParameterError(f"amplitude must be one of {AMPLITUDES}, got {self.amplitude!r}")
        if self.matrix not in MATRICES:
            raise ParameterError(f"matrix must be one of {MATRICES}, got {self.matrix!r}")
        object.__setattr__(self, "noise_kind", NoiseSet.parse(self.noise_kind).value)
        object.__setattr__(self, "eps", validate_nonnegative("eps", self.eps))
        object.__setattr__(self, "sigma", validate_nonnegative("sigma", self.sigma))
        if self.eps > 0.0 and self.sigma > 0.0:
            raise ParameterError("set either eps or sigma, not both")
        object.__setattr__(self, "seed", int(self.seed))

        if not self.omegas or not self.alphas:
            raise ParameterError("omega and alpha grids must be nonempty")
        omegas = tuple(validate_unit_interval("omega", w) for w in self.omegas)
        alphas = tuple(validate_unit_interval("alpha", a) for a in self.alphas)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "rho", validate_nonnegative("rho", self.rho))
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))

        if near_integer(self.rho * self.k) is None:
            raise ParameterError(f"rho*k = {self.rho * self.k} must be an integer")
        for alpha in alphas:
            if near_integer(alpha * self.rho * self.k) is None:
                raise ParameterError(
                    f"alpha*rho*k = {alpha * self.rho * self.k} must be an integer (alpha={alpha})")

    @property
    def noise_set(self) -> NoiseSet:
        return NoiseSet.parse(self.noise_kind)

    @property
    def noisy(self) -> bool:
        return self.eps > 0.0 or self.sigma > 0.0

    @classmethod
    def from_dict(cls, data) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParameterError(f"unknown experiment config keys: {unknown}")
        values = dict(data)
        for key in ("omegas", "alphas", "t_grid"):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as handle:
            return cls.from_dict(json.load(handle))

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("omegas", "alphas", "t_grid"):
            data[key] = list(data[key])
        return data

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        data.update({key: value for key, value in changes.items() if value is not None})
        return ExperimentConfig.from_dict(data)

    def output_path(self, filename) -> Path:
        return Path(self.output_dir) / filename
