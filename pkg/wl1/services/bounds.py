"""Recovery thresholds and stability constants for weighted l1 minimisation.

Three families of guarantees are computed side by side:

* the weighted high-order RIP condition delta_tk < sqrt((t-d)/(t-d+gamma^2))
  with constants D0, D1 (l2 noise) and D0', D1 (Dantzig noise);
* the standard l1 condition delta_tk < sqrt((t-1)/t) with C0, C1, C0', C1,
  which the weighted results reduce to when omega = 1 or alpha = 1/2;
* the earlier weighted conditions delta_(a+1)k < (a-gamma^2)/(a+gamma^2),
  delta_2k < 1/(sqrt(2) gamma + 1) and the constants C0'', C1''.

Every formula raises DomainError where it is undefined or diverges.
Sweeps and tables report those cells as "inf".
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from wl1.models.signal import NoiseSet, as_array, complement, l1_on
from wl1.utils.errors import DomainError, ParameterError
from wl1.utils.validators import (ceil_int, validate_nonnegative,
                                  validate_positive, validate_positive_int,
                                  validate_unit_interval)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
INF_SENTINEL = "inf"


def _check_geometry(omega, rho, alpha):
    omega = validate_unit_interval("omega", omega)
    rho = validate_nonnegative("rho", rho)
    alpha = validate_unit_interval("alpha", alpha)
    return omega, rho, alpha


def gamma(omega: float, rho: float, alpha: float) -> float:
    """omega + (1 - omega) sqrt(1 + rho - 2 alpha rho)"""
    omega, rho, alpha = _check_geometry(omega, rho, alpha)
    radicand = 1.0 + rho - 2.0 * alpha * rho
    if radicand < 0.0:
        raise ParameterError(f"1 + rho - 2*alpha*rho = {radicand} is negative")
    return omega + (1.0 - omega) * math.sqrt(radicand)


def sparsity_d(omega: float, rho: float, alpha: float):
    """(d, a) with a = max(alpha, 1 - alpha) rho; d = 1 at omega = 1"""
    omega, rho, alpha = _check_geometry(omega, rho, alpha)
    a = max(alpha, 1.0 - alpha) * rho
    if omega == 1.0:
        return 1.0, a
    return 1.0 - alpha * rho + a, a


@dataclass(frozen=True)
class GeometryParams:
    """t together with the support-estimate geometry (omega, rho, alpha)"""

    t: float
    omega: float
    rho: float
    alpha: float
    gamma: float = field(init=False)
    d: float = field(init=False)
    a: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "t", validate_positive("t", self.t))
        omega, rho, alpha = _check_geometry(self.omega, self.rho, self.alpha)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", gamma(omega, rho, alpha))
        d, a = sparsity_d(omega, rho, alpha)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "a", a)

    @classmethod
    def create(cls, t, omega, rho=1.0, alpha=0.5) -> "GeometryParams":
        return cls(t=t, omega=omega, rho=rho, alpha=alpha)

    @classmethod
    def from_support(cls, t, omega, estimate) -> "GeometryParams":
        """Geometry of a SupportEstimate"""
        return cls(t=t, omega=omega, rho=estimate.rho, alpha=estimate.alpha)

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    def with_t(self, t) -> "GeometryParams":
        return GeometryParams(t=t, omega=self.omega, rho=self.rho, alpha=self.alpha)

    def to_dict(self) -> dict:
        return {"t": self.t, "omega": self.omega, "rho": self.rho, "alpha": self.alpha,
                "gamma": self.gamma, "d": self.d, "a": self.a}


@dataclass(frozen=True)
class StabilityConstants:
    """D0, D1 (l2 noise) and D0', D1' = D1 (Dantzig noise)"""

    D0: float
    D1: float
    D0_ds: float
    D1_ds: float


def bracket_int(xi: float) -> int:
    """[[xi]]: xi itself when integral, otherwise the ceiling"""
    xi = validate_nonnegative("xi", xi)
    return ceil_int(xi)


def _gap(g: GeometryParams) -> float:
    gap = g.t - g.d
    if gap <= 0.0:
        raise DomainError(f"threshold undefined: t = {g.t} must exceed d = {g.d}")
    return gap


def ric_threshold(g: GeometryParams) -> float:
    """delta_t^omega = sqrt((t - d) / (t - d + gamma^2))"""
    gap = _gap(g)
    return math.sqrt(gap / (gap + g.gamma ** 2))


def _check_delta(delta, threshold):
    delta = validate_nonnegative("delta", delta)
    if delta >= threshold:
        raise DomainError(
            f"constants diverge: delta = {delta} is not below threshold {threshold}")
    return delta


def _weighted_denominator(g, delta):
    gap = _gap(g)
    q = gap + g.gamma ** 2
    threshold = math.sqrt(gap / q)
    delta = _check_delta(delta, threshold)
    return gap, q, threshold, delta, q * (threshold - delta)


def stability_constants_l2(g: GeometryParams, delta: float):
    """(D0, D1) multiplying 2*eps and the compressibility tail"""
    gap, q, threshold, delta, denominator = _weighted_denominator(g, delta)
    D0 = math.sqrt(2.0 * gap * q * (1.0 + delta)) / denominator
    D1 = ((SQRT2 * delta * g.gamma + math.sqrt(q * (threshold - delta) * delta))
          / denominator + 1.0 / math.sqrt(g.d))
    return D0, D1


def stability_constants_ds(g: GeometryParams, delta: float, k: int):
    """(D0', D1') for the Dantzig noise set; D1' equals D1"""
    k = validate_positive_int("k", k)
    gap, q, _, delta, denominator = _weighted_denominator(g, delta)
    D0_ds = math.sqrt(2.0 * gap * q * bracket_int(g.t * k)) / denominator
    _, D1 = stability_constants_l2(g, delta)
    return D0_ds, D1


def stability_constants(g: GeometryParams, delta: float, k: int) -> StabilityConstants:
    D0, D1 = stability_constants_l2(g, delta)
    D0_ds, D1_ds = stability_constants_ds(g, delta, k)
    return StabilityConstants(D0=D0, D1=D1, D0_ds=D0_ds, D1_ds=D1_ds)


def cz_threshold(t: float) -> float:
    """sqrt((t - 1) / t), the standard l1 condition"""
    t = validate_positive("t", t)
    if t <= 1.0:
        raise DomainError(f"threshold undefined: t = {t} must exceed 1")
    return math.sqrt((t - 1.0) / t)


def cz_constants(t: float, delta: float, k: int):
    """(C0, C1, C0', C1') of the standard l1 guarantee"""
    k = validate_positive_int("k", k)
    threshold = cz_threshold(t)
    delta = _check_delta(delta, threshold)
    denominator = t * (threshold - delta)
    C0 = math.sqrt(2.0 * t * (t - 1.0) * (1.0 + delta)) / denominator
    C1 = (SQRT2 * delta + math.sqrt(t * (threshold - delta) * delta)) / denominator + 1.0
    C0_ds = math.sqrt(2.0 * t * t * (t - 1.0) * k) / denominator
    return C0, C1, C0_ds, C1


def fmsy_threshold(a: float, omega: float, rho: float, alpha: float) -> float:
    """delta_a^omega = (a - gamma^2) / (a + gamma^2); may be nonpositive"""
    a = validate_positive("a", a)
    g2 = gamma(omega, rho, alpha) ** 2
    return (a - g2) / (a + g2)


def fmsy_condition_holds(a, delta_ak, delta_a1k, gamma_value) -> bool:
    """delta_ak + (a / gamma^2) delta_(a+1)k < a / gamma^2 - 1"""
    a = validate_positive("a", a)
    if gamma_value <= 0.0:
        return True
    ratio = a / gamma_value ** 2
    return delta_ak + ratio * delta_a1k < ratio - 1.0


def fmsy_constants(a, delta_ak, delta_a1k, omega, rho, alpha):
    """(C0'', C1'') of the earlier weighted guarantee"""
    a = validate_positive("a", a)
    delta_ak = validate_nonnegative("delta_ak", delta_ak)
    delta_a1k = validate_nonnegative("delta_a1k", delta_a1k)
    if delta_a1k >= 1.0:
        raise DomainError(f"delta_(a+1)k = {delta_a1k} must be below 1")
    ratio = gamma(omega, rho, alpha) / math.sqrt(a)
    lower = math.sqrt(1.0 - delta_a1k)
    upper = math.sqrt(1.0 + delta_ak)
    denominator = lower - ratio * upper
    if denominator <= 0.0:
        raise DomainError(
            f"constants diverge: denominator {denominator} is not positive")
    C0pp = (1.0 + ratio) / denominator
    C1pp = (lower + upper) / (math.sqrt(a) * denominator)
    return C0pp, C1pp


def dirac_2k_threshold(omega: float, rho: float, alpha: float) -> float:
    """1 / (sqrt(2) gamma + 1)"""
    return 1.0 / (SQRT2 * gamma(omega, rho, alpha) + 1.0)


def gaussian_noise_radius(kind, size: int, sigma: float) -> float:
    """Noise radius holding with high probability for N(0, sigma^2) noise (natural log)"""
    kind = NoiseSet.parse(kind)
    size = validate_positive_int("size", size)
    sigma = validate_nonnegative("sigma", sigma)
    if size < 2:
        raise ParameterError(f"radius needs n >= 2 (got {size}) so that log n > 0")
    if kind is NoiseSet.L2_BALL:
        return sigma * math.sqrt(size + 2.0 * math.sqrt(size * math.log(size)))
    return sigma * math.sqrt(2.0 * math.log(size))


def compressibility_tail(x, T0, T_tilde, omega) -> float:
    """omega ||x_{T0^c}||_1 + (1 - omega) ||x_{T~^c intersect T0^c}||_1"""
    entries = as_array(x)
    N = entries.shape[0]
    off_support = complement(T0, N)
    outside_both = sorted(set(off_support) - set(int(i) for i in T_tilde))
    return omega * l1_on(entries, off_support) + (1.0 - omega) * l1_on(entries, outside_both)


def error_bound_rhs(g, delta, k, eps, x, T0, T_tilde, kind=NoiseSet.L2_BALL) -> float:
    """Right-hand side of the weighted recovery error bound"""
    kind = NoiseSet.parse(kind)
    k = validate_positive_int("k", k)
    eps = validate_nonnegative("eps", eps)
    if kind is NoiseSet.L2_BALL:
        D0, D1 = stability_constants_l2(g, delta)
    else:
        D0, D1 = stability_constants_ds(g, delta, k)
    tail = compressibility_tail(x, T0, T_tilde, g.omega)
    return D0 * 2.0 * eps + D1 * 2.0 * tail / math.sqrt(k)


def gaussian_error_bound(g, delta, k, sigma, n, N, x, T0, T_tilde, kind=NoiseSet.L2_BALL) -> float:
    """error_bound_rhs with eps set to the Gaussian noise radius"""
    kind = NoiseSet.parse(kind)
    size = n if kind is NoiseSet.L2_BALL else N
    eps = gaussian_noise_radius(kind, size, sigma)
    return error_bound_rhs(g, delta, k, eps, x, T0, T_tilde, kind)


def best_certified_t(deltas_by_t, omega, rho, alpha, k, eps, x, T0, T_tilde,
                     kind=NoiseSet.L2_BALL):
    """Among t whose delta_tk is below delta_t^omega, the one with the smallest bound

    Returns (t, delta, threshold, bound) or None when no t certifies.
    """
    best = None
    for t, delta in sorted(deltas_by_t.items()):
        g = GeometryParams(t=t, omega=omega, rho=rho, alpha=alpha)
        try:
            threshold = ric_threshold(g)
        except DomainError:
            continue
        if not delta < threshold:
            continue
        bound = error_bound_rhs(g, delta, k, eps, x, T0, T_tilde, kind)
        if best is None or bound < best[3]:
            best = (t, delta, threshold, bound)
    return best


@dataclass(frozen=True)
class SweepSpec:
    """Parameters of one omega sweep at several alphas"""

    t: float
    rho: float
    delta: float
    alphas: tuple
    omega_steps: int = 101
    omegas: tuple = None
    k: int = 1
    # Set a to add the delta_a^omega, C0'', C1'' columns
    a: float = None
    delta_ak: float = None
    delta_a1k: float = None
    include_reference: bool = False

    def omega_grid(self):
        if self.omegas is not None:
            return tuple(float(w) for w in self.omegas)
        steps = validate_positive_int("omega_steps", self.omega_steps)
        if steps == 1:
            return (1.0,)
        return tuple(i / (steps - 1) for i in range(steps))

    def columns(self):
        columns = ["omega", "alpha", "delta_t_omega", "D0", "D1"]
        if self.a is not None:
            columns += ["delta_a_omega", "C0pp", "C1pp"]
        if self.include_reference:
            columns += ["delta_t_1", "C0", "C1"]
        return columns


def _or_inf(compute, width=None):
    """compute(), or inf (a tuple of width infs) when it raises DomainError"""
    try:
        return compute()
    except DomainError:
        return math.inf if width is None else (math.inf,) * width


def figure_sweep(spec: SweepSpec):
    """Rows (dicts keyed by spec.columns()) over the alpha x omega grid"""
    if not spec.alphas:
        raise ParameterError("sweep needs at least one alpha")
    rows = []
    for alpha in spec.alphas:
        for omega in spec.omega_grid():
            g = GeometryParams(t=spec.t, omega=omega, rho=spec.rho, alpha=alpha)
            row = {"omega": omega, "alpha": float(alpha)}
            row["delta_t_omega"] = _or_inf(lambda: ric_threshold(g))
            row["D0"], row["D1"] = _or_inf(lambda: stability_constants_l2(g, spec.delta), 2)
            if spec.a is not None:
                row["delta_a_omega"] = fmsy_threshold(spec.a, omega, spec.rho, alpha)
                row["C0pp"], row["C1pp"] = _or_inf(lambda: fmsy_constants(
                    spec.a, spec.delta_ak, spec.delta_a1k, omega, spec.rho, alpha), 2)
            if spec.include_reference:
                row["delta_t_1"] = _or_inf(lambda: cz_threshold(spec.t))
                row["C0"], row["C1"] = _or_inf(
                    lambda: cz_constants(spec.t, spec.delta, spec.k), 4)[:2]
            rows.append(row)
    logger.debug(
        "Sweep computed",
        extra={"event": "sweep_computed", "rows": len(rows), "t": spec.t, "rho": spec.rho},
    )
    return rows


def format_value(value) -> str:
    if isinstance(value, float) and not math.isfinite(value):
        return INF_SENTINEL
    return repr(float(value))


def write_sweep_csv(path, spec: SweepSpec, rows=None, columns=None) -> Path:
    """Write figure_sweep rows as CSV with a header row, optionally a column subset"""
    rows = figure_sweep(spec) if rows is None else rows
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(columns or spec.columns())
    unknown = [column for column in columns if column not in spec.columns()]
    if unknown:
        raise ParameterError(f"sweep has no columns {unknown}")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[column]) for column in columns])
    return path


def threshold_table(t, omega, rho, alpha, a=3.0):
    """All recovery thresholds for one geometry, for reports and the API

    Raises DomainError when t <= d; only sweeps write the inf sentinel.
    """
    g = GeometryParams(t=t, omega=omega, rho=rho, alpha=alpha)
    return {
        **g.to_dict(),
        "delta_t_omega": ric_threshold(g),
        "delta_t_1": cz_threshold(t),
        "delta_a_omega": fmsy_threshold(a, omega, rho, alpha),
        "delta_2k": dirac_2k_threshold(omega, rho, alpha),
    }