"""Scattering diagnostics, threshold sweeps and the Galilean covariance table."""
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from tqdm import tqdm

from src import functionals
from src.constants import SCATTER_PLATEAU
from src.errors import BlowUpError, NormalizationError, SpanError, ValidationError
from src.FieldTriple import SystemParams
from src.Propagator import EvolveConfig, covariance_defect, evolve, free_evolution, linear_flow, rescale_to_E0
from src.utils import integrate_series

logger = logging.getLogger(__name__)

BELOW = "below threshold"
BOUNDARY = "boundary"
OUTSIDE = "outside theorem hypotheses"
BOUNDARY_RTOL = 1e-6


def _spatial_norms(traj, r):
    """``|| |u(t)| ||_{L^r_x}`` at every recorded time, ``|u|`` the Euclidean norm of the moduli."""
    g = traj.grid
    return np.array([g.quadrature(s.fields.modulus() ** r) ** (1.0 / r) for s in traj])


def _check_exponents(q, r):
    if not (1 <= q < math.inf and 1 <= r < math.inf):
        raise ValidationError("exponents must lie in [1, inf), got q={0}, r={1}".format(q, r))


def _check_interval(traj, interval):
    a, b = interval
    times = traj.times
    slack = 1e-9 * max(1.0, abs(times[-1]))
    if not (b > a and a >= times[0] - slack and b <= times[-1] + slack):
        raise SpanError("interval [{0}, {1}] outside the trajectory span [{2}, {3}]".format(
            a, b, times[0], times[-1]))


def _window(times, norms, q, interval):
    return integrate_series(times, norms ** q, *interval) ** (1.0 / q)


def window_norm(traj, q, r, interval):
    """``||u||_{L^q_t L^r_x}`` over ``interval``; trapezoid in time with interpolated endpoints."""
    _check_exponents(q, r)
    _check_interval(traj, interval)
    return _window(traj.times, _spatial_norms(traj, r), q, interval)


def pigeonhole_norm(traj, interval):
    return window_norm(traj, 4, 2.5, interval)


@dataclass(frozen=True)
class Schedule:
    log_count_J: float
    T0: float
    l: float
    clamped_J: bool
    clamped_T0: bool


def schedule(eps, R0, span, max_radius=None):
    """``J = ceil(R0/eps)``, ``T0 = e^J`` and ``l = eps^(-1/4)``, clamped to what the run can afford.

    ``J`` is capped so that ``R0 e^J <= max_radius`` and ``T0`` so that a
    window of length ``l`` still fits into ``span``.
    """
    if not (0 < eps < 1 and R0 > 0):
        raise ValidationError("schedule needs 0 < eps < 1 and R0 > 0, got eps={0}, R0={1}".format(eps, R0))
    J = float(math.ceil(R0 / eps))
    clamped_J = False
    if max_radius is not None and R0 * math.exp(J) > max_radius:
        J = math.log(max_radius / R0)
        clamped_J = True
        logger.warning("log_count_J clamped to %.4g so that R0 e^J fits the box", J)
    l = eps ** -0.25
    T0 = math.exp(min(J, 700.0))
    clamped_T0 = False
    if T0 > span - l:
        T0 = span - l
        clamped_T0 = True
        logger.warning("T0 clamped to the trajectory span: %.4g", T0)
    if T0 <= 0:
        raise SpanError("span too short: {0} leaves no room for a window of length {1:.4g}".format(span, l))
    return Schedule(log_count_J=J, T0=T0, l=l, clamped_J=clamped_J, clamped_T0=clamped_T0)


@dataclass
class IndicatorReport:
    times: np.ndarray
    defects: np.ndarray
    E0: float
    plateau: float
    decreasing: bool
    verdict: str


def scattering_indicator(traj, p):
    """H1 distances between successive back-propagated states ``S(-t) u(t)``."""
    states = [linear_flow(s.fields, -s.time, p) for s in traj]
    defects = np.array([functionals.h1_norm(b - a) for a, b in zip(states, states[1:])])
    E0 = functionals.mass(traj[0].fields)
    plateau = SCATTER_PLATEAU * E0
    decreasing = bool(np.all(np.diff(defects) <= 1e-12 + 1e-9 * np.abs(defects[:-1]))) if defects.size else True
    tail = defects[-1] if defects.size else 0.0
    verdict = "scatter-consistent" if tail <= plateau else "not scatter-consistent"
    return IndicatorReport(times=traj.times[1:], defects=defects, E0=E0, plateau=plateau,
                           decreasing=decreasing, verdict=verdict)


@dataclass
class CriterionReport:
    eps: float
    l: float
    T0: float
    threshold: float
    windows: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    indicator: IndicatorReport = None

    @property
    def all_blocks_pass(self):
        return bool(self.blocks) and all(b['passed'] for b in self.blocks)

    @property
    def all_windows_pass(self):
        return all(w['passed'] for w in self.windows)

    def summary(self):
        out = {'eps': self.eps, 'l': self.l, 'T0': self.T0, 'threshold': self.threshold,
               'windows': len(self.windows), 'passing_windows': sum(w['passed'] for w in self.windows),
               'blocks': len(self.blocks), 'all_blocks_pass': self.all_blocks_pass}
        if self.indicator is not None:
            out.update({'indicator_verdict': self.indicator.verdict,
                        'indicator_decreasing': self.indicator.decreasing,
                        'defects': [float(x) for x in self.indicator.defects]})
        return out

    def to_csv(self, path):
        with open(path, 'w', newline='') as file:
            writer = csv.DictWriter(file, fieldnames=['block', 't0', 'norm', 'passed'])
            writer.writeheader()
            writer.writerows(self.windows)


def criterion_scan(traj, eps, T0, p=None):
    """Slide windows ``[t0 - l, t0]`` with ``l = eps^(-1/4)`` over blocks ``[a, a + T0]``.

    A window passes when its ``L^6_t L^3_x`` norm is at most ``eps^(1/24)``;
    a block passes when some window ending inside it passes. With ``p`` the
    back-propagation indicator is attached.
    """
    if not 0 < eps < 1:
        raise ValidationError("eps must lie in (0, 1), got {0}".format(eps))
    l = eps ** -0.25
    times = traj.times
    if traj.span < T0 + l:
        raise SpanError("span too short: {0:.6g} < T0 + l = {1:.6g}".format(traj.span, T0 + l))
    threshold = eps ** (1.0 / 24.0)
    norms = _spatial_norms(traj, 3)
    report = CriterionReport(eps=eps, l=l, T0=T0, threshold=threshold)
    slack = 1e-9 * max(1.0, times[-1])
    k = 0
    while True:
        a = times[0] + l + k * T0
        if a + T0 > times[-1] + slack:
            break
        ends = times[(times >= a - slack) & (times <= a + T0 + slack)]
        passed_any = False
        for t0 in ends:
            value = _window(times, norms, 6, (max(t0 - l, times[0]), t0))
            passed = bool(value <= threshold)
            passed_any = passed_any or passed
            report.windows.append({'block': k, 't0': float(t0), 'norm': float(value), 'passed': passed})
        report.blocks.append({'block': k, 'a': float(a), 'passed': passed_any})
        k += 1
    if p is not None:
        report.indicator = scattering_indicator(traj, p)
    logger.info("criterion scan: %d windows in %d blocks, all blocks pass: %s",
                len(report.windows), len(report.blocks), report.all_blocks_pass)
    return report


def small_data_norm(u0, p, T, samples=65):
    """``||S(t) u0||_{L^6_t L^3_x([0, T])}`` of the free evolution."""
    traj = free_evolution(u0, np.linspace(0.0, T, samples), p)
    return window_norm(traj, 6, 3, (0.0, T))


def coercivity_margin(traj, p, gs):
    """``min_t (1 - M K / MK_threshold)`` along the trajectory."""
    return min(1.0 - functionals.mass(s.fields) * functionals.kinetic(s.fields, p) / gs.MK_threshold
               for s in traj)


@dataclass
class SweepRow:
    lam: float
    label: str
    ME: float
    MK: float
    ME_ratio: float
    MK_ratio: float
    normalized: bool
    blow_up: bool
    blow_up_time: float
    margin: float
    defect_first: float
    defect_last: float
    defects_decreasing: bool


def classify(checks, gs):
    ratio = checks.ME / gs.ME_threshold
    if abs(ratio - 1.0) <= BOUNDARY_RTOL:
        return BOUNDARY
    if checks.below_threshold:
        return BELOW
    return OUTSIDE


def _sweep_point(lam, base, p, gs, cfg, normalize):
    u0 = base.scaled(lam)
    normalized = False
    if normalize:
        try:
            _, u0 = rescale_to_E0(u0, p)
            normalized = True
        except NormalizationError as exc:
            logger.warning("lambda=%g: normalisation skipped (%s)", lam, exc)
    checks = functionals.product_checks(u0, p, gs)
    label = classify(checks, gs)
    blow_up, blow_up_time = False, math.nan
    margin = math.nan
    defects = np.array([])
    decreasing = False
    try:
        traj = evolve(u0, cfg, p)
    except BlowUpError as exc:
        blow_up, blow_up_time = True, exc.time
        logger.info("lambda=%g: %s", lam, exc)
    else:
        margin = coercivity_margin(traj, p, gs)
        indicator = scattering_indicator(traj, p)
        defects = indicator.defects
        decreasing = indicator.decreasing
    return SweepRow(lam=float(lam), label=label, ME=checks.ME, MK=checks.MK,
                    ME_ratio=checks.ME / gs.ME_threshold, MK_ratio=checks.MK / gs.MK_threshold,
                    normalized=normalized, blow_up=blow_up, blow_up_time=blow_up_time, margin=margin,
                    defect_first=float(defects[0]) if defects.size else math.nan,
                    defect_last=float(defects[-1]) if defects.size else math.nan,
                    defects_decreasing=decreasing)


def threshold_sweep(base, lambdas, p, gs, cfg, workers=1, normalize=False, progress=False):
    """Evolve ``lam * base`` for every ``lam`` and classify it against the ground-state thresholds.

    Rows come back in the order of ``lambdas``.
    """
    lambdas = [float(x) for x in lambdas]
    if not lambdas or min(lambdas) <= 0:
        raise ValidationError("sweep needs positive scaling factors")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        jobs = pool.map(lambda lam: _sweep_point(lam, base, p, gs, cfg, normalize), lambdas)
        rows = list(tqdm(jobs, total=len(lambdas), disable=not progress, desc="sweep"))
    logger.info("threshold sweep over %d points: %s", len(rows), [r.label for r in rows])
    return rows


def sweep_lambdas(lambda_min, lambda_max, count):
    if not (0 < lambda_min <= lambda_max and count >= 1):
        raise ValidationError("sweep range must satisfy 0 < lambda_min <= lambda_max, count >= 1")
    return np.linspace(lambda_min, lambda_max, count)


def rows_to_csv(rows, path):
    rows = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    with open(path, 'w', newline='') as file:
        writer = csv.DictWriter(file, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


@dataclass
class CovarianceRow:
    kappas: tuple
    mass_resonant: bool
    dt: float
    defect: float
    observed_order: float


def covariance_experiment(u0, xi, T, dts, kappas, workers=1):
    """Commutation defect of evolution and Galilean transform for each ``kappas`` triple and step."""
    dts = sorted((float(dt) for dt in dts), reverse=True)
    cells = [(tuple(k), dt) for k in kappas for dt in dts]
    step = math.pi / u0.grid.extent
    for k in kappas:
        ratios = np.asarray(xi, dtype=float)[None, :] / np.asarray(k, dtype=float)[:, None] / step
        if np.max(np.abs(ratios - np.round(ratios))) > 1e-9:
            logger.warning("xi/kappa off the box lattice for kappa=%s: the boost phase is not periodic", tuple(k))

    def run(cell):
        k, dt = cell
        p = SystemParams(*k)
        return covariance_defect(u0, xi, EvolveConfig(dt=dt, T=T), p)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        defects = list(pool.map(run, cells))
    rows = []
    for (k, dt), defect in zip(cells, defects):
        previous = rows[-1] if rows and rows[-1].kappas == k else None
        order = math.nan
        if previous is not None and previous.defect > 0 and defect > 0:
            order = math.log(previous.defect / defect) / math.log(previous.dt / dt)
        rows.append(CovarianceRow(kappas=k, mass_resonant=SystemParams(*k).mass_resonant, dt=dt,
                                  defect=defect, observed_order=order))
    for row in rows:
        logger.info("kappa=%s dt=%g: covariance defect %.3e", row.kappas, row.dt, row.defect)
    return rows
