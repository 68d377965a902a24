"""Time evolution of ``i u_t + A u = f(u)`` by Strang splitting.

``A = diag(kappa1 Lap, kappa2 Lap, kappa3 Lap)`` and
``f(u) = (-conj(u2) u3, -conj(u1) u3, -u1 u2)``.
"""
import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import fft
from tqdm import tqdm

from src import functionals
from src.constants import (BLOWUP_KINETIC_GROWTH, BLOWUP_MODULUS, CN_MAX_SUBSTEPS, CN_TOL, DT_SAFETY,
                           RK4_SUBSTEPS)
from src.errors import BlowUpError, GridError, NormalizationError, StabilityCapError, ValidationError
from src.FieldTriple import FieldTriple
from src.grid import resample
from src.Snapshot import Snapshot, write_snapshot
from src.utils import relative_difference

logger = logging.getLogger(__name__)


def stability_cap(grid, p, safety=DT_SAFETY):
    """Largest admissible step ``safety * spacing^2 / max kappa``."""
    return safety * grid.spacing ** 2 / max(p.kappas)


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    T: float
    record_every: int = 1
    dt_safety: float = DT_SAFETY
    progress: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError("dt must be positive, got {0}".format(self.dt))
        if self.T < 0:
            raise ValidationError("T must be nonnegative, got {0}".format(self.T))
        if self.record_every < 1:
            raise ValidationError("record_every must be >= 1")
        n = round(self.T / self.dt)
        if abs(n * self.dt - self.T) > 1e-9 * max(self.T, self.dt):
            raise ValidationError("T/dt = {0} is not an integer step count".format(self.T / self.dt))

    @property
    def steps(self):
        return int(round(self.T / self.dt))

    def validate(self, grid, p):
        cap = stability_cap(grid, p, self.dt_safety)
        if self.dt > cap * (1.0 + 1e-12):
            raise StabilityCapError(self.dt, cap)


class Trajectory:
    """Snapshots at strictly increasing, uniformly spaced times."""
    def __init__(self, snapshots, params, config=None):
        times = [s.time for s in snapshots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("trajectory times must increase strictly")
        self.snapshots = list(snapshots)
        self.params = params
        self.config = config

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    def __iter__(self):
        return iter(self.snapshots)

    @property
    def times(self):
        return np.array([s.time for s in self.snapshots])

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def span(self):
        return self.snapshots[-1].time - self.snapshots[0].time

    def conserved_series(self):
        rows = []
        for s in self.snapshots:
            c = functionals.conserved(s.fields, self.params)
            rows.append({'t': s.time, 'M': c.mass, 'K': c.kinetic, 'V': c.potential, 'E': c.energy,
                         'P': c.momentum, 'max_modulus': s.fields.max_modulus()})
        return rows

    def to_csv(self, path):
        rows = self.conserved_series()
        d = self.grid.dimension
        with open(path, 'w', newline='') as file:
            writer = csv.writer(file)
            writer.writerow(['t', 'M', 'K', 'V', 'E'] + ['P{0}'.format(j + 1) for j in range(d)] + ['max_modulus'])
            for row in rows:
                writer.writerow([repr(row['t']), repr(row['M']), repr(row['K']), repr(row['V']), repr(row['E'])]
                                + [repr(float(x)) for x in row['P']] + [repr(row['max_modulus'])])
        return rows

    def write_snapshots(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for i, s in enumerate(self.snapshots):
            write_snapshot(s, directory / "snapshot_{0:05d}.nls3".format(i))


def _box_linear(u, t, kappa, g):
    axes = tuple(range(g.dimension))
    return fft.ifftn(np.exp(-1j * kappa * g.k_squared() * t) * fft.fftn(u, axes=axes), axes=axes)


def _crank_nicolson(u, t, kappa, g, substeps):
    stencil = g.stencil()
    tau = t / substeps
    lhs = stencil.banded(stencil.laplacian, 1.0, -0.5j * kappa * tau)
    out = np.asarray(u, dtype=complex)
    for _ in range(substeps):
        rhs = out + 0.5j * kappa * tau * stencil.apply(stencil.laplacian, out)
        out = stencil.solve(lhs, rhs)
    return out


def _radial_linear(u, t, kappa, g, tol=CN_TOL):
    """Crank-Nicolson with step doubling until two successive refinements agree.

    The local error is measured in the weighted ``L^2`` norm relative to ``u``.
    """
    substeps = 1
    coarse = _crank_nicolson(u, t, kappa, g, substeps)
    scale = math.sqrt(max(g.quadrature(np.abs(u) ** 2), 1e-300))
    while True:
        substeps *= 2
        fine = _crank_nicolson(u, t, kappa, g, substeps)
        error = math.sqrt(g.quadrature(np.abs(fine - coarse) ** 2)) / scale
        if error < tol:
            return fine
        if substeps >= CN_MAX_SUBSTEPS:
            logger.warning("Crank-Nicolson reached %d substeps with local error %.2e", substeps, error)
            return fine
        coarse = fine


def linear_flow(u, t, p):
    """Free evolution ``exp(i t kappa_i Lap)`` applied componentwise."""
    if t == 0:
        return u
    g = u.grid
    flow = _box_linear if g.is_box else _radial_linear
    return u.map(lambda ui, i: flow(ui, t, p.kappas[i], g))


def _vector_field(y):
    u1, u2, u3 = y
    return np.stack((1j * np.conj(u2) * u3, 1j * np.conj(u1) * u3, 1j * u1 * u2))


def nonlinear_substep(u, dt, substeps=RK4_SUBSTEPS):
    """Integrate ``i u' = f(u)`` at every node over ``dt`` with classical RK4."""
    y = u.stack()
    h = dt / substeps
    for _ in range(substeps):
        k1 = _vector_field(y)
        k2 = _vector_field(y + 0.5 * h * k1)
        k3 = _vector_field(y + 0.5 * h * k2)
        k4 = _vector_field(y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return FieldTriple.from_stack(y, u.grid)


def strang_step(u, dt, p):
    half = linear_flow(u, 0.5 * dt, p)
    return linear_flow(nonlinear_substep(half, dt), 0.5 * dt, p)


def evolve(u0, cfg, p, out_dir=None, start_time=0.0):
    """Iterate :func:`strang_step` and record every ``cfg.record_every`` steps.

    With ``out_dir`` the recorded snapshots and ``series.csv`` are written there.
    """
    g = u0.grid
    cfg.validate(g, p)
    u = u0
    k0 = functionals.kinetic(u0, p)
    snapshots = [Snapshot(start_time, p, u0)]
    steps = cfg.steps
    for n in tqdm(range(1, steps + 1), disable=not cfg.progress, desc="evolve"):
        u = strang_step(u, cfg.dt, p)
        t = start_time + n * cfg.dt
        _detect_blow_up(u, p, k0, t)
        if n % cfg.record_every == 0:
            snapshots.append(Snapshot(t, p, u))
    logger.info("evolved %d steps of dt=%g to t=%g (%d records)", steps, cfg.dt, start_time + steps * cfg.dt,
                len(snapshots))
    traj = Trajectory(snapshots, p, cfg)
    if out_dir is not None:
        out_dir = Path(out_dir)
        traj.write_snapshots(out_dir / "snapshots")
        traj.to_csv(out_dir / "series.csv")
    return traj


def _detect_blow_up(u, p, k0, t):
    if not u.is_finite():
        raise BlowUpError(t, "non-finite samples")
    peak = u.max_modulus()
    if peak > BLOWUP_MODULUS:
        raise BlowUpError(t, "max modulus {0:.3g}".format(peak))
    if k0 > 0:
        k = functionals.kinetic(u, p)
        if k > BLOWUP_KINETIC_GROWTH * k0:
            raise BlowUpError(t, "kinetic energy grew by {0:.3g}".format(k / k0))


def free_evolution(u0, times, p):
    """Linear-only trajectory sampled at ``times``."""
    return Trajectory([Snapshot(t, p, linear_flow(u0, t, p)) for t in times], p)


def _require_box(u):
    if not u.grid.is_box:
        raise GridError("phase boosts need a periodic-box grid")


def phase_boost(u, xi, p):
    """``u_i -> exp(i x . xi / kappa_i) u_i``."""
    _require_box(u)
    xi = np.asarray(xi, dtype=float)
    phase = sum(x * c for x, c in zip(u.grid.coordinates(), xi))
    return u.map(lambda ui, i: np.exp(1j * phase / p.kappas[i]) * ui)


def translate(f, shift, g):
    """``f(x - shift)`` by Fourier shift."""
    axes = tuple(range(g.dimension))
    factor = np.exp(-1j * sum(k * s for k, s in zip(g.wavevectors(), shift)))
    return fft.ifftn(factor * fft.fftn(f, axes=axes), axes=axes)


def galilean_transform(u, xi, t, p):
    """``u_i -> exp(i x . xi / kappa_i) exp(-i t |xi|^2 / kappa_i) u_i(x - 2 t xi)``."""
    _require_box(u)
    xi = np.asarray(xi, dtype=float)
    g = u.grid
    shift = 2.0 * t * xi
    phase = sum(x * c for x, c in zip(g.coordinates(), xi))
    xi2 = float(np.dot(xi, xi))
    return u.map(lambda ui, i: np.exp(1j * (phase - t * xi2) / p.kappas[i]) * translate(ui, shift, g))


def covariance_defect(u0, xi, cfg, p):
    """H1 distance between ``evolve(transform(u0))`` and ``transform(evolve(u0))`` at ``cfg.T``."""
    moved = evolve(galilean_transform(u0, xi, 0.0, p), cfg, p)[-1].fields
    direct = galilean_transform(evolve(u0, cfg, p)[-1].fields, xi, cfg.T, p)
    return functionals.h1_norm(moved - direct)


def resample_triple(u, lam):
    return u.map(lambda ui, i: resample(ui, lam, u.grid))


def rescale_to_E0(u0, p, check_tol=1e-8):
    """Scale ``u_lam(x) = lam^2 u0(lam x)`` with ``lam = sqrt(M/E)`` so that ``M = E``."""
    M = functionals.mass(u0)
    E = functionals.energy(u0, p)
    if not E > 0:
        raise NormalizationError(E)
    lam = math.sqrt(M / E)
    if lam == 1.0:
        return lam, u0
    u = resample_triple(u0, lam).scaled(lam ** 2)
    m_new = functionals.mass(u)
    e_new = functionals.energy(u, p)
    if relative_difference(m_new, e_new) > check_tol:
        raise NormalizationError(E, "cannot normalize: rescaled data misses M = E: M={0:.12g}, E={1:.12g}".format(
            m_new, e_new))
    return lam, u


def standing_wave(gs, t=0.0):
    """``(e^(it) phi1, e^(it) phi2, e^(2it) phi3)``."""
    phases = (np.exp(1j * t), np.exp(1j * t), np.exp(2j * t))
    return gs.Q.map(lambda ui, i: phases[i] * ui)
