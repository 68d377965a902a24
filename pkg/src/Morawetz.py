"""Interaction Morawetz diagnostics on periodic boxes in dimension 1 and 2.

The functional is

    M(t) = int int 2 A(x) . grad a(x - y) N(y) dx dy

with the momentum density ``A = Im sum conj(u_i) grad u_i`` and the weighted
mass density ``N = kappa1 kappa2 kappa3 sum |u_i|^2 / kappa_i``. The weight
``a`` is built from the autocorrelation ``phi`` of a squared cutoff:

    phi(x) = (1 / (omega_d R^d)) int chi^2((x - s)/R) chi^2(s/R) ds
    psi(x) = (1/|x|) int_0^|x| phi,    a(x) = int_0^|x| psi(r) r dr

so that ``Lap a = (d-1) psi + phi`` and ``a_jk = delta_jk phi + P_jk (psi - phi)``.
Double integrals are zero-padded FFT convolutions; integrals localised
around a frame centre ``s`` are periodic FFT convolutions with ``chi^2(./R)``.
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft
from scipy.integrate import cumulative_simpson
from scipy.interpolate import make_interp_spline
from scipy.signal import fftconvolve

from src import functionals
from src.constants import EDGE_MASS_TOL, MORAWETZ_DIMENSIONS, R_NODES, XI_GUARD
from src.CutoffCreator import Cutoff
from src.errors import GridError, SpanError
from src.grid import gradient, laplacian_kappa
from src.Propagator import phase_boost
from src.utils import ball_volume, integrate_series

logger = logging.getLogger(__name__)

# auxiliary unit-scale grid [-2.5, 2.5)^d for the autocorrelations
_AUX_HALF_WIDTH = 2.5
_AUX_POINTS = {1: 8192, 2: 1024}


def _require_morawetz_grid(g):
    if not g.is_box or g.dimension not in MORAWETZ_DIMENSIONS:
        raise GridError("Morawetz quantities need a periodic box of dimension {0}, got {1!r}".format(
            MORAWETZ_DIMENSIONS, g))


@lru_cache(maxsize=16)
def _unit_autocorrelations(eps, d):
    """``(rho, phi, phi_one_weight)`` at ``R = 1`` along the first axis."""
    cutoff = Cutoff(eps)
    m = _AUX_POINTS[d]
    delta = 2.0 * _AUX_HALF_WIDTH / m
    axis = -_AUX_HALF_WIDTH + delta * np.arange(m)
    radius = np.sqrt(sum(x ** 2 for x in np.meshgrid(*([axis] * d), indexing='ij')))
    chi = cutoff(radius)
    axes = tuple(range(d))
    chi2_hat = fft.fftn(fft.ifftshift(chi ** 2), axes=axes)
    chi3_hat = fft.fftn(fft.ifftshift(chi ** 3), axes=axes)
    scale = delta ** d / ball_volume(d)
    phi = np.real(fft.ifftn(chi2_hat * chi2_hat, axes=axes)) * scale
    phi1 = np.real(fft.ifftn(chi3_hat * chi2_hat, axes=axes)) * scale
    line = (slice(0, m // 2),) + (0,) * (d - 1)
    return delta * np.arange(m // 2), phi[line].copy(), phi1[line].copy()


def _even_spline(rho, values):
    nodes = np.concatenate((-rho[:0:-1], rho))
    return make_interp_spline(nodes, np.concatenate((values[:0:-1], values)), k=5)


@dataclass
class WeightKernels:
    """Weights sampled at the offsets ``x - y`` of one evaluation grid (``2N - 1`` per axis, centred)."""
    phi: np.ndarray
    phi1: np.ndarray
    gap: np.ndarray
    lap_a: np.ndarray
    grad_a: list
    angular: list


class MorawetzWeights:
    """Radial weights ``phi``, ``phi_one_weight``, ``psi`` and ``a`` at scale ``R``.

    The profiles are stored at unit scale; ``phi_R(x) = phi(|x|/R)``,
    ``psi_R(x) = psi(|x|/R)`` and ``a_R(x) = R^2 a(|x|/R)``.
    """
    def __init__(self, cutoff, R, dimension):
        self.cutoff = cutoff
        self.R = float(R)
        self.dimension = int(dimension)
        rho, phi, phi1 = _unit_autocorrelations(cutoff.Eps, self.dimension)
        Phi = cumulative_simpson(phi, x=rho, initial=0.0)
        psi = np.empty_like(phi)
        psi[0] = phi[0]
        psi[1:] = Phi[1:] / rho[1:]
        a = cumulative_simpson(Phi, x=rho, initial=0.0)
        self.rho = rho
        self.phi = phi
        self.phi_one_weight = phi1
        self.psi = psi
        self.a = a
        self._rho_end = rho[-1]
        self._mass_end = Phi[-1]
        self._splines = {name: _even_spline(rho, values) for name, values in
                         (('phi', phi), ('phi1', phi1), ('psi', psi), ('a', a))}
        self._kernels = {}

    def _unit(self, name, rho):
        rho = np.abs(np.asarray(rho, dtype=float))
        inside = rho <= self._rho_end
        out = np.zeros_like(rho)
        out[inside] = self._splines[name](rho[inside])
        outside = ~inside
        if name == 'psi':
            out[outside] = self._mass_end / rho[outside]
        elif name == 'a':
            out[outside] = self.a[-1] + self._mass_end * (rho[outside] - self._rho_end)
        return out

    def phi_at(self, r):
        return self._unit('phi', np.asarray(r) / self.R)

    def phi_one_at(self, r):
        return self._unit('phi1', np.asarray(r) / self.R)

    def psi_at(self, r):
        return self._unit('psi', np.asarray(r) / self.R)

    def a_at(self, r):
        return self.R ** 2 * self._unit('a', np.asarray(r) / self.R)

    def laplacian_a_at(self, r):
        return (self.dimension - 1) * self.psi_at(r) + self.phi_at(r)

    def kernels(self, g):
        if g not in self._kernels:
            self._kernels[g] = self._sample(g)
        return self._kernels[g]

    def _sample(self, g):
        offsets = np.arange(-(g.points - 1), g.points) * g.spacing
        z = np.meshgrid(*([offsets] * g.dimension), indexing='ij')
        r = np.sqrt(sum(zj ** 2 for zj in z))
        phi = self.phi_at(r)
        psi = self.psi_at(r)
        gap = psi - phi
        r2 = r ** 2
        angular = []
        for j in range(g.dimension):
            row = []
            for k in range(g.dimension):
                projection = float(j == k) - np.divide(z[j] * z[k], r2, out=np.zeros_like(r), where=r2 > 0)
                row.append(projection * gap)
            angular.append(row)
        return WeightKernels(phi=phi, phi1=self.phi_one_at(r), gap=gap,
                             lap_a=(g.dimension - 1) * psi + phi,
                             grad_a=[psi * zj for zj in z], angular=angular)

    def __repr__(self):
        return "MorawetzWeights(eps={0}, R={1}, dimension={2})".format(self.cutoff.Eps, self.R, self.dimension)


def build_weights(c, R, g):
    _require_morawetz_grid(g)
    if not R > 0:
        raise SpanError("R must be positive, got {0}".format(R))
    if R > g.extent / 4.0:
        raise SpanError("support overflow: R = {0} exceeds a quarter of the box half-width {1}".format(
            R, g.extent))
    w = MorawetzWeights(c, R, g.dimension)
    logger.debug("built %r", w)
    return w


@dataclass(frozen=True)
class WeightIdentities:
    laplacian_defect: float
    min_gap: float
    grad_phi_constant: float
    gap_constant: float
    phi_one_constant: float


def weight_identities(w):
    """Sampled checks of the weight calculus at unit scale (all of them are scale invariant)."""
    rho = w.rho[1:]
    a = w._splines['a']
    d = w.dimension
    lap = a.derivative(2)(rho) + (d - 1) * a.derivative(1)(rho) / rho
    defect = float(np.max(np.abs(lap - ((d - 1) * w.psi[1:] + w.phi[1:]))))
    far = np.linspace(w.rho[1], 20.0, 4000)
    gap_far = w._unit('psi', far) - w._unit('phi', far)
    return WeightIdentities(
        laplacian_defect=defect,
        min_gap=float(np.min(w.psi - w.phi)),
        grad_phi_constant=float(np.max(np.abs(w._splines['phi'].derivative(1)(w.rho)))),
        gap_constant=float(np.max(np.abs(gap_far) / np.minimum(far, 1.0 / far))),
        phi_one_constant=float(np.max(np.abs(w.phi - w.phi_one_weight)) / w.cutoff.Eps))


def _convolve(f, kernel, g):
    """``int K(x - y) f(y) dy`` at every node (no wrap-around)."""
    return fftconvolve(f, kernel, mode='same') * g.spacing ** g.dimension


def _minimum_image(g, s):
    """Offsets ``x - s`` wrapped into ``[-L, L)``."""
    period = 2.0 * g.extent
    return [np.mod(x - sj + g.extent, period) - g.extent for x, sj in zip(g.coordinates(), s)]


def localized_weight(g, s, R, c):
    """``chi^2((x - s)/R)`` on the box."""
    r = np.sqrt(sum(o ** 2 for o in _minimum_image(g, s)))
    return c.scaled(r, R) ** 2


def _mass_guard(u):
    return XI_GUARD * functionals.mass(u)


def select_xi(u, s, R, c, p):
    """Galilean frame that cancels the ``chi^2``-localised momentum around ``s``."""
    g = u.grid
    _require_morawetz_grid(g)
    dens = functionals.density_terms(u, p)
    weight = localized_weight(g, s, R, c)
    denominator = g.quadrature(dens.N * weight)
    if denominator <= _mass_guard(u):
        return np.zeros(g.dimension)
    numerator = np.array([g.quadrature(Aj * weight) for Aj in dens.A])
    return -p.kappa_product * numerator / denominator


def localized_momentum(u, s, R, c):
    g = u.grid
    weight = localized_weight(g, s, R, c)
    A = [np.zeros(g.shape) for _ in range(g.dimension)]
    for ui in u:
        for j, dj in enumerate(gradient(ui, g)):
            A[j] += np.imag(np.conj(ui) * dj)
    return np.array([g.quadrature(Aj * weight) for Aj in A])


def morawetz_functional(u, w, p):
    g = u.grid
    _require_morawetz_grid(g)
    dens = functionals.density_terms(u, p)
    k = w.kernels(g)
    return 2.0 * sum(g.quadrature(Aj * _convolve(dens.N, kj, g)) for Aj, kj in zip(dens.A, k.grad_a))


@dataclass(frozen=True)
class MorawetzTerms:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float
    X: float
    G: float
    H: float
    I: float
    J: float
    xi: np.ndarray = None
    edge_mass: float = 0.0

    @property
    def total(self):
        """``dM/dt``: ``A + B + C + D + E + F + X``."""
        return self.A + self.B + self.C + self.D + self.E + self.F + self.X

    @property
    def C_plus_E(self):
        return self.C + self.E

    @property
    def D_plus_F(self):
        return self.D + self.F

    @property
    def regrouped(self):
        """``A + G + H + I + J`` (the lower bound once ``D + F >= 0`` is dropped), plus ``X``."""
        return self.A + self.G + self.H + self.I + self.J + self.X

    def as_dict(self):
        row = {name: getattr(self, name) for name in 'ABCDEFXGHIJ'}
        row.update({'C+E': self.C_plus_E, 'D+F': self.D_plus_F, 'sum': self.total})
        row['edge_mass'] = self.edge_mass
        return row


def edge_mass_fraction(u, width):
    """Share of the mass within ``width`` of the box boundary."""
    g = u.grid
    total = functionals.mass(u)
    if total == 0:
        return 0.0
    near = np.zeros(g.shape, dtype=bool)
    for x in g.coordinates():
        near |= np.abs(x) > g.extent - width
    return g.quadrature(functionals.mass_density(u) * near) / total


def term_decomposition(u, w, p, s=None, warn=True):
    """Every term of ``dM/dt`` by direct quadrature of its double integral.

    ``J`` is ``C + E`` in the frame-boosted s-integral form. With ``s`` given
    the frame ``xi(s)`` is reported as well.

    The convolutions do not wrap around the box, so the terms sum to ``dM/dt``
    only while the field stays clear of the boundary. ``edge_mass`` is the
    share of the mass within ``R`` of it; above ``EDGE_MASS_TOL`` a warning is
    logged.
    """
    g = u.grid
    _require_morawetz_grid(g)
    edge = edge_mass_fraction(u, w.R)
    if warn and edge > EDGE_MASS_TOL:
        logger.warning("%.2e of the mass lies within R = %g of the box boundary: Morawetz terms are unreliable",
                       edge, w.R)
    d = g.dimension
    q = g.quadrature
    kbar = p.kappa_product
    dens = functionals.density_terms(u, p)
    k = w.kernels(g)
    N = dens.N
    re_z = np.real(dens.Z)
    im_z = np.imag(dens.Z)
    lap_w = np.real(laplacian_kappa(dens.W, 1.0, g))
    n_lap = _convolve(N, k.lap_a, g)
    n_phi = _convolve(N, k.phi, g)
    stress = [[sum(kappa * np.real(np.conj(grads[j]) * grads[m]) for kappa, grads in zip(p.kappas, dens.grads))
               for m in range(d)] for j in range(d)]
    D = 4.0 * sum(q(stress[j][m] * _convolve(N, k.angular[j][m], g)) for j in range(d) for m in range(d))
    F = -4.0 * kbar * sum(q(dens.A[j] * _convolve(dens.A[m], k.angular[j][m], g))
                          for j in range(d) for m in range(d))
    X = 0.0
    if not p.mass_resonant:
        X = 4.0 * kbar * p.resonance_defect * sum(q(Aj * _convolve(im_z, kj, g)) for Aj, kj in zip(dens.A, k.grad_a))
    xi = None if s is None else select_xi(u, s, w.R, w.cutoff, p)
    return MorawetzTerms(
        A=-q(lap_w * n_lap),
        B=-2.0 * q(re_z * n_lap),
        C=4.0 * q(dens.L * n_phi),
        D=D,
        E=-4.0 * kbar * sum(q(Aj * _convolve(Aj, k.phi, g)) for Aj in dens.A),
        F=F,
        X=X,
        G=-2.0 * d * q(re_z * _convolve(N, k.phi1, g)),
        H=-2.0 * (d - 1) * q(re_z * _convolve(N, k.gap, g)),
        I=-2.0 * d * q(re_z * _convolve(N, k.phi - k.phi1, g)),
        J=c_plus_e_frames(u, w.R, w.cutoff, p).total,
        xi=xi, edge_mass=edge)


def _periodic_weight_spectrum(g, R, c):
    z = fft.fftfreq(g.points, d=1.0 / g.points) * g.spacing
    offsets = np.meshgrid(*([z] * g.dimension), indexing='ij')
    c2 = c.scaled(np.sqrt(sum(o ** 2 for o in offsets)), R) ** 2
    return fft.fftn(c2)


def _periodic_convolve(f, weight_hat, g):
    return np.real(fft.ifftn(fft.fftn(f) * weight_hat)) * g.spacing ** g.dimension


@dataclass
class FrameIntegrals:
    """Localised integrals around every node ``s``: ``int f(x) chi^2((x - s)/R) dx``."""
    L: np.ndarray
    A: list
    S: np.ndarray
    N: np.ndarray
    xi: list
    L_xi: np.ndarray

    @property
    def frames(self):
        """``[int L^xi chi_s^2] [int N chi_s^2]``: nonnegative at every ``s``."""
        return self.L_xi * self.N


def frame_integrals(u, R, c, p, dens=None):
    g = u.grid
    _require_morawetz_grid(g)
    if R > g.extent:
        raise SpanError("frame radius {0} exceeds the box half-width {1}".format(R, g.extent))
    if dens is None:
        dens = functionals.density_terms(u, p)
    weight_hat = _periodic_weight_spectrum(g, R, c)
    L = _periodic_convolve(dens.L, weight_hat, g)
    A = [_periodic_convolve(Aj, weight_hat, g) for Aj in dens.A]
    S = _periodic_convolve(dens.S, weight_hat, g)
    N = p.kappa_product * S
    active = N > _mass_guard(u)
    safe = np.where(active, S, 1.0)
    xi = [np.where(active, -Aj / safe, 0.0) for Aj in A]
    L_xi = L + 2.0 * sum(x * Aj for x, Aj in zip(xi, A)) + sum(x ** 2 for x in xi) * S
    return FrameIntegrals(L=L, A=A, S=S, N=N, xi=xi, L_xi=L_xi)


@dataclass(frozen=True)
class CPlusE:
    total: float
    frames: np.ndarray
    xi: list
    stride: int


def _lattice(g, stride):
    index = tuple([slice(None, None, stride)] * g.dimension)
    count = len(range(0, g.points, stride))
    return index, (2.0 * g.extent / count) ** g.dimension


def c_plus_e_frames(u, R, c, p, stride=1):
    """``C + E = (4 / (omega_d R^d)) int [int L^xi(s) chi_s^2] [int N chi_s^2] ds`` on an s-lattice."""
    g = u.grid
    integrals = frame_integrals(u, R, c, p)
    index, weight = _lattice(g, stride)
    frames = integrals.frames
    total = 4.0 / (ball_volume(g.dimension) * R ** g.dimension) * float(np.sum(frames[index])) * weight
    return CPlusE(total=total, frames=frames, xi=integrals.xi, stride=stride)


def cutoff_kinetic_identity(u, s, R, c):
    """Per component ``(int chi^2 |grad u|^2, int |grad(chi u)|^2 + int chi Lap(chi) |u|^2)``."""
    g = u.grid
    chi = np.sqrt(localized_weight(g, s, R, c))
    lap_chi = np.real(laplacian_kappa(chi, 1.0, g))
    q = g.quadrature
    pairs = []
    for ui in u:
        lhs = q(chi ** 2 * sum(np.abs(dj) ** 2 for dj in gradient(ui, g)))
        rhs = q(sum(np.abs(dj) ** 2 for dj in gradient(chi * ui, g))) + q(chi * lap_chi * np.abs(ui) ** 2)
        pairs.append((lhs, rhs))
    return pairs


@dataclass(frozen=True)
class CoercivityReport:
    xi: np.ndarray
    ratio: float
    kinetic_local: float
    potential_local: float
    localisation_error: float
    mass_scale: float


def coercivity_on_balls(u, s, R, c, p):
    """``(4 K(chi_R u^xi) - 5 V(chi_R u)) / K(chi_R u^xi)`` around ``s``.

    ``ratio`` is NaN when the ball carries no kinetic energy.
    """
    g = u.grid
    xi = select_xi(u, s, R, c, p)
    chi = np.sqrt(localized_weight(g, s, R, c))
    boosted = phase_boost(u, xi, p)
    local = boosted.map(lambda f, i: chi * f)
    k_local = functionals.kinetic(local, p)
    v_local = functionals.potential(u.map(lambda f, i: chi * f))
    ratio = (4.0 * k_local - 5.0 * v_local) / k_local if k_local > 0 else math.nan
    return CoercivityReport(xi=xi, ratio=ratio, kinetic_local=k_local, potential_local=v_local,
                            localisation_error=k_local - functionals.kinetic(boosted, p),
                            mass_scale=functionals.mass(u) / R ** 2)


def log_radius_nodes(R0, J, count=R_NODES):
    """Midpoint nodes in ``log R`` over ``[R0, R0 e^J]`` with their ``d(log R)`` weights."""
    logs = math.log(R0) + (np.arange(count) + 0.5) * J / count
    return np.exp(logs), np.full(count, J / count)


@dataclass
class MorawetzReport:
    R0: float
    log_count_J: float
    T0: float
    eps: float
    nu: float
    E0: float
    delta: float
    delta_measured: bool
    raw_average: float
    lhs: float
    ratio: float
    rows: list = field(default_factory=list)

    def summary(self):
        return {name: getattr(self, name) for name in ('R0', 'log_count_J', 'T0', 'eps', 'nu', 'E0', 'delta',
                                                      'delta_measured', 'raw_average', 'lhs', 'ratio')}

    def to_csv(self, path):
        if not self.rows:
            return
        with open(path, 'w', newline='') as file:
            writer = csv.DictWriter(file, fieldnames=list(self.rows[0]))
            writer.writeheader()
            writer.writerows(self.rows)


def _window(traj, T0):
    times = traj.times
    if T0 <= 0:
        raise SpanError("T0 must be positive, got {0}".format(T0))
    if T0 > traj.span * (1.0 + 1e-12):
        raise SpanError("insufficient trajectory span: T0 = {0} > {1}".format(T0, traj.span))
    t_end = times[0] + T0
    last = int(np.searchsorted(times, t_end + 1e-9 * max(1.0, T0), side='right'))
    last = min(max(last, 2), len(traj))
    return times[0], t_end, list(range(last))


def measure_delta(traj, indices, radii, c, p):
    """Smallest coercivity ratio over the heaviest frame of each probed ``(t, R)``."""
    probes = sorted({indices[0], indices[len(indices) // 2], indices[-1]})
    ratios = []
    for i in probes:
        u = traj[i].fields
        for R in radii:
            integrals = frame_integrals(u, R, c, p)
            heaviest = np.unravel_index(int(np.argmax(integrals.N)), u.grid.shape)
            s = [x[heaviest] for x in u.grid.coordinates()]
            ratios.append(coercivity_on_balls(u, s, R, c, p).ratio)
    ratios = [r for r in ratios if not math.isnan(r)]
    return min(ratios) if ratios else 1.0


def averaged_estimate(traj, R0, J, T0, eps, p, delta=None, stride=None):
    """Time and log-radius average of the localised coercive quantity.

    Integrates ``R^(-d) int [int L^xi chi_s^2][int N chi_s^2] ds`` over
    ``t`` in ``[t_start, t_start + T0]`` (trapezoid) and ``log R`` over
    ``[log R0, log R0 + J]`` (midpoint, :data:`R_NODES` nodes), divides by
    ``J T0`` and multiplies by ``delta``. Without ``delta`` the smallest
    measured coercivity ratio is used.
    """
    g = traj.grid
    _require_morawetz_grid(g)
    if not (R0 > 0 and J > 0):
        raise SpanError("R0 and J must be positive, got R0={0}, J={1}".format(R0, J))
    if R0 * math.exp(J) > g.extent / 2.0:
        raise SpanError("R0 e^J = {0:.4g} exceeds half the box half-width {1}".format(R0 * math.exp(J), g.extent))
    t_start, t_end, indices = _window(traj, T0)
    c = Cutoff(eps)
    radii, log_weights = log_radius_nodes(R0, J)
    d = g.dimension
    rows = []
    inner = []
    for i in indices:
        u = traj[i].fields
        dens = functionals.density_terms(u, p)
        total = 0.0
        for R, wR in zip(radii, log_weights):
            lattice_stride = stride or max(1, int(round(R / (2.0 * g.spacing))))
            index, weight = _lattice(g, lattice_stride)
            integrals = frame_integrals(u, R, c, p, dens=dens)
            frames = integrals.frames
            value = R ** -d * float(np.sum(frames[index])) * weight
            total += wR * value
            heaviest = int(np.argmax(integrals.N))
            row = {'t': traj[i].time, 'R': float(R), 's': heaviest}
            row.update({'xi{0}'.format(j + 1): float(x.flat[heaviest]) for j, x in enumerate(integrals.xi)})
            row.update({'frame_sum': value, 'weighted': wR * value})
            rows.append(row)
        inner.append(total)
    times = traj.times[indices]
    raw = integrate_series(times, np.array(inner), t_start, t_end) / (J * T0)
    measured = delta is None
    if measured:
        delta = measure_delta(traj, indices, radii, c, p)
    lhs = delta * raw
    E0 = functionals.mass(traj[0].fields)
    nu = R0 * math.exp(J) / (J * T0) + eps
    ratio = lhs / (nu * E0 ** 2) if E0 > 0 else 0.0
    logger.info("averaged Morawetz estimate: LHS=%.6g, nu=%.6g, E0=%.6g, ratio=%.6g (delta=%.4g)",
                lhs, nu, E0, ratio, delta)
    return MorawetzReport(R0=R0, log_count_J=J, T0=T0, eps=eps, nu=nu, E0=E0, delta=delta,
                          delta_measured=measured, raw_average=raw, lhs=lhs, ratio=ratio, rows=rows)


def term_series(traj, w, p):
    """Term table along a trajectory with the centred-difference check of ``dM/dt``."""
    values = [morawetz_functional(s.fields, w, p) for s in traj]
    times = traj.times
    rows = []
    for i, snap in enumerate(traj):
        row = {'t': snap.time, 'M': values[i]}
        row.update(term_decomposition(snap.fields, w, p, warn=False).as_dict())
        if 0 < i < len(traj) - 1:
            row['dM/dt'] = (values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1])
        else:
            row['dM/dt'] = math.nan
        rows.append(row)
    edge = max(row['edge_mass'] for row in rows)
    if edge > EDGE_MASS_TOL:
        logger.warning("up to %.2e of the mass reaches within R = %g of the box boundary: Morawetz terms are unreliable",
                       edge, w.R)
    return rows
