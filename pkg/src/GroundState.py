"""Ground states of the three-wave system on the radial grid in ``R^5``.

The ground state ``Q = (phi1, phi2, phi3)`` is a nonnegative radial solution of

    phi1 - kappa1 Lap phi1 = phi2 phi3
    phi2 - kappa2 Lap phi2 = phi1 phi3
    2 phi3 - kappa3 Lap phi3 = phi1 phi2

found by a Petviashvili iteration. A scalar shooting solver for
``W - Lap W = W^2`` gives an independent oracle: for ``kappa = (1, 1, 2)`` the
triple ``(sqrt(2) W, sqrt(2) W, W)`` solves the system.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from src import functionals
from src.constants import (GS_COLLAPSE_FLOOR, GS_DEFAULT_TOL, GS_MAX_ITER, GS_NEGATIVE_LIMIT,
                           GS_RESIDUAL_LIMIT, GS_SEED_AMPLITUDES, GS_TOL_RANGE, RADIAL_DIMENSION,
                           SHOOTING_BRACKET)
from src.errors import (BracketError, CollapseError, ConvergenceError, GridError, NegativePartError,
                        ValidationError)
from src.FieldTriple import FieldTriple, gaussian_triple
from src.grid import make_grid, resample, RADIAL
from src.utils import sup_norm

logger = logging.getLogger(__name__)

# constant term of each linear operator c_i - kappa_i Lap
SHIFTS = (1.0, 1.0, 2.0)


@dataclass(frozen=True)
class GroundStateResult:
    Q: FieldTriple
    params: object
    residuals: tuple
    M: float
    K: float
    V: float
    E: float
    M_gs: float
    C_GN: float
    ME_threshold: float
    MK_threshold: float
    J2_min: float
    iterations: int


@dataclass(frozen=True)
class ScalarProfile:
    """Radial solution ``W`` of ``W - Lap W = W^2`` sampled on a radial grid."""
    grid: object
    W: np.ndarray
    dW: np.ndarray
    W0: float
    r_cut: float
    mass_integral: float
    kinetic_integral: float
    cubic_integral: float


def _nonlinear_terms(phi):
    return (phi[1] * phi[2], phi[0] * phi[2], phi[0] * phi[1])


def euler_lagrange_residuals(phi, p, grid):
    """Relative sup-norm residuals ``|L_i phi_i - N_i| / |N_i|`` of the three equations."""
    stencil = grid.stencil()
    residuals = []
    for i, n_i in enumerate(_nonlinear_terms(phi)):
        l_phi = SHIFTS[i] * phi[i] - p.kappas[i] * stencil.apply(stencil.laplacian, phi[i])
        residuals.append(sup_norm(l_phi - n_i) / max(sup_norm(n_i), GS_COLLAPSE_FLOOR))
    return tuple(residuals)


class GroundStateSolver:
    """Petviashvili iteration with one stabilising factor ``S**2`` shared by all components.

    ``mixing`` averages each new iterate with the previous one; ``1`` is the
    plain iteration.
    """
    def __init__(self, params, grid, tol=GS_DEFAULT_TOL, max_iter=GS_MAX_ITER, mixing=0.5):
        if not grid.is_radial or grid.dimension != RADIAL_DIMENSION:
            raise GridError("ground states are computed on the radial d=5 grid")
        if not GS_TOL_RANGE[0] <= tol <= GS_TOL_RANGE[1]:
            raise ValidationError("tol must lie in [{0}, {1}], got {2}".format(*GS_TOL_RANGE, tol))
        if not 0 < mixing <= 1:
            raise ValidationError("mixing must lie in (0, 1], got {0}".format(mixing))
        self.params = params
        self.grid = grid
        self.tol = tol
        self.max_iter = max_iter
        self.mixing = mixing
        stencil = grid.stencil()
        self._stencil = stencil
        self._banded = [stencil.banded(stencil.laplacian, SHIFTS[i], -params.kappas[i]) for i in range(3)]

    def linear(self, i, f):
        return SHIFTS[i] * f - self.params.kappas[i] * self._stencil.apply(self._stencil.laplacian, f)

    def stabilizer(self, phi):
        """``S = sum <L_i phi_i, phi_i> / sum <N_i(phi), phi_i>``."""
        q = self.grid.quadrature
        num = sum(q(self.linear(i, phi[i]) * phi[i]) for i in range(3))
        den = sum(q(n_i * phi[i]) for i, n_i in enumerate(_nonlinear_terms(phi)))
        return num, den

    def sweep(self, phi):
        num, den = self.stabilizer(phi)
        if not den > 0:
            raise ConvergenceError("Petviashvili sweep lost positivity of the coupling (den={0:.3g})".format(den))
        factor = (num / den) ** 2
        update = [factor * self._stencil.solve(self._banded[i], n_i) for i, n_i in enumerate(_nonlinear_terms(phi))]
        return [self.mixing * new + (1.0 - self.mixing) * old for new, old in zip(update, phi)]

    def solve(self, seed=None):
        if seed is None:
            seed = gaussian_triple(self.grid, GS_SEED_AMPLITUDES)
        phi = [np.real(np.asarray(u)).astype(float) for u in seed]
        if max(sup_norm(f) for f in phi) < GS_COLLAPSE_FLOOR:
            raise CollapseError()
        residuals = None
        for iteration in range(1, self.max_iter + 1):
            new = self.sweep(phi)
            peak = max(sup_norm(f) for f in new)
            if peak < GS_COLLAPSE_FLOOR:
                raise CollapseError()
            change = max(sup_norm(a - b) for a, b in zip(new, phi)) / peak
            phi = new
            logger.debug("iteration %d: relative change %.3e", iteration, change)
            if change < self.tol:
                residuals = euler_lagrange_residuals(phi, self.params, self.grid)
                if max(residuals) < GS_RESIDUAL_LIMIT:
                    break
        else:
            raise ConvergenceError("ground state did not converge in {0} iterations (kappa={1})".format(
                self.max_iter, self.params.kappas))
        lowest = min(float(np.min(f)) for f in phi)
        if lowest < GS_NEGATIVE_LIMIT:
            raise NegativePartError("ground state has negative part {0:.3g}".format(lowest))
        logger.info("ground state for kappa=%s converged in %d iterations, residuals %s",
                    self.params.kappas, iteration, ["%.2e" % r for r in residuals])
        return build_result(FieldTriple(*phi, self.grid), self.params, residuals, iteration)


def build_result(Q, p, residuals, iterations):
    c = functionals.conserved(Q, p)
    M = c.mass
    return GroundStateResult(
        Q=Q, params=p, residuals=tuple(residuals), M=M, K=c.kinetic, V=c.potential, E=c.energy,
        M_gs=M, C_GN=4.0 * 5.0 ** -1.25 * M ** -0.5,
        ME_threshold=M * c.energy, MK_threshold=M * c.kinetic,
        J2_min=functionals.weinstein(Q, p).J2, iterations=iterations)


def solve_ground_state(p, g, seed=None, tol=GS_DEFAULT_TOL, max_iter=GS_MAX_ITER, mixing=0.5):
    return GroundStateSolver(p, g, tol=tol, max_iter=max_iter, mixing=mixing).solve(seed)


def verify_pohozaev(r):
    """``(M/M, K/(5M), V/(4M))``; each is ``1`` at a ground state."""
    return (r.M / r.M, r.K / (5.0 * r.M), r.V / (4.0 * r.M))


def pohozaev_holds(r, tol=1e-6):
    return all(abs(x - 1.0) < tol for x in verify_pohozaev(r))


def sharp_constant(r):
    return 4.0 * 5.0 ** -1.25 * r.M_gs ** -0.5


def direct_quotient(r):
    """``V / (M^(1/4) K^(5/4))`` at ``Q``; equals the sharp constant."""
    return r.V / (r.M ** 0.25 * r.K ** 1.25)


def thresholds(r):
    return {'ME_threshold': r.ME_threshold, 'MK_threshold': r.MK_threshold}


def rescale_critical_point(u, p):
    """Map a positive critical point of the Weinstein quotient to the ground-state normalisation.

    With ``alpha = K/(5M)`` and ``beta = 4K/(5V)`` the result is
    ``(beta/alpha) u(x/sqrt(alpha))``, which satisfies ``M : K : V = 1 : 5 : 4``
    and the ground-state system itself.
    """
    M = functionals.mass(u)
    K = functionals.kinetic(u, p)
    V = functionals.potential(u)
    if not V > 0:
        raise ValidationError("critical point must have positive potential energy")
    alpha = K / (5.0 * M)
    beta = 4.0 * K / (5.0 * V)
    lam = 1.0 / math.sqrt(alpha)
    return u.map(lambda ui, i: (beta / alpha) * resample(ui, lam, u.grid))


def _series_start(W0, d, r0):
    c = (W0 - W0 ** 2) / (2.0 * d)
    return [W0 + c * r0 ** 2, 2.0 * c * r0]


def _shoot(W0, d, tol, r_end, r0=1e-4):
    def rhs(r, y):
        return [y[1], y[0] - y[0] ** 2 - (d - 1) / r * y[1]]

    def crossing(r, y):
        return y[0]
    crossing.terminal = True
    crossing.direction = -1

    def turning(r, y):
        return y[1]
    turning.terminal = True
    turning.direction = 1

    return solve_ivp(rhs, (r0, r_end), _series_start(W0, d, r0), method='DOP853', rtol=tol,
                     atol=tol * 1e-6, events=(crossing, turning), dense_output=True)


def shooting_functional(W0, d=RADIAL_DIMENSION, tol=1e-11, r_end=40.0):
    """``+1`` if the trajectory from ``W(0) = W0`` crosses zero, ``-1`` if it turns back."""
    if not W0 > 0:
        raise BracketError("trivial branch W = 0 rejected")
    sol = _shoot(W0, d, tol, r_end)
    return 1 if sol.t_events[0].size else -1


def shooting_scalar(d=RADIAL_DIMENSION, tol=1e-11, grid=None, max_bisections=200):
    """Decaying radial solution of ``W'' + (d-1)/r W' = W - W^2`` by bisection on ``W(0)``.

    Between the undershooting and overshooting trajectories the profile is
    their average up to the radius where they separate; beyond it the
    linear tail ``r^(-(d-1)/2) e^(-r)`` is attached.
    """
    if d != RADIAL_DIMENSION:
        raise ValidationError("the shooting oracle is set up for d = {0}".format(RADIAL_DIMENSION))
    if grid is None:
        grid = make_grid(RADIAL, d, 20.0, 2048)
    r_end = 2.0 * grid.extent
    lo, hi = SHOOTING_BRACKET
    if shooting_functional(lo, d, tol, r_end) != -1 or shooting_functional(hi, d, tol, r_end) != 1:
        raise BracketError("shooting functional does not change sign on [{0}, {1}]".format(lo, hi))
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if shooting_functional(mid, d, tol, r_end) > 0:
            hi = mid
        else:
            lo = mid
    under = _shoot(lo, d, tol, r_end)
    over = _shoot(hi, d, tol, r_end)
    r_stop = min(under.t[-1], over.t[-1])
    r = grid.axis()
    samples = np.linspace(under.t[0], r_stop, 4000)
    w_lo = under.sol(samples)[0]
    w_hi = over.sol(samples)[0]
    w_avg = 0.5 * (w_lo + w_hi)
    split = np.nonzero(np.abs(w_lo - w_hi) > 1e-3 * np.abs(w_avg))[0]
    r_cut = samples[split[0]] if split.size else r_stop
    W = np.zeros_like(r)
    dW = np.zeros_like(r)
    start = _series_start(lo, d, r)
    near = r < under.t[0]
    W[near], dW[near] = start[0][near], start[1][near]
    body = (r >= under.t[0]) & (r <= r_cut)
    y_lo, y_hi = under.sol(r[body]), over.sol(r[body])
    W[body] = 0.5 * (y_lo[0] + y_hi[0])
    dW[body] = 0.5 * (y_lo[1] + y_hi[1])
    tail = r > r_cut
    y_cut = 0.5 * (under.sol(r_cut) + over.sol(r_cut))
    decay = (r_cut / r[tail]) ** ((d - 1) / 2.0) * np.exp(-(r[tail] - r_cut))
    W[tail] = y_cut[0] * decay
    dW[tail] = -W[tail] * (1.0 + (d - 1) / (2.0 * r[tail]))
    W0 = 0.5 * (lo + hi)
    if not (SHOOTING_BRACKET[0] < W0 < SHOOTING_BRACKET[1]):
        raise BracketError("W(0) = {0} at the edge of the bracket".format(W0))
    q = grid.quadrature
    logger.info("shooting oracle: W(0) = %.12f, profile trusted to r = %.2f", W0, r_cut)
    return ScalarProfile(grid=grid, W=W, dW=dW, W0=W0, r_cut=float(r_cut), mass_integral=q(W ** 2),
                         kinetic_integral=q(dW ** 2), cubic_integral=q(W ** 3))


def reduction_triple(profile):
    """``(sqrt(2) W, sqrt(2) W, W)``: the ground state for ``kappa = (1, 1, 2)``."""
    s = math.sqrt(2.0)
    return FieldTriple(s * profile.W, s * profile.W, profile.W, profile.grid)


def reduction_integrals(profile):
    """``(M, K, V)`` of the reduction triple from the oracle's own integrals."""
    return (3.0 * profile.mass_integral, 3.0 * profile.kinetic_integral, 2.0 * profile.cubic_integral)
