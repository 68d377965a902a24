"""Command-line front end: ``run.py <task> --config PATH [--out DIR] [--seed N] [--verbose]``.

Exit status is ``0`` on success, ``2`` for invalid input and ``3`` when a
numerical step fails (non-convergence, blow-up).
"""
import argparse
import json
import logging
import math
from pathlib import Path

import numpy as np

from src.config import TASKS, load_config
from src.CutoffCreator import build_cutoff
from src.errors import NumericalError, ValidationError
from src.experiments import (covariance_experiment, criterion_scan, rows_to_csv, schedule, sweep_lambdas,
                             threshold_sweep)
from src.FieldTriple import gaussian_triple, random_smooth_triple
from src.GroundState import direct_quotient, solve_ground_state, verify_pohozaev
from src.Morawetz import averaged_estimate, build_weights, term_series
from src.plotting import plot_profiles, plot_series
from src.Propagator import evolve, rescale_to_E0
from src.Snapshot import Snapshot, write_snapshot

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (tuple, set)):
        return list(value)
    raise TypeError("not serialisable: {0!r}".format(value))


def write_summary(summary, directory):
    path = Path(directory) / "summary.json"
    with open(path, "w", encoding="utf8") as file:
        json.dump(summary, file, indent=2, default=_jsonable)
    logger.info("summary written to %s", path)
    return path


class Application:
    """Runs one configured task and writes its artifacts under ``output_directory``.

    Tasks:

    - ``groundstate``: ground state, thresholds and sharp constant,
    - ``evolve``: Strang evolution with snapshots and conserved series,
    - ``morawetz``: term table and averaged interaction estimate,
    - ``criterion``: scattering-criterion scan and Cauchy defects,
    - ``threshold-sweep``: scaled data classified against the thresholds,
    - ``covariance``: Galilean commutation defects.

    """
    def __init__(self, config):
        self.config = config
        self.out = Path(config.output_directory)
        self.rng = np.random.default_rng(config.seed)
        self.commands = {
            'groundstate': self.groundstate_command,
            'evolve': self.evolve_command,
            'morawetz': self.morawetz_command,
            'criterion': self.criterion_command,
            'threshold-sweep': self.sweep_command,
            'covariance': self.covariance_command,
        }

    def run(self):
        self.out.mkdir(parents=True, exist_ok=True)
        logger.info("running task '%s' into %s", self.config.task, self.out)
        summary = {'task': self.config.task, 'status': 'ok', 'seed': self.config.seed,
                   'kappas': self.config.params.kappas}
        summary.update(self.commands[self.config.task]())
        write_summary(summary, self.out)
        return summary

    def ground_state(self, grid=None):
        gs_cfg = self.config.groundstate
        g = grid or self.config.grid
        seed = gaussian_triple(g, gs_cfg.seed_amplitudes)
        return solve_ground_state(self.config.params, g, seed=seed, tol=gs_cfg.tol,
                                  max_iter=gs_cfg.max_iter, mixing=gs_cfg.mixing)

    def initial_data(self, gs=None, normalize=None):
        init = self.config.initial
        p = self.config.params
        if init.profile == 'ground-state':
            u0 = (gs or self.ground_state()).Q.scaled(init.scale)
        elif init.profile == 'random':
            u0 = random_smooth_triple(self.config.grid, self.rng, scale=init.scale)
        else:
            u0 = gaussian_triple(self.config.grid, init.amplitudes, width=init.width, center=init.center,
                                 momentum=init.momentum).scaled(init.scale)
        if init.normalize if normalize is None else normalize:
            lam, u0 = rescale_to_E0(u0, p)
            logger.info("initial data rescaled to M = E with lambda = %.8g", lam)
        return u0

    def _evolve(self, u0):
        traj = evolve(u0, self.config.evolve, self.config.params, out_dir=self.out)
        rows = traj.conserved_series()
        plot_series(rows, self.out / "series.png")
        return traj, rows

    def groundstate_command(self):
        gs = self.ground_state()
        write_snapshot(Snapshot(0.0, gs.params, gs.Q), self.out / "groundstate.nls3")
        plot_profiles(gs.Q, self.out / "profiles.png")
        ratios = verify_pohozaev(gs)
        return {'M_gs': gs.M_gs, 'K': gs.K, 'V': gs.V, 'E': gs.E, 'C_GN': gs.C_GN,
                'C_GN_direct': direct_quotient(gs), 'ME_threshold': gs.ME_threshold,
                'MK_threshold': gs.MK_threshold, 'weinstein_J2': gs.J2_min,
                'pohozaev_ratios': {'M/M': ratios[0], 'K/5M': ratios[1], 'V/4M': ratios[2]},
                'residuals': gs.residuals, 'iterations': gs.iterations}

    def evolve_command(self):
        traj, rows = self._evolve(self.initial_data())
        first, last = rows[0], rows[-1]
        return {'steps': self.config.evolve.steps, 'records': len(traj), 'T': traj.times[-1],
                'initial': {k: first[k] for k in ('M', 'K', 'V', 'E')},
                'final': {k: last[k] for k in ('M', 'K', 'V', 'E')},
                'mass_drift': abs(last['M'] - first['M']) / max(abs(first['M']), 1e-300),
                'energy_drift': abs(last['E'] - first['E']) / max(abs(first['E']), 1e-300)}

    def morawetz_command(self):
        m = self.config.morawetz
        p = self.config.params
        g = self.config.grid
        traj, _ = self._evolve(self.initial_data())
        weights = build_weights(build_cutoff(m.eps), m.R0, g)
        terms = term_series(traj, weights, p)
        rows_to_csv(terms, self.out / "terms.csv")
        plan = schedule(m.eps, m.R0, traj.span, max_radius=g.extent / 2.0)
        J = m.log_count_J if m.log_count_J is not None else plan.log_count_J
        T0 = m.T0 if m.T0 is not None else min(plan.T0, traj.span)
        if T0 > traj.span:
            logger.warning("morawetz.T0 clamped to the trajectory span %.4g", traj.span)
            T0 = traj.span
        report = averaged_estimate(traj, m.R0, J, T0, m.eps, p, delta=m.delta)
        report.to_csv(self.out / "morawetz.csv")
        checks = [abs(r['sum'] - r['dM/dt']) / max(abs(r['dM/dt']), 1e-300)
                  for r in terms if not math.isnan(r['dM/dt'])]
        return {'estimate': report.summary(), 'max_dMdt_relative_error': max(checks) if checks else None,
                'min_D_plus_F': min(r['D+F'] for r in terms), 'min_C_plus_E': min(r['C+E'] for r in terms),
                'max_edge_mass': max(r['edge_mass'] for r in terms)}

    def criterion_command(self):
        c = self.config.criterion
        traj, _ = self._evolve(self.initial_data())
        T0 = c.T0
        if T0 is None:
            T0 = schedule(c.eps, 1.0, traj.span).T0
        report = criterion_scan(traj, c.eps, T0, p=self.config.params)
        report.to_csv(self.out / "criterion.csv")
        return {'criterion': report.summary()}

    def sweep_command(self):
        s = self.config.sweep
        gs = self.ground_state()
        base = self.initial_data(gs, normalize=False)
        rows = threshold_sweep(base, sweep_lambdas(s.lambda_min, s.lambda_max, s.count), self.config.params, gs,
                               self.config.evolve, workers=s.workers, normalize=self.config.initial.normalize,
                               progress=self.config.evolve.progress)
        rows_to_csv(rows, self.out / "sweep.csv")
        return {'ME_threshold': gs.ME_threshold, 'MK_threshold': gs.MK_threshold,
                'labels': {str(r.lam): r.label for r in rows},
                'blow_up': [r.lam for r in rows if r.blow_up]}

    def covariance_command(self):
        c = self.config.covariance
        rows = covariance_experiment(self.initial_data(), c.xi, c.T, c.dts, c.kappas, workers=c.workers)
        rows_to_csv(rows, self.out / "covariance.csv")
        return {'rows': [{'kappas': r.kappas, 'dt': r.dt, 'defect': r.defect, 'mass_resonant': r.mass_resonant}
                         for r in rows]}


def build_parser():
    parser = argparse.ArgumentParser(prog="run.py", description="Three-wave NLS numerical laboratory.")
    parser.add_argument("task", choices=TASKS, help="task to run")
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    parser.add_argument("--seed", type=int, default=None, help="random seed (overrides seed)")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    app = None
    try:
        config = load_config(args.config, seed=args.seed, out=args.out, task=args.task)
        app = Application(config)
        app.run()
    except ValidationError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID
    except NumericalError as exc:
        logger.error("%s", exc)
        if app is not None:
            write_summary({'task': args.task, 'status': 'failed', 'error': str(exc),
                           'time': getattr(exc, 'time', None)}, app.out)
        return EXIT_NUMERICAL
    return EXIT_OK
