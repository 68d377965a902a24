"""Run configuration: a YAML document loaded into frozen dataclasses.

Every section is optional except ``task``, ``grid`` and ``params``; unknown
keys at any level are rejected.
"""
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

import yaml

from src.constants import (CUTOFF_EPS_RANGE, DT_SAFETY, GS_DEFAULT_TOL, GS_MAX_ITER, GS_SEED_AMPLITUDES,
                           MORAWETZ_DIMENSIONS)
from src.errors import ConfigError, ValidationError
from src.FieldTriple import SystemParams
from src.grid import make_grid
from src.Propagator import EvolveConfig

logger = logging.getLogger(__name__)

TASKS = ('groundstate', 'evolve', 'morawetz', 'criterion', 'threshold-sweep', 'covariance')
EVOLVING_TASKS = ('evolve', 'morawetz', 'criterion', 'threshold-sweep')
PROFILES = ('gaussian', 'ground-state', 'random')


@dataclass(frozen=True)
class GridSpec:
    kind: str
    dimension: int
    extent: float
    points: int


@dataclass(frozen=True)
class ParamsSpec:
    kappa1: float
    kappa2: float
    kappa3: float


@dataclass(frozen=True)
class EvolveSpec:
    dt: float
    T: float
    record_every: int = 1
    dt_safety: float = DT_SAFETY
    progress: bool = False


@dataclass(frozen=True)
class InitialSpec:
    profile: str = 'gaussian'
    amplitudes: tuple = (1.0, 1.0, 1.0)
    width: float = 1.0
    center: tuple = None
    momentum: tuple = None
    scale: float = 1.0
    normalize: bool = False


@dataclass(frozen=True)
class GroundStateSpec:
    tol: float = GS_DEFAULT_TOL
    max_iter: int = GS_MAX_ITER
    seed_amplitudes: tuple = GS_SEED_AMPLITUDES
    mixing: float = 0.5


@dataclass(frozen=True)
class MorawetzSpec:
    eps: float
    R0: float
    log_count_J: float = None
    T0: float = None
    delta: float = None


@dataclass(frozen=True)
class CriterionSpec:
    eps: float
    T0: float = None


@dataclass(frozen=True)
class SweepSpec:
    lambda_min: float
    lambda_max: float
    count: int
    workers: int = 1


@dataclass(frozen=True)
class CovarianceSpec:
    xi: tuple
    T: float
    dts: tuple
    kappas: tuple
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    task: str
    grid: object
    params: SystemParams
    seed: int = 0
    output_directory: str = 'output'
    evolve: EvolveConfig = None
    initial: InitialSpec = InitialSpec()
    groundstate: GroundStateSpec = GroundStateSpec()
    morawetz: MorawetzSpec = None
    criterion: CriterionSpec = None
    sweep: SweepSpec = None
    covariance: CovarianceSpec = None


_SECTIONS = {
    'evolve': EvolveSpec,
    'initial': InitialSpec,
    'groundstate': GroundStateSpec,
    'morawetz': MorawetzSpec,
    'criterion': CriterionSpec,
    'sweep': SweepSpec,
    'covariance': CovarianceSpec,
}
_TOP_LEVEL = ('task', 'seed', 'output', 'grid', 'params') + tuple(_SECTIONS)


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _section(data, cls, name):
    if not isinstance(data, dict):
        raise ConfigError("section '{0}' must be a mapping".format(name))
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError("unknown key '{0}.{1}'".format(name, key))
    try:
        return cls(**{key: _freeze(value) for key, value in data.items()})
    except TypeError as exc:
        raise ConfigError("section '{0}': {1}".format(name, exc)) from exc


def parse_config(data, seed=None, out=None, task=None):
    """Validate a parsed YAML mapping and build a :class:`RunConfig`.

    ``seed`` and ``out`` override the document's values. ``task`` fills a
    missing ``task`` key and must agree with a present one.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    for key in data:
        if key not in _TOP_LEVEL:
            raise ConfigError("unknown key '{0}'".format(key))
    if task is not None:
        if data.get('task', task) != task:
            raise ConfigError("subcommand '{0}' does not match the configured task '{1}'".format(task, data['task']))
        data = dict(data, task=task)
    for key in ('task', 'grid', 'params'):
        if key not in data:
            raise ConfigError("missing key '{0}'".format(key))
    task = data['task']
    if task not in TASKS:
        raise ConfigError("unknown task {0!r}; expected one of {1}".format(task, TASKS))
    output = data.get('output') or {}
    if not isinstance(output, dict) or set(output) - {'directory'}:
        raise ConfigError("unknown key under 'output'; only 'output.directory' is allowed")
    grid_spec = _section(data['grid'], GridSpec, 'grid')
    grid = make_grid(grid_spec.kind, grid_spec.dimension, grid_spec.extent, grid_spec.points)
    params_spec = _section(data['params'], ParamsSpec, 'params')
    params = SystemParams(params_spec.kappa1, params_spec.kappa2, params_spec.kappa3)
    sections = {name: _section(data[name], cls, name) for name, cls in _SECTIONS.items() if name in data}
    evolve = None
    if 'evolve' in sections:
        evolve = EvolveConfig(**dataclasses.asdict(sections['evolve']))
    config = RunConfig(
        task=task, grid=grid, params=params,
        seed=int(seed if seed is not None else data.get('seed', 0)),
        output_directory=str(out if out is not None else output.get('directory', 'output')),
        evolve=evolve,
        initial=sections.get('initial', InitialSpec()),
        groundstate=sections.get('groundstate', GroundStateSpec()),
        morawetz=sections.get('morawetz'), criterion=sections.get('criterion'),
        sweep=sections.get('sweep'), covariance=sections.get('covariance'))
    validate(config)
    return config


def _require(config, name):
    if getattr(config, name) is None:
        raise ConfigError("task '{0}' needs a '{1}' section".format(config.task, name))


def validate(config):
    """Cross-field checks that must pass before any numerical work starts."""
    g = config.grid
    task = config.task
    if task in ('groundstate', 'threshold-sweep') and not g.is_radial:
        raise ConfigError("task '{0}' needs the radial grid".format(task))
    if task in ('morawetz', 'covariance') and not (g.is_box and g.dimension in MORAWETZ_DIMENSIONS):
        raise ConfigError("task '{0}' needs a periodic box of dimension {1}".format(task, MORAWETZ_DIMENSIONS))
    if task in EVOLVING_TASKS:
        _require(config, 'evolve')
        config.evolve.validate(g, config.params)
    initial = config.initial
    if initial.profile not in PROFILES:
        raise ConfigError("initial.profile must be one of {0}, got {1!r}".format(PROFILES, initial.profile))
    if initial.profile == 'ground-state' and not g.is_radial:
        raise ConfigError("initial.profile 'ground-state' needs the radial grid")
    if len(initial.amplitudes) != 3:
        raise ConfigError("initial.amplitudes must have three entries")
    for name in ('center', 'momentum'):
        value = getattr(initial, name)
        if value is not None and len(value) != g.dimension:
            raise ConfigError("initial.{0} must have {1} entries".format(name, g.dimension))
    if not initial.width > 0:
        raise ConfigError("initial.width must be positive")
    if len(config.groundstate.seed_amplitudes) != 3:
        raise ConfigError("groundstate.seed_amplitudes must have three entries")
    if task == 'morawetz':
        _require(config, 'morawetz')
        m = config.morawetz
        lo, hi = CUTOFF_EPS_RANGE
        if not lo < m.eps < hi:
            raise ConfigError("morawetz.eps must lie in ({0}, {1})".format(lo, hi))
        if not 0 < m.R0 <= g.extent / 4.0:
            raise ConfigError("morawetz.R0 must lie in (0, {0}]".format(g.extent / 4.0))
    if task == 'criterion':
        _require(config, 'criterion')
        if not 0 < config.criterion.eps < 1:
            raise ConfigError("criterion.eps must lie in (0, 1)")
    if task == 'threshold-sweep':
        _require(config, 'sweep')
        s = config.sweep
        if not (0 < s.lambda_min <= s.lambda_max and s.count >= 1 and s.workers >= 1):
            raise ConfigError("sweep needs 0 < lambda_min <= lambda_max, count >= 1 and workers >= 1")
    if task == 'covariance':
        _require(config, 'covariance')
        c = config.covariance
        if len(c.xi) != g.dimension:
            raise ConfigError("covariance.xi must have {0} entries".format(g.dimension))
        if not c.dts or not c.kappas:
            raise ConfigError("covariance.dts and covariance.kappas must be nonempty")
        for kappas in c.kappas:
            p = SystemParams(*kappas)
            for dt in c.dts:
                EvolveConfig(dt=dt, T=c.T).validate(g, p)
    return config


def load_config(path, seed=None, out=None, task=None):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf8") as file:
            data = yaml.safe_load(file)
    except OSError as exc:
        raise ConfigError("cannot read configuration {0}: {1}".format(path, exc)) from exc
    except yaml.YAMLError as exc:
        raise ConfigError("cannot parse configuration {0}: {1}".format(path, exc)) from exc
    try:
        config = parse_config(data, seed=seed, out=out, task=task)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("invalid configuration {0}: {1}".format(path, exc)) from exc
    logger.info("loaded %s task from %s", config.task, path)
    return config
