"""Figures written next to run outputs (no display needed)."""
import logging

import numpy as np
from matplotlib.figure import Figure

logger = logging.getLogger(__name__)

COMPONENT_LABELS = ("$u_1$", "$u_2$", "$u_3$")


def plot_series(rows, path):
    """Conserved quantities and peak modulus against time."""
    t = np.array([row['t'] for row in rows])
    fig = Figure(figsize=(8, 6))
    ax_top, ax_bottom = fig.subplots(2, 1, sharex=True)
    for key in ('M', 'K', 'V', 'E'):
        ax_top.plot(t, [row[key] for row in rows], label=key)
    ax_top.legend(loc='best')
    ax_top.set_ylabel("functional")
    ax_bottom.semilogy(t, [max(row['max_modulus'], 1e-300) for row in rows], color='k')
    ax_bottom.set_ylabel("max |u|")
    ax_bottom.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path)
    logger.info("time series figure written to %s", path)


def plot_profiles(fields, path):
    """Moduli of the three components along the radius (radial grids) or the first axis (boxes)."""
    g = fields.grid
    r = g.axis()
    fig = Figure(figsize=(7, 4))
    ax = fig.subplots()
    for label, u in zip(COMPONENT_LABELS, fields):
        line = np.abs(u) if g.is_radial else np.abs(u[(slice(None),) + (g.points // 2,) * (g.dimension - 1)])
        ax.plot(r, line, label=label)
    ax.set_xlabel("r" if g.is_radial else "$x_1$")
    ax.legend(loc='best')
    fig.tight_layout()
    fig.savefig(path)
    logger.info("profile figure written to %s", path)
