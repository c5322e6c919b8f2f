"""Reparametrization of analytic curves by a prescribed speed.

A source maps a parameter jet ``t`` to a dict of named vector jets (the
position and, for curves on surfaces, the surface normal along the
curve).  The new parameter ``u`` satisfies ``du/dt = s(t) = exp(l(t))``
where ``l`` is either given explicitly or integrated from its rate
``dl/dt`` with RK4.  Values on a uniform ``u`` grid are obtained by
Newton inversion of ``u(t)``; jets in ``u`` come from series reversion,
so every derivative is exact up to round-off and the RK4 error in ``l``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import GaugeError
from .jets import Jet
from .numkit import JetCurve, integrate_tabulated

DEFAULT_ORDER = 12


@dataclass
class Reparametrization:
    grid: np.ndarray
    t: np.ndarray
    curves: dict
    length: float
    log_speed: np.ndarray
    evaluate: Callable = field(repr=False)

    def __getitem__(self, key):
        return self.curves[key]


def _closed(jets, tol=1e-8):
    return bool(np.max(np.abs(jets[:5, 0] - jets[:5, -1])) < tol)


def reparametrize(source, t0, t1, samples, *, log_speed=None, log_rate=None,
                  log_speed0=0.0, order=DEFAULT_ORDER, dense_factor=4,
                  closed=None, kind="analytic"):
    """Resample ``source`` on a uniform grid of the new parameter.

    Exactly one of ``log_speed(bundle) -> Jet`` and ``log_rate(bundle) -> Jet``
    must be given; with ``log_rate`` the integration starts from
    ``log_speed0`` at ``t0``.  ``samples`` is the number of intervals of
    the output grid (it has ``samples + 1`` nodes).
    """
    if (log_speed is None) == (log_rate is None):
        raise ValueError("give exactly one of log_speed / log_rate")
    n_dense = dense_factor * samples
    tn = np.linspace(t0, t1, n_dense + 1)
    h = tn[1] - tn[0]
    bundle = source(Jet.variable(tn, order))

    if log_speed is not None:
        ell_series = log_speed(bundle)
    else:
        rate = log_rate(bundle)
        rate_mid = rate[:-1].eval_at(h / 2)
        ell_nodes = integrate_tabulated(rate.value, rate_mid, h, log_speed0)
        ell_series = rate.integ() + ell_nodes
    if not np.all(np.isfinite(ell_series.value)):
        raise GaugeError("speed is not finite along the curve")
    speed = ell_series.exp()
    s_mid = speed[:-1].eval_at(h / 2)
    u_nodes = integrate_tabulated(speed.value, s_mid, h, 0.0)
    arc = speed.integ()
    length = float(u_nodes[-1])

    def invert(u):
        u = np.asarray(u, dtype=float)
        idx = np.clip(np.searchsorted(u_nodes, u, side="right") - 1, 0, n_dense - 1)
        tau = (u - u_nodes[idx]) / speed.value[idx]
        tau = np.clip(tau, -h, 2 * h)
        for _ in range(30):
            f = u_nodes[idx] + arc[idx].eval_at(tau) - u
            step = f / speed[idx].eval_at(tau)
            tau = tau - step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, abs(t1 - t0)):
                break
        return idx, tau

    def evaluate(u, want_order=None):
        """Jets (derivative values) of every bundle entry at new parameters ``u``."""
        idx, tau = invert(u)
        ts = tn[idx] + tau
        b = source(Jet.variable(ts, order))
        if log_speed is not None:
            ell = log_speed(b)
        else:
            rate_here = log_rate(b)
            ell0 = ell_series[idx].eval_at(tau)
            ell = rate_here.integ() + ell0
        s = ell.exp()
        big_u = s.integ()
        big_u.c[0] = 0.0
        t_of_u = big_u.revert()
        out = {}
        for key, jet in b.items():
            d = jet.compose(t_of_u).derivatives()
            if want_order is not None:
                d = d[:want_order + 1]
            out[key] = d
        out["_t"] = ts
        out["_log_speed"] = ell.value
        return out

    grid = np.linspace(0.0, length, samples + 1)
    res = evaluate(grid)
    curves = {}
    for key, d in res.items():
        if key.startswith("_"):
            continue
        is_closed = _closed(d) if closed is None else closed

        def ev(uu, oo, _key=key):
            return evaluate(uu, oo)[_key]
        curves[key] = JetCurve(grid, d, source=kind, evaluator=ev, closed=is_closed)
    return Reparametrization(grid, res["_t"], curves, length, res["_log_speed"], evaluate)
