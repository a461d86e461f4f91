"""Observables along trajectories and timing of transfer / entanglement events."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import approx_large_hopping, approx_small_hopping, evolve
from .entanglement import concurrence, reduce_to_atom_pair
from .model import (
    ATOMIC,
    PHOTONIC,
    SystemParams,
    basis_index,
    basis_state,
    symmetric_photonic_state,
)

__all__ = [
    "photonic_probability",
    "atomic_probability",
    "site_populations",
    "TimeSeries",
    "time_series",
    "TransferEvent",
    "find_max_concurrence_times",
    "transfer_fidelity",
    "SCENARIOS",
    "predicted_transfer_times",
    "excitation_transfer_xi",
    "run_transfer_scenario",
]

TIME_TOL = 1e-9

PHOTON_TRANSFER = "photon-transfer"
EXCITATION_TRANSFER = "excitation-transfer"
MAX_ENTANGLEMENT = "max-entanglement"


def photonic_probability(state):
    """``P_c = sum_i |C_i|^2``."""
    state = np.asarray(state)
    return np.sum(np.abs(state[..., 0::2]) ** 2, axis=-1)


def atomic_probability(state):
    """``P_a = sum_i |A_i|^2``."""
    state = np.asarray(state)
    return np.sum(np.abs(state[..., 1::2]) ** 2, axis=-1)


def site_populations(state):
    """Per-site ``(|C_i|^2, |A_i|^2)``, shape ``(..., n, 2)``."""
    state = np.asarray(state)
    return (np.abs(state) ** 2).reshape(state.shape[:-1] + (state.shape[-1] // 2, 2))


_PROPAGATORS = {
    "exact": evolve,
    "large-hopping": approx_large_hopping,
    "small-hopping": approx_small_hopping,
}


@dataclass
class TimeSeries:
    """Sampled trajectory: the states plus named observable columns."""

    times: np.ndarray
    states: np.ndarray
    mode: str = "exact"
    columns: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.states.shape[-1] // 2


def time_series(params, initial, times, observables=("probabilities",), mode="exact"):
    """Evolve ``initial`` over ``times`` and collect observables.

    ``observables`` may contain ``"populations"``, ``"probabilities"`` and
    ``"concurrence:i,j"`` entries.  ``mode`` selects the exact propagator or
    one of the asymptotic approximations (``"large-hopping"``,
    ``"small-hopping"``); approximate runs also record the state norm.
    """
    try:
        propagate = _PROPAGATORS[mode]
    except KeyError:
        raise ValueError(f"unknown evolution mode {mode!r}; choose from {sorted(_PROPAGATORS)}") from None
    times = np.asarray(times, dtype=float)
    states = propagate(params, initial, times)
    series = TimeSeries(times=times, states=states, mode=mode)

    for obs in observables:
        if obs == "populations":
            pops = site_populations(states)
            for i in range(params.n):
                series.columns[f"popC_{i}"] = pops[:, i, 0]
                series.columns[f"popA_{i}"] = pops[:, i, 1]
        elif obs == "probabilities":
            series.columns["P_c"] = photonic_probability(states)
            series.columns["P_a"] = atomic_probability(states)
        elif obs.startswith("concurrence:"):
            i, j = _parse_pair(obs.split(":", 1)[1])
            rho = reduce_to_atom_pair(states, i, j)
            if mode != "exact":
                # approximations are not normalized; report concurrence of the normalized state
                rho = rho / np.trace(rho, axis1=-2, axis2=-1)[:, None, None]
            series.columns[f"concurrence_{i}_{j}"] = concurrence(rho)
        else:
            raise ValueError(f"unknown observable {obs!r}")
    if mode != "exact":
        series.columns["norm"] = np.linalg.norm(states, axis=-1)
    return series


def _parse_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"atom pair must look like 'i,j', got {text!r}")
    return int(parts[0]), int(parts[1])


@dataclass(frozen=True)
class TransferEvent:
    time: float
    fidelity: float
    kind: str
    source: object = None
    target: object = None


def _concurrence_at(params, initial, pair, t):
    return concurrence(reduce_to_atom_pair(evolve(params, initial, t), *pair))


def find_max_concurrence_times(params, initial, pair=(0, 1), window=10.0, count=1, step=None):
    """Local maxima of the pair concurrence in a time window.

    The concurrence is sampled on a uniform grid, every strict interior local
    maximum is bracketed by its neighbours and refined by golden-section
    search.  ``window`` is either an end time (start 0) or ``(start, end)``.
    An empty list means no maximum was found.
    """
    start, end = (0.0, float(window)) if np.isscalar(window) else map(float, window)
    if not end > start:
        raise ValueError(f"empty time window ({start}, {end})")
    if count < 1:
        raise ValueError("count must be >= 1")
    if step is None:
        fastest = math.sqrt(1.0 + (params.xi * (params.n - 1)) ** 2)
        step = min(0.01, math.pi / (50.0 * fastest))

    m = max(int(math.ceil((end - start) / step)), 2)
    grid = np.linspace(start, end, m + 1)
    values = _concurrence_at(params, initial, pair, grid)

    events = []
    for k in range(1, m):
        if not (values[k] > values[k - 1] and values[k] > values[k + 1]):
            continue
        res = minimize_scalar(
            lambda t: -_concurrence_at(params, initial, pair, t),
            bracket=(grid[k - 1], grid[k], grid[k + 1]),
            method="golden",
            options={"xtol": TIME_TOL / (2.0 * max(abs(grid[k]), 1.0))},
        )
        events.append(TransferEvent(float(res.x), float(-res.fun), MAX_ENTANGLEMENT, source=pair[0], target=pair[1]))
        if len(events) == count:
            break
    return events


def _resolve_target(target):
    if isinstance(target, (int, np.integer)):
        return int(target)
    site, kind = target
    return basis_index(site, kind)


def transfer_fidelity(params, initial, target, t):
    """Population of a site basis state after evolving for ``t``.

    ``target`` is a flat manifold index or a ``(site, kind)`` pair.
    """
    return np.abs(evolve(params, initial, t)[..., _resolve_target(target)]) ** 2


SCENARIOS = (
    "n2-photon-transfer",
    "n3-photon-transfer",
    "n2-max-entanglement",
    "n3-excitation-transfer",
)


def excitation_transfer_xi(k, l):
    """Hopping ``(2l+1)/(3k)`` that moves atom 0's excitation to atoms 1 and 2 at ``t = k pi``."""
    if k == 0:
        raise ValueError("k must be non-zero")
    return (2 * l + 1) / (3 * k)


def predicted_transfer_times(xi, scenario, count=5, k_max=1000):
    """Analytic event times for a named scenario.

    ``n2-photon-transfer``: ``(2k+1) pi / (4 xi)``; ``n3-photon-transfer``:
    ``(2k+1) pi / (6 xi)``; ``n2-max-entanglement``:
    ``(2k+1) pi / (2 sqrt(1+xi^2))``; each for ``k = 0..count-1``.
    ``n3-excitation-transfer``: the times ``k pi`` (``1 <= k <= k_max``) for
    which ``xi = (2l+1)/(3k)`` with integer ``l >= 0``, at most ``count``.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    odd = 2 * np.arange(count) + 1
    if scenario == "n2-max-entanglement":
        return list(odd * math.pi / (2.0 * math.sqrt(1.0 + xi * xi)))
    if not xi > 0:
        raise ValueError(f"{scenario} needs xi > 0, got {xi}")
    if scenario == "n2-photon-transfer":
        return list(odd * math.pi / (4.0 * xi))
    if scenario == "n3-photon-transfer":
        return list(odd * math.pi / (6.0 * xi))

    times = []
    for k in range(1, k_max + 1):
        l2 = 3.0 * k * xi - 1.0  # = 2l
        l = round(l2 / 2.0)
        if l >= 0 and abs(l2 - 2 * l) < 1e-9:
            times.append(k * math.pi)
            if len(times) == count:
                break
    return times


def run_transfer_scenario(scenario, xi=None, k=None, l=None, count=5):
    """Evaluate exact fidelities at the analytic times of a scenario.

    For the photon-transfer and entanglement scenarios ``xi`` is required and
    ``k`` (if given) selects a single time index.  For
    ``n3-excitation-transfer`` the pair ``(k, l)`` fixes ``xi`` and ``t = k pi``.

    Returns
    -------
    params : SystemParams
    events : list of TransferEvent
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")

    if scenario == "n3-excitation-transfer":
        if k is None:
            raise ValueError("n3-excitation-transfer needs k (and optionally l, default 0)")
        xi = excitation_transfer_xi(k, 0 if l is None else l)
        params = SystemParams(3, xi)
        t = k * math.pi
        psi = evolve(params, basis_state(3, 0, ATOMIC), t)
        events = [
            TransferEvent(t, float(abs(psi[basis_index(site, ATOMIC)]) ** 2), EXCITATION_TRANSFER,
                          source=(0, ATOMIC), target=(site, ATOMIC))
            for site in (1, 2)
        ]
        return params, events

    if xi is None:
        raise ValueError(f"{scenario} needs xi")
    times = predicted_transfer_times(xi, scenario, count=count if k is None else k + 1)
    if k is not None:
        times = times[k:]

    if scenario == "n2-max-entanglement":
        params = SystemParams(2, xi)
        initial = symmetric_photonic_state(2)
        values = _concurrence_at(params, initial, (0, 1), np.asarray(times))
        return params, [TransferEvent(t, float(c), MAX_ENTANGLEMENT, source=0, target=1) for t, c in zip(times, values)]

    n = 2 if scenario == "n2-photon-transfer" else 3
    params = SystemParams(n, xi)
    initial = basis_state(n, 0, PHOTONIC)
    events = []
    for t in times:
        pops = site_populations(evolve(params, initial, t))
        for site in range(1, n):
            events.append(TransferEvent(t, float(pops[site, 0]), PHOTON_TRANSFER,
                                        source=(0, PHOTONIC), target=(site, PHOTONIC)))
    return params, events
