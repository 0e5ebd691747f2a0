"""Transfer-time extraction, parameter sweeps and scaling fits."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .chain_model import ChainSpec, ProtocolKind, protocol_chain
from .errors import DegenerateSamples, QSTError
from .fidelity import TransferSetup, fidelity_series
from .spectral import RabiMode, SpectralDecomposition, diagonalize, rabi_gap

DEFAULT_THRESHOLD = 0.97
COARSE_DIVISOR = 10
FINE_DIVISOR = 200
# coarse samples within this distance of the threshold get a fine re-scan
CANDIDATE_MARGIN = 0.05
CHUNK = 1 << 14
BISECTION_TOL = 1e-10
# coarse peaks this close to the best coarse sample are polished when locating the maximum
PEAK_POLISH_MARGIN = 0.02


@dataclass(frozen=True)
class TransferResult:
    tau: float
    fbar_at_tau: float
    threshold: float
    rabi_gap: float
    tau_predicted: float
    reached: bool
    fbar_max: float = math.nan
    t_max: float = math.nan
    tau_peak: float = math.nan
    fbar_peak: float = math.nan


def predicted_gap(decomp: SpectralDecomposition, setup: TransferSetup) -> float:
    """Rabi gap matching the setup, or NaN when none can be extracted."""
    try:
        if setup.qubits == 1:
            return rabi_gap(decomp, RabiMode.BI_LOCAL_1Q)
        if decomp.n_sites % 6 == 0:
            return rabi_gap(decomp, RabiMode.SEXTET_N6N)
    except QSTError:
        pass
    return math.nan


def default_t_max(delta_omega: float, n_sites: int) -> float:
    if math.isfinite(delta_omega) and delta_omega > 0:
        return 20.0 * math.pi / delta_omega
    return 1e3 * n_sites


def _first_crossing(decomp, setup, threshold, t_lo, t_hi, fine):
    times = np.arange(t_lo, t_hi + 0.5 * fine, fine)
    vals = fidelity_series(decomp, setup, times)
    above = np.flatnonzero(vals >= threshold)
    if above.size == 0:
        return None, float(vals.max())
    j = above[0]
    if j == 0:
        return (float(times[0]), float(vals[0])), float(vals.max())
    lo, hi, f_hi = times[j - 1], times[j], vals[j]
    while hi - lo > BISECTION_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        f_mid = fidelity_series(decomp, setup, [mid])[0]
        if f_mid >= threshold:
            hi, f_hi = mid, f_mid
        else:
            lo = mid
    return (float(hi), float(f_hi)), float(vals.max())


def _peak_after(decomp, setup, t_start, coarse):
    """Largest fidelity on ``[t_start, 2 t_start]``: the first Rabi maximum after the crossing.

    Every coarse local maximum close to the best coarse sample is polished with
    a bounded scalar maximization, since neighbouring fast peaks near the top of
    a Rabi envelope differ by far less than the coarse sampling error.
    """
    t_end = max(2.0 * t_start, t_start + 2.0 * coarse)
    times = np.arange(t_start, t_end + 0.5 * coarse, coarse)
    vals = np.concatenate(
        [fidelity_series(decomp, setup, times[i : i + CHUNK]) for i in range(0, times.size, CHUNK)]
    )
    padded = np.concatenate(([-np.inf], vals, [-np.inf]))
    is_peak = (vals >= padded[:-2]) & (vals >= padded[2:])
    candidates = np.flatnonzero(is_peak & (vals >= vals.max() - PEAK_POLISH_MARGIN))

    def neg(t):
        return -fidelity_series(decomp, setup, [t])[0]

    best_t, best_f = float(times[vals.argmax()]), float(vals.max())
    for i in candidates:
        lo, hi = max(t_start, times[i] - coarse), min(t_end, times[i] + coarse)
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-9})
        if -res.fun > best_f:
            best_t, best_f = float(res.x), float(-res.fun)
    return best_t, best_f


def find_transfer_time(
    chain: ChainSpec,
    setup: TransferSetup | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    t_max: float | None = None,
    decomp: SpectralDecomposition | None = None,
) -> TransferResult:
    """First time the average fidelity reaches ``threshold``.

    The fidelity is sampled on a coarse grid of step ``pi / (10 eps_max)``;
    every coarse sample within ``CANDIDATE_MARGIN`` of the threshold is
    re-scanned on its two neighbouring intervals with step ``pi / (200
    eps_max)``, and the first fine crossing is bisected.  ``tau_peak`` is the
    time of largest fidelity on ``[tau, 2 tau]``, which brackets the first
    Rabi maximum of a two-level envelope.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    decomp = diagonalize(chain) if decomp is None else decomp
    setup = TransferSetup.default(chain.n_sites, 1) if setup is None else setup
    setup.check(chain.n_sites)

    gap = predicted_gap(decomp, setup)
    tau_pred = math.pi / gap if math.isfinite(gap) and gap > 0 else math.nan
    if t_max is None:
        t_max = default_t_max(gap, chain.n_sites)
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")

    eps_max = float(np.abs(decomp.eigenvalues).max()) or 1.0
    coarse = math.pi / (COARSE_DIVISOR * eps_max)
    fine = math.pi / (FINE_DIVISOR * eps_max)
    n_coarse = int(math.floor(t_max / coarse)) + 1
    best = -math.inf

    for start in range(0, n_coarse, CHUNK):
        idx = np.arange(start, min(start + CHUNK, n_coarse))
        times = idx * coarse
        vals = fidelity_series(decomp, setup, times)
        best = max(best, float(vals.max()))
        for i in np.flatnonzero(vals >= threshold - CANDIDATE_MARGIN):
            t_lo = max(0.0, times[i] - coarse)
            t_hi = min(t_max, times[i] + coarse)
            hit, local_best = _first_crossing(decomp, setup, threshold, t_lo, t_hi, fine)
            best = max(best, local_best)
            if hit is not None:
                tau_peak, fbar_peak = _peak_after(decomp, setup, hit[0], coarse)
                return TransferResult(
                    tau=hit[0],
                    fbar_at_tau=hit[1],
                    threshold=threshold,
                    rabi_gap=gap,
                    tau_predicted=tau_pred,
                    reached=True,
                    fbar_max=max(best, fbar_peak),
                    t_max=t_max,
                    tau_peak=tau_peak,
                    fbar_peak=fbar_peak,
                )
    return TransferResult(
        tau=math.nan,
        fbar_at_tau=math.nan,
        threshold=threshold,
        rabi_gap=gap,
        tau_predicted=tau_pred,
        reached=False,
        fbar_max=best,
        t_max=t_max,
    )


def _sweep_point(args):
    kind, n, xi, threshold, t_max = args
    chain = protocol_chain(kind, n, xi)
    return find_transfer_time(chain, TransferSetup.default(n, kind.qubits), threshold, t_max)


def sweep(
    kind,
    n_list,
    xi_list,
    threshold: float = DEFAULT_THRESHOLD,
    t_max: float | None = None,
    jobs: int = 1,
) -> dict:
    """Transfer times on the ``n_list x xi_list`` grid, keyed by ``(N, xi)`` in grid order."""
    kind = ProtocolKind.parse(kind)
    keys = [(int(n), float(xi)) for n in n_list for xi in xi_list]
    tasks = [(kind, n, xi, threshold, t_max) for n, xi in keys]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(task) for task in tasks]
    return dict(zip(keys, results))


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float
    samples: tuple = field(default=())
    n_excluded: int = 0

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "n_samples": len(self.samples),
            "n_excluded": self.n_excluded,
        }


def _line_fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), min(max(r2, 0.0), 1.0)


def _clean(samples):
    samples = tuple((float(x), float(t)) for x, t in samples)
    if len(samples) < 3:
        raise DegenerateSamples(f"need at least 3 samples, got {len(samples)}")
    x = np.array([s[0] for s in samples])
    y = np.array([s[1] for s in samples])
    if np.unique(x).size < 2:
        raise DegenerateSamples("all samples share the same abscissa")
    if np.any(y <= 0):
        raise ValueError("transfer times must be positive")
    return samples, x, y


def fit_power_law(samples, n_excluded: int = 0) -> ScalingFit:
    """Least-squares ``tau = prefactor * x**exponent`` on log-log axes."""
    samples, x, y = _clean(samples)
    if np.any(x <= 0):
        raise ValueError("power-law abscissae must be positive")
    slope, intercept, r2 = _line_fit(np.log(x), np.log(y))
    return ScalingFit(slope, math.exp(intercept), r2, samples, n_excluded)


def fit_exponential(samples, n_excluded: int = 0) -> ScalingFit:
    """Least-squares ``tau = prefactor * exp(exponent * x)`` (straight line of log tau vs x)."""
    samples, x, y = _clean(samples)
    slope, intercept, r2 = _line_fit(x, np.log(y))
    return ScalingFit(slope, math.exp(intercept), r2, samples, n_excluded)


def fit_sweep(results: dict, against: str = "xi", model: str = "power") -> ScalingFit:
    """Fit transfer times of a sweep against ``N`` or ``xi``; unreached points are excluded."""
    pos = {"n": 0, "xi": 1}[against.lower()]
    reached = [(key[pos], r.tau) for key, r in results.items() if r.reached]
    excluded = len(results) - len(reached)
    fitter = {"power": fit_power_law, "exponential": fit_exponential}[model]
    return fitter(reached, n_excluded=excluded)


def scaling_exponent_1q(kind, n_sites: int, xi_list, threshold: float = DEFAULT_THRESHOLD, jobs: int = 1) -> ScalingFit:
    """Power-law exponent of the 1-qubit transfer time against the perturbation strength."""
    kind = ProtocolKind.parse(kind)
    if kind not in (ProtocolKind.WEAK_EDGE_1Q, ProtocolKind.BARRIER_NN_1Q):
        raise ValueError(f"{kind.value} has no power-law dependence on xi")
    return fit_sweep(sweep(kind, [n_sites], xi_list, threshold, jobs=jobs), against="xi")
