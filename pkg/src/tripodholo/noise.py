"""Correlated Gaussian parametric noise for the drive amplitudes.

Each axis is an independent stationary Gaussian chain with autocovariance
sigma^2 exp(-2 |dt| / tau), whose integral over all lags is exactly
tau sigma^2: the white-noise intensity the error theory uses. Realizations
are reproducible: every (seed, realization index, axis) triple owns its own
generator stream, so results never depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

PINNING_MODES = ("none", "endpoint-ramp", "exact-bridge")
#: Endpoint ramps span this many correlation times.
RAMP_WIDTH_TAUS = 5.0


def _as_triple(v) -> tuple[float, float, float]:
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size == 1:
        arr = np.repeat(arr, 3)
    if arr.size != 3:
        raise ValueError("expected a scalar or a 3-vector")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-axis noise strength and correlation time, pinning mode, and seed."""

    sigma: tuple[float, float, float]
    tau: tuple[float, float, float]
    pinning: str = "endpoint-ramp"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sigma", _as_triple(self.sigma))
        object.__setattr__(self, "tau", _as_triple(self.tau))
        if any(s < 0 for s in self.sigma):
            raise ValueError("sigma components must be nonnegative")
        if any(t <= 0 for t in self.tau):
            raise ValueError("tau components must be positive")
        if self.pinning not in PINNING_MODES:
            raise ValueError(f"pinning must be one of {PINNING_MODES}")

    @property
    def isotropic(self) -> bool:
        """True when all axes carry the same white-noise intensity tau*sigma^2."""
        w = [t * s * s for t, s in zip(self.tau, self.sigma)]
        return max(w) - min(w) <= 1e-12 * max(max(w), 1e-300)

    @classmethod
    def uniform(cls, sigma: float, tau: float, pinning: str = "endpoint-ramp",
                seed: int = 0) -> "NoiseSpec":
        return cls(sigma=(sigma,) * 3, tau=(tau,) * 3, pinning=pinning, seed=seed)


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    """One sampled perturbation dx(t) on a physical-time grid 0..T."""

    grid: np.ndarray
    dx: np.ndarray
    spec: NoiseSpec
    index: int

    def to_csv(self, path) -> None:
        """Write (t, dx1, dx2, dx3) rows for inspection."""
        lines = ["t,dx1,dx2,dx3"]
        for t, row in zip(self.grid, self.dx):
            lines.append(",".join(repr(float(v)) for v in (t, *row)))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def sample_realization(spec: NoiseSpec, grid, index: int) -> NoiseRealization:
    """Draw realization `index` of the spec on a uniform time grid.

    The chain update is exact for any step: dx(t+dt) = a dx(t) +
    sigma sqrt(1-a^2) xi with a = exp(-2 dt / tau), started stationary
    (or at zero for the bridge). The grid must resolve the correlation,
    dt <= tau/10 on every driven axis.
    """
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("grid must be a 1-d array with at least two points")
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0.0):
        raise ValueError("grid must be uniform")
    driven = [i for i in range(3) if spec.sigma[i] > 0.0]
    for i in driven:
        if dt > spec.tau[i] / 10.0 + 1e-15:
            raise ValueError(
                f"grid spacing {dt:g} too coarse for tau[{i}] = {spec.tau[i]:g}; "
                "need dt <= tau/10"
            )
    n = t.size
    total = t[-1]
    dx = np.zeros((n, 3))
    for i in driven:
        rng = np.random.default_rng([spec.seed, index, i])
        sigma, tau = spec.sigma[i], spec.tau[i]
        a = np.exp(-2.0 * dt / tau)
        z = rng.standard_normal(n)
        if spec.pinning == "exact-bridge":
            w = np.empty(n)
            w[0] = 0.0
            w[1:] = sigma * np.sqrt(1.0 - a * a) * z[1:]
            series = lfilter([1.0], [1.0, -a], w)
            # Condition the zero-started chain on ending at zero: subtract
            # the Gaussian projection onto the final value.
            k = np.arange(n)
            m = n - 1
            weight = (a ** (m - k) - a ** (m + k)) / (1.0 - a ** (2 * m))
            series = series - series[-1] * weight
        else:
            w = np.empty(n)
            w[0] = sigma * z[0]
            w[1:] = sigma * np.sqrt(1.0 - a * a) * z[1:]
            series = lfilter([1.0], [1.0, -a], w)
            if spec.pinning == "endpoint-ramp":
                series = series * _ramp(t, min(RAMP_WIDTH_TAUS * tau, 0.5 * total))
        dx[:, i] = series
    return NoiseRealization(grid=t.copy(), dx=dx, spec=spec, index=int(index))


def _ramp(t: np.ndarray, width: float, total: float | None = None) -> np.ndarray:
    """Cosine taper: 0 at both ends, 1 in the interior, C^1 throughout."""
    if total is None:
        total = t[-1]
    out = np.ones_like(t)
    head = t < width
    out[head] = 0.5 * (1.0 - np.cos(np.pi * t[head] / width))
    tail = t > total - width
    out[tail] = 0.5 * (1.0 - np.cos(np.pi * (total - t[tail]) / width))
    return out


def stationary_slice(spec: NoiseSpec, grid) -> slice:
    """Index range of the grid that excludes the pinning ramps."""
    t = np.asarray(grid, dtype=float)
    if spec.pinning != "endpoint-ramp":
        return slice(0, t.size)
    width = RAMP_WIDTH_TAUS * max(spec.tau)
    dt = t[1] - t[0]
    k = int(np.ceil(width / dt)) + 1
    if 2 * k >= t.size:
        raise ValueError("grid too short to contain a stationary region")
    return slice(k, t.size - k)


def empirical_autocovariance(realizations, axis: int, lags):
    """Ensemble lag-covariance estimates with standard errors.

    axis is 1-based (matching the drive components). Each realization
    contributes an unbiased zero-mean estimate over its stationary interior;
    the returned standard errors are across the ensemble.
    """
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    if not realizations:
        raise ValueError("need at least one realization")
    col = axis - 1
    first = realizations[0]
    t = first.grid
    dt = t[1] - t[0]
    interior = stationary_slice(first.spec, t)
    lag_steps = [int(round(float(lag) / dt)) for lag in np.atleast_1d(lags)]
    span = interior.stop - interior.start
    if max(lag_steps) >= span:
        raise ValueError("lag exceeds the stationary region")
    per_real = np.empty((len(realizations), len(lag_steps)))
    for j, real in enumerate(realizations):
        x = real.dx[interior, col]
        for q, k in enumerate(lag_steps):
            if k == 0:
                per_real[j, q] = np.mean(x * x)
            else:
                per_real[j, q] = np.mean(x[:-k] * x[k:])
    estimates = per_real.mean(axis=0)
    if len(realizations) > 1:
        stderr = per_real.std(axis=0, ddof=1) / np.sqrt(len(realizations))
    else:
        stderr = np.full(len(lag_steps), np.nan)
    return estimates, stderr


def scaling_params(epsilon: float, p: float, q: float, tau0: float,
                   sigma0: float) -> tuple[float, float]:
    """Noise parameters scaled with the adiabatic parameter:
    tau = tau0 eps^p, sigma = sigma0 eps^q."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    if p <= 0.0 or q <= 0.0:
        raise ValueError("p and q must be positive")
    if tau0 <= 0.0:
        raise ValueError("tau0 must be positive")
    if sigma0 < 0.0:
        raise ValueError("sigma0 must be nonnegative")
    return (tau0 * epsilon ** p, sigma0 * epsilon ** q)


def predicted_exponent(p: float, q: float) -> float:
    """Predicted power of the mean angle error: Delta = O(eps^(p/2 + q + 1/2))."""
    return 0.5 * p + q + 0.5
