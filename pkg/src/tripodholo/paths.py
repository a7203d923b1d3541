"""Control-path families: the driving curves x(t) in parameter space.

A path is described by three profiles theta(s), phi(s), r(s) of normalized
time s in [0, 1]. phi is stored unwrapped (continuous), so the winding number
(phi(1) - phi(0)) / 2pi is an exact integer for valid paths. The unit vector
must close, x^(0) = x^(1); the norm r may end anywhere positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

_CLOSURE_TOL = 1e-10
_FD_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class Profile:
    """Scalar function of normalized time with an optional analytic derivative.

    Both callables must accept numpy arrays. When no derivative is supplied,
    a central difference with step 1e-6 is used.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    dfn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, s):
        return self.fn(np.asarray(s, dtype=float))

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        if self.dfn is not None:
            return self.dfn(s)
        h = _FD_STEP
        return (self.fn(s + h) - self.fn(s - h)) / (2.0 * h)


def constant_profile(value: float) -> Profile:
    v = float(value)
    return Profile(fn=lambda s: np.full_like(np.asarray(s, dtype=float), v),
                   dfn=lambda s: np.zeros_like(np.asarray(s, dtype=float)))


@dataclass(frozen=True)
class Harmonics:
    """Coefficients offset + slope*s + sum_k sin_k sin(2 pi k s) + cos_k cos(2 pi k s)."""

    offset: float
    slope: float = 0.0
    sin: tuple[float, ...] = ()
    cos: tuple[float, ...] = ()

    def value(self, s):
        s = np.asarray(s, dtype=float)
        out = self.offset + self.slope * s
        for k, a in enumerate(self.sin, start=1):
            out = out + a * np.sin(2.0 * np.pi * k * s)
        for k, a in enumerate(self.cos, start=1):
            out = out + a * np.cos(2.0 * np.pi * k * s)
        return out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full_like(s, self.slope)
        for k, a in enumerate(self.sin, start=1):
            out = out + a * 2.0 * np.pi * k * np.cos(2.0 * np.pi * k * s)
        for k, a in enumerate(self.cos, start=1):
            out = out - a * 2.0 * np.pi * k * np.sin(2.0 * np.pi * k * s)
        return out

    def profile(self) -> Profile:
        return Profile(fn=self.value, dfn=self.derivative)


@dataclass(frozen=True, eq=False)
class ControlPath:
    """Driving curve x(s) = r(s) (sin th cos ph, sin th sin ph, cos th).

    Profiles are immutable after construction; evaluation is pure. The
    physical period T = 1/epsilon lives in the propagation settings, not
    here: the same geometric loop can be driven at any speed.
    """

    theta: Profile
    phi: Profile
    radius: Profile
    name: str = "custom"
    params: dict = field(default_factory=dict)
    grid: np.ndarray | None = None

    def __post_init__(self):
        dense = self.grid if self.grid is not None else np.linspace(0.0, 1.0, 1025)
        th = self.theta(dense)
        rr = self.radius(dense)
        if np.min(rr) <= 0.0:
            raise ValueError("radius profile must stay positive")
        if np.min(th) < -1e-12 or np.max(th) > np.pi + 1e-12:
            raise ValueError("theta profile must stay within [0, pi]")
        x0 = self.x(0.0)
        x1 = self.x(1.0)
        xh0 = x0 / np.linalg.norm(x0)
        xh1 = x1 / np.linalg.norm(x1)
        if np.linalg.norm(xh0 - xh1) > _CLOSURE_TOL:
            raise ValueError("unit vector must be periodic: x^(0) != x^(1)")
        if np.sin(th[0]) > 1e-6:
            w = (float(self.phi(1.0)) - float(self.phi(0.0))) / (2.0 * np.pi)
            if abs(w - round(w)) > 1e-8:
                raise ValueError("phi(1) - phi(0) must be an integer multiple of 2 pi")

    @property
    def winding(self) -> int:
        return int(round((float(self.phi(1.0)) - float(self.phi(0.0))) / (2.0 * np.pi)))

    def xhat(self, s):
        s = np.asarray(s, dtype=float)
        th = self.theta(s)
        ph = self.phi(s)
        st = np.sin(th)
        return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=-1)

    def x(self, s):
        s = np.asarray(s, dtype=float)
        return self.radius(s)[..., None] * self.xhat(s)

    def xhat_dot(self, s):
        """d x^/ds = theta' e_theta + phi' sin(theta) e_phi."""
        s = np.asarray(s, dtype=float)
        th = self.theta(s)
        ph = self.phi(s)
        thd = self.theta.derivative(s)
        phd = self.phi.derivative(s)
        st, ct = np.sin(th), np.cos(th)
        sp, cp = np.sin(ph), np.cos(ph)
        etheta = np.stack([ct * cp, ct * sp, -st], axis=-1)
        ephi = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
        return thd[..., None] * etheta + (phd * st)[..., None] * ephi

    def xdot(self, s):
        """d x/ds = r' x^ + r d x^/ds."""
        s = np.asarray(s, dtype=float)
        rd = self.radius.derivative(s)
        r = self.radius(s)
        return rd[..., None] * self.xhat(s) + r[..., None] * self.xhat_dot(s)


def latitude_loop(theta0: float, r0: float = 1.0) -> ControlPath:
    """Circle of latitude theta0 traversed once at constant speed and norm."""
    if not 0.0 < theta0 < np.pi:
        raise ValueError("theta0 must lie strictly between 0 and pi")
    if r0 <= 0.0:
        raise ValueError("r0 must be positive")
    two_pi = 2.0 * np.pi
    return ControlPath(
        theta=constant_profile(theta0),
        phi=Profile(fn=lambda s: two_pi * np.asarray(s, dtype=float),
                    dfn=lambda s: np.full_like(np.asarray(s, dtype=float), two_pi)),
        radius=constant_profile(r0),
        name="latitude",
        params={"theta0": float(theta0), "r0": float(r0)},
    )


def _smoothstep(u):
    """Monotone [0,1] -> [0,1] map with vanishing derivative at both ends."""
    return u - np.sin(2.0 * np.pi * u) / (2.0 * np.pi)


def _smoothstep_d(u):
    return 1.0 - np.cos(2.0 * np.pi * u)


def lune_path(dphi: float, delta: float = 1e-3) -> ControlPath:
    """Pole-anchored loop: down the phi=0 meridian, along the equator by
    dphi, back up, closed by an arc at theta = delta.

    delta regularizes the pole (spherical coordinates are singular there);
    the enclosed angle tends to dphi as delta -> 0. The four legs join with
    zero angular velocity so the whole loop is C^1.
    """
    if not 0.0 < dphi < 2.0 * np.pi:
        raise ValueError("dphi must lie strictly between 0 and 2 pi")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    half_pi = np.pi / 2.0

    def theta_fn(s):
        s = np.asarray(s, dtype=float)
        u = np.clip(s * 4.0, 0.0, 4.0)
        leg = np.minimum(np.floor(u), 3.0)
        v = u - leg
        h = _smoothstep(v)
        return np.select(
            [leg == 0, leg == 1, leg == 2, leg == 3],
            [delta + (half_pi - delta) * h, np.full_like(v, half_pi),
             half_pi - (half_pi - delta) * h, np.full_like(v, delta)],
        )

    def theta_d(s):
        s = np.asarray(s, dtype=float)
        u = np.clip(s * 4.0, 0.0, 4.0)
        leg = np.minimum(np.floor(u), 3.0)
        v = u - leg
        hd = _smoothstep_d(v) * 4.0
        return np.select(
            [leg == 0, leg == 1, leg == 2, leg == 3],
            [(half_pi - delta) * hd, np.zeros_like(v),
             -(half_pi - delta) * hd, np.zeros_like(v)],
        )

    def phi_fn(s):
        s = np.asarray(s, dtype=float)
        u = np.clip(s * 4.0, 0.0, 4.0)
        leg = np.minimum(np.floor(u), 3.0)
        v = u - leg
        h = _smoothstep(v)
        return np.select(
            [leg == 0, leg == 1, leg == 2, leg == 3],
            [np.zeros_like(v), dphi * h, np.full_like(v, dphi), dphi * (1.0 - h)],
        )

    def phi_d(s):
        s = np.asarray(s, dtype=float)
        u = np.clip(s * 4.0, 0.0, 4.0)
        leg = np.minimum(np.floor(u), 3.0)
        v = u - leg
        hd = _smoothstep_d(v) * 4.0
        return np.select(
            [leg == 0, leg == 1, leg == 2, leg == 3],
            [np.zeros_like(v), dphi * hd, np.zeros_like(v), -dphi * hd],
        )

    return ControlPath(
        theta=Profile(fn=theta_fn, dfn=theta_d),
        phi=Profile(fn=phi_fn, dfn=phi_d),
        radius=constant_profile(1.0),
        name="lune",
        params={"dphi": float(dphi), "delta": float(delta)},
    )


def fourier_path(theta_coeffs: Harmonics, phi_coeffs: Harmonics,
                 r_coeffs: Harmonics) -> ControlPath:
    """Generic smooth path from harmonic coefficients.

    theta must stay strictly inside (0, pi) and must not drift (zero slope);
    phi's slope must be an integer multiple of 2 pi (the winding); r must
    stay positive but is free to end away from its start.
    """
    if theta_coeffs.slope != 0.0:
        raise ValueError("theta profile must be periodic: slope must be zero")
    w = phi_coeffs.slope / (2.0 * np.pi)
    if abs(w - round(w)) > 1e-10:
        raise ValueError("phi slope must be an integer multiple of 2 pi")
    dense = np.linspace(0.0, 1.0, 4097)
    th = theta_coeffs.value(dense)
    if np.min(th) <= 1e-9 or np.max(th) >= np.pi - 1e-9:
        raise ValueError("theta profile leaves the open interval (0, pi)")
    rr = r_coeffs.value(dense)
    if np.min(rr) <= 0.0:
        raise ValueError("radius profile must stay positive")
    return ControlPath(
        theta=theta_coeffs.profile(),
        phi=phi_coeffs.profile(),
        radius=r_coeffs.profile(),
        name="fourier",
        params={"theta": theta_coeffs, "phi": phi_coeffs, "r": r_coeffs},
    )


@dataclass(frozen=True, eq=False)
class PathSamples:
    """Uniform-grid samples of a path and its derivatives."""

    s: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    phidot: np.ndarray
    costheta: np.ndarray


def sample(path: ControlPath, n: int) -> PathSamples:
    """Sample the path on n+1 uniformly spaced points of [0, 1]."""
    if n < 4:
        raise ValueError("need at least 4 grid intervals")
    s = np.linspace(0.0, 1.0, int(n) + 1)
    th = path.theta(s)
    return PathSamples(
        s=s,
        x=path.x(s),
        xdot=path.xdot(s),
        theta=th,
        phi=path.phi(s),
        phidot=path.phi.derivative(s),
        costheta=np.cos(th),
    )


def perturb(path: ControlPath, realization) -> ControlPath:
    """Path with the realization's Cartesian perturbation added: x' = x + dx.

    The perturbed curve is re-expressed in spherical profiles (phi unwrapped
    continuously) backed by cubic splines on the realization grid. The
    realization must preserve unit-vector closure, which pinned noise does by
    construction; perturbations that drive the curve near the origin
    (|x'| < 0.1 min r) are rejected because the spectral gap would collapse.
    """
    t = np.asarray(realization.grid, dtype=float)
    dx = np.asarray(realization.dx, dtype=float)
    if dx.shape != (t.size, 3):
        raise ValueError("realization dx must have shape (len(grid), 3)")
    s = t / t[-1]
    x = path.x(s) + dx
    rr = np.linalg.norm(x, axis=1)
    r_min = float(np.min(path.radius(np.linspace(0.0, 1.0, 1025))))
    if np.min(rr) < 0.1 * r_min:
        raise ValueError("perturbation drives the curve too close to the origin")
    xh = x / rr[:, None]
    if np.linalg.norm(xh[0] - xh[-1]) > _CLOSURE_TOL:
        raise ValueError(
            "realization breaks unit-vector periodicity; use a pinned realization"
        )
    theta = np.arccos(np.clip(xh[:, 2], -1.0, 1.0))
    phi = np.unwrap(np.arctan2(xh[:, 1], xh[:, 0]))
    # Snap the endpoint so the winding bookkeeping stays exact under closure.
    phi[-1] = phi[0] + 2.0 * np.pi * round((phi[-1] - phi[0]) / (2.0 * np.pi))
    sp_theta = CubicSpline(s, theta)
    sp_phi = CubicSpline(s, phi)
    sp_r = CubicSpline(s, rr)
    return ControlPath(
        theta=Profile(fn=sp_theta, dfn=sp_theta.derivative()),
        phi=Profile(fn=sp_phi, dfn=sp_phi.derivative()),
        radius=Profile(fn=sp_r, dfn=sp_r.derivative()),
        name=path.name + "+noise",
        params=dict(path.params, realization=getattr(realization, "index", None)),
        grid=s,
    )


def arc_length(path: ControlPath) -> float:
    """Length of the unit-sphere shadow, invariant under reparametrization."""
    from .quadrature import integrate_path

    def speed(s):
        th = path.theta(s)
        thd = path.theta.derivative(s)
        phd = path.phi.derivative(s)
        return np.sqrt(thd ** 2 + (np.sin(th) * phd) ** 2)

    return integrate_path(path, speed)
