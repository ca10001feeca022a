"""Weight functions for the energy estimates.

Both weight ODEs prescribe y * psi'(y) with psi = phi' staying positive,
so they are integrated for u = log(psi): the log-Lipschitz equation
y u' = -lam (1 + |u|) and the modulus-driven equation
y u' = -lam e^u omega(k_A e^-u).  This keeps decades of decay in psi well
conditioned and turns the |log psi| kink into a clean event at u = 0,
where the integration is split and restarted.  phi is accumulated
alongside (phi' = e^u) and both components are tabulated on a geometric
grid with monotone cubic interpolation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import DomainTruncationWarning, NumericalError, ParameterError, RangeError
from .moduli import Modulus

UNDERFLOW_LOG = np.log(1e-300)
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
TABLE_SIZE = 2001


@dataclass(frozen=True)
class WeightFunction:
    """Tabulated solution (phi, psi = phi') of a weight ODE on [y0, y1]."""

    lam: float
    kind: str
    y0: float
    y1: float
    psi0: float
    phi0: float
    y_nodes: np.ndarray
    psi_nodes: np.ndarray
    phi_nodes: np.ndarray
    k_A: float | None = None
    omega: Modulus | None = None
    truncated: bool = False
    truncation_reason: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "_psi_interp", PchipInterpolator(self.y_nodes, self.psi_nodes))
        object.__setattr__(self, "_phi_interp", PchipInterpolator(self.y_nodes, self.phi_nodes))

    def _check_domain(self, y) -> np.ndarray:
        arr = np.asarray(y, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.y1))
        if np.any(arr < self.y0 - slack) or np.any(arr > self.y1 + slack):
            raise RangeError(
                f"y = {y} outside the tabulated domain [{self.y0}, {self.y1}]"
            )
        return np.clip(arr, self.y0, self.y1)

    def psi(self, y):
        arr = self._check_domain(y)
        out = self._psi_interp(arr)
        return float(out) if np.ndim(y) == 0 else out

    def phi(self, y):
        arr = self._check_domain(y)
        out = self._phi_interp(arr)
        return float(out) if np.ndim(y) == 0 else out

    def table(self) -> np.ndarray:
        """(y, psi, phi) rows of the stored tabulation."""
        return np.column_stack([self.y_nodes, self.psi_nodes, self.phi_nodes])


def evaluate_weight(w: WeightFunction, y: float) -> tuple[float, float]:
    """(phi(y), phi'(y)) by monotone cubic interpolation of the tabulation."""
    return w.phi(y), w.psi(y)


def _integrate_log_slope(
    rhs_u: Callable[[float, float], float],
    lam: float,
    y0: float,
    psi0: float,
    phi0: float,
    y1: float,
    events: list,
    event_reasons: list[str],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, str | None]:
    """Piecewise integration of [u, phi] with terminal events; returns the
    tabulated nodes and the (possibly truncated) right endpoint."""

    def system(y: float, state: np.ndarray) -> np.ndarray:
        u = state[0]
        return np.array([rhs_u(y, u), np.exp(u)])

    segments = []
    y_start = float(y0)
    state = np.array([np.log(psi0), phi0], dtype=float)
    active_events = list(events)
    active_reasons = list(event_reasons)
    truncation = None
    y_end = float(y1)

    while True:
        sol = solve_ivp(
            system, (y_start, y1), state, method="DOP853",
            rtol=ODE_RTOL, atol=ODE_ATOL, dense_output=True, events=active_events,
        )
        if sol.status == -1:
            raise NumericalError(f"weight ODE integration failed: {sol.message}")
        segments.append(sol)
        if sol.status == 0:
            y_end = float(y1)
            break
        hit = next(i for i, te in enumerate(sol.t_events) if te.size > 0)
        y_hit = float(sol.t_events[hit][0])
        reason = active_reasons[hit]
        if reason == "kink":
            # restart on the psi < 1 branch; the crossing is single since
            # psi is monotone, so the kink event is dropped afterwards
            state = np.array([0.0, float(sol.y_events[hit][0][1])])
            y_start = y_hit
            keep = [i for i in range(len(active_events)) if i != hit]
            active_events = [active_events[i] for i in keep]
            active_reasons = [active_reasons[i] for i in keep]
            if y_start >= y1:
                y_end = float(y1)
                break
            continue
        truncation = reason
        y_end = y_hit
        warnings.warn(
            f"weight ODE domain truncated at y = {y_hit:.6g} ({reason})",
            DomainTruncationWarning,
            stacklevel=3,
        )
        break

    nodes = np.geomspace(y0, y_end, TABLE_SIZE)
    boundaries = [seg.t[0] for seg in segments] + [y_end]
    nodes = np.unique(np.concatenate([nodes, np.asarray(boundaries)]))
    nodes = nodes[(nodes >= y0) & (nodes <= y_end)]

    u_vals = np.empty(nodes.size)
    phi_vals = np.empty(nodes.size)
    for seg in segments:
        lo, hi = seg.t[0], seg.t[-1]
        mask = (nodes >= lo) & (nodes <= hi)
        if np.any(mask):
            vals = seg.sol(nodes[mask])
            u_vals[mask] = vals[0]
            phi_vals[mask] = vals[1]
    return nodes, np.exp(u_vals), phi_vals, y_end, truncation


def solve_loglip_weight(
    lam: float, y0: float, psi0: float, phi0: float, y1: float
) -> WeightFunction:
    """Solve y * psi' = -lam * psi * (1 + |log psi|) with psi(y0) = psi0.

    While psi >= 1 the solution separates to
    1 + log psi(y) = (1 + log psi0) * (y0 / y)^lam, which the tabulated
    output reproduces; below psi = 1 integration continues on the other
    branch of the kink.
    """
    if psi0 <= 0.0:
        raise ParameterError("psi0 must be positive")
    if not (0.0 < y0 < y1):
        raise ParameterError(f"need 0 < y0 < y1, got y0={y0}, y1={y1}")
    if lam < 0.0:
        raise ParameterError("lam must be nonnegative")

    def rhs_u(y: float, u: float) -> float:
        return -lam * (1.0 + abs(u)) / y

    events: list = []
    reasons: list[str] = []
    if np.log(psi0) > 0.0:
        kink = lambda y, state: state[0]
        kink.terminal = True
        events.append(kink)
        reasons.append("kink")
    underflow = lambda y, state: state[0] - UNDERFLOW_LOG
    underflow.terminal = True
    events.append(underflow)
    reasons.append("psi underflow")

    nodes, psi_vals, phi_vals, y_end, truncation = _integrate_log_slope(
        rhs_u, lam, y0, psi0, phi0, y1, events, reasons
    )
    return WeightFunction(
        lam=lam, kind="loglip_ode", y0=y0, y1=y_end, psi0=psi0, phi0=phi0,
        y_nodes=nodes, psi_nodes=psi_vals, phi_nodes=phi_vals,
        truncated=truncation is not None, truncation_reason=truncation,
    )


def solve_osgood_weight(
    lam: float,
    k_A: float,
    omega: Modulus,
    y0: float,
    psi0: float,
    phi0: float,
    y1: float,
) -> WeightFunction:
    """Solve y * psi' = -lam * psi^2 * omega(k_A / psi) with psi(y0) = psi0.

    psi decays, so the modulus argument k_A/psi grows; integration stops
    with a truncation warning when it reaches omega.valid_upper.  For the
    identity modulus the equation reduces to the power law
    psi(y) = psi0 * (y0 / y)^(lam * k_A).
    """
    if k_A <= 0.0:
        raise ParameterError("k_A must be positive")
    if psi0 <= k_A:
        raise ParameterError(f"need psi0 > k_A so the modulus argument starts in (0, 1)")
    if not (0.0 < y0 < y1):
        raise ParameterError(f"need 0 < y0 < y1, got y0={y0}, y1={y1}")
    if lam < 0.0:
        raise ParameterError("lam must be nonnegative")
    boundary_u = np.log(k_A / omega.valid_upper)
    if np.log(psi0) <= boundary_u:
        raise ParameterError(
            f"initial slope psi0 = {psi0} already puts k_A/psi at or beyond "
            f"the modulus closed-form bound {omega.valid_upper}"
        )

    def rhs_u(y: float, u: float) -> float:
        return -lam * np.exp(u) * float(omega(min(k_A * np.exp(-u), 1.0))) / y

    domain = lambda y, state: state[0] - boundary_u
    domain.terminal = True
    underflow = lambda y, state: state[0] - UNDERFLOW_LOG
    underflow.terminal = True

    nodes, psi_vals, phi_vals, y_end, truncation = _integrate_log_slope(
        rhs_u, lam, y0, psi0, phi0, y1,
        [domain, underflow], ["modulus domain", "psi underflow"],
    )
    return WeightFunction(
        lam=lam, kind="osgood_ode", y0=y0, y1=y_end, psi0=psi0, phi0=phi0,
        y_nodes=nodes, psi_nodes=psi_vals, phi_nodes=phi_vals,
        k_A=k_A, omega=omega,
        truncated=truncation is not None, truncation_reason=truncation,
    )


def residuals(w: WeightFunction, n_check: int = 200) -> np.ndarray:
    """|y psi' - rhs(y, psi)| / (1 + |rhs|) at interior points, psi' by
    central differences of the tabulation."""
    ys = np.geomspace(w.y0, w.y1, n_check + 2)[1:-1]
    h = np.minimum(ys - w.y0, w.y1 - ys) * 1e-6
    dpsi = (w.psi(ys + h) - w.psi(ys - h)) / (2.0 * h)
    if w.kind == "loglip_ode":
        rhs = -w.lam * w.psi(ys) * (1.0 + np.abs(np.log(w.psi(ys))))
    else:
        args = np.minimum(w.k_A / w.psi(ys), 1.0)
        rhs = -w.lam * w.psi(ys) ** 2 * np.asarray(w.omega(args))
    return np.abs(ys * dpsi - rhs) / (1.0 + np.abs(rhs))
