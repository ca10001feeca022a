"""Finite Fourier-mode fields: evolution of the homogeneous mode-wise
equation, L2 / Sobolev / modulus-weighted norms, and frequency grids.

Mode dynamics are exact: each amplitude is multiplied by exp(dG) with dG
the integrated symbol from the coefficients module, so there is no time
discretisation error.  The continuum frequency integral is discretised as
a fixed symmetric grid whose trapezoid weights ride along with the field;
all norms are finite sums taken in a deterministic order (by |xi|, then
lexicographically), so results are independent of threading.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .coefficients import CoefficientAntiderivative, CoefficientSet, integrate_symbol_between
from .errors import ParameterError, SaturationError
from .moduli import Modulus

MAX_LOG_AMP = 700.0  # ln(1.8e308) with headroom; beyond this exp overflows


@dataclass(frozen=True)
class SpectralField:
    """Finite set of Fourier modes (frequency, complex amplitude) with
    optional quadrature weights and a current time."""

    n: int
    xi: np.ndarray          # (m, n) frequencies
    amp: np.ndarray         # (m,) complex amplitudes
    weights: np.ndarray | None = None
    time: float = 0.0

    def __post_init__(self):
        xi = np.atleast_2d(np.asarray(self.xi, dtype=float))
        if xi.shape[1] != self.n:
            raise ParameterError(f"frequencies must be {self.n}-vectors, got shape {xi.shape}")
        amp = np.asarray(self.amp, dtype=complex)
        if amp.shape != (xi.shape[0],):
            raise ParameterError("one amplitude per frequency required")
        uniq = np.unique(xi, axis=0)
        if uniq.shape[0] != xi.shape[0]:
            raise ParameterError("frequencies must be distinct")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (xi.shape[0],):
                raise ParameterError("one quadrature weight per frequency required")
            if np.any(w <= 0.0):
                raise ParameterError("quadrature weights must be positive")
            object.__setattr__(self, "weights", w)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "amp", amp)

    @property
    def m(self) -> int:
        return self.xi.shape[0]

    def xi_sq(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.xi, self.xi)

    def effective_weights(self) -> np.ndarray:
        return self.weights if self.weights is not None else np.ones(self.m)


def single_mode(xi, amp: complex, n: int = 1, weight: float = 1.0, time: float = 0.0) -> SpectralField:
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float)).reshape(1, n)
    return SpectralField(n=n, xi=xi_arr, amp=np.array([amp], dtype=complex),
                         weights=np.array([weight]), time=time)


@dataclass(frozen=True)
class WeightedNormSpec:
    """Parameters (d, a, omega) of the modulus-weighted Sobolev norm with
    frequency weight (1+|xi|^2)^d * exp(a |xi|^2 omega(1/(|xi|^2+1)))."""

    d: float
    a: float
    omega: Modulus

    def __post_init__(self):
        if self.a < 0.0:
            raise ParameterError("weight strength a must be nonnegative")


def frequency_grid_1d(xi_max: float = 32.0, n_linear: int = 8, n_geometric: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric 1-d grid: linear on [0, 1], geometric from 1 to xi_max,
    mirrored through 0; trapezoid quadrature weights."""
    if xi_max <= 1.0:
        raise ParameterError("xi_max must exceed 1")
    lin = np.linspace(0.0, 1.0, n_linear + 1)
    geo = np.geomspace(1.0, xi_max, n_geometric + 1)[1:]
    positive = np.concatenate([lin, geo])
    nodes = np.concatenate([-positive[::-1], positive[1:]])
    weights = np.empty_like(nodes)
    weights[1:-1] = (nodes[2:] - nodes[:-2]) / 2.0
    weights[0] = (nodes[1] - nodes[0]) / 2.0
    weights[-1] = (nodes[-1] - nodes[-2]) / 2.0
    return nodes.reshape(-1, 1), weights


def frequency_grid(n: int = 1, xi_max: float = 32.0, n_linear: int = 8, n_geometric: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Default desk-scale grid for n = 1 or n = 2 (tensor product)."""
    nodes, weights = frequency_grid_1d(xi_max, n_linear, n_geometric)
    if n == 1:
        return nodes, weights
    if n == 2:
        flat = nodes[:, 0]
        xx, yy = np.meshgrid(flat, flat, indexing="ij")
        ww = np.outer(weights, weights)
        return np.column_stack([xx.ravel(), yy.ravel()]), ww.ravel()
    raise ParameterError("default grids cover n = 1 and n = 2 only")


def gaussian_data(
    n: int, eps: float, K: float, grid: tuple[np.ndarray, np.ndarray]
) -> SpectralField:
    """Field at time 0 with amplitudes eps * exp(-K |xi|^2) on the grid."""
    if K <= 0.0:
        raise ParameterError("decay rate K must be positive")
    xi, weights = grid
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    xi_sq = np.einsum("ij,ij->i", xi, xi)
    amp = eps * np.exp(-K * xi_sq) + 0.0j
    return SpectralField(n=n, xi=xi, amp=amp, weights=np.asarray(weights, dtype=float), time=0.0)


def _norm_order(field: SpectralField) -> np.ndarray:
    keys = tuple(field.xi[:, col] for col in reversed(range(field.n))) + (field.xi_sq(),)
    return np.lexsort(keys)


def _reduce(field: SpectralField, factors: np.ndarray) -> float:
    terms = field.effective_weights() * factors * np.abs(field.amp) ** 2
    order = _norm_order(field)
    return float(np.sqrt(np.sum(terms[order])))


def l2_norm(field: SpectralField) -> float:
    return _reduce(field, np.ones(field.m))


def sobolev_norm(field: SpectralField, s: float) -> float:
    return _reduce(field, (1.0 + field.xi_sq()) ** s)


def weighted_norm(field: SpectralField, spec: WeightedNormSpec) -> float:
    xi_sq = field.xi_sq()
    omega_vals = np.asarray(spec.omega(1.0 / (xi_sq + 1.0)), dtype=float)
    factors = (1.0 + xi_sq) ** spec.d * np.exp(spec.a * xi_sq * omega_vals)
    return _reduce(field, factors)


def _checked_exponents(xi: np.ndarray, amp: np.ndarray, exponents: np.ndarray) -> None:
    nonzero = np.abs(amp) > 0.0
    with np.errstate(divide="ignore"):
        log_new = np.where(nonzero, np.log(np.abs(amp), where=nonzero, out=np.full(amp.shape, -np.inf)) + exponents.real, -np.inf)
    bad = np.flatnonzero(log_new > MAX_LOG_AMP)
    if bad.size:
        modes = [(int(i), xi[i].tolist(), float(log_new[i])) for i in bad[:16]]
        raise SaturationError(
            f"{bad.size} mode(s) overflow double precision during evolution",
            diagnostics={"modes": modes},
        )


def _apply_exponents(amp: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    # zero modes stay zero; masking before exp avoids 0 * inf = nan noise
    nonzero = np.abs(amp) > 0.0
    out = np.zeros_like(amp)
    out[nonzero] = amp[nonzero] * np.exp(exponents[nonzero])
    return out


def evolve(field: SpectralField, cs: CoefficientSet, t_target: float, *, rtol: float = 1e-10) -> SpectralField:
    """Advance the field to t_target: each amplitude picks up
    exp(G(t_target, xi) - G(time, xi)).

    Overflowing modes abort the run with a SaturationError naming them;
    growth past double precision is the phenomenon under study and must
    not saturate silently.
    """
    if not (0.0 <= field.time <= t_target <= cs.T):
        raise ParameterError(
            f"need 0 <= field.time <= t_target <= T, got {field.time}, {t_target}, {cs.T}"
        )
    if field.n != cs.n:
        raise ParameterError("field and coefficients have different dimensions")
    if t_target == field.time:
        return field
    exponents = np.array(
        [integrate_symbol_between(cs, field.xi[i], field.time, t_target, rtol=rtol)
         for i in range(field.m)]
    )
    _checked_exponents(field.xi, field.amp, exponents)
    return replace(field, amp=_apply_exponents(field.amp, exponents), time=float(t_target))


class Trajectory:
    """Evolution t -> u(t) of a fixed initial field, evaluable at arbitrary
    times via cumulative coefficient antiderivatives (one solve, then O(1)
    per query)."""

    def __init__(self, field0: SpectralField, cs: CoefficientSet):
        if field0.n != cs.n:
            raise ParameterError("field and coefficients have different dimensions")
        self.field0 = field0
        self.cs = cs
        self.anti = CoefficientAntiderivative(cs)
        self._base_symbols = self._symbols(field0.time)

    def _symbols(self, t: float) -> np.ndarray:
        if self.cs.a_scalar is not None and self.cs.b_const is not None and self.cs.c_scalar is not None:
            xi_sq = self.field0.xi_sq()
            int_a = float(self.cs.a_scalar.antiderivative(t))
            int_c = float(self.cs.c_scalar.antiderivative(t))
            int_b = self.field0.xi @ self.cs.b_const * t
            return xi_sq * int_a - int_c - 1j * int_b
        return np.array([self.anti.symbol(self.field0.xi[i], t) for i in range(self.field0.m)])

    def re_log_growth(self, ts) -> np.ndarray:
        """(m, len(ts)) matrix of Re[G(t, xi_i) - G(time0, xi_i)]."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self.cs.a_scalar is not None and self.cs.c_scalar is not None:
            xi_sq = self.field0.xi_sq()
            int_a = np.asarray(self.cs.a_scalar.antiderivative(ts))
            int_c = np.asarray(self.cs.c_scalar.antiderivative(ts))
            base = np.real(self._base_symbols)
            return xi_sq[:, None] * int_a[None, :] - int_c[None, :] - base[:, None]
        rows = [np.real(self.anti.symbol(self.field0.xi[i], ts)) - self._base_symbols[i].real
                for i in range(self.field0.m)]
        return np.asarray(rows)

    def field_at(self, t: float) -> SpectralField:
        if not (self.field0.time <= t <= self.cs.T):
            raise ParameterError(f"t = {t} outside [{self.field0.time}, {self.cs.T}]")
        if t == self.field0.time:
            return self.field0
        exponents = self._symbols(t) - self._base_symbols
        _checked_exponents(self.field0.xi, self.field0.amp, exponents)
        amp = _apply_exponents(self.field0.amp, exponents)
        return replace(self.field0, amp=amp, time=float(t))

    def l2_norm(self, t: float) -> float:
        return l2_norm(self.field_at(t))

    def sobolev_norm(self, t: float, s: float) -> float:
        return sobolev_norm(self.field_at(t), s)

    def weighted_norm(self, t: float, spec: WeightedNormSpec) -> float:
        return weighted_norm(self.field_at(t), spec)


def field_rows(field: SpectralField) -> tuple[list[str], list[tuple]]:
    """CSV header and rows for a field snapshot."""
    header = [f"xi_{i + 1}" for i in range(field.n)] + ["re_amp", "im_amp", "weight", "time"]
    weights = field.effective_weights()
    rows = [
        tuple(field.xi[i]) + (field.amp[i].real, field.amp[i].imag, weights[i], field.time)
        for i in range(field.m)
    ]
    return header, rows
