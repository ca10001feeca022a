"""Desk-scale families exhibiting blow-up of conditional-stability ratios.

Each family member k is a single Fourier mode at frequency xi_k = c * 2^(k/2)
evolving under a coefficient synthesised in the target modulus class at
oscillation scale h_k = h0 * 2^-k, with its amplitude normalised so the
solution reaches the a-priori bound D exactly at the horizon T.  The
initial sizes then decay doubly exponentially in k while the bound is
saturated, so the ratio of observed size to any power or stretched-log
function of the initial size crosses any threshold within the family
range.

This is an explicitly labelled surrogate for the genuine counterexample
constructions, which drive the blow-up at observation times t_k tending
to 0 by shuttling energy across frequencies with x-dependent lower-order
terms.  With coefficients depending on time alone the evolution is
mode-diagonal and two-sided ellipticity pins the growth budget, so the
t_k -> 0 sharpening is out of reach at any frequency schedule; the
observation time is instead the ratio's argmax over a caller-supplied
time grid (the grid maximum, since single-mode growth is monotone).
All ingredients stay auditable: the per-member modulus seminorm is
measured and reported against one uniform budget, and a Lipschitz-class
control run through the same pipeline stays below its fitted power-law
bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coefficients import CoefficientSet, scalar_diffusion, synthesize_scalar
from .errors import DomainTruncationWarning, ParameterError
from .moduli import Modulus, make_canonical, seminorm

FAMILY_TARGETS = ("loglip", "iterated_log", "lipschitz")


@dataclass(frozen=True)
class FamilyTuning:
    """Knobs of the construction; defaults keep exponents within double
    precision up to k ~ 27."""

    base: float = 1.0
    amplitude: float = 0.1
    k_A: float = 0.5
    D: float = 1.0
    T: float = 1.0
    h0: float = 0.5
    xi_scale: float = 0.004
    amp_scale: float = 1.0
    max_log_growth: float = 600.0
    diagnostic_delta: float = 0.5
    t_grid: tuple[float, ...] | None = None
    seminorm_samples: int = 1025

    def times(self) -> np.ndarray:
        if self.t_grid is not None:
            ts = np.asarray(self.t_grid, dtype=float)
            if ts.size == 0 or np.any(ts < 0.0) or np.any(ts > self.T):
                raise ParameterError("ratio time grid must be nonempty within [0, T]")
            return ts
        return np.linspace(0.0, self.T, 33)


@dataclass(frozen=True)
class FamilyMember:
    k: int
    h: float
    xi: float
    t_k: float
    coefficient_set: CoefficientSet
    log_norm0: float          # log ||u_k(0)||, before amp_scale
    log_norm_tk: float        # log ||u_k(t_k)||, before amp_scale
    measured_seminorm: float

    def norm0(self, amp_scale: float = 1.0) -> float:
        return amp_scale * math.exp(self.log_norm0)

    def norm_tk(self, amp_scale: float = 1.0) -> float:
        return amp_scale * math.exp(self.log_norm_tk)


@dataclass(frozen=True)
class DivergenceFamily:
    target: str
    members: tuple[FamilyMember, ...]
    tuning: FamilyTuning
    seminorm_bound: float     # max measured modulus seminorm across members
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def k_A(self) -> float:
        return self.tuning.k_A

    @property
    def D(self) -> float:
        return self.tuning.D


def _measured_seminorm(cs: CoefficientSet, mu: Modulus, h: float, T: float, samples: int) -> float:
    # the supremum quotient lives at separations comparable to the
    # oscillation scale; a window of a few periods resolves it, while
    # wider pairs are dominated through monotonicity of the modulus
    window = min(T, 4.0 * h)
    ts = np.linspace(0.0, window, samples)
    values = cs.a_scalar(ts)
    return seminorm(list(zip(ts, values)), mu)


def build_family(target: str, k_max: int, tuning: FamilyTuning | None = None) -> DivergenceFamily:
    """Construct family members k = 1..k_max (fewer if growth would
    overflow; a truncation warning names the cut).

    Per member: coefficient a_k from the target-modulus synthesiser at
    scale h_k, frequency xi_k, initial amplitude D * exp(-Re G_k(T)) so
    the mode hits the a-priori bound exactly at T, and t_k the argmax of
    the power-law diagnostic ratio over the tuning time grid.
    """
    if target not in FAMILY_TARGETS:
        raise ParameterError(f"target must be one of {FAMILY_TARGETS}, got {target!r}")
    if not (1 <= k_max <= 40):
        raise ParameterError("k_max must lie in 1..40 (desk scale)")
    tuning = tuning or FamilyTuning()
    mu = make_canonical(target)
    times = tuning.times()
    delta = tuning.diagnostic_delta

    members: list[FamilyMember] = []
    notes: list[str] = []
    for k in range(1, k_max + 1):
        h_k = tuning.h0 * 2.0**-k
        xi_k = tuning.xi_scale * 2.0 ** (k / 2.0)
        if tuning.amplitude > 0.0:
            a_k = synthesize_scalar(mu, tuning.amplitude, h_k, tuning.base)
        else:
            a_k = synthesize_scalar(make_canonical("lipschitz"), 0.0, 0.5, tuning.base)
        if a_k.lower_bound < tuning.k_A or a_k.upper_bound > 1.0 / tuning.k_A:
            raise ParameterError(
                f"member k={k} leaves the ellipticity band [{tuning.k_A}, {1 / tuning.k_A}]"
            )
        cs = scalar_diffusion(a_k, k_A=tuning.k_A, T=tuning.T)
        growth_T = xi_k**2 * float(a_k.antiderivative(tuning.T))
        if growth_T > tuning.max_log_growth:
            notes.append(
                f"family truncated at k={k - 1}: log growth {growth_T:.1f} would exceed "
                f"{tuning.max_log_growth}"
            )
            warnings.warn(notes[-1], DomainTruncationWarning, stacklevel=2)
            break
        log_norm0 = math.log(tuning.D) - growth_T
        growth_grid = xi_k**2 * np.asarray(a_k.antiderivative(times))
        # argmax over the grid of ||u(t)|| / ||u(0)||^delta; the
        # denominator is t-free, so this is the argmax of the growth
        idx = int(np.argmax(growth_grid))
        members.append(FamilyMember(
            k=k, h=h_k, xi=xi_k, t_k=float(times[idx]),
            coefficient_set=cs,
            log_norm0=log_norm0,
            log_norm_tk=log_norm0 + float(growth_grid[idx]),
            measured_seminorm=_measured_seminorm(cs, mu, h_k, tuning.T, tuning.seminorm_samples),
        ))

    if not members:
        raise ParameterError("no family members could be built before overflow")
    return DivergenceFamily(
        target=target,
        members=tuple(members),
        tuning=tuning,
        seminorm_bound=max(m.measured_seminorm for m in members),
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class RatioTable:
    ks: tuple[int, ...]
    ratios: tuple[float, ...]
    excluded: tuple[bool, ...]
    delta: float
    N: float | None = None


def hoelder_ratio(family: DivergenceFamily, delta: float) -> RatioTable:
    """R_k = ||u_k(t_k)|| / ||u_k(0)||^delta, in log space so deep members
    neither underflow nor overflow."""
    if not (0.0 < delta < 1.0):
        raise ParameterError("delta must lie in (0, 1)")
    if not family.members:
        raise ParameterError("family is empty")
    ks, ratios, excluded = [], [], []
    scale = family.tuning.amp_scale
    for m in family.members:
        ks.append(m.k)
        if scale == 0.0:
            ratios.append(0.0)
            excluded.append(True)
            continue
        log_scale = math.log(scale)
        log_ratio = (m.log_norm_tk + log_scale) - delta * (m.log_norm0 + log_scale)
        ratios.append(math.exp(log_ratio))
        excluded.append(False)
    return RatioTable(tuple(ks), tuple(ratios), tuple(excluded), delta=delta)


def loglip_ratio(family: DivergenceFamily, N: float, delta: float) -> RatioTable:
    """R_k = ||u_k(t_k)|| / exp(-N |log ||u_k(0)|| |^delta)."""
    if N <= 0.0:
        raise ParameterError("N must be positive")
    if not (0.0 < delta < 1.0):
        raise ParameterError("delta must lie in (0, 1)")
    if not family.members:
        raise ParameterError("family is empty")
    ks, ratios, excluded = [], [], []
    scale = family.tuning.amp_scale
    for m in family.members:
        ks.append(m.k)
        if scale == 0.0:
            ratios.append(0.0)
            excluded.append(True)
            continue
        log_norm0 = m.log_norm0 + math.log(scale)
        log_ratio = (m.log_norm_tk + math.log(scale)) + N * abs(log_norm0) ** delta
        ratios.append(math.exp(log_ratio))
        excluded.append(False)
    return RatioTable(tuple(ks), tuple(ratios), tuple(excluded), delta=delta, N=N)


def family_rows(family: DivergenceFamily, table: RatioTable) -> tuple[list[str], list[tuple]]:
    """CSV header and rows: k, h_k, xi_k, t_k, norm0, norm_tk, ratio."""
    header = ["k", "h_k", "xi_k", "t_k", "norm0", "norm_tk", "ratio"]
    scale = family.tuning.amp_scale
    rows = [
        (m.k, m.h, m.xi, m.t_k, m.norm0(scale), m.norm_tk(scale), r)
        for m, r in zip(family.members, table.ratios)
    ]
    return header, rows
