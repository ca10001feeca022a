"""Moduli of continuity: canonical families, axiom checks, integral
divergence indicator, and sampled seminorms.

A modulus is represented by a vectorised evaluator on (0, 1] together with
the upper end ``valid_upper`` of the interval on which its closed form is
used directly; canonical constructors extend the evaluator beyond that
point so the modulus axioms (positive, nondecreasing, concave) keep
holding on all of (0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, ParameterError

CANONICAL_TAGS = ("lipschitz", "hoelder", "loglip", "iterated_log")

# Default rendering of "vanishes at 0": evaluate at a tiny probe point and
# require near-zero.  The defaults suit moduli with at most logarithmic
# corrections to linear decay; Hoelder exponents tau <= 0.5 need a smaller
# probe (mu(1e-12) = 1e-12^tau is above 1e-6 for tau <= 0.5).
VANISH_PROBE = 1e-12
VANISH_THRESHOLD = 1e-6


def _iterated_log_raw(s: np.ndarray) -> np.ndarray:
    inner = np.log1p(1.0 / s)
    return s * inner * np.log(inner)


def _iterated_log_raw_derivative(s: float) -> float:
    inner = np.log1p(1.0 / s)
    return float(inner * np.log(inner) - (np.log(inner) + 1.0) / (s + 1.0))


def _iterated_log_peak() -> float:
    # The closed form s*log(1+1/s)*log(log(1+1/s)) increases from 0, peaks,
    # then decays back to 0 at s = 1/(e-1); only the increasing part is a
    # modulus, so truncate at the peak (derivative root).
    return float(brentq(_iterated_log_raw_derivative, 1e-6, 0.57, xtol=1e-15))


ITERATED_LOG_PEAK = _iterated_log_peak()


@dataclass(frozen=True)
class Modulus:
    """A modulus of continuity with an evaluable closed form.

    ``evaluator`` maps arrays with entries in (0, 1] to nonnegative values;
    ``valid_upper`` marks where the literal closed form ends and a
    monotonicity-preserving extension takes over.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    tag: str
    tau: float | None = None
    valid_upper: float = 1.0

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        out = self.evaluator(arr)
        if np.ndim(s) == 0:
            return float(out)
        return out


def make_canonical(tag: str, tau: float | None = None) -> Modulus:
    """Build one of the named moduli: identity, power law, single or
    iterated logarithmic correction.

    The iterated-log family is truncated at the peak of its closed form and
    extended as a constant (the left difference quotient vanishes there),
    which keeps it positive, nondecreasing and concave on all of (0, 1].
    """
    if tag == "hoelder":
        if tau is None or not (0.0 < tau < 1.0):
            raise ParameterError(f"hoelder modulus needs tau in (0, 1), got {tau!r}")
    elif tau is not None:
        raise ParameterError(f"tau is only meaningful for tag='hoelder', got tag={tag!r}")

    if tag == "lipschitz":
        return Modulus(lambda s: np.asarray(s, dtype=float), tag)
    if tag == "hoelder":
        exponent = float(tau)
        return Modulus(lambda s: np.asarray(s, dtype=float) ** exponent, tag, tau=exponent)
    if tag == "loglip":
        return Modulus(lambda s: s * np.log1p(1.0 / np.asarray(s, dtype=float)), tag)
    if tag == "iterated_log":
        peak = ITERATED_LOG_PEAK
        peak_value = float(_iterated_log_raw(np.asarray(peak)))

        def evaluator(s: np.ndarray) -> np.ndarray:
            s = np.asarray(s, dtype=float)
            clipped = np.minimum(s, peak)
            return np.where(s <= peak, _iterated_log_raw(clipped), peak_value)

        return Modulus(evaluator, tag, valid_upper=peak)
    raise ParameterError(f"unknown modulus tag {tag!r}")


@dataclass(frozen=True)
class AxiomReport:
    increasing: bool
    concave: bool
    vanishes_at_zero: bool

    @property
    def all_hold(self) -> bool:
        return self.increasing and self.concave and self.vanishes_at_zero


def check_axioms(
    mu: Modulus,
    grid: Sequence[float],
    tol: float,
    *,
    vanish_probe: float = VANISH_PROBE,
    vanish_threshold: float = VANISH_THRESHOLD,
) -> AxiomReport:
    """Sampled verification of the modulus axioms on a sorted grid in (0, 1].

    ``increasing`` and ``concave`` compare consecutive values and midpoint
    averages within ``tol``; ``vanishes_at_zero`` evaluates the modulus at
    ``vanish_probe`` and requires the value below ``vanish_threshold``.
    """
    pts = np.asarray(list(grid), dtype=float)
    if pts.size == 0:
        raise ParameterError("axiom check needs a nonempty grid")
    if pts.size < 3:
        raise ParameterError("axiom check needs at least 3 grid points")
    if np.any(np.diff(pts) <= 0):
        raise ParameterError("grid must be strictly increasing")
    if pts[0] <= 0 or pts[-1] > 1.0:
        raise ParameterError("grid must lie in (0, 1]")

    values = np.asarray(mu(pts), dtype=float)
    increasing = bool(np.all(np.diff(values) >= -tol))

    # Midpoint concavity over all grid pairs; the midpoint is evaluated
    # directly rather than snapped to the grid.
    i, j = np.triu_indices(pts.size, k=1)
    mid_values = np.asarray(mu((pts[i] + pts[j]) / 2.0), dtype=float)
    concave = bool(np.all(mid_values >= (values[i] + values[j]) / 2.0 - tol))

    vanishes = bool(mu(vanish_probe) < vanish_threshold)
    return AxiomReport(increasing=increasing, concave=concave, vanishes_at_zero=vanishes)


@dataclass(frozen=True)
class OsgoodReport:
    """Tail-integral table with a divergence verdict.

    ``integrals[k]`` is the integral of 1/mu from ``epsilons[k]`` to 1.
    ``classification`` is a documented heuristic on the increment sequence
    (see :func:`osgood_indicator`); the raw values stay available so any
    verdict can be audited.
    """

    epsilons: tuple[float, ...]
    integrals: tuple[float, ...]
    classification: str
    rule: str
    increments: tuple[float, ...] = field(default=())
    tail_ratios: tuple[float, ...] = field(default=())


def _tail_integral(mu: Modulus, eps: float, rtol: float) -> float:
    # Substituting s = exp(-u) flattens the near-zero blow-up of 1/mu:
    # the integrand becomes exp(-u)/mu(exp(-u)), which is 1 exactly for the
    # identity modulus and slowly varying for its log-corrected relatives.
    upper = np.log(1.0 / eps)

    def integrand(u: float) -> float:
        s = np.exp(-u)
        return float(s / mu(s))

    value, abserr = quad(integrand, 0.0, upper, epsrel=rtol, epsabs=0.0, limit=300)
    return float(value)


def osgood_indicator(
    mu: Modulus,
    eps_list: Sequence[float],
    *,
    rtol: float = 1e-10,
    ratio_threshold: float = 0.99,
    intercept_threshold: float = 0.9,
    cauchy_tol: float = 1e-6,
    window: int = 5,
) -> OsgoodReport:
    """Tabulate I(eps) = integral of 1/mu over [eps, 1] and classify the
    eps -> 0 behaviour as {diverges, converges, inconclusive}.

    True divergence of an improper integral is undecidable from finitely
    many samples, so the verdict is a heuristic on the increments
    D_k = I(eps_{k+1}) - I(eps_k) of a (roughly geometric) eps ladder:

    * diverges  -- the tail ratios D_{k+1}/D_k sit at/above
      ``ratio_threshold`` (constant mass per decade), or they increase
      monotonically with extrapolated limit >= ``intercept_threshold``
      (sub-geometric decay, harmonic-like tail);
    * converges -- the tail increments are already below ``cauchy_tol``,
      or the ratios are constant within 5% at a level <= 0.95
      (geometric tail, summable remainder);
    * inconclusive otherwise.

    Moduli whose integrals diverge/converge slower than any behaviour the
    eps range can expose (e.g. power laws with exponent within ~0.05 of 1)
    may land in the wrong bucket; the raw table is returned for audit.
    """
    eps = np.asarray(list(eps_list), dtype=float)
    if eps.size == 0:
        raise ParameterError("osgood indicator needs a nonempty eps list")
    if np.any(eps <= 0):
        raise ParameterError("eps values must be positive")
    if np.any(np.diff(eps) >= 0):
        raise ParameterError("eps list must be strictly decreasing")
    if eps.min() < 1e-14:
        raise ParameterError("eps below 1e-14 is outside the supported range")

    probe = np.geomspace(eps.min(), 1.0, 64)
    if np.any(np.asarray(mu(probe)) <= 0.0):
        raise DomainError("modulus must be positive on (min eps, 1]")

    integrals = np.array([_tail_integral(mu, e, rtol) for e in eps])

    def report(classification: str, rule: str, deltas=(), ratios=()) -> OsgoodReport:
        return OsgoodReport(
            epsilons=tuple(float(x) for x in eps),
            integrals=tuple(float(x) for x in integrals),
            classification=classification,
            rule=rule,
            increments=tuple(float(x) for x in deltas),
            tail_ratios=tuple(float(x) for x in ratios),
        )

    deltas = np.diff(integrals)
    if deltas.size == 0:
        return report("inconclusive", "single point")
    tail_deltas = deltas[-min(window, deltas.size):]
    if np.max(tail_deltas) <= cauchy_tol:
        return report("converges", "cauchy", deltas)

    if deltas.size < 2 or np.any(deltas <= 0):
        return report("inconclusive", "too few increments", deltas)
    ratios = deltas[1:] / deltas[:-1]
    tail = ratios[-min(window, ratios.size):]
    if tail.size < 3:
        return report("inconclusive", "too few ratios", deltas, ratios)

    if np.min(tail) >= ratio_threshold:
        return report("diverges", "ratio floor", deltas, ratios)

    if np.all(np.diff(tail) > 0.0):
        # Ratios drifting upward: extrapolate them linearly in 1/k to the
        # deep-eps limit (k is the position of each increment pair).
        k = np.arange(ratios.size - tail.size, ratios.size) + 2.0
        coeffs = np.polyfit(1.0 / k, tail, 1)
        intercept = float(coeffs[1])
        if intercept >= intercept_threshold:
            return report("diverges", "ratio drift to 1", deltas, ratios)

    mean_ratio = float(np.mean(tail))
    spread = float(np.max(tail) - np.min(tail))
    # Exactly geometric tails are ratio-constant down to quadrature noise
    # (<= 1e-9 relative); a 1e-4 gate leaves three orders of headroom on
    # either side against the slow divergers, whose drift is >= 1e-3.
    if spread <= 1e-4 * mean_ratio and mean_ratio <= 0.95:
        return report("converges", "geometric tail", deltas, ratios)

    return report("inconclusive", "no rule fired", deltas, ratios)


def seminorm(samples: Sequence[tuple[float, float]], mu: Modulus) -> float:
    """Largest sampled quotient |f(t) - f(s)| / mu(|t - s|) over pairs with
    0 < |t - s| < 1.

    Quadratic in the sample count; pairs are processed in row blocks so a
    1e4-point grid stays within a few hundred MB.
    """
    pts = np.asarray(list(samples), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParameterError("samples must be (t, f) pairs")
    if pts.shape[0] < 2:
        raise ParameterError("seminorm needs at least 2 samples")
    t, f = pts[:, 0], pts[:, 1]

    best = 0.0
    block = max(1, int(2e6) // pts.shape[0])
    for start in range(0, pts.shape[0], block):
        stop = min(start + block, pts.shape[0])
        dt = np.abs(t[start:stop, None] - t[None, :])
        df = np.abs(f[start:stop, None] - f[None, :])
        mask = (dt > 0.0) & (dt < 1.0)
        if not np.any(mask):
            continue
        quotients = df[mask] / np.asarray(mu(dt[mask]), dtype=float)
        best = max(best, float(np.max(quotients)))
    return best
