"""Experiment configuration: JSON-backed dataclasses with per-kind
validation and exact serialisation round-trip."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import coefficients as co
from .divergence import FAMILY_TARGETS, FamilyTuning
from .moduli import CANONICAL_TAGS, Modulus, make_canonical

KINDS = (
    "moduli-check",
    "weights-solve",
    "evolve",
    "energy-check",
    "stability-modulus",
    "divergence",
)

DEFAULT_TOLERANCES = {
    "quad_rtol": 1e-8,
    "evolve_rtol": 1e-10,
    "osgood_rtol": 1e-10,
    "axiom_tol": 1e-12,
}


class ConfigError(ValueError):
    """Validation failure; ``problems`` lists"field: message" diagnostics."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _require(spec: dict, key: str, path: str, problems: list[str]) -> Any:
    if key not in spec or spec[key] is None:
        problems.append(f"{path}.{key}: required for this experiment kind")
        return None
    return spec[key]


@dataclass(frozen=True)
class ModulusSpec:
    tag: str = "loglip"
    tau: float | None = None

    def validate(self, path: str, problems: list[str]) -> None:
        if self.tag not in CANONICAL_TAGS:
            problems.append(f"{path}.tag: unknown modulus tag {self.tag!r}")
        if self.tag == "hoelder" and (self.tau is None or not 0.0 < self.tau < 1.0):
            problems.append(f"{path}.tau: hoelder modulus needs tau in (0, 1)")
        if self.tag != "hoelder" and self.tau is not None:
            problems.append(f"{path}.tau: only meaningful for tag='hoelder'")

    def build(self) -> Modulus:
        return make_canonical(self.tag, self.tau)


@dataclass(frozen=True)
class CoefficientSpec:
    """Scalar diffusion family base + amplitude * mu(scale) * sin(2 pi t/scale)."""

    base: float = 1.0
    amplitude: float = 0.0
    scale: float = 0.01
    modulus: ModulusSpec | None = None
    n: int = 1
    k_A: float = 0.5
    T: float = 1.0
    b: tuple[float, ...] | None = None
    c: float = 0.0

    def validate(self, path: str, problems: list[str]) -> None:
        if self.amplitude < 0.0:
            problems.append(f"{path}.amplitude: must be nonnegative")
        if self.amplitude > 0.0 and self.modulus is None:
            problems.append(f"{path}.modulus: required when amplitude > 0")
        if self.modulus is not None:
            self.modulus.validate(f"{path}.modulus", problems)
        if not (0.0 < self.k_A < 1.0):
            problems.append(f"{path}.k_A: must lie in (0, 1)")
        if self.T <= 0.0:
            problems.append(f"{path}.T: must be positive")
        if self.amplitude > 0.0 and not (0.0 < self.scale < 1.0):
            problems.append(f"{path}.scale: must lie in (0, 1)")

    def build(self) -> co.CoefficientSet:
        if self.amplitude > 0.0:
            a = co.synthesize_scalar(self.modulus.build(), self.amplitude, self.scale, self.base)
        else:
            a = co.constant_scalar(self.base)
        return co.scalar_diffusion(a, n=self.n, k_A=self.k_A, T=self.T,
                                   b=self.b, c=self.c if self.c != 0.0 else None)


@dataclass(frozen=True)
class WeightSpec:
    kind: str = "osgood_ode"
    lam: float = 1.0
    y0: float = 0.5
    psi0: float = 20.0
    phi0: float = 0.0
    y1: float = 1.0
    k_A: float | None = 0.5
    omega: ModulusSpec | None = field(default_factory=ModulusSpec)

    def validate(self, path: str, problems: list[str]) -> None:
        if self.kind not in ("loglip_ode", "osgood_ode"):
            problems.append(f"{path}.kind: must be 'loglip_ode' or 'osgood_ode'")
        if not (0.0 < self.y0 < self.y1):
            problems.append(f"{path}: need 0 < y0 < y1")
        if self.psi0 <= 0.0:
            problems.append(f"{path}.psi0: must be positive")
        if self.lam < 0.0:
            problems.append(f"{path}.lam: must be nonnegative")
        if self.kind == "osgood_ode":
            if self.k_A is None or self.k_A <= 0.0:
                problems.append(f"{path}.k_A: required positive for the osgood weight")
            if self.omega is None:
                problems.append(f"{path}.omega: required for the osgood weight")
            else:
                self.omega.validate(f"{path}.omega", problems)


@dataclass(frozen=True)
class FieldSpec:
    """Initial data: a Gaussian profile on the xi grid, or explicit modes."""

    kind: str = "gaussian"
    eps: float = 1.0
    K: float = 1.0
    xi: tuple[float, ...] | None = None
    amp_re: tuple[float, ...] | None = None
    amp_im: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    def validate(self, path: str, problems: list[str]) -> None:
        if self.kind not in ("gaussian", "modes"):
            problems.append(f"{path}.kind: must be 'gaussian' or 'modes'")
        if self.kind == "gaussian" and self.K <= 0.0:
            problems.append(f"{path}.K: must be positive")
        if self.kind == "modes":
            if not self.xi or not self.amp_re:
                problems.append(f"{path}: explicit modes need xi and amp_re lists")
            else:
                n = len(self.xi)
                for name in ("amp_re", "amp_im", "weights"):
                    values = getattr(self, name)
                    if values is not None and len(values) != n:
                        problems.append(f"{path}.{name}: length must match xi")


@dataclass(frozen=True)
class GridsSpec:
    t_start: float = 0.0
    t_stop: float = 1.0
    t_num: int = 21
    xi_max: float = 32.0
    xi_n_linear: int = 8
    xi_n_geometric: int = 40
    eps_log10_start: float = -6.0
    eps_log10_stop: float = -2.0
    eps_num: int = 9

    def validate(self, path: str, problems: list[str]) -> None:
        if self.t_num < 2 or self.t_stop <= self.t_start:
            problems.append(f"{path}: time grid must be nonempty and increasing")
        if self.xi_max <= 1.0:
            problems.append(f"{path}.xi_max: must exceed 1")
        if self.eps_num < 1:
            problems.append(f"{path}.eps_num: must be positive")

    def t_values(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_stop, self.t_num)

    def eps_values(self) -> np.ndarray:
        return np.logspace(self.eps_log10_start, self.eps_log10_stop, self.eps_num)


@dataclass(frozen=True)
class DivergenceSpec:
    target: str = "loglip"
    k_max: int = 25
    delta: float = 0.5
    N: float | None = None
    base: float = 1.0
    amplitude: float = 0.1
    k_A: float = 0.5
    D: float = 1.0
    T: float = 1.0
    h0: float = 0.5
    xi_scale: float = 0.004
    amp_scale: float = 1.0

    def validate(self, path: str, problems: list[str]) -> None:
        if self.target not in FAMILY_TARGETS:
            problems.append(f"{path}.target: must be one of {FAMILY_TARGETS}")
        if not (1 <= self.k_max <= 40):
            problems.append(f"{path}.k_max: must lie in 1..40")
        if not (0.0 < self.delta < 1.0):
            problems.append(f"{path}.delta: must lie in (0, 1)")
        if self.N is not None and self.N <= 0.0:
            problems.append(f"{path}.N: must be positive when given")

    def tuning(self) -> FamilyTuning:
        return FamilyTuning(
            base=self.base, amplitude=self.amplitude, k_A=self.k_A, D=self.D,
            T=self.T, h0=self.h0, xi_scale=self.xi_scale, amp_scale=self.amp_scale,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    coefficients: CoefficientSpec | None = None
    modulus: ModulusSpec | None = None
    weight: WeightSpec | None = None
    initial_field: FieldSpec | None = None
    grids: GridsSpec = field(default_factory=GridsSpec)
    divergence: DivergenceSpec | None = None
    params: dict[str, float] = field(default_factory=dict)
    fit: str | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    csv_name: str | None = None

    def tolerance(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def output_csv(self) -> str:
        return self.csv_name or f"{self.kind}.csv"

    # -- dict round-trip ----------------------------------------------------

    def to_dict(self) -> dict:
        raw = asdict(self)
        return _strip_none(raw)

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        problems: list[str] = []
        if not isinstance(data, dict):
            raise ConfigError(["config: top level must be a JSON object"])
        known = {
            "kind", "coefficients", "modulus", "weight", "initial_field",
            "grids", "divergence", "params", "fit", "tolerances", "csv_name",
        }
        for key in data:
            if key not in known:
                problems.append(f"{key}: unknown configuration field")
        kind = data.get("kind")
        if kind not in KINDS:
            problems.append(f"kind: must be one of {KINDS}, got {kind!r}")
            raise ConfigError(problems)

        def sub(cls, key):
            value = data.get(key)
            if value is None:
                return None
            if not isinstance(value, dict):
                problems.append(f"{key}: must be an object")
                return None
            try:
                return _build_dataclass(cls, value, key, problems)
            except TypeError as exc:
                problems.append(f"{key}: {exc}")
                return None

        cfg = ExperimentConfig(
            kind=kind,
            coefficients=sub(CoefficientSpec, "coefficients"),
            modulus=sub(ModulusSpec, "modulus"),
            weight=sub(WeightSpec, "weight"),
            initial_field=sub(FieldSpec, "initial_field"),
            grids=sub(GridsSpec, "grids") or GridsSpec(),
            divergence=sub(DivergenceSpec, "divergence"),
            params={k: float(v) for k, v in (data.get("params") or {}).items()},
            fit=data.get("fit"),
            tolerances={k: float(v) for k, v in (data.get("tolerances") or {}).items()},
            csv_name=data.get("csv_name"),
        )
        if problems:
            raise ConfigError(problems)
        cfg.validate()
        return cfg

    # -- validation ----------------------------------------------------------

    def _need_params(self, names: list[str], problems: list[str]) -> None:
        for name in names:
            if name not in self.params:
                problems.append(f"params.{name}: required for kind '{self.kind}'")

    def validate(self) -> None:
        problems: list[str] = []
        if self.kind not in KINDS:
            problems.append(f"kind: must be one of {KINDS}")
        for key in self.tolerances:
            if key not in DEFAULT_TOLERANCES:
                problems.append(f"tolerances.{key}: unknown tolerance")
        self.grids.validate("grids", problems)

        if self.kind == "moduli-check":
            if self.modulus is None:
                problems.append("modulus: required for kind 'moduli-check'")
            else:
                self.modulus.validate("modulus", problems)

        elif self.kind == "weights-solve":
            if self.weight is None:
                problems.append("weight: required for kind 'weights-solve'")
            else:
                self.weight.validate("weight", problems)

        elif self.kind == "evolve":
            if self.coefficients is None:
                problems.append("coefficients: required for kind 'evolve'")
            else:
                self.coefficients.validate("coefficients", problems)
            if self.initial_field is None:
                problems.append("initial_field: required for kind 'evolve'")
            else:
                self.initial_field.validate("initial_field", problems)
            self._need_params(["t_target"], problems)
            if self.coefficients is not None and "t_target" in self.params:
                if not (0.0 <= self.params["t_target"] <= self.coefficients.T):
                    problems.append("params.t_target: must lie in [0, coefficients.T]")

        elif self.kind == "energy-check":
            if self.coefficients is None:
                problems.append("coefficients: required for kind 'energy-check'")
            else:
                self.coefficients.validate("coefficients", problems)
            if self.weight is None:
                problems.append("weight: required for kind 'energy-check'")
            else:
                self.weight.validate("weight", problems)
            if self.modulus is None:
                problems.append("modulus: required for kind 'energy-check'")
            else:
                self.modulus.validate("modulus", problems)
            self._need_params(["gamma", "beta", "tau", "alpha", "sigma", "k_A", "amp0"], problems)
            if self.weight is not None and "lam" in self.params and self.params["lam"] != self.weight.lam:
                problems.append("params.lam: disagrees with weight.lam")

        elif self.kind == "stability-modulus":
            if self.coefficients is None:
                problems.append("coefficients: required for kind 'stability-modulus'")
            else:
                self.coefficients.validate("coefficients", problems)
            self._need_params(["D", "T", "T_prime"], problems)
            if {"T", "T_prime"} <= self.params.keys():
                if not (0.0 < self.params["T_prime"] < self.params["T"]):
                    problems.append("params.T_prime: must satisfy 0 < T_prime < T")
            if self.fit is not None and self.fit not in ("hoelder", "loglip", "osgood_psi"):
                problems.append("fit: must be 'hoelder', 'loglip' or 'osgood_psi'")

        elif self.kind == "divergence":
            if self.divergence is None:
                problems.append("divergence: required for kind 'divergence'")
            else:
                self.divergence.validate("divergence", problems)

        if problems:
            raise ConfigError(problems)


def _strip_none(value):
    if isinstance(value, dict):
        return {k: _strip_none(v) for k, v in value.items() if v is not None}
    if isinstance(value, (list, tuple)):
        return [_strip_none(v) for v in value]
    return value


def _build_dataclass(cls, data: dict, path: str, problems: list[str]):
    fields = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    for key in data:
        if key not in fields:
            problems.append(f"{path}.{key}: unknown field")
    kwargs = {}
    for key, value in data.items():
        if key not in fields:
            continue
        if key in ("modulus", "omega") and isinstance(value, dict):
            value = _build_dataclass(ModulusSpec, value, f"{path}.{key}", problems)
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return cls(**kwargs)
