import numpy as np
import pytest

from osgoodlab import divergence as dv
from osgoodlab import estimates as es
from osgoodlab.errors import DomainTruncationWarning, ParameterError
from osgoodlab.moduli import make_canonical, seminorm


def test_single_member_family_invariants():
    fam = dv.build_family("loglip", 1)
    assert len(fam.members) == 1
    m = fam.members[0]
    assert m.h == 0.25
    assert m.norm0() < fam.D
    assert m.measured_seminorm <= (2 * np.pi + 2) * fam.tuning.amplitude


@pytest.fixture(scope="module")
def loglip_family():
    return dv.build_family("loglip", 25)


def test_initial_norms_strictly_decreasing(loglip_family):
    fam = loglip_family
    norms = [m.log_norm0 for m in fam.members]
    assert all(np.diff(norms) < 0)


def test_uniform_seminorm_budget(loglip_family):
    fam = loglip_family
    budget = (2 * np.pi + 2) * fam.tuning.amplitude
    assert fam.seminorm_bound <= budget
    # spot re-measure one deep member on its own oscillation window
    m = fam.members[15]
    ts = np.linspace(0.0, 4 * m.h, 2049)
    a_vals = m.coefficient_set.a_scalar(ts)
    measured = seminorm(list(zip(ts, a_vals)), make_canonical("loglip"))
    assert measured <= budget


def test_hoelder_ratios_diverge(loglip_family):
    fam = loglip_family
    for delta in (0.1, 0.3, 0.5, 0.7, 0.9):
        table = dv.hoelder_ratio(fam, delta)
        ratios = np.array(table.ratios)
        assert np.all(np.diff(ratios[4:]) > 0)
        assert np.max(ratios) > 1e3


def test_loglip_ratios_diverge(loglip_family):
    fam = loglip_family
    table = dv.loglip_ratio(fam, N=1.0, delta=0.5)
    ratios = np.array(table.ratios)
    assert np.all(np.diff(ratios[4:]) > 0)
    assert ratios[-1] > 1e3


def test_iterated_log_family_builds():
    fam = dv.build_family("iterated_log", 15)
    assert fam.target == "iterated_log"
    assert fam.seminorm_bound <= (2 * np.pi + 2) * fam.tuning.amplitude
    table = dv.hoelder_ratio(fam, 0.5)
    assert np.all(np.diff(np.array(table.ratios)[4:]) > 0)


def test_zero_amplitude_scale_degenerate():
    fam = dv.build_family("loglip", 5, dv.FamilyTuning(amp_scale=0.0))
    table = dv.hoelder_ratio(fam, 0.5)
    assert all(table.excluded)
    assert all(r == 0.0 for r in table.ratios)


def test_family_truncates_before_overflow():
    tuning = dv.FamilyTuning(xi_scale=1.0, max_log_growth=600.0)
    with pytest.warns(DomainTruncationWarning):
        fam = dv.build_family("loglip", 20, tuning)
    assert len(fam.members) < 20
    assert fam.notes


def test_constant_frequency_family_is_bounded():
    # no divergence mechanism when xi does not grow: ratios stay flat
    tuning = dv.FamilyTuning(xi_scale=1.0)
    fam = dv.build_family("loglip", 8, tuning)
    fixed_xi = [
        dv.FamilyMember(
            k=m.k, h=m.h, xi=fam.members[0].xi, t_k=m.t_k,
            coefficient_set=m.coefficient_set,
            log_norm0=fam.members[0].log_norm0,
            log_norm_tk=fam.members[0].log_norm_tk,
            measured_seminorm=m.measured_seminorm,
        )
        for m in fam.members
    ]
    flat = dv.DivergenceFamily(target="loglip", members=tuple(fixed_xi),
                               tuning=tuning, seminorm_bound=fam.seminorm_bound)
    ratios = np.array(dv.hoelder_ratio(flat, 0.5).ratios)
    assert np.max(ratios) / np.min(ratios) < 1.0 + 1e-9


def test_negative_control_log_convexity():
    # constant coefficients at the log-convexity exponent: the ratio equals
    # D^(T'/T) exactly, member for member
    tuning = dv.FamilyTuning(amplitude=0.0, xi_scale=1.0, t_grid=(0.5,))
    fam = dv.build_family("lipschitz", 8, tuning)
    delta_star = 1.0 - 0.5 / tuning.T
    table = dv.hoelder_ratio(fam, delta_star)
    for r in table.ratios:
        assert r == pytest.approx(tuning.D**0.5, rel=1e-10)


def test_negative_control_stays_below_fitted_bound():
    tuning = dv.FamilyTuning(amplitude=0.1, xi_scale=1.0, t_grid=(0.5,))
    fam = dv.build_family("lipschitz", 8, tuning)
    cs = fam.members[0].coefficient_set
    eps_list = [m.norm0() for m in fam.members]
    xi_grid = np.array([[0.0]] + [[m.xi] for m in fam.members])
    t_grid = np.linspace(0.0, tuning.T, 9)
    # every member's own coefficient set differs slightly (scale h_k); the
    # LP bound is computed per member against its own dynamics
    ratios, fits = [], []
    for m, eps in zip(fam.members, eps_list):
        table = es.stability_modulus(
            m.coefficient_set, tuning.D, tuning.T, 0.5, eps_list, xi_grid, t_grid
        )
        bound = es.fit_bound(table, "hoelder")
        envelope = bound.M * np.exp(bound.diagnostics["max_log_residual"])
        r = dv.hoelder_ratio(fam, bound.delta).ratios[m.k - 1]
        ratios.append(r)
        fits.append(envelope * eps ** 0.0)
        assert r <= envelope * (1.0 + 1e-9), (m.k, r, envelope)


def test_family_rows_columns():
    fam = dv.build_family("loglip", 3)
    header, rows = dv.family_rows(fam, dv.hoelder_ratio(fam, 0.5))
    assert header == ["k", "h_k", "xi_k", "t_k", "norm0", "norm_tk", "ratio"]
    assert len(rows) == 3
    assert rows[0][0] == 1


def test_build_family_validation():
    with pytest.raises(ParameterError):
        dv.build_family("nope", 5)
    with pytest.raises(ParameterError):
        dv.build_family("loglip", 0)
    with pytest.raises(ParameterError):
        dv.build_family("loglip", 50)
    with pytest.raises(ParameterError):
        dv.build_family("loglip", 5, dv.FamilyTuning(amplitude=3.0, h0=0.9))
    fam = dv.build_family("loglip", 3)
    with pytest.raises(ParameterError):
        dv.hoelder_ratio(fam, 1.5)
    with pytest.raises(ParameterError):
        dv.loglip_ratio(fam, -1.0, 0.5)
