import numpy as np
import pytest

from osgoodlab import weights as wt
from osgoodlab.errors import DomainTruncationWarning, ParameterError, RangeError
from osgoodlab.moduli import make_canonical


def loglip_closed_form(y, lam=1.0, y0=1.0, psi0=np.e):
    # valid while psi >= 1: 1 + log psi = (1 + log psi0) * (y0/y)^lam
    return np.exp((1.0 + np.log(psi0)) * (y0 / y) ** lam - 1.0)


def test_loglip_weight_closed_form_points():
    w = wt.solve_loglip_weight(lam=1.0, y0=1.0, psi0=np.e, phi0=0.0, y1=2.0)
    assert w.psi(2.0) == pytest.approx(1.0, rel=1e-9)
    # frozen high-precision value of exp(sqrt(2) - 1)
    assert w.psi(np.sqrt(2.0)) == pytest.approx(1.5131802507448868, rel=1e-9)


def test_loglip_weight_closed_form_grid():
    w = wt.solve_loglip_weight(lam=1.0, y0=1.0, psi0=np.e, phi0=0.0, y1=2.0)
    ys = np.linspace(1.0, 2.0, 100)
    expected = loglip_closed_form(ys)
    assert np.max(np.abs(w.psi(ys) / expected - 1.0)) <= 1e-8


def test_loglip_weight_kink_crossing():
    # past psi = 1 the other branch separates to log psi = 1 - (y/y_c)
    # with y_c = 2 the crossing point; at y = 4: psi = exp(-1)
    w = wt.solve_loglip_weight(lam=1.0, y0=1.0, psi0=np.e, phi0=0.0, y1=4.0)
    assert w.psi(4.0) == pytest.approx(0.36787944117144232, rel=1e-8)
    assert not w.truncated


def test_loglip_weight_lambda_zero():
    w = wt.solve_loglip_weight(lam=0.0, y0=0.5, psi0=3.0, phi0=1.0, y1=2.0)
    ys = np.linspace(0.5, 2.0, 17)
    assert np.max(np.abs(w.psi(ys) - 3.0)) <= 1e-10
    assert w.phi(2.0) == pytest.approx(1.0 + 3.0 * 1.5, rel=1e-10)


def test_osgood_weight_power_law():
    lip = make_canonical("lipschitz")
    w = wt.solve_osgood_weight(lam=1.0, k_A=1.0, omega=lip, y0=1.0, psi0=4.0, phi0=0.0, y1=2.0)
    assert w.psi(2.0) == pytest.approx(2.0, rel=1e-9)
    ys = np.linspace(1.0, 2.0, 100)
    assert np.max(np.abs(w.psi(ys) / (4.0 * ys**-1.0) - 1.0)) <= 1e-8

    w2 = wt.solve_osgood_weight(lam=2.0, k_A=0.5, omega=lip, y0=1.0, psi0=4.0, phi0=0.0, y1=2.0)
    assert w2.psi(2.0) == pytest.approx(2.0, rel=1e-9)


def test_osgood_weight_lambda_zero():
    lip = make_canonical("lipschitz")
    w = wt.solve_osgood_weight(lam=0.0, k_A=0.5, omega=lip, y0=1.0, psi0=2.0, phi0=0.0, y1=3.0)
    assert w.psi(2.5) == pytest.approx(2.0, rel=1e-12)


def test_evaluate_weight_normalization_point():
    w = wt.solve_loglip_weight(lam=1.0, y0=1.0, psi0=np.e, phi0=0.25, y1=2.0)
    phi, psi = wt.evaluate_weight(w, 1.0)
    assert phi == pytest.approx(0.25, abs=1e-12)
    assert psi == pytest.approx(np.e, rel=1e-12)


def test_evaluate_weight_out_of_domain():
    w = wt.solve_loglip_weight(lam=1.0, y0=1.0, psi0=np.e, phi0=0.0, y1=2.0)
    with pytest.raises(RangeError):
        wt.evaluate_weight(w, 2.5)
    with pytest.raises(RangeError):
        wt.evaluate_weight(w, 0.5)


def test_weight_monotonicity_and_concavity():
    for w in (
        wt.solve_loglip_weight(lam=2.0, y0=0.5, psi0=10.0, phi0=0.0, y1=4.0),
        wt.solve_osgood_weight(2.0, 0.5, make_canonical("loglip"), 0.5, 10.0, 0.0, 3.5),
    ):
        assert np.all(np.diff(w.psi_nodes) < 0)          # strictly decreasing slope
        assert np.all(np.diff(w.phi_nodes) > 0)          # phi nondecreasing
        slopes = np.diff(w.phi_nodes) / np.diff(w.y_nodes)
        assert np.all(np.diff(slopes) <= 1e-10)          # concavity


def test_weight_residuals():
    w = wt.solve_osgood_weight(1.5, 0.5, make_canonical("loglip"), 1.0, 5.0, 0.0, 3.0)
    res = wt.residuals(w)
    assert np.max(res) <= 1e-6


def test_lambda_monotonicity():
    lip = make_canonical("lipschitz")
    w1 = wt.solve_osgood_weight(1.0, 0.5, lip, 1.0, 8.0, 0.0, 3.0)
    w2 = wt.solve_osgood_weight(2.0, 0.5, lip, 1.0, 8.0, 0.0, 3.0)
    ys = np.linspace(1.05, 3.0, 50)
    assert np.all(w2.psi(ys) < w1.psi(ys))


def test_osgood_weight_domain_truncation():
    itlog = make_canonical("iterated_log")
    # strong decay drives k_A/psi to the modulus closed-form bound
    with pytest.warns(DomainTruncationWarning):
        w = wt.solve_osgood_weight(400.0, 0.5, itlog, 1.0, 6.0, 0.0, 50.0)
    assert w.truncated
    assert w.y1 < 50.0
    assert w.truncation_reason == "modulus domain"
    # at the truncation point the argument has reached valid_upper
    assert 0.5 / w.psi(w.y1) == pytest.approx(itlog.valid_upper, rel=1e-6)


def test_weight_preconditions():
    lip = make_canonical("lipschitz")
    with pytest.raises(ParameterError):
        wt.solve_loglip_weight(1.0, 2.0, np.e, 0.0, 1.0)
    with pytest.raises(ParameterError):
        wt.solve_loglip_weight(1.0, 1.0, -1.0, 0.0, 2.0)
    with pytest.raises(ParameterError):
        wt.solve_osgood_weight(1.0, 0.5, lip, 1.0, 0.4, 0.0, 2.0)
    itlog = make_canonical("iterated_log")
    with pytest.raises(ParameterError):
        # k_A/psi0 already beyond the iterated-log closed-form bound
        wt.solve_osgood_weight(1.0, 0.5, itlog, 1.0, 0.6, 0.0, 2.0)


def test_weight_table_columns():
    w = wt.solve_loglip_weight(lam=1.0, y0=1.0, psi0=np.e, phi0=0.0, y1=2.0)
    table = w.table()
    assert table.shape[1] == 3
    assert table[0, 0] == pytest.approx(1.0)
    assert table[0, 1] == pytest.approx(np.e)
    assert table[0, 2] == pytest.approx(0.0)
