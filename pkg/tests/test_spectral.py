import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osgoodlab import coefficients as co
from osgoodlab import spectral as sp
from osgoodlab.errors import ParameterError, SaturationError
from osgoodlab.moduli import make_canonical


def heat_cs(T=2.0):
    return co.scalar_diffusion(1.0, k_A=0.5, T=T)


def test_evolve_constant_coefficient_mode():
    field = sp.single_mode(1.0, 1.0 + 0.0j)
    out = sp.evolve(field, heat_cs(), 1.0)
    assert out.amp[0] == pytest.approx(np.e, rel=1e-12)
    assert out.time == 1.0


def test_evolve_identity_at_same_time():
    field = sp.single_mode(1.0, 0.3 + 0.1j)
    out = sp.evolve(field, heat_cs(), 0.0)
    assert out is field


def test_evolve_linear_coefficient():
    cs = co.matrix_coefficients(lambda t: np.array([[1.0 + t / 2.0]]), n=1, k_A=0.5, T=1.0)
    field = sp.single_mode(1.0, 1.0 + 0.0j)
    out = sp.evolve(field, cs, 1.0)
    # frozen from the antiderivative s + s^2/4: exp(1.25)
    assert out.amp[0] == pytest.approx(3.4903429574618414, rel=1e-10)


def test_evolve_semigroup():
    cs = co.scalar_diffusion(
        co.synthesize_scalar(make_canonical("loglip"), 0.1, 0.05, 1.0), k_A=0.5, T=1.0
    )
    xi, w = sp.frequency_grid_1d(xi_max=4.0, n_linear=4, n_geometric=6)
    field = sp.gaussian_data(1, 1.0, 1.0, (xi, w))
    direct = sp.evolve(field, cs, 0.8)
    stepped = sp.evolve(sp.evolve(field, cs, 0.3), cs, 0.8)
    assert np.max(np.abs(stepped.amp - direct.amp)) <= 1e-9 * np.max(np.abs(direct.amp))


def test_evolve_growth_monotone_without_zero_order():
    cs = heat_cs()
    field = sp.single_mode(2.0, 0.5 + 0.5j)
    norms = [abs(sp.evolve(field, cs, t).amp[0]) for t in (0.0, 0.2, 0.5, 1.0)]
    assert np.all(np.diff(norms) >= 0)


@settings(max_examples=25, deadline=None)
@given(
    a_re=st.floats(-2, 2), a_im=st.floats(-2, 2),
    b_re=st.floats(-2, 2), b_im=st.floats(-2, 2),
)
def test_evolve_linearity(a_re, a_im, b_re, b_im):
    cs = heat_cs()
    amp1, amp2 = complex(a_re, a_im), complex(b_re, b_im)
    f1 = sp.single_mode(1.5, amp1)
    f2 = sp.single_mode(1.5, amp2)
    combined = sp.single_mode(1.5, amp1 + amp2)
    lhs = sp.evolve(combined, cs, 0.4).amp[0]
    rhs = sp.evolve(f1, cs, 0.4).amp[0] + sp.evolve(f2, cs, 0.4).amp[0]
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_evolve_saturation_aborts():
    field = sp.single_mode(40.0, 1.0 + 0.0j)
    with pytest.raises(SaturationError) as err:
        sp.evolve(field, heat_cs(), 1.0)
    assert err.value.diagnostics["modes"]


def test_zero_amplitude_modes_stay_zero():
    field = sp.SpectralField(
        n=1, xi=np.array([[40.0], [1.0]]), amp=np.array([0.0 + 0.0j, 1.0 + 0.0j])
    )
    out = sp.evolve(field, heat_cs(), 1.0)
    assert out.amp[0] == 0.0
    assert out.amp[1] == pytest.approx(np.e, rel=1e-12)


def test_norm_examples():
    field = sp.single_mode(1.0, 1.0 + 0.0j)
    assert sp.l2_norm(field) == 1.0
    assert sp.sobolev_norm(field, 1.0) ** 2 == pytest.approx(2.0, rel=1e-15)
    spec = sp.WeightedNormSpec(d=0.0, a=1.0, omega=make_canonical("lipschitz"))
    # exp(1 * 1 * omega(1/2)) = exp(0.5), frozen
    assert sp.weighted_norm(field, spec) ** 2 == pytest.approx(1.6487212707001281, rel=1e-12)


def test_norm_identities_exact():
    rng = np.random.default_rng(7)
    xi, w = sp.frequency_grid_1d(xi_max=8.0, n_linear=4, n_geometric=10)
    amp = rng.standard_normal(xi.shape[0]) + 1j * rng.standard_normal(xi.shape[0])
    field = sp.SpectralField(n=1, xi=xi, amp=amp, weights=w)
    assert sp.sobolev_norm(field, 0.0) == sp.l2_norm(field)
    spec0 = sp.WeightedNormSpec(d=1.3, a=0.0, omega=make_canonical("loglip"))
    assert sp.weighted_norm(field, spec0) == sp.sobolev_norm(field, 1.3)


def test_norm_ordering_and_lipschitz_equivalence():
    rng = np.random.default_rng(11)
    xi, w = sp.frequency_grid_1d(xi_max=16.0, n_linear=8, n_geometric=12)
    amp = rng.standard_normal(xi.shape[0]) + 1j * rng.standard_normal(xi.shape[0])
    field = sp.SpectralField(n=1, xi=xi, amp=amp, weights=w)
    lip = make_canonical("lipschitz")
    for a in (0.0, 0.5, 2.0):
        spec = sp.WeightedNormSpec(d=1.0, a=a, omega=lip)
        wn, sn = sp.weighted_norm(field, spec), sp.sobolev_norm(field, 1.0)
        assert wn >= sn
        assert wn**2 / sn**2 <= np.exp(a) * (1 + 1e-12)


def test_gaussian_data_closed_form():
    xi, w = sp.frequency_grid_1d(xi_max=8.0, n_linear=64, n_geometric=256)
    field = sp.gaussian_data(1, 1.0, 1.0, (xi, w))
    # continuum limit: integral of exp(-2 xi^2) = sqrt(pi/2), frozen
    assert sp.l2_norm(field) ** 2 == pytest.approx(1.2533141373155003, rel=1e-3)

    zero = sp.gaussian_data(1, 0.0, 1.0, (xi, w))
    assert sp.l2_norm(zero) == 0.0

    small = sp.gaussian_data(1, 1e-3, 1.0, (xi, w))
    assert sp.l2_norm(small) == pytest.approx(1e-3 * sp.l2_norm(field), rel=1e-12)


def test_squared_l2_is_weighted_mode_sum():
    xi, w = sp.frequency_grid_1d(xi_max=4.0, n_linear=4, n_geometric=4)
    rng = np.random.default_rng(3)
    amp = rng.standard_normal(xi.shape[0]) * 1j
    field = sp.SpectralField(n=1, xi=xi, amp=amp, weights=w)
    assert sp.l2_norm(field) ** 2 == pytest.approx(float(np.sum(w * np.abs(amp) ** 2)), rel=1e-12)


def test_trajectory_matches_evolve():
    cs = co.scalar_diffusion(
        co.synthesize_scalar(make_canonical("loglip"), 0.2, 0.1, 1.0), k_A=0.4, T=1.0
    )
    xi, w = sp.frequency_grid_1d(xi_max=4.0, n_linear=4, n_geometric=6)
    field = sp.gaussian_data(1, 1.0, 0.5, (xi, w))
    traj = sp.Trajectory(field, cs)
    for t in (0.0, 0.35, 1.0):
        expected = sp.evolve(field, cs, t)
        got = traj.field_at(t)
        assert np.max(np.abs(got.amp - expected.amp)) <= 1e-9 * (1 + np.max(np.abs(expected.amp)))


def test_trajectory_general_matrix_path():
    cs = co.matrix_coefficients(
        lambda t: np.array([[1.0 + 0.2 * np.sin(t), 0.05], [0.05, 1.2]]),
        n=2, k_A=0.5, T=1.0,
        b=lambda t: np.array([0.1, -0.2 * t]),
        c=lambda t: 0.3,
    )
    field = sp.SpectralField(
        n=2, xi=np.array([[1.0, 0.0], [0.5, -1.0]]), amp=np.array([1.0 + 0j, 0.5 - 0.25j])
    )
    traj = sp.Trajectory(field, cs)
    out = traj.field_at(0.7)
    expected = sp.evolve(field, cs, 0.7)
    assert np.max(np.abs(out.amp - expected.amp)) <= 1e-8 * np.max(np.abs(expected.amp))


def test_field_validation():
    with pytest.raises(ParameterError):
        sp.SpectralField(n=1, xi=np.array([[1.0], [1.0]]), amp=np.array([1.0 + 0j, 2.0 + 0j]))
    with pytest.raises(ParameterError):
        sp.SpectralField(n=1, xi=np.array([[1.0]]), amp=np.array([1.0 + 0j]),
                         weights=np.array([-1.0]))
    with pytest.raises(ParameterError):
        sp.gaussian_data(1, 1.0, -2.0, sp.frequency_grid_1d(4.0, 2, 2))


def test_field_rows_columns():
    field = sp.single_mode(1.5, 0.5 + 0.25j, time=0.3)
    header, rows = sp.field_rows(field)
    assert header == ["xi_1", "re_amp", "im_amp", "weight", "time"]
    assert rows[0] == (1.5, 0.5, 0.25, 1.0, 0.3)


def test_two_dimensional_grid_weights():
    xi, w = sp.frequency_grid(n=2, xi_max=4.0, n_linear=2, n_geometric=4)
    assert xi.shape[1] == 2
    assert w.shape[0] == xi.shape[0]
    # product trapezoid weights integrate a product Gaussian to sqrt(pi/2)^2
    total = float(np.sum(w * np.exp(-2.0 * np.einsum("ij,ij->i", xi, xi))))
    assert total == pytest.approx(np.pi / 2.0, rel=0.05)
