import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osgoodlab import moduli
from osgoodlab.errors import DomainError, ParameterError
from osgoodlab.moduli import check_axioms, make_canonical, osgood_indicator, seminorm

CANONICAL = [
    make_canonical("lipschitz"),
    make_canonical("hoelder", 0.5),
    make_canonical("hoelder", 0.9),
    make_canonical("loglip"),
    make_canonical("iterated_log"),
]


def test_canonical_values():
    assert make_canonical("lipschitz")(0.5) == 0.5
    assert make_canonical("hoelder", 0.5)(0.25) == pytest.approx(0.5, rel=1e-15)
    # 0.5*log(3), frozen from a 30-digit evaluation
    assert make_canonical("loglip")(0.5) == pytest.approx(0.54930614433405485, rel=1e-14)


def test_make_canonical_rejects_bad_tau():
    with pytest.raises(ParameterError):
        make_canonical("hoelder")
    with pytest.raises(ParameterError):
        make_canonical("hoelder", 1.5)
    with pytest.raises(ParameterError):
        make_canonical("lipschitz", 0.5)
    with pytest.raises(ParameterError):
        make_canonical("nope")


def test_iterated_log_truncation_keeps_axioms():
    mu = make_canonical("iterated_log")
    assert 0.1 < mu.valid_upper < 0.2
    grid = np.linspace(1e-4, 1.0, 1000)
    rep = check_axioms(mu, grid, tol=1e-12)
    assert rep.increasing and rep.concave and rep.vanishes_at_zero
    # constant extension beyond the closed-form peak
    assert mu(0.9) == mu(mu.valid_upper)
    assert mu(1e-6) > 0


def test_check_axioms_examples():
    lip = make_canonical("lipschitz")
    rep = check_axioms(lip, np.linspace(0.01, 1.0, 100), tol=1e-12)
    assert rep.all_hold

    convex = moduli.Modulus(lambda s: np.asarray(s) ** 2, "custom")
    rep = check_axioms(convex, np.linspace(0.01, 1.0, 100), tol=1e-12)
    assert not rep.concave

    loglip = make_canonical("loglip")
    rep = check_axioms(loglip, np.linspace(1e-3, 1.0, 1000), tol=1e-12)
    assert rep.all_hold


def test_check_axioms_second_derivative_oracle():
    # independent concavity oracle: centred second differences of the
    # loglip closed form are negative everywhere on the grid interior
    mu = make_canonical("loglip")
    s = np.linspace(1e-3, 1.0, 1000)
    h = 1e-5
    second = mu(s + h) - 2.0 * mu(s) + np.maximum(mu(s - h), 0) * 0 + mu(np.maximum(s - h, 1e-9))
    assert np.all(second[1:-1] < 0)


def test_check_axioms_all_canonical():
    grid = np.linspace(1e-3, 1.0, 1000)
    for mu in CANONICAL:
        probe = 1e-12 if (mu.tau is None or mu.tau > 0.5) else 1e-13
        rep = check_axioms(mu, grid, tol=1e-12, vanish_probe=probe)
        assert rep.all_hold, mu.tag
    # a tau deep below 1/2 needs a proportionally smaller probe point
    rep = check_axioms(make_canonical("hoelder", 0.3), grid, tol=1e-12, vanish_probe=1e-21)
    assert rep.all_hold


def test_check_axioms_input_validation():
    lip = make_canonical("lipschitz")
    with pytest.raises(ParameterError):
        check_axioms(lip, [], tol=1e-12)
    with pytest.raises(ParameterError):
        check_axioms(lip, [0.1, 0.2], tol=1e-12)
    with pytest.raises(ParameterError):
        check_axioms(lip, [0.3, 0.2, 0.1], tol=1e-12)


def test_osgood_lipschitz_analytic():
    eps = np.logspace(-1, -8, 8)
    rep = osgood_indicator(make_canonical("lipschitz"), eps)
    table = dict(zip(rep.epsilons, rep.integrals))
    assert table[1e-4] == pytest.approx(np.log(1e4), rel=1e-10)
    assert rep.classification == "diverges"


def test_osgood_short_ladder_is_inconclusive():
    rep = osgood_indicator(make_canonical("lipschitz"), [1e-2, 1e-3, 1e-4])
    assert rep.classification == "inconclusive"


def test_osgood_hoelder_analytic():
    tau = 0.5
    eps = np.logspace(-2, -12, 11)
    rep = osgood_indicator(make_canonical("hoelder", tau), eps)
    for e, value in zip(rep.epsilons, rep.integrals):
        assert value == pytest.approx(2.0 * (1.0 - np.sqrt(e)), rel=1e-10)
    assert rep.classification == "converges"


def test_osgood_loglip_against_mpmath_oracle():
    # frozen from mpmath.quad at 30 digits on the untransformed integrand
    oracle = {1e-2: 2.4655316514822584, 1e-6: 3.5638035833201165,
              1e-10: 4.0746292024763045, 1e-12: 4.2569507592700863}
    eps = np.logspace(-2, -12, 11)
    rep = osgood_indicator(make_canonical("loglip"), eps, rtol=1e-10)
    table = dict(zip(rep.epsilons, rep.integrals))
    for e, expected in oracle.items():
        assert table[e] == pytest.approx(expected, rel=1e-9)
    assert rep.classification == "diverges"


def test_osgood_classifications():
    eps = np.logspace(-2, -12, 11)
    for tag in ("lipschitz", "loglip", "iterated_log"):
        assert osgood_indicator(make_canonical(tag), eps).classification == "diverges"
    for tau in (0.3, 0.5, 0.9):
        assert osgood_indicator(make_canonical("hoelder", tau), eps).classification == "converges"


def test_osgood_input_validation():
    lip = make_canonical("lipschitz")
    with pytest.raises(ParameterError):
        osgood_indicator(lip, [])
    with pytest.raises(ParameterError):
        osgood_indicator(lip, [1e-3, 1e-2])
    with pytest.raises(ParameterError):
        osgood_indicator(lip, [1e-2, 1e-16])
    negative = moduli.Modulus(lambda s: np.asarray(s) - 0.5, "custom")
    with pytest.raises(DomainError):
        osgood_indicator(negative, [1e-2, 1e-3])


def test_seminorm_examples():
    lip = make_canonical("lipschitz")
    grid = np.linspace(0.0, 0.9, 200)
    constant = [(t, 3.0) for t in grid]
    assert seminorm(constant, lip) == 0.0

    identity = [(t, t) for t in grid]
    assert seminorm(identity, lip) == pytest.approx(1.0, rel=1e-12)

    h = make_canonical("hoelder", 0.5)
    grid = np.linspace(0.0, 0.9, 1000)
    sqrt_samples = [(t, np.sqrt(t)) for t in grid]
    # supremum attained on pairs containing t = 0, where it is exactly 1
    assert seminorm(sqrt_samples, h) == pytest.approx(1.0, abs=1e-9)


def test_seminorm_validation():
    lip = make_canonical("lipschitz")
    with pytest.raises(ParameterError):
        seminorm([(0.0, 1.0)], lip)


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_seminorm_homogeneity(scale):
    lip = make_canonical("lipschitz")
    grid = np.linspace(0.0, 0.8, 37)
    f = np.sin(5.0 * grid) + grid**2
    base = seminorm(list(zip(grid, f)), lip)
    scaled = seminorm(list(zip(grid, scale * f)), lip)
    assert scaled == pytest.approx(abs(scale) * base, rel=1e-12, abs=1e-300)


def test_seminorm_modulus_domination():
    # mu1 >= mu2 pointwise on (0,1) implies the mu1-seminorm is smaller
    grid = np.linspace(0.0, 0.9, 101)
    f = np.cos(3.0 * grid)
    samples = list(zip(grid, f))
    loglip = make_canonical("loglip")   # >= lipschitz on (0, 1)
    lip = make_canonical("lipschitz")
    assert seminorm(samples, loglip) <= seminorm(samples, lip) + 1e-15
