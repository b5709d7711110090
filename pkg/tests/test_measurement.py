import numpy as np
import pytest

from ncsym.measurement import (
    MeasurementError,
    MeasurementModel,
    PointerObservable,
    hybrid_interaction_bracket,
    hybrid_route_gap,
    matrix_apparatus_crosscheck,
    profile_suppression,
    stern_gerlach,
    suppression_sweep,
    uniform_suppression,
)
from ncsym.moyal import PhasePolynomial

X = PhasePolynomial.x()
P = PhasePolynomial.p()


def test_uniform_suppression_values():
    assert uniform_suppression(0.0) == pytest.approx(1.0)
    assert uniform_suppression(1e-9) == pytest.approx(1.0, abs=1e-15)
    assert uniform_suppression(np.pi) == pytest.approx(2.0 / np.pi, rel=1e-12)
    # the first zero sits at one full period
    assert uniform_suppression(2.0 * np.pi) == pytest.approx(0.0, abs=1e-15)


def test_suppression_bound_and_large_argument():
    kappas = np.logspace(-2, 9, 60)
    mags = suppression_sweep(kappas)
    bound = np.minimum(1.0, 2.0 / kappas)
    assert np.all(mags <= bound + 1e-12)
    assert uniform_suppression(1e8) <= 1e-7


def test_profile_quadrature_matches_closed_form():
    # the flat ready density on the dimensionless unit interval
    ss = np.linspace(-0.5, 0.5, 20001)
    dens = np.ones_like(ss)
    for kappa in (0.3, 1.7, 4.0, 12.0):
        got = profile_suppression(ss, dens, kappa)
        assert got == pytest.approx(uniform_suppression(kappa), abs=1e-6)


def test_profile_must_be_normalized():
    ks = np.linspace(0.0, 1.0, 101)
    with pytest.raises(MeasurementError):
        profile_suppression(ks, np.full_like(ks, 2.0), 1.0)


def test_model_kappa_eta_and_reduced_state():
    model = MeasurementModel(
        lambdas=[-1.0, 1.0],
        amplitudes=[0.6, 0.8],
        k_mean=5.0e4,
        tau=2.0e-3,
        hbar=1.0e-2,
    )
    assert model.eta(0, 1) == pytest.approx(2.0 * 5e4 * 2e-3)
    assert model.kappa(0, 1) == pytest.approx(abs(model.eta(0, 1)) / 1e-2)
    rep = model.reduced_final_state(tol=1e-4)
    assert rep["probabilities"] == pytest.approx([0.36, 0.64])
    kappa = model.kappa(0, 1)
    assert rep["offDiagonalResidual"] <= 0.6 * 0.8 * min(1.0, 2.0 / kappa) + 1e-15
    assert rep["mixtureVerdict"]
    assert rep["pointerResolved"]
    assert rep["signalRatios"] == pytest.approx([kappa])
    # a smaller hbar pushes kappa past 1e8 and the default verdict holds
    sharp = MeasurementModel(
        lambdas=[-1.0, 1.0],
        amplitudes=[0.6, 0.8],
        k_mean=5.0e4,
        tau=2.0e-3,
        hbar=1.0e-6,
    )
    assert sharp.kappa(0, 1) >= 1e8
    assert sharp.reduced_final_state()["mixtureVerdict"]


def test_model_flags_missing_signal():
    model = MeasurementModel(
        lambdas=[0.0, 1.0],
        amplitudes=[1.0, 1.0],
        k_mean=0.0,
        tau=1.0,
        hbar=1.0,
    )
    rep = model.reduced_final_state()
    assert rep["probabilities"] == pytest.approx([0.5, 0.5])
    assert float(np.sum(rep["probabilities"])) == pytest.approx(1.0)
    assert model.degenerate_signal
    assert not rep["pointerResolved"]
    # kappa vanishes, so the interference survives at full strength
    assert not rep["mixtureVerdict"]


def test_model_rejects_degenerate_eigenvalues():
    with pytest.raises(MeasurementError):
        MeasurementModel(
            lambdas=[1.0, 1.0], amplitudes=[1.0, 1.0], k_mean=1.0, tau=1.0, hbar=1.0
        )


def test_model_same_branch_interference_is_an_error():
    model = MeasurementModel(
        lambdas=[0.0, 1.0], amplitudes=[1.0, 1.0], k_mean=1.0, tau=1.0, hbar=1.0
    )
    with pytest.raises(MeasurementError):
        model.interference_magnitude(1, 1)


def test_model_eigenstate_input_has_no_interference():
    model = MeasurementModel(
        lambdas=[0.0, 1.0], amplitudes=[1.0, 0.0], k_mean=1.0, tau=1.0, hbar=1.0
    )
    rep = model.reduced_final_state()
    assert rep["probabilities"] == pytest.approx([1.0, 0.0])
    assert rep["offDiagonalResidual"] == 0.0
    assert rep["mixtureVerdict"]


def test_model_sampled_profile_matches_closed_form():
    ss = np.linspace(-0.5, 0.5, 4001)
    sampled = MeasurementModel(
        lambdas=[0.0, 1.0],
        amplitudes=[1.0, 1.0],
        k_mean=1.5,
        tau=1.0,
        hbar=1.0,
        profile=(ss, np.ones_like(ss)),
    )
    closed = MeasurementModel(
        lambdas=[0.0, 1.0], amplitudes=[1.0, 1.0], k_mean=1.5, tau=1.0, hbar=1.0
    )
    got = sampled.interference_magnitude(0, 1)
    want = closed.interference_magnitude(0, 1)
    assert got == pytest.approx(want, abs=1e-6)


def test_pointer_observable_classify_and_expectations():
    pointer = PointerObservable(
        {"down": (-3.0, -1.0), "up": (1.0, 3.0)},
        {"down": -1.0, "up": 1.0},
    )
    assert pointer.classify(2.2) == "up"
    assert pointer.classify(0.0) is None
    assert pointer.value(-1.5) == -1.0
    # the value function is constant per branch, so the uniform average over
    # the interval returns the assigned value exactly
    assert pointer.uniform_expectation("up") == pytest.approx(1.0, abs=1e-12)
    assert pointer.uniform_expectation("down") == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(MeasurementError):
        pointer.value(0.0)
    with pytest.raises(MeasurementError):
        PointerObservable(
            {"a": (0.0, 2.0), "b": (1.0, 3.0)}, {"a": 0.0, "b": 1.0}
        )


def test_pointer_observable_rejects_duplicate_values():
    with pytest.raises(MeasurementError):
        PointerObservable(
            {"a": (0.0, 1.0), "b": (2.0, 3.0)}, {"a": 1.0, "b": 1.0}
        )


def test_stern_gerlach_magnitudes():
    out = stern_gerlach()
    assert out["params"]["x3"] - out["params"]["x1"] == pytest.approx(23.0)
    assert out["params"]["z2"] - out["params"]["z1"] == pytest.approx(0.1)
    assert out["tau"] == pytest.approx(4.6e-4, rel=1e-9)
    assert out["eta"] == pytest.approx(4.14e-20, rel=1e-9)
    assert out["ratio"] == pytest.approx(3.7636e7, rel=1e-3)
    # the acceptance windows
    assert 4e-4 <= out["tau"] <= 6e-4
    assert 1e-20 <= abs(out["eta"]) <= 1e-19
    assert 1e7 <= out["ratio"] <= 1e9


def test_stern_gerlach_override():
    out = stern_gerlach({"velocity": 1.0e5})
    assert out["tau"] == pytest.approx(2.3e-4, rel=1e-9)


def test_stern_gerlach_rejects_bad_geometry():
    with pytest.raises(MeasurementError):
        stern_gerlach({"z1": 0.05, "z2": -0.05})
    with pytest.raises(MeasurementError):
        stern_gerlach({"x2": 30.0})
    with pytest.raises(MeasurementError):
        stern_gerlach({"velocity": -5.0e4})


def test_matrix_apparatus_exact_shift():
    out = matrix_apparatus_crosscheck(
        lambdas=(0, 1), amplitudes=(0.6, 0.8j), pointer_dim=3, tau=0.9
    )
    assert out["direct"] == pytest.approx([0.36, 0.64, 0.0], abs=1e-10)
    assert out["bracketRoute"] == pytest.approx(out["expected"], abs=1e-8)
    assert out["routeGap"] <= 1e-6
    assert out["agrees"]


def test_matrix_apparatus_wraps_modulo_pointer_size():
    out = matrix_apparatus_crosscheck(
        lambdas=(1, 4), amplitudes=(1.0, 1.0), pointer_dim=3, tau=0.4
    )
    # both eigenvalues shift to position 1 mod 3, so the pointer cannot
    # distinguish them and all weight lands on one cell
    assert out["expected"] == pytest.approx([0.0, 1.0, 0.0])
    assert out["direct"] == pytest.approx(out["expected"], abs=1e-10)
    assert out["routeGap"] <= 1e-6


def test_hybrid_bracket_routes_agree_at_leading_order():
    rng = np.random.default_rng(20250825)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    fmat = a + a.conj().T
    amat = b + b.conj().T
    k = X * X
    j = P * P
    hbar = 1e-3
    exact = hybrid_interaction_bracket(fmat, amat, k, j, hbar, "star")
    approx = hybrid_interaction_bracket(fmat, amat, k, j, hbar, "classical")
    scale = max(exact[r, s].norm() for r in range(2) for s in range(2))
    gap = max((exact[r, s] - approx[r, s]).norm() for r in range(2) for s in range(2))
    assert gap / scale < 1e-4
    with pytest.raises(MeasurementError):
        hybrid_interaction_bracket(fmat, amat, k, j, hbar, "diagonal")


def test_hybrid_bracket_gap_scales_quadratically():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    fmat = a + a.conj().T
    amat = b + b.conj().T
    k = X * X + P
    j = P * P * X
    hbars = np.geomspace(1e-4, 1e-2, 5)
    gaps = np.array([hybrid_route_gap(fmat, amat, k, j, h) for h in hbars])
    slope = np.polyfit(np.log(hbars), np.log(gaps), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.05)
