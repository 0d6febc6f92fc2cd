import numpy as np
import pytest

from kreinq import (AlphaType, EmptyZQ, QSingular, SampleSpec, SpectrumHit, compare_spectrum, identity_suite,
                    krein_resolvent, lambda_hat, reconstruct_operator, resolvent0, spectrum_aq_via_q,
                    verify_first_resolvent_identity, verify_main_theorem)
from kreinq.krein_extension import _fc_residual, reference_points, sample_points, spectrum_discrepancy
from kreinq.models import lattice_delta, pinned_two_level, singular_family_model
from kreinq.operator_model import dagger

from conftest import seed7

# hand oracle for A0 = diag(1, 2), tau = [1, 0], alpha = 1/2:
# Q_z = -(1 - 1/2 * 1/(1 - z)) vanishes at z = 1/2, so A_Q = diag(1/2, 2)
PINNED_AQ = np.diag([0.5, 2.0])
PINNED_R0 = np.diag([-2.0, -0.5])


def test_alpha_zero_resolvent_is_free():
    model, _ = seed7()
    r = krein_resolvent(model, AlphaType(alpha=np.zeros((2, 2))), 0.3 + 0.9j).r
    np.testing.assert_array_equal(r, resolvent0(model, 0.3 + 0.9j))


def test_pinned_resolvent_at_zero():
    model, fam = pinned_two_level()
    np.testing.assert_allclose(krein_resolvent(model, fam, 0.0).r, PINNED_R0, atol=1e-14)


def test_pinned_resolvent_at_3i():
    model, fam = pinned_two_level()
    expected = np.linalg.inv(3j * np.eye(2) - PINNED_AQ)
    np.testing.assert_allclose(krein_resolvent(model, fam, 3j).r, expected, atol=1e-10)


def test_resolvent_errors():
    model, fam = pinned_two_level()
    with pytest.raises(SpectrumHit):
        krein_resolvent(model, fam, 1.0)
    with pytest.raises(QSingular):
        krein_resolvent(model, fam, 0.5)


def test_resolvent_adjoint_symmetry_seed7():
    model, fam = seed7()
    a, b = krein_resolvent(model, fam, 3j).r, krein_resolvent(model, fam, -3j).r
    assert np.linalg.norm(dagger(a) - b) <= 1e-11 * np.linalg.norm(a)


def test_first_resolvent_identity():
    model, fam = seed7()
    assert verify_first_resolvent_identity(model, fam, 0.5j, 0.5j) == 0.0
    assert verify_first_resolvent_identity(model, fam, 2j, -1 + 1j) <= 1e-10
    zs = sample_points(model, 200, seed=3, accept=lambda z: z.imag != 0)
    worst = max(verify_first_resolvent_identity(model, fam, z, w) for z, w in zip(zs[::2], zs[1::2]))
    assert worst <= 1e-9


def test_reconstruct_alpha_zero():
    model, _ = seed7()
    rec = reconstruct_operator(model, AlphaType(alpha=np.zeros((2, 2))))
    assert np.linalg.norm(rec.aq - model.a0) <= model.tol.identity * np.linalg.norm(model.a0)


def test_reconstruct_pinned():
    model, fam = pinned_two_level()
    rec = reconstruct_operator(model, fam, 3j, 1 + 1j)
    np.testing.assert_allclose(rec.aq, PINNED_AQ, atol=1e-10)


def test_lattice_delta_is_diagonal_perturbation():
    model, fam = lattice_delta(32, site=16, alpha=1.0)
    rec = reconstruct_operator(model, fam)
    diff = rec.aq - model.a0
    c = diff[16, 16]
    fit = np.zeros_like(diff)
    fit[16, 16] = c
    assert np.max(np.abs(diff - fit)) <= 1e-9
    assert abs(c + 1.0) <= 1e-9


@pytest.mark.parametrize("kind", ["AlphaType", "VWType", "ProjectorTheta", "Perturbed"])
def test_closed_forms(kind):
    model, fam = seed7(kind)
    t = model.tau
    v, w = fam.coupling(model)
    if kind == "ProjectorTheta":
        p = fam.basis
        expected = model.a0 + dagger(t) @ dagger(p) @ np.linalg.inv(fam.theta) @ p @ t
    elif kind == "Perturbed":
        # -(1 - alpha M) + B = -(1 - B) (1 - (1 - B)^{-1} alpha M)
        a_eff = np.linalg.solve(np.eye(2) - fam.b, fam.base.alpha)
        expected = model.a0 - dagger(t) @ a_eff @ t
    else:
        expected = model.a0 - dagger(t) @ w @ v @ t
    aq = reconstruct_operator(model, fam).aq
    assert np.linalg.norm(aq - expected) <= 1e-10 * np.linalg.norm(expected)


def test_lambda_hat_properties():
    model, fam = seed7("VWType")
    rec = reconstruct_operator(model, fam)
    w1, w2, _ = reference_points(model, fam, 3)
    v, wm = fam.coupling(model)
    z = complex(rec.eigenvalues()[2] + 0.1, 0.0)
    l1 = lambda_hat(model, fam, w1, z, rec=rec).lam
    l2 = lambda_hat(model, fam, w2, z, rec=rec).lam
    assert np.linalg.norm(l1 - l2) <= 1e-10 * np.linalg.norm(l1)
    z = 0.4 + 0.3j
    lz = lambda_hat(model, fam, w1, z, rec=rec).lam
    lzb = lambda_hat(model, fam, w1, z.conjugate(), rec=rec).lam
    assert np.linalg.norm(dagger(v) @ dagger(lz) @ dagger(wm) - wm @ lzb @ v) <= 1e-10 * np.linalg.norm(lz)


def test_lambda_hat_at_anchor():
    model, fam = seed7()
    w = reference_points(model, fam, 1)[0]
    from kreinq import build_q
    np.testing.assert_allclose(lambda_hat(model, fam, w, w).lam, np.linalg.inv(build_q(model, fam, w).q), atol=1e-13)


def test_fc_diag12():
    a0 = np.diag([1.0, 2.0])
    z, w = 1j, 0.0
    rz = np.linalg.inv(z * np.eye(2) - a0)
    rw = np.linalg.inv(w * np.eye(2) - a0)
    assert _fc_residual(rz, rw, z, w) <= 1e-12


def test_identity_suite_equal_pairs():
    model, fam = seed7()
    rep = identity_suite(model, fam, SampleSpec(pairs=((1j, 1j), (0.5 - 2j, 0.5 - 2j))))
    for name in ("Lambda2", "Lambda2'", "Lambda3", "resolvent_identity[AQ]"):
        assert rep.entry(name).max_residual == 0.0, name
    # (fc) divides by w - z and is skipped on the diagonal
    assert rep.entry("fc[A0]").sample_count == 0


def test_identity_suite_seed7():
    model, fam = seed7()
    rep = identity_suite(model, fam, SampleSpec(n_pairs=25))
    assert rep.passed
    assert max(e.max_residual for e in rep.entries) <= 1e-9
    assert {e.identity_name for e in rep.entries} >= {"Lambda1", "Lambda2", "Lambda2'", "Lambda3", "fc[A0]",
                                                       "fc[AQ]", "inv", "inv'"}


def test_main_theorem_alpha_zero():
    model, _ = seed7()
    rep = verify_main_theorem(model, AlphaType(alpha=np.zeros((2, 2))))
    assert rep.passed


def test_main_theorem_lattice():
    model, fam = lattice_delta(32, alpha=1.0)
    rep = verify_main_theorem(model, fam, spectral_interval=(-3.0, -1e-3))
    assert rep.passed
    for e in rep.entries:
        assert e.max_residual <= max(1e-9, e.tolerance)


def test_main_theorem_vw_with_spectrum():
    model, fam = seed7("VWType")
    rep = verify_main_theorem(model, fam, spectral_interval=(-8.0, 8.0))
    assert rep.passed
    assert rep.entry("main.spectral_correspondence").max_residual <= 1e-8


def test_singular_family_is_inconclusive():
    model, fam = singular_family_model()
    with pytest.raises(EmptyZQ):
        verify_main_theorem(model, fam)
    with pytest.raises(EmptyZQ):
        identity_suite(model, fam)


def test_spectrum_alpha_zero_empty():
    model, _ = seed7()
    assert spectrum_aq_via_q(model, AlphaType(alpha=np.zeros((2, 2))), (-6.0, 6.0)) == []


def test_spectrum_pinned():
    model, fam = pinned_two_level()
    roots = spectrum_aq_via_q(model, fam, (-10.0, 1.0 - 1e-3))
    assert len(roots) == 1 and abs(roots[0] - 0.5) <= 1e-10


def test_spectrum_lattice_bound_state():
    model, fam = lattice_delta(32, alpha=1.0)
    rows = compare_spectrum(model, fam, (-3.0, -1e-3))
    assert len(rows) == 1
    assert spectrum_discrepancy(rows) <= 1e-8
    # infinite-chain value 2 - sqrt(5); the finite chain sits exponentially close
    assert abs(rows[0].via_q_root - (2 - np.sqrt(5))) <= 1e-6


def test_spectrum_ignores_poles_of_m():
    # roots close to A0 eigenvalues, where sigma_max(Q) diverges
    from kreinq.models import FamilyRecipe, ModelRecipe, generate
    model, fam = generate(ModelRecipe(seed=1, n_h=6, n_k=2, family=FamilyRecipe(kind="AlphaType")))
    rows = compare_spectrum(model, fam, (-8.0, 8.0))
    assert spectrum_discrepancy(rows) <= 1e-8
    assert len(rows) == 6
