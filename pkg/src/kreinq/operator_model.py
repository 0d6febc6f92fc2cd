"""The fixed scene: a Hermitian A0 on H, a trace map tau: H -> K, and couplings V, W.

Dual spaces are identified with the spaces themselves through orthonormal
coordinates, so every adjoint below is a conjugate transpose.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, EigensolverFailure, HermitianViolation, NonFiniteEntry, SpectrumHit
from .tolerances import DEFAULT_TOLERANCES, Tolerances


def as_matrix(value, name: str) -> np.ndarray:
    """Coerce `value` to a 2-D complex128 array, rejecting NaN/inf entries."""
    arr = np.array(value, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionMismatch(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntry(f"{name} has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def rel_residual(diff: np.ndarray, *terms: np.ndarray) -> float:
    """Frobenius norm of `diff` relative to the largest of `terms`.

    Returns exactly 0.0 when `diff` vanishes identically, so that degenerate
    cases (z == w) report a clean zero.
    """
    num = float(np.linalg.norm(diff))
    if num == 0.0:
        return 0.0
    scale = max((float(np.linalg.norm(t)) for t in terms), default=0.0)
    if scale == 0.0:
        return float("inf")
    return num / scale


def duality_pairing(psi: np.ndarray, phi: np.ndarray) -> complex:
    """<psi, phi>_{K*,K} = <J^{-1} psi, phi>_K with J the identity in orthonormal coordinates."""
    return complex(np.vdot(np.asarray(psi), np.asarray(phi)))


@dataclass(frozen=True)
class ModelConfig:
    a0: object
    tau: object
    v: object = None
    w: object = None


@dataclass(frozen=True, eq=False)
class ExtensionModel:
    a0: np.ndarray
    tau: np.ndarray
    v: np.ndarray
    w: np.ndarray
    hermitian_correction: float = 0.0
    tol: Tolerances = DEFAULT_TOLERANCES

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.a0.shape[0], self.tau.shape[0], self.v.shape[0], self.w.shape[1])

    @property
    def n_h(self) -> int:
        return self.a0.shape[0]

    @property
    def n_k(self) -> int:
        return self.tau.shape[0]

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        try:
            lam, u = np.linalg.eigh(self.a0)
        except np.linalg.LinAlgError as exc:
            raise EigensolverFailure(str(exc)) from exc
        scale = max(float(np.linalg.norm(self.a0)), 1.0)
        recon = float(np.linalg.norm(self.a0 - (u * lam) @ dagger(u)))
        if not np.all(np.isfinite(lam)) or recon > self.tol.identity * scale:
            raise EigensolverFailure(f"eigendecomposition residual {recon:.3e}")
        return lam, u

    @cached_property
    def norm_a0(self) -> float:
        lam = self.eigh[0]
        return float(np.max(np.abs(lam)))

    @cached_property
    def kernel_tau(self) -> np.ndarray:
        """Orthonormal basis of ker(tau), one vector per column (possibly zero columns)."""
        return sla.null_space(self.tau)

    @property
    def kernel_dense(self) -> bool:
        # ker(tau) is dense in H only when it is all of H in finite dimension.
        return not np.any(self.tau)


def build_model(config: ModelConfig, tol: Tolerances = DEFAULT_TOLERANCES) -> ExtensionModel:
    a0 = as_matrix(config.a0, "a0")
    tau = as_matrix(config.tau, "tau")
    n_h = a0.shape[0]
    if a0.shape != (n_h, n_h):
        raise DimensionMismatch(f"a0 must be square, got {a0.shape}")
    if tau.shape[1] != n_h:
        raise DimensionMismatch(f"tau must be n_K x {n_h}, got {tau.shape}")
    n_k = tau.shape[0]
    v = np.eye(n_k, dtype=np.complex128) if config.v is None else as_matrix(config.v, "v")
    w = np.eye(n_k, dtype=np.complex128) if config.w is None else as_matrix(config.w, "w")
    if v.shape[1] != n_k:
        raise DimensionMismatch(f"v must be n_X x {n_k}, got {v.shape}")
    if w.shape[0] != n_k:
        raise DimensionMismatch(f"w must be {n_k} x n_Y, got {w.shape}")

    sym = 0.5 * (a0 + dagger(a0))
    correction = float(np.linalg.norm(a0 - sym))
    if correction > tol.herm * max(float(np.linalg.norm(a0)), np.finfo(float).tiny):
        raise HermitianViolation(f"a0 is not Hermitian (anti-Hermitian part {correction:.3e})")
    return ExtensionModel(a0=sym, tau=tau, v=v, w=w, hermitian_correction=correction, tol=tol)


def spectral_gap(eigenvalues: np.ndarray, z: complex) -> float:
    """sigma_min(-A + z) for Hermitian A with the given eigenvalues."""
    return float(np.min(np.abs(complex(z) - eigenvalues)))


def in_resolvent_set(eigenvalues: np.ndarray, z: complex, rel_gap: float) -> bool:
    norm_a = float(np.max(np.abs(eigenvalues)))
    return spectral_gap(eigenvalues, z) > rel_gap * (norm_a + abs(z))


def in_rho_a0(model: ExtensionModel, z: complex) -> bool:
    return in_resolvent_set(model.eigh[0], z, model.tol.spec)


def _require_rho(model: ExtensionModel, z: complex) -> complex:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise NonFiniteEntry(f"spectral point {z!r} is not finite")
    if not in_rho_a0(model, z):
        raise SpectrumHit(f"z={z!r} is in or numerically next to spectrum(A0)")
    return z


def spectrum0(model: ExtensionModel) -> np.ndarray:
    """Eigenvalues of A0 in ascending order."""
    return model.eigh[0].copy()


def resolvent0(model: ExtensionModel, z: complex) -> np.ndarray:
    """R0_z = (-A0 + z)^{-1}."""
    z = _require_rho(model, z)
    n = model.n_h
    return np.linalg.solve(z * np.eye(n) - model.a0, np.eye(n, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class GammaValue:
    z: complex
    g: np.ndarray


def gamma(model: ExtensionModel, z: complex) -> GammaValue:
    """G_z = (tau R0_{zbar})^*, an n_H x n_K matrix."""
    z = _require_rho(model, z)
    return GammaValue(z=z, g=dagger(model.tau @ resolvent0(model, z.conjugate())))


def check_gamma_identities(model: ExtensionModel, z: complex, w: complex) -> tuple[float, float]:
    """Residuals of G_z - G_w = (w-z) R0_w G_z and G_z = (1 + (w-z) R0_z) G_w."""
    z, w = complex(z), complex(w)
    gz = gamma(model, z).g
    gw = gamma(model, w).g
    r1 = rel_residual(gz - gw - (w - z) * (resolvent0(model, w) @ gz), gz, gw)
    r2 = rel_residual(gz - (gw + (w - z) * (resolvent0(model, z) @ gw)), gz, gw)
    return r1, r2
