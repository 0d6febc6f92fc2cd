"""Weyl functions, the four Q-function families, their axioms, and Z_Q scans."""
from __future__ import annotations

import csv
import enum
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptyGrid, FamilyInvariantViolation, QSingular
from .operator_model import ExtensionModel, _require_rho, as_matrix, dagger, gamma, in_rho_a0, rel_residual

WEYL_VARIANTS = ("direct", "canonical")


@dataclass(frozen=True, eq=False)
class WeylValue:
    z: complex
    m: np.ndarray
    variant: str
    z0: complex | None = None


def weyl(model: ExtensionModel, z: complex, variant: str = "direct", z0: complex = 1j) -> WeylValue:
    """M_z, either -tau G_z ("direct") or tau((G_z0 + G_z0bar)/2 - G_z) ("canonical")."""
    z = _require_rho(model, z)
    gz = gamma(model, z).g
    if variant == "direct":
        return WeylValue(z=z, m=-(model.tau @ gz), variant=variant)
    if variant == "canonical":
        z0 = _require_rho(model, z0)
        offset = 0.5 * (gamma(model, z0).g + gamma(model, z0.conjugate()).g)
        return WeylValue(z=z, m=model.tau @ (offset - gz), variant=variant, z0=z0)
    raise ValueError(f"unknown Weyl variant {variant!r}; expected one of {WEYL_VARIANTS}")


def check_weyl_axioms(model: ExtensionModel, z: complex, w: complex, variant: str = "direct",
                      z0: complex = 1j) -> tuple[float, float]:
    """Residuals of M_z^* = M_zbar and M_z - M_w = (z-w) G_wbar^* G_z."""
    z, w = complex(z), complex(w)
    mz = weyl(model, z, variant, z0).m
    mzb = weyl(model, z.conjugate(), variant, z0).m
    mw = weyl(model, w, variant, z0).m
    gz = gamma(model, z).g
    gwb = gamma(model, w.conjugate()).g
    r_adj = rel_residual(dagger(mz) - mzb, mz, mzb)
    r_diff = rel_residual(mz - mw - (z - w) * (dagger(gwb) @ gz), mz, mw)
    return r_adj, r_diff


# --------------------------------------------------------------------------- families


@dataclass(frozen=True, eq=False, kw_only=True)
class QFamily:
    weyl_variant: str = "direct"
    z0: complex = 1j
    smallness_c: float | None = None  # empirical |Im z| beyond which the Neumann bound holds

    tag = "abstract"

    def coupling(self, model: ExtensionModel) -> tuple[np.ndarray, np.ndarray]:
        """Effective (V, W): V maps K -> X, W maps Y -> K*."""
        raise NotImplementedError

    def assemble(self, model: ExtensionModel, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def validate(self, model: ExtensionModel) -> None:
        pass

    def coupling_norm(self, model: ExtensionModel) -> float:
        """Norm c_eff with ||Q_z + inv-part|| controlled by c_eff * ||M_z||; see smallness_constant."""
        v, w = self.coupling(model)
        return float(np.linalg.norm(v, 2) * np.linalg.norm(w, 2))


def _hermitian_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - dagger(m)))


@dataclass(frozen=True, eq=False, kw_only=True)
class ProjectorTheta(QFamily):
    """Q_z = Theta + pi M_z pi*, restricted to X = ran(pi).

    `basis` holds an orthonormal basis of X as rows (n_X x n_K); `theta` acts on X
    in that basis. When only `pi` is given the basis is taken from its eigenvectors.
    """

    pi: np.ndarray
    theta: np.ndarray
    basis: np.ndarray | None = None

    tag = "ProjectorTheta"

    def __post_init__(self):
        object.__setattr__(self, "pi", as_matrix(self.pi, "pi"))
        object.__setattr__(self, "theta", as_matrix(self.theta, "theta"))
        if self.basis is None and np.allclose(self.pi, np.eye(self.pi.shape[0]), rtol=0, atol=1e-14):
            object.__setattr__(self, "basis", np.eye(self.pi.shape[0], dtype=np.complex128))
        elif self.basis is None:
            lam, u = np.linalg.eigh(0.5 * (self.pi + dagger(self.pi)))
            keep = lam > 0.5
            object.__setattr__(self, "basis", dagger(u[:, keep][:, ::-1]))
        else:
            object.__setattr__(self, "basis", as_matrix(self.basis, "basis"))

    def coupling(self, model):
        return self.basis, dagger(self.basis)

    def assemble(self, model, m):
        p = self.basis
        return self.theta + p @ m @ dagger(p)

    def validate(self, model):
        tol = model.tol.herm
        pi, p, theta = self.pi, self.basis, self.theta
        n_k = model.n_k
        if pi.shape != (n_k, n_k):
            raise FamilyInvariantViolation(f"pi must be {n_k}x{n_k}, got {pi.shape}")
        if np.linalg.norm(pi @ pi - pi) > tol * max(1.0, np.linalg.norm(pi)) or _hermitian_defect(pi) > tol:
            raise FamilyInvariantViolation("pi is not an orthogonal projector")
        if p.shape[1] != n_k or np.linalg.norm(dagger(p) @ p - pi) > 1e3 * tol * max(1.0, np.linalg.norm(pi)):
            raise FamilyInvariantViolation("basis does not span ran(pi)")
        if theta.shape != (p.shape[0], p.shape[0]):
            raise FamilyInvariantViolation(f"theta must be {p.shape[0]}x{p.shape[0]}, got {theta.shape}")
        if _hermitian_defect(theta) > tol * max(1.0, np.linalg.norm(theta)):
            raise FamilyInvariantViolation("theta is not Hermitian")

    def coupling_norm(self, model):
        s = np.linalg.svd(self.theta, compute_uv=False)
        return float("inf") if s[-1] == 0 else float(1.0 / s[-1])


@dataclass(frozen=True, eq=False, kw_only=True)
class AlphaType(QFamily):
    """Q_z = -(1 - alpha M_z) with V = alpha, W = 1."""

    alpha: np.ndarray

    tag = "AlphaType"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_matrix(self.alpha, "alpha"))

    def coupling(self, model):
        return self.alpha, np.eye(model.n_k, dtype=np.complex128)

    def assemble(self, model, m):
        return -(np.eye(model.n_k) - self.alpha @ m)

    def validate(self, model):
        a = self.alpha
        if a.shape != (model.n_k, model.n_k):
            raise FamilyInvariantViolation(f"alpha must be {model.n_k}x{model.n_k}, got {a.shape}")
        if _hermitian_defect(a) > model.tol.herm * max(1.0, np.linalg.norm(a)):
            raise FamilyInvariantViolation("alpha is not self-adjoint")


@dataclass(frozen=True, eq=False, kw_only=True)
class VWType(QFamily):
    """Q_z = -(1 - V M_z W) for couplings with V* W* = W V.

    Leaving `v` or `w` unset takes the model's own V/W. `VWType.from_w` builds
    the always-compatible choice V = W*.
    """

    v: np.ndarray | None = None
    w: np.ndarray | None = None

    tag = "VWType"

    def __post_init__(self):
        if self.v is not None:
            object.__setattr__(self, "v", as_matrix(self.v, "v"))
        if self.w is not None:
            object.__setattr__(self, "w", as_matrix(self.w, "w"))

    @classmethod
    def from_w(cls, w, **kwargs) -> "VWType":
        w = as_matrix(w, "w")
        return cls(v=dagger(w), w=w, **kwargs)

    def coupling(self, model):
        v = model.v if self.v is None else self.v
        w = model.w if self.w is None else self.w
        return v, w

    def assemble(self, model, m):
        v, w = self.coupling(model)
        return -(np.eye(v.shape[0]) - v @ m @ w)

    def validate(self, model):
        v, w = self.coupling(model)
        n_k = model.n_k
        if v.shape != (n_k, n_k) or w.shape != (n_k, n_k):
            raise FamilyInvariantViolation(f"v and w must be {n_k}x{n_k}")
        defect = float(np.linalg.norm(dagger(v) @ dagger(w) - w @ v))
        if defect > model.tol.herm * max(np.finfo(float).tiny, np.linalg.norm(v) * np.linalg.norm(w)):
            raise FamilyInvariantViolation(f"V*W* != WV (defect {defect:.3e})")


@dataclass(frozen=True, eq=False, kw_only=True)
class Perturbed(QFamily):
    """Q~_z = B + Q_z for a base family with V = 1 (needs B*W = W*B) or W = 1 (needs VB* = BV*)."""

    base: QFamily
    b: np.ndarray

    tag = "Perturbed"

    def __post_init__(self):
        object.__setattr__(self, "b", as_matrix(self.b, "b"))
        # the Weyl function is the base family's
        object.__setattr__(self, "weyl_variant", self.base.weyl_variant)
        object.__setattr__(self, "z0", self.base.z0)

    def coupling(self, model):
        return self.base.coupling(model)

    def assemble(self, model, m):
        return self.b + self.base.assemble(model, m)

    def validate(self, model):
        self.base.validate(model)
        v, w = self.coupling(model)
        b = self.b
        if b.shape != (v.shape[0], w.shape[1]):
            raise FamilyInvariantViolation(f"b must be {v.shape[0]}x{w.shape[1]}, got {b.shape}")
        tol = model.tol.herm * max(1.0, np.linalg.norm(b) * max(np.linalg.norm(v), np.linalg.norm(w)))
        if _is_identity(v):
            defect = float(np.linalg.norm(dagger(b) @ w - dagger(w) @ b))
        elif _is_identity(w):
            defect = float(np.linalg.norm(v @ dagger(b) - b @ dagger(v)))
        else:
            raise FamilyInvariantViolation("perturbed family needs a base with V = 1 or W = 1")
        if defect > tol:
            raise FamilyInvariantViolation(f"B violates its symmetry condition (defect {defect:.3e})")

    def coupling_norm(self, model):
        v, w = self.coupling(model)
        if _is_identity(w) and isinstance(self.base, AlphaType):
            # Q~ = -(1 - B)(1 - (1 - B)^{-1} alpha M)
            shifted = np.eye(self.b.shape[0]) - self.b
            return float(np.linalg.norm(np.linalg.solve(shifted, v), 2))
        return float("inf")


def _is_identity(m: np.ndarray) -> bool:
    return m.shape[0] == m.shape[1] and np.array_equal(m, np.eye(m.shape[0]))


FAMILY_TAGS = ("ProjectorTheta", "AlphaType", "VWType", "Perturbed")


# --------------------------------------------------------------------------- Q values


@dataclass(frozen=True, eq=False)
class QValue:
    z: complex
    q: np.ndarray
    sigma_min: float
    sigma_max: float
    rcond: float
    # every Q_z here is bounded, so its domain D is all of Y
    domain_is_full: bool = True


def q_scale(sigma_max: float) -> float:
    """Reference size for deciding singularity; floored at 1 so 1x1 Q values are judged absolutely."""
    return max(sigma_max, 1.0)


def build_q(model: ExtensionModel, family: QFamily, z: complex, *, validate: bool = True) -> QValue:
    if validate:
        family.validate(model)
    m = weyl(model, z, family.weyl_variant, family.z0).m
    q = family.assemble(model, m)
    s = np.linalg.svd(q, compute_uv=False)
    smax, smin = float(s[0]), float(s[-1])
    return QValue(z=complex(z), q=q, sigma_min=smin, sigma_max=smax, rcond=smin / smax if smax > 0 else 0.0)


def q_invertible(qv: QValue, threshold: float) -> bool:
    return qv.sigma_min > threshold * q_scale(qv.sigma_max)


def in_zq(model: ExtensionModel, family: QFamily, z: complex, threshold: float | None = None) -> bool:
    """True when z is in rho(A0) and both Q_z and Q_zbar pass the bounded-inverse test."""
    threshold = model.tol.rcond if threshold is None else threshold
    z = complex(z)
    if not in_rho_a0(model, z):
        return False
    return all(q_invertible(build_q(model, family, p, validate=False), threshold) for p in (z, z.conjugate()))


def check_m2(model: ExtensionModel, family: QFamily, z: complex, w: complex) -> float:
    """Residual of Q_z = Q_w + (z-w) V G_wbar^* G_z W."""
    z, w = complex(z), complex(w)
    v, wm = family.coupling(model)
    qz = build_q(model, family, z).q
    qw = build_q(model, family, w, validate=False).q
    gz = gamma(model, z).g
    gwb = gamma(model, w.conjugate()).g
    return rel_residual(qz - qw - (z - w) * (v @ dagger(gwb) @ gz @ wm), qz, qw)


def check_m1(model: ExtensionModel, family: QFamily, z: complex) -> float:
    """Residual of V^*(Q_z^*)^{-1}W^* = W Q_zbar^{-1} V; requires z in Z_Q."""
    z = complex(z)
    family.validate(model)
    if not in_zq(model, family, z):
        raise QSingular(f"z={z!r} is not in Z_Q")
    v, w = family.coupling(model)
    qz = build_q(model, family, z, validate=False).q
    qzb = build_q(model, family, z.conjugate(), validate=False).q
    lhs = dagger(v) @ np.linalg.solve(dagger(qz), dagger(w))
    rhs = w @ np.linalg.solve(qzb, v)
    return rel_residual(lhs - rhs, lhs, rhs)


def check_q_axioms(model: ExtensionModel, family: QFamily, z: complex, w: complex) -> tuple[float, float]:
    return check_m2(model, family, z, w), check_m1(model, family, z)


def perturbation_factor_rcond(model: ExtensionModel, family: Perturbed, z: complex) -> float:
    """rcond of 1 + B Q_z^{-1}, the extra condition carving Z~_Q out of Z_Q."""
    qz = build_q(model, family.base, z).q
    factor = np.eye(qz.shape[0]) + family.b @ np.linalg.inv(qz)
    s = np.linalg.svd(factor, compute_uv=False)
    return float(s[-1] / s[0])


def smallness_constant(model: ExtensionModel, family: QFamily, y_max: float | None = None,
                       n_y: int = 60, n_x: int = 241) -> float:
    """Empirical c with coupling_norm * ||M_z|| < 1 whenever |Im z| >= c.

    Scans vertical offsets y downward from a rigorous bound and keeps the last y
    for which the supremum over a horizontal line (sampled densely across the
    spectrum of A0) stays below one. Returns inf if no such y is found.
    """
    k = family.coupling_norm(model)
    if k == 0.0:
        return 0.0
    if not np.isfinite(k):
        return float("inf")
    lam, u = model.eigh
    t = model.tau @ u
    offset = np.zeros((model.n_k, model.n_k), dtype=np.complex128)
    if family.weyl_variant == "canonical":
        offset = model.tau @ (0.5 * (gamma(model, family.z0).g + gamma(model, complex(family.z0).conjugate()).g))
    if y_max is None:
        # ||R0_z|| <= 1/|Im z|, so ||M_z|| <= ||tau||^2/|Im z| for the direct variant
        y_max = 2.0 * max(k * float(np.linalg.norm(model.tau, 2)) ** 2, 1e-3)
    xs = np.unique(np.concatenate([np.linspace(lam[0] - y_max, lam[-1] + y_max, n_x), lam]))
    c = float("inf")
    for y in np.geomspace(y_max, y_max * 1e-4, n_y):
        # M_z = offset - T diag(1/(z - lam)) T* with T = tau U, for every x on the line at once
        d = 1.0 / ((xs + 1j * y)[:, None] - lam[None, :])
        ms = offset[None] - np.einsum("ak,xk,bk->xab", t, d, t.conj())
        worst = float(np.max(np.linalg.norm(ms, 2, axis=(1, 2))))
        if k * worst < 1.0:
            c = float(y)
        else:
            break
    return c


# --------------------------------------------------------------------------- scans


class ZQLabel(str, enum.Enum):
    IN_ZQ = "InZQ"
    Q_SINGULAR = "QSingular"
    IN_SPECTRUM_A0 = "InSpectrumA0"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class ZQScanResult:
    grid: list[complex]
    labels: list[ZQLabel]
    sigma_min_values: list[float]
    rcond_values: list[float]
    threshold: float
    nx: int | None = None
    ny: int | None = None

    @property
    def n_in_zq(self) -> int:
        return sum(label is ZQLabel.IN_ZQ for label in self.labels)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["re(z)", "im(z)", "sigma_min_Q", "rcond_Q", "label"])
        for z, s, r, label in zip(self.grid, self.sigma_min_values, self.rcond_values, self.labels):
            writer.writerow([fmt(z.real), fmt(z.imag), fmt(s), fmt(r), label.value])
        return buf.getvalue()


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _label_point(model: ExtensionModel, family: QFamily, z: complex, threshold: float):
    if not in_rho_a0(model, z):
        return ZQLabel.IN_SPECTRUM_A0, float("nan"), float("nan")
    qz = build_q(model, family, z, validate=False)
    qzb = build_q(model, family, z.conjugate(), validate=False)
    ok = q_invertible(qz, threshold) and q_invertible(qzb, threshold)
    return (ZQLabel.IN_ZQ if ok else ZQLabel.Q_SINGULAR), qz.sigma_min, qz.rcond


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("KREIN_THREADS", "1")))
    except ValueError:
        return 1


def scan_zq(model: ExtensionModel, family: QFamily, grid: Iterable[complex],
            rcond_threshold: float | None = None, workers: int | None = None) -> ZQScanResult:
    points = [complex(z) for z in grid]
    if not points:
        raise EmptyGrid("scan grid is empty")
    threshold = model.tol.rcond if rcond_threshold is None else rcond_threshold
    if not 0.0 < threshold < 1.0:
        raise ValueError("rcond threshold must lie in (0, 1)")
    family.validate(model)
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda z: _label_point(model, family, z, threshold), points))
    else:
        rows = [_label_point(model, family, z, threshold) for z in points]
    labels, smin, rc = zip(*rows)
    return ZQScanResult(grid=points, labels=list(labels), sigma_min_values=list(smin),
                        rcond_values=list(rc), threshold=threshold)


def rectangular_grid(re0: float, re1: float, im0: float, im1: float, nx: int, ny: int) -> list[complex]:
    """Row-major grid: rows run over Im z (ascending), columns over Re z."""
    if nx < 1 or ny < 1:
        raise EmptyGrid("grid resolution must be positive")
    xs = np.linspace(re0, re1, nx) if nx > 1 else np.array([re0])
    ys = np.linspace(im0, im1, ny) if ny > 1 else np.array([im0])
    return [complex(x, y) for y in ys for x in xs]
