"""Deterministic instances (random ensembles, 1D lattices, the pinned two-level model) and a brute-force oracle."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .determinism import SplitMix64
from .errors import InvalidRecipe, QSingular, ResolventSingular
from .operator_model import ExtensionModel, ModelConfig, build_model, dagger
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .weyl_q import AlphaType, Perturbed, ProjectorTheta, QFamily, VWType, smallness_constant

MODEL_KINDS = ("RandomHermitian", "LatticeLaplacian1D")
FAMILY_KINDS = ("ProjectorTheta", "AlphaType", "VWType", "Perturbed")


@dataclass(frozen=True)
class FamilyRecipe:
    kind: str = "AlphaType"
    coupling: float = 1.0
    perturbation: float = 0.3   # relative size of B for Perturbed
    n_x: int | None = None      # rank of the projector for ProjectorTheta
    weyl_variant: str = "direct"
    z0: complex = 1j
    seed: int | None = None     # defaults to the model seed + 1


@dataclass(frozen=True)
class ModelRecipe:
    kind: str = "RandomHermitian"
    seed: int = 0
    n_h: int = 8
    n_k: int = 2
    n_sites: int = 16
    coupling_sites: tuple[int, ...] = (8,)
    boundary: str = "Dirichlet"
    family: FamilyRecipe = field(default_factory=FamilyRecipe)


def random_hermitian(rng: SplitMix64, n: int) -> np.ndarray:
    x = rng.complex_uniform((n, n))
    return (x + x.conj().T) / 2


def lattice_laplacian(n: int) -> np.ndarray:
    """Dirichlet (-1, 2, -1) stencil with unit hopping."""
    a = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return a.astype(np.complex128)


def site_trace(n: int, sites) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)[list(sites)]


def _scaled_hermitian(rng: SplitMix64, n: int, norm: float) -> np.ndarray:
    h = random_hermitian(rng, n)
    return h * (norm / np.max(np.abs(np.linalg.eigvalsh(h))))


def _random_family(recipe: FamilyRecipe, n_k: int, rng: SplitMix64) -> QFamily:
    common = dict(weyl_variant=recipe.weyl_variant, z0=recipe.z0)
    g = recipe.coupling
    if recipe.kind == "AlphaType":
        return AlphaType(alpha=_scaled_hermitian(rng, n_k, g), **common)
    if recipe.kind == "VWType":
        w = rng.complex_uniform((n_k, n_k))
        w *= np.sqrt(g) / np.linalg.norm(w, 2)
        return VWType.from_w(w, **common)
    if recipe.kind == "ProjectorTheta":
        n_x = recipe.n_x or max(1, n_k - 1)
        if not 1 <= n_x <= n_k:
            raise InvalidRecipe(f"n_x={n_x} must lie in [1, {n_k}]")
        u, _ = np.linalg.qr(rng.complex_uniform((n_k, n_k)))
        basis = dagger(u[:, :n_x])
        # |eig(Theta)| in [0.5, 1.5]/g, so ||Theta^{-1}|| <= 2g
        d = np.array([rng.choice_sign() * (0.5 + rng.random()) for _ in range(n_x)]) / g
        v, _ = np.linalg.qr(rng.complex_uniform((n_x, n_x)))
        theta = (v * d) @ dagger(v)
        theta = (theta + dagger(theta)) / 2
        return ProjectorTheta(pi=dagger(basis) @ basis, theta=theta, basis=basis, **common)
    if recipe.kind == "Perturbed":
        base = AlphaType(alpha=_scaled_hermitian(rng, n_k, g), **common)
        h = _scaled_hermitian(rng, n_k, recipe.perturbation / g)
        return Perturbed(base=base, b=base.alpha @ h)
    raise InvalidRecipe(f"unknown family kind {recipe.kind!r}")


def _lattice_family(recipe: FamilyRecipe, n_k: int) -> QFamily:
    common = dict(weyl_variant=recipe.weyl_variant, z0=recipe.z0)
    g = recipe.coupling
    eye = np.eye(n_k, dtype=np.complex128)
    if recipe.kind == "AlphaType":
        return AlphaType(alpha=g * eye, **common)
    if recipe.kind == "VWType":
        return VWType.from_w(np.sqrt(g) * eye, **common)
    if recipe.kind == "ProjectorTheta":
        if g == 0:
            raise InvalidRecipe("ProjectorTheta lattice family needs nonzero coupling")
        return ProjectorTheta(pi=eye, theta=-eye / g, **common)
    if recipe.kind == "Perturbed":
        base = AlphaType(alpha=g * eye, **common)
        return Perturbed(base=base, b=recipe.perturbation * base.alpha)
    raise InvalidRecipe(f"unknown family kind {recipe.kind!r}")


def _with_smallness(model: ExtensionModel, family: QFamily) -> QFamily:
    return replace(family, smallness_c=smallness_constant(model, family))


def generate(recipe: ModelRecipe, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[ExtensionModel, QFamily]:
    fam = recipe.family
    if fam.kind not in FAMILY_KINDS:
        raise InvalidRecipe(f"unknown family kind {fam.kind!r}")
    if recipe.kind == "RandomHermitian":
        if recipe.n_h < 1 or recipe.n_k < 1:
            raise InvalidRecipe("n_h and n_k must be positive")
        rng = SplitMix64(recipe.seed)
        a0 = random_hermitian(rng, recipe.n_h)
        tau = rng.complex_uniform((recipe.n_k, recipe.n_h))
        model = build_model(ModelConfig(a0=a0, tau=tau), tol)
        frng = SplitMix64(recipe.seed + 1 if fam.seed is None else fam.seed)
        family = _random_family(fam, recipe.n_k, frng)
    elif recipe.kind == "LatticeLaplacian1D":
        if recipe.boundary != "Dirichlet":
            raise InvalidRecipe(f"unsupported boundary {recipe.boundary!r}")
        sites = tuple(recipe.coupling_sites)
        if recipe.n_sites < 1 or not sites or len(set(sites)) != len(sites):
            raise InvalidRecipe("lattice needs n_sites >= 1 and distinct coupling sites")
        if any(not 0 <= j < recipe.n_sites for j in sites):
            raise InvalidRecipe(f"coupling sites {sites} outside [0, {recipe.n_sites})")
        model = build_model(ModelConfig(a0=lattice_laplacian(recipe.n_sites),
                                        tau=site_trace(recipe.n_sites, sites)), tol)
        family = _lattice_family(fam, len(sites))
    else:
        raise InvalidRecipe(f"unknown model kind {recipe.kind!r}")
    family.validate(model)
    return model, _with_smallness(model, family)


def pinned_two_level(alpha: float = 0.5, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[ExtensionModel, AlphaType]:
    """A0 = diag(1, 2), tau = [1, 0], AlphaType coupling alpha; A_Q = diag(1 - alpha, 2)."""
    model = build_model(ModelConfig(a0=np.diag([1.0, 2.0]), tau=[[1.0, 0.0]], v=[[1.0]], w=[[1.0]]), tol)
    return model, AlphaType(alpha=[[alpha]])


def lattice_delta(n_sites: int = 32, site: int | None = None, alpha: float = 1.0,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[ExtensionModel, QFamily]:
    site = n_sites // 2 if site is None else site
    recipe = ModelRecipe(kind="LatticeLaplacian1D", n_sites=n_sites, coupling_sites=(site,),
                         family=FamilyRecipe(kind="AlphaType", coupling=alpha))
    return generate(recipe, tol)


def singular_family_model(n_h: int = 6, seed: int = 3, tol: Tolerances = DEFAULT_TOLERANCES
                          ) -> tuple[ExtensionModel, ProjectorTheta]:
    """Rank-deficient tau (two equal rows) with Theta = 0 and pi = 1: Q_z = M_z is singular for every z."""
    rng = SplitMix64(seed)
    a0 = random_hermitian(rng, n_h)
    row = rng.complex_uniform((1, n_h))
    model = build_model(ModelConfig(a0=a0, tau=np.vstack([row, row])), tol)
    return model, ProjectorTheta(pi=np.eye(2), theta=np.zeros((2, 2)))


# --------------------------------------------------------------------------- oracles


def charpoly_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix as roots of its characteristic polynomial.

    Faddeev-LeVerrier gives the coefficients, np.roots the zeros, and a few
    Newton steps on the polynomial polish them. Only meant for small n.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[-1] * eye
        coeffs.append(-np.trace(a @ mk) / k)
    c = np.array(coeffs)
    roots = np.roots(c).real
    dc = np.polyder(c)
    for _ in range(3):
        roots = roots - (np.polyval(c, roots) / np.polyval(dc, roots)).real
    return np.sort(roots)


def _oracle_q(model: ExtensionModel, family: QFamily, m: np.ndarray) -> np.ndarray:
    n_k = model.n_k
    if isinstance(family, AlphaType):
        return family.alpha @ m - np.eye(n_k)
    if isinstance(family, VWType):
        v, w = family.coupling(model)
        return v @ m @ w - np.eye(v.shape[0])
    if isinstance(family, ProjectorTheta):
        p = family.basis
        return family.theta + p @ m @ p.conj().T
    if isinstance(family, Perturbed):
        return family.b + _oracle_q(model, family.base, m)
    raise TypeError(f"no oracle for {type(family).__name__}")


def oracle_reconstruct(model: ExtensionModel, family: QFamily, z_probe: complex) -> np.ndarray:
    """A_Q by explicit dense inversion: z - (R0 + R0 tau* W Q^{-1} V tau R0)^{-1}. Test use only."""
    z = complex(z_probe)
    n = model.n_h
    r0 = np.linalg.inv(z * np.eye(n) - model.a0)
    tau = model.tau
    if family.weyl_variant == "direct":
        m = -tau @ r0 @ tau.conj().T
    else:
        z0 = complex(family.z0)
        r_a = np.linalg.inv(z0 * np.eye(n) - model.a0)
        r_b = np.linalg.inv(z0.conjugate() * np.eye(n) - model.a0)
        m = tau @ ((r_a + r_b) / 2 - r0) @ tau.conj().T
    q = _oracle_q(model, family, m)
    s = np.linalg.svd(q, compute_uv=False)
    if s[-1] <= model.tol.rcond * max(s[0], 1.0):
        raise QSingular(f"oracle: Q at {z!r} is singular")
    v, w = family.coupling(model)
    r = r0 + r0 @ tau.conj().T @ w @ np.linalg.inv(q) @ v @ tau @ r0
    s = np.linalg.svd(r, compute_uv=False)
    if s[-1] <= 1e-8 * s[0]:
        raise ResolventSingular("oracle: R^Q is singular")
    aq = z * np.eye(n) - np.linalg.inv(r)
    return (aq + aq.conj().T) / 2


# --------------------------------------------------------------------------- reference catalogue

REFERENCE_RANDOM_SIZES = (4, 8, 16, 32, 64)
REFERENCE_LATTICES = ((8, (4,)), (16, (8,)), (32, (16,)), (16, (5, 10)), (32, (8, 24)))


def reference_recipes(family_kind: str = "AlphaType") -> list[ModelRecipe]:
    """The 20 instances the verification sweeps run over: 15 random, 5 lattice."""
    fam = FamilyRecipe(kind=family_kind)
    out = [ModelRecipe(kind="RandomHermitian", seed=seed, n_h=n, n_k=min(n, 1 + seed % 3), family=fam)
           for n in REFERENCE_RANDOM_SIZES for seed in (1, 2, 3)]
    out += [ModelRecipe(kind="LatticeLaplacian1D", n_sites=n, coupling_sites=sites, family=fam)
            for n, sites in REFERENCE_LATTICES]
    return out


def recipe_label(recipe: ModelRecipe) -> str:
    if recipe.kind == "RandomHermitian":
        return f"random(n={recipe.n_h},k={recipe.n_k},seed={recipe.seed})/{recipe.family.kind}"
    return f"lattice(n={recipe.n_sites},sites={list(recipe.coupling_sites)})/{recipe.family.kind}"
