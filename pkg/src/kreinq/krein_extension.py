"""Krein resolvent assembly, reconstruction of A_Q, the extension Lambda-hat and verification suites."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .determinism import SplitMix64, fingerprint
from .errors import (EmptyZQ, InsufficientSamples, IntervalInSpectrumA0, NotInRhoAQ, QSingular,
                     ResolventSingular, SpectrumHit)
from .operator_model import (ExtensionModel, _require_rho, dagger, gamma, in_resolvent_set, in_rho_a0,
                             rel_residual, resolvent0)
from .weyl_q import QFamily, QValue, build_q, q_invertible, q_scale

# second-order identities chain several solves; they get one extra decade
COMPOSITE_FACTOR = 10.0
RESOLVENT_RCOND = 1e-8
# two spectral values closer than this (relative to ||A_Q||) describe the same eigenvalue
MATCH_TOL = 1e-6


class _Evaluator:
    """Memoised building blocks for one (model, family) pair."""

    def __init__(self, model: ExtensionModel, family: QFamily):
        family.validate(model)
        self.model = model
        self.family = family
        self.v, self.w = family.coupling(model)
        self._cache: dict = {}

    def _memo(self, key, fn):
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = fn()
            return value

    def r0(self, z: complex) -> np.ndarray:
        return self._memo(("r0", z), lambda: resolvent0(self.model, z))

    def g(self, z: complex) -> np.ndarray:
        return self._memo(("g", z), lambda: gamma(self.model, z).g)

    def gs(self, z: complex) -> np.ndarray:
        """G_z^* (so G_zbar^* is gs(z.conjugate()))."""
        return self._memo(("gs", z), lambda: dagger(self.g(z)))

    def q(self, z: complex) -> QValue:
        return self._memo(("q", z), lambda: build_q(self.model, self.family, z, validate=False))

    def in_zq(self, z: complex) -> bool:
        def test():
            if not in_rho_a0(self.model, z):
                return False
            thr = self.model.tol.rcond
            return q_invertible(self.q(z), thr) and q_invertible(self.q(z.conjugate()), thr)

        return self._memo(("zq", z), test)

    def require_zq(self, z: complex) -> complex:
        z = _require_rho(self.model, z)
        if not self.in_zq(z):
            raise QSingular(f"z={z!r}: Q_z or Q_zbar has no bounded inverse")
        return z

    def lam(self, z: complex) -> np.ndarray:
        """Lambda_z = Q_z^{-1}."""
        def solve():
            q = self.q(z).q
            return np.linalg.solve(q, np.eye(q.shape[0], dtype=np.complex128))

        return self._memo(("lam", z), solve)

    def rq(self, z: complex) -> np.ndarray:
        """R0_z + G_z W Q_z^{-1} V G_zbar^*."""
        def assemble():
            q = self.q(z).q
            corr = np.linalg.solve(q, self.v @ self.gs(z.conjugate()))
            return self.r0(z) + self.g(z) @ (self.w @ corr)

        return self._memo(("rq", z), assemble)


# --------------------------------------------------------------------------- resolvent


@dataclass(frozen=True, eq=False)
class KreinResolvent:
    z: complex
    r: np.ndarray
    rcond_q: float


def krein_resolvent(model: ExtensionModel, family: QFamily, z: complex) -> KreinResolvent:
    ev = _Evaluator(model, family)
    z = ev.require_zq(complex(z))
    return KreinResolvent(z=z, r=ev.rq(z), rcond_q=ev.q(z).rcond)


def verify_first_resolvent_identity(model: ExtensionModel, family: QFamily, z: complex, w: complex,
                                    _ev: _Evaluator | None = None) -> float:
    """Residual of R^Q_z - R^Q_w = (w - z) R^Q_w R^Q_z."""
    ev = _ev or _Evaluator(model, family)
    z, w = ev.require_zq(complex(z)), ev.require_zq(complex(w))
    rz, rw = ev.rq(z), ev.rq(w)
    return rel_residual(rz - rw - (w - z) * (rw @ rz), rz, rw)


# --------------------------------------------------------------------------- reconstruction


@dataclass(frozen=True, eq=False)
class ReconstructedOperator:
    aq: np.ndarray
    z_ref: complex
    z_ref2: complex
    herm_residual: float
    zref_independence_residual: float
    extension_residual: float

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.aq)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.aq, 2))


def spectral_box(model: ExtensionModel) -> tuple[float, float, float]:
    """(lo, hi, s): the spectral range of A0 and a length scale for sampling around it."""
    lam = model.eigh[0]
    s = max(1.0, 0.25 * float(lam[-1] - lam[0]))
    return float(lam[0]), float(lam[-1]), s


def reference_candidates(model: ExtensionModel) -> list[complex]:
    lo, hi, s = spectral_box(model)
    c = 0.5 * (lo + hi)
    offsets = [(0.0, 1.0), (0.5, 2.0), (-0.5, 1.5), (0.0, 3.0), (1.0, 1.0), (-1.0, 2.5), (0.0, 6.0), (0.25, 12.0)]
    return [complex(c + dx * s, dy * s) for dx, dy in offsets]


def reference_points(model: ExtensionModel, family: QFamily, k: int, _ev: _Evaluator | None = None) -> list[complex]:
    ev = _ev or _Evaluator(model, family)
    hits = [z for z in reference_candidates(model) if ev.in_zq(z)]
    if len(hits) < k:
        raise EmptyZQ(f"found {len(hits)} reference points in Z_Q, need {k}")
    return hits[:k]


def _invert_resolvent(r: np.ndarray, z: complex) -> np.ndarray:
    s = np.linalg.svd(r, compute_uv=False)
    rc = s[-1] / s[0] if s[0] > 0 else 0.0
    if rc <= RESOLVENT_RCOND:
        raise ResolventSingular(f"R^Q at z={z!r} has rcond {rc:.3e}; the family defines no operator A_Q")
    n = r.shape[0]
    return z * np.eye(n) - np.linalg.solve(r, np.eye(n, dtype=np.complex128))


def reconstruct_operator(model: ExtensionModel, family: QFamily, z_ref: complex | None = None,
                         z_ref2: complex | None = None, _ev: _Evaluator | None = None) -> ReconstructedOperator:
    """A_Q = z - (R^Q_z)^{-1}, read off at two reference points and cross-checked."""
    ev = _ev or _Evaluator(model, family)
    if z_ref is None or z_ref2 is None:
        refs = reference_points(model, family, 2, ev)
        z_ref = refs[0] if z_ref is None else z_ref
        z_ref2 = (refs[1] if refs[1] != z_ref else refs[0]) if z_ref2 is None else z_ref2
    z1, z2 = ev.require_zq(complex(z_ref)), ev.require_zq(complex(z_ref2))
    if z1 == z2:
        raise ValueError("reference points must be distinct")
    raw1 = _invert_resolvent(ev.rq(z1), z1)
    raw2 = _invert_resolvent(ev.rq(z2), z2)
    herm = rel_residual(raw1 - dagger(raw1), raw1)
    indep = rel_residual(raw1 - raw2, raw1, raw2)
    aq = 0.5 * (raw1 + dagger(raw1))

    ker = model.kernel_tau
    if ker.shape[1]:
        # A_Q extends A0 on ker(tau): R^Q_z (z - A0) v = v
        lhs = ev.rq(z1) @ ((z1 * np.eye(model.n_h) - model.a0) @ ker)
        ext = float(np.max(np.linalg.norm(lhs - ker, axis=0)))
    else:
        ext = 0.0
    return ReconstructedOperator(aq=aq, z_ref=z1, z_ref2=z2, herm_residual=herm,
                                 zref_independence_residual=indep, extension_residual=ext)


def in_rho_aq(rec: ReconstructedOperator, z: complex, rel_gap: float) -> bool:
    return in_resolvent_set(rec.eigenvalues(), z, rel_gap)


# --------------------------------------------------------------------------- Lambda-hat


@dataclass(frozen=True, eq=False)
class LambdaHatValue:
    z: complex
    w_ref: complex
    lam: np.ndarray


def _lambda_hat(ev: _Evaluator, rec: ReconstructedOperator, w: complex, z: complex,
                rq_z: np.ndarray | None = None) -> np.ndarray:
    lw = ev.lam(w)
    if z == w:
        return lw.copy()
    n = ev.model.n_h
    if rq_z is None:
        rq_z = np.linalg.solve(z * np.eye(n) - rec.aq, np.eye(n, dtype=np.complex128))
    gw = ev.g(w)
    mid = gw + (w - z) * (rq_z @ gw)
    return lw + (w - z) * (lw @ ev.v @ ev.gs(w.conjugate()) @ mid @ ev.w @ lw)


def lambda_hat(model: ExtensionModel, family: QFamily, w_ref: complex, z: complex,
               rec: ReconstructedOperator | None = None, _ev: _Evaluator | None = None) -> LambdaHatValue:
    """Analytic continuation of z -> Q_z^{-1} to rho(A_Q), anchored at w_ref in Z_Q."""
    ev = _ev or _Evaluator(model, family)
    w, z = ev.require_zq(complex(w_ref)), complex(z)
    rec = rec or reconstruct_operator(model, family, _ev=ev)
    if z != w and not in_rho_aq(rec, z, model.tol.spec):
        raise NotInRhoAQ(f"z={z!r} is in or next to spectrum(A_Q)")
    return LambdaHatValue(z=z, w_ref=w, lam=_lambda_hat(ev, rec, w, z))


# --------------------------------------------------------------------------- reports


@dataclass
class ResidualEntry:
    identity_name: str
    max_residual: float
    sample_count: int
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.max_residual <= self.tolerance)


@dataclass
class VerificationReport:
    entries: list[ResidualEntry]
    fingerprint: str
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, name: str) -> ResidualEntry:
        for e in self.entries:
            if e.identity_name == name:
                return e
        raise KeyError(name)

    def merged(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(self.entries + other.entries, self.fingerprint, self.notes + other.notes)

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "pass": self.passed,
            "entries": [asdict(e) for e in self.entries],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, allow_nan=True) + "\n"


def model_fingerprint(model: ExtensionModel, family: QFamily) -> str:
    v, w = family.coupling(model)
    return f"{family.tag}:{fingerprint(model.a0, model.tau, v, w)}"


class _Collector:
    def __init__(self):
        self.values: dict[str, list[float]] = {}
        self.tolerances: dict[str, float] = {}

    def add(self, name: str, value: float, tol: float):
        self.values.setdefault(name, []).append(float(value))
        self.tolerances[name] = tol

    def declare(self, name: str, tol: float):
        self.values.setdefault(name, [])
        self.tolerances[name] = tol

    def entries(self) -> list[ResidualEntry]:
        out = []
        for name, vals in self.values.items():
            out.append(ResidualEntry(name, max(vals) if vals else 0.0, len(vals), self.tolerances[name]))
        return out


# --------------------------------------------------------------------------- sampling


@dataclass(frozen=True)
class SampleSpec:
    n_pairs: int = 25
    seed: int = 0
    real_fraction: float = 0.2
    pairs: tuple[tuple[complex, complex], ...] | None = None  # explicit pairs override sampling


def sample_points(model: ExtensionModel, n: int, seed: int, real_fraction: float = 0.2,
                  avoid: Sequence[np.ndarray] = (), accept=None, max_tries: int = 200) -> list[complex]:
    """Random spectral points around spectrum(A0), kept a relative margin away from `avoid` spectra.

    Complex points have |Im z| in [0.05 s, 2 s]; real points are drawn on the
    real axis (only where the margin allows). `accept` is an extra predicate.
    """
    lo, hi, s = spectral_box(model)
    rng = SplitMix64(seed)
    margin = 0.02 * s
    spectra = [model.eigh[0], *avoid]
    out: list[complex] = []
    for k in range(n):
        want_real = rng.random() < real_fraction
        for _ in range(max_tries):
            x = rng.uniform(lo - s, hi + s)
            y = 0.0 if want_real else rng.choice_sign() * rng.uniform(0.05 * s, 2.0 * s)
            z = complex(x, y)
            if all(np.min(np.abs(z - sp)) > margin for sp in spectra if len(sp)) and (accept is None or accept(z)):
                out.append(z)
                break
        else:
            for _ in range(max_tries):
                z = complex(rng.uniform(lo - s, hi + s), rng.choice_sign() * rng.uniform(0.5 * s, 2.0 * s))
                if accept is None or accept(z):
                    out.append(z)
                    break
            else:
                raise InsufficientSamples(f"could not place sample {k} after {2 * max_tries} draws")
    return out


# --------------------------------------------------------------------------- identity suite


def _fc_residual(r_z: np.ndarray, r_w: np.ndarray, z: complex, w: complex) -> float:
    n = r_z.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    lhs = (w - z) * (eye + (w - z) * r_z)
    rhs = np.linalg.solve(-r_w + eye / (w - z), eye)
    return rel_residual(lhs - rhs, lhs, rhs)


def identity_suite(model: ExtensionModel, family: QFamily, sample_spec: SampleSpec = SampleSpec()) -> VerificationReport:
    """Check the Lambda identities, (fc) for A0 and A_Q, and both forms of (inv) with Lambda_z = Q_z^{-1}."""
    ev = _Evaluator(model, family)
    tol = model.tol.identity * COMPOSITE_FACTOR
    if not detect_zq(model, family, ev):
        raise EmptyZQ("no probe point passed the Z_Q test")
    if sample_spec.pairs is not None:
        pairs = [(complex(a), complex(b)) for a, b in sample_spec.pairs]
        pairs = [(z, w) for z, w in pairs if ev.in_zq(z) and ev.in_zq(w)]
    else:
        def good(z):
            # real samples need a well-conditioned Q_z as well
            return ev.in_zq(z) and (z.imag != 0 or ev.q(z).sigma_min > 1e-3 * q_scale(ev.q(z).sigma_max))

        pts = sample_points(model, 2 * sample_spec.n_pairs, sample_spec.seed,
                            sample_spec.real_fraction, accept=good)
        pairs = list(zip(pts[0::2], pts[1::2]))
    points = {p for pair in pairs for p in pair}
    if len(points) < 2 and not (pairs and all(z == w for z, w in pairs)):
        raise InsufficientSamples(f"need at least 2 points in Z_Q, have {len(points)}")
    if not pairs:
        raise InsufficientSamples("no sample pair lies in Z_Q")

    names = ["Lambda1", "Lambda2", "Lambda2'", "Lambda3", "fc[A0]", "fc[AQ]", "inv", "inv'", "resolvent_identity[AQ]"]
    col = _Collector()
    for name in names:
        col.declare(name, tol)
    v, w_ = ev.v, ev.w
    eye_h = np.eye(model.n_h, dtype=np.complex128)
    for z, w in pairs:
        lz, lw = ev.lam(z), ev.lam(w)
        lzb = ev.lam(z.conjugate())
        gz, gw = ev.g(z), ev.g(w)
        gs_wb, gs_zb = ev.gs(w.conjugate()), ev.gs(z.conjugate())
        rq_z, rq_w = ev.rq(z), ev.rq(w)
        r0z, r0w = ev.r0(z), ev.r0(w)

        lhs1, rhs1 = dagger(v) @ dagger(lz) @ dagger(w_), w_ @ lzb @ v
        col.add("Lambda1", rel_residual(lhs1 - rhs1, lhs1, rhs1), tol)

        d2 = lz - lw - (w - z) * (lw @ v @ gs_wb @ gz @ w_ @ lz)
        col.add("Lambda2", rel_residual(d2, lz, lw), tol)

        d2p = lz - (lw + (w - z) * (lz @ v @ gs_zb @ gw @ w_ @ lw))
        col.add("Lambda2'", rel_residual(d2p, lz, lw), tol)

        mid = gw + (w - z) * (rq_z @ gw)
        d3 = lz - lw - (w - z) * (lw @ v @ gs_wb @ mid @ w_ @ lw)
        col.add("Lambda3", rel_residual(d3, lz, lw), tol)

        if z != w:
            col.add("fc[A0]", _fc_residual(r0z, r0w, z, w), tol)
            col.add("fc[AQ]", _fc_residual(rq_z, rq_w, z, w), tol)

        core = gw @ w_ @ lw @ v @ gs_wb
        left_q, left_0 = eye_h + (w - z) * rq_z, eye_h + (w - z) * r0z
        diff = rq_z - r0z
        col.add("inv", rel_residual(diff - left_q @ core @ left_0, rq_z, r0z), tol)
        col.add("inv'", rel_residual(diff - left_0 @ core @ left_q, rq_z, r0z), tol)

        col.add("resolvent_identity[AQ]", rel_residual(rq_z - rq_w - (w - z) * (rq_w @ rq_z), rq_z, rq_w), tol)

    return VerificationReport(col.entries(), model_fingerprint(model, family),
                              [f"identity suite over {len(pairs)} pairs"])


# --------------------------------------------------------------------------- spectrum via Q


_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    c, d = b - _INV_PHI * (b - a), a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _sigma_ratio(ev: _Evaluator, x: float) -> float:
    try:
        qv = ev.q(complex(x, 0.0))
    except SpectrumHit:
        return float("inf")
    return qv.sigma_min / q_scale(qv.sigma_max)


def _sigma_abs(ev: _Evaluator, x: float) -> float:
    try:
        return ev.q(complex(x, 0.0)).sigma_min
    except SpectrumHit:
        return float("inf")


def spectrum_aq_via_q(model: ExtensionModel, family: QFamily, interval: tuple[float, float],
                      n_grid: int = 400, xtol: float = 1e-10, _ev: _Evaluator | None = None) -> list[float]:
    """Eigenvalues of A_Q in the interval and in rho(A0), found as real zeros of sigma_min(Q_x).

    The grid is the uniform one plus eight interior points per gap between
    eigenvalues of A0, so every gap is sampled. Local minima of sigma_min are
    refined by golden-section search inside the enclosing gap and accepted when
    sigma_min / max(sigma_max, 1) is below the singularity tolerance. The ratio
    is not used for locating: near a pole of M it dips only because sigma_max
    diverges.
    """
    a, b = map(float, interval)
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if n_grid < 8:
        raise ValueError("n_grid must be at least 8")
    ev = _ev or _Evaluator(model, family)
    lam = model.eigh[0]
    inner = lam[(lam > a) & (lam < b)]
    cuts = np.concatenate([[a], inner, [b]])
    xs = [np.linspace(a, b, n_grid)]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        xs.append(np.linspace(lo, hi, 10)[1:-1])
    xs = np.unique(np.concatenate(xs))
    xs = np.array([x for x in xs if in_rho_a0(model, complex(x))])
    if len(xs) == 0:
        raise IntervalInSpectrumA0(f"no point of {interval} passes the rho(A0) test")
    vals = np.array([_sigma_abs(ev, x) for x in xs])

    thr = model.tol.sing
    found: list[float] = []
    for i in range(len(xs)):
        left = vals[i - 1] if i > 0 else np.inf
        right = vals[i + 1] if i + 1 < len(xs) else np.inf
        if not (vals[i] <= left and vals[i] <= right):
            continue
        lo = xs[i - 1] if i > 0 else xs[i]
        hi = xs[i + 1] if i + 1 < len(xs) else xs[i]
        below, above = lam[lam < xs[i]], lam[lam > xs[i]]
        if len(below):
            lo = max(lo, below[-1])
        if len(above):
            hi = min(hi, above[0])
        if hi - lo > xtol:
            x, _ = _golden_min(lambda t: _sigma_abs(ev, t), lo, hi, xtol)
        else:
            x = xs[i]
        fx = _sigma_ratio(ev, x)
        # a minimum squeezed against an eigenvalue of A0 is the pole of M, not a zero of Q
        pole = float(np.min(np.abs(lam - x))) <= 10 * xtol * max(1.0, abs(x))
        if fx <= thr and not pole and in_rho_a0(model, complex(x)):
            found.append(float(x))
    found.sort()
    deduped: list[float] = []
    for x in found:
        if not deduped or x - deduped[-1] > 1e-9:
            deduped.append(x)
    return deduped


@dataclass(frozen=True)
class SpectrumRow:
    via_q_root: float
    via_diagonalization: float

    @property
    def discrepancy(self) -> float:
        return abs(self.via_q_root - self.via_diagonalization)


def compare_spectrum(model: ExtensionModel, family: QFamily, interval: tuple[float, float],
                     n_grid: int = 400, rec: ReconstructedOperator | None = None) -> list[SpectrumRow]:
    """Pair the sigma_min(Q) roots with eigenvalues of the reconstructed A_Q lying in the interval and rho(A0).

    Unmatched values on either side get a NaN partner (infinite discrepancy).
    """
    ev = _Evaluator(model, family)
    roots = spectrum_aq_via_q(model, family, interval, n_grid, _ev=ev)
    rec = rec or reconstruct_operator(model, family, _ev=ev)
    a, b = interval
    eig = [float(e) for e in rec.eigenvalues() if a < e < b and in_rho_a0(model, complex(e))]
    match_tol = MATCH_TOL * max(rec.norm, 1.0)
    rows: list[SpectrumRow] = []
    unused = list(eig)
    for r in roots:
        j = int(np.argmin([abs(r - e) for e in unused])) if unused else -1
        if j >= 0 and abs(r - unused[j]) <= match_tol:
            rows.append(SpectrumRow(r, unused.pop(j)))
        else:
            rows.append(SpectrumRow(r, float("nan")))
    rows.extend(SpectrumRow(float("nan"), e) for e in unused)
    rows.sort(key=lambda row: row.via_diagonalization if np.isfinite(row.via_diagonalization) else row.via_q_root)
    return rows


def spectrum_discrepancy(rows: Sequence[SpectrumRow]) -> float:
    if not rows:
        return 0.0
    d = [row.discrepancy for row in rows]
    return float("inf") if any(np.isnan(d)) else max(d)


# --------------------------------------------------------------------------- main theorem


def detect_zq(model: ExtensionModel, family: QFamily, _ev: _Evaluator | None = None, n: int = 9) -> list[complex]:
    """Points of Z_Q among the reference candidates and an n x n grid over the sampling box."""
    ev = _ev or _Evaluator(model, family)
    lo, hi, s = spectral_box(model)
    grid = [complex(x, y) for y in np.linspace(-2 * s, 2 * s, n) for x in np.linspace(lo - s, hi + s, n)]
    return [z for z in reference_candidates(model) + grid if ev.in_zq(z)]


def verify_main_theorem(model: ExtensionModel, family: QFamily, n_samples: int = 100, seed: int = 0,
                        n_refs: int = 3, spectral_interval: tuple[float, float] | None = None) -> VerificationReport:
    """Z_Q = rho(A0) cap rho(A_Q), Q_z^{-1} = Lambda-hat_z there, and the extended Krein formula.

    Raises EmptyZQ when no probe point lies in Z_Q (the hypothesis fails; the
    outcome is inconclusive rather than a failure).
    """
    ev = _Evaluator(model, family)
    hits = detect_zq(model, family, ev)
    if not hits:
        raise EmptyZQ("no probe point passed the Z_Q test")
    refs = [z for z in reference_candidates(model) if ev.in_zq(z)]
    for z in hits:
        if len(refs) >= max(n_refs, 2):
            break
        if z not in refs:
            refs.append(z)
    if len(refs) < 2:
        raise EmptyZQ("Z_Q has fewer than two probe points; cannot reconstruct A_Q")
    rec = reconstruct_operator(model, family, refs[0], refs[1], _ev=ev)
    eig_aq = rec.eigenvalues()
    tol_id = model.tol.identity
    tol_c = tol_id * COMPOSITE_FACTOR

    col = _Collector()
    col.add("AQ.hermitian", rec.herm_residual, tol_id)
    col.add("AQ.reference_independence", rec.zref_independence_residual, tol_c)
    col.add("AQ.extension_property", rec.extension_residual, tol_id)
    for name in ("main.left_inverse", "main.right_inverse", "main.extended_resolvent",
                 "LambdaHat.w_independence", "LambdaHat.adjoint"):
        col.declare(name, tol_c)
    col.declare("main.samples_outside_ZQ", 0.0)

    samples = sample_points(model, n_samples, seed, real_fraction=0.3, avoid=[eig_aq],
                            accept=lambda z: in_rho_aq(rec, z, model.tol.spec))
    n = model.n_h
    eye_h = np.eye(n, dtype=np.complex128)
    w0 = refs[0]
    for z in samples:
        if not ev.in_zq(z):
            col.add("main.samples_outside_ZQ", 1.0, 0.0)
            continue
        col.add("main.samples_outside_ZQ", 0.0, 0.0)
        rq_full = np.linalg.solve(z * eye_h - rec.aq, eye_h)
        hats = [_lambda_hat(ev, rec, w, z, rq_full) for w in refs[:n_refs]]
        q = ev.q(z).q
        hat = hats[0]
        col.add("main.left_inverse", float(np.linalg.norm(hat @ q - np.eye(q.shape[1]), 2)), tol_c)
        col.add("main.right_inverse", float(np.linalg.norm(q @ hat - np.eye(q.shape[0]), 2)), tol_c)
        for other in hats[1:]:
            col.add("LambdaHat.w_independence", rel_residual(other - hat, hat), tol_c)
        zb = z.conjugate()
        rq_full_b = dagger(rq_full)
        hat_b = _lambda_hat(ev, rec, w0, zb, rq_full_b)
        lhs, rhs = dagger(ev.v) @ dagger(hat) @ dagger(ev.w), ev.w @ hat_b @ ev.v
        col.add("LambdaHat.adjoint", rel_residual(lhs - rhs, lhs, rhs), tol_c)
        col.add("main.extended_resolvent", rel_residual(rq_full - ev.rq(z), rq_full), tol_c)

    # eigenvalues of A_Q away from spectrum(A0) must be singular points of Q
    col.declare("main.eigenvalues_singular_Q", model.tol.sing)
    for e in eig_aq:
        if in_rho_a0(model, complex(e)):
            qv = ev.q(complex(float(e), 0.0))
            col.add("main.eigenvalues_singular_Q", qv.sigma_min / q_scale(qv.sigma_max), model.tol.sing)

    notes = [f"reference points {[repr(r) for r in refs]}", f"{len(samples)} samples in rho(A0) cap rho(A_Q)"]
    if spectral_interval is not None:
        rows = compare_spectrum(model, family, spectral_interval, rec=rec)
        col.add("main.spectral_correspondence", spectrum_discrepancy(rows), 1e-8 * max(rec.norm, 1.0))
        notes.append(f"{len(rows)} eigenvalues compared on {tuple(spectral_interval)}")
    return VerificationReport(col.entries(), model_fingerprint(model, family), notes)
