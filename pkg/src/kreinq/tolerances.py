from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds. All are relative to the norms of the operands involved.

    identity: residual bound for operator identities.
    herm: allowed anti-Hermitian part of A0.
    spec: relative gap for z to count as a point of a resolvent set.
    rcond: bounded-inverse margin for Q_z (the Z_Q test).
    sing: threshold for declaring Q_z singular when hunting eigenvalues.
    """

    identity: float = 1e-10
    herm: float = 1e-12
    spec: float = 1e-10
    rcond: float = 1e-8
    sing: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"tolerance {f.name}={value!r} must lie in (0, 1)")

    def updated(self, **overrides: float) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()
