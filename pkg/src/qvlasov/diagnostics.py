"""Faithfulness diagnostics for evaluated Wigner fields.

A physically admissible Wigner function has nonnegative position and
momentum marginals and cannot be too spiky: the normalized integral of f^2
times 2*pi*hbar must not exceed one.  These necessary conditions double as
accuracy tests for a truncated expansion.  All integrals use trapezoid
quadrature on the field's own grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .evaluate import WignerField


class DegenerateFieldError(RuntimeError):
    """Field integrates to a non-positive value; marginals are undefined."""


def _double_integral(field: WignerField, values: np.ndarray) -> float:
    return float(np.trapezoid(np.trapezoid(values, field.p_axis(), axis=1),
                              field.q_axis()))


def marginals(field: WignerField) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum marginal densities, each integrating to one."""
    total = _double_integral(field, field.values)
    if not np.isfinite(total) or total <= 0:
        raise DegenerateFieldError(f"field integral {total!r} is not positive")
    p_q = np.trapezoid(field.values, field.p_axis(), axis=1) / total
    p_p = np.trapezoid(field.values, field.q_axis(), axis=0) / total
    return p_q, p_p


def q_functional(field: WignerField):
    """Spikiness functional Q, the bound product 2*pi*hbar*Q, and the verdict.

    Q is invariant under rescaling of the field, so it applies to
    unnormalized fields as well.  The verdict is None when hbar = 0.
    """
    total = _double_integral(field, field.values)
    if not np.isfinite(total) or total <= 0:
        raise DegenerateFieldError(f"field integral {total!r} is not positive")
    second = _double_integral(field, field.values**2)
    q_value = second / total**2
    bound = 2.0 * np.pi * field.hbar * q_value
    verdict = bool(bound <= 1.0) if field.hbar > 0 else None
    return q_value, bound, verdict


@dataclass
class NegativityReport:
    min_value: float
    location: tuple
    fraction_below: float

    def to_json_dict(self) -> dict:
        return {"min_value": self.min_value, "location": list(self.location),
                "fraction_below": self.fraction_below}


def negativity_report(values: np.ndarray, axes: tuple[np.ndarray, ...],
                      epsilon_rel: float = 1e-9) -> NegativityReport:
    """Scan a field or marginal for negative values.

    The threshold is -epsilon_rel * max(values), so roundoff-level noise
    below zero is not counted.
    """
    values = np.asarray(values)
    threshold = -epsilon_rel * float(values.max())
    flat_idx = int(values.argmin())
    idx = np.unravel_index(flat_idx, values.shape)
    location = tuple(float(axis[i]) for axis, i in zip(axes, idx))
    fraction = float(np.count_nonzero(values < threshold)) / values.size
    return NegativityReport(min_value=float(values.min()), location=location,
                            fraction_below=fraction)


@dataclass
class DiagnosticsReport:
    q: np.ndarray
    p: np.ndarray
    p_q: np.ndarray
    p_p: np.ndarray
    q_value: float
    bound_2pi_hbar_q: float
    uncertainty_ok: bool | None
    min_f: float
    argmin_f: tuple
    min_pq: float
    min_pp: float
    norm_residual: float
    negativity: NegativityReport | None = None

    def to_json_dict(self) -> dict:
        return {
            "Q": self.q_value,
            "two_pi_hbar_Q": self.bound_2pi_hbar_q,
            "uncertainty_ok": self.uncertainty_ok,
            "min_f": self.min_f,
            "argmin_f": list(self.argmin_f),
            "min_Pq": self.min_pq,
            "min_Pp": self.min_pp,
            "norm_residual": self.norm_residual,
            "negativity": self.negativity.to_json_dict() if self.negativity else None,
            "q": [float(v) for v in self.q],
            "P_q": [float(v) for v in self.p_q],
            "p": [float(v) for v in self.p],
            "P_p": [float(v) for v in self.p_p],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def diagnose(field: WignerField) -> DiagnosticsReport:
    """Full diagnostics bundle for one field."""
    p_q, p_p = marginals(field)
    q_value, bound, verdict = q_functional(field)
    neg = negativity_report(field.values, (field.q_axis(), field.p_axis()))
    norm_residual = field.grid_integral() - 1.0 if field.normalized else 0.0
    return DiagnosticsReport(
        q=field.q_axis(), p=field.p_axis(), p_q=p_q, p_p=p_p,
        q_value=q_value, bound_2pi_hbar_q=bound, uncertainty_ok=verdict,
        min_f=neg.min_value, argmin_f=neg.location,
        min_pq=float(p_q.min()), min_pp=float(p_p.min()),
        norm_residual=float(norm_residual), negativity=neg)


def write_marginal_csv(axis: np.ndarray, density: np.ndarray, header: str,
                       path) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for x, y in zip(axis, density):
            fh.write(f"{float(x)!r},{float(y)!r}\n")
