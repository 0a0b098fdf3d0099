"""Multi-label losses over independent per-label probabilities.

Both losses accept a plain vector (list/ndarray) for metric-style use and a
Matrix for the differentiable path; Matrix inputs are recorded on the active
tape. Probabilities are clamped to [CLAMP_EPS, 1-CLAMP_EPS] before any log.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, ShapeError, ValidationError
from .matrix import Matrix, Scalar
from .tape import active_tape

CLAMP_EPS = 1e-7


def _as_vectors(p, y):
    p_mat = p if isinstance(p, Matrix) else None
    pv = (p.a if isinstance(p, Matrix) else np.asarray(p, dtype=np.float64)).reshape(-1)
    yv = (y.a if isinstance(y, Matrix) else np.asarray(y, dtype=np.float64)).reshape(-1)
    if pv.shape != yv.shape:
        raise ShapeError(f"loss length mismatch: {pv.size} probabilities vs {yv.size} targets")
    if pv.size == 0:
        raise ShapeError("loss over an empty vector")
    if not np.all((yv == 0.0) | (yv == 1.0)):
        raise ValidationError("targets must be exactly 0 or 1")
    return p_mat, pv, yv


def _clamp(pv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pc = np.clip(pv, CLAMP_EPS, 1.0 - CLAMP_EPS)
    interior = (pv > CLAMP_EPS) & (pv < 1.0 - CLAMP_EPS)
    return pc, interior


def bce_loss(p, y) -> float:
    """Mean binary cross-entropy: -mean(y*ln p + (1-y)*ln(1-p))."""
    p_mat, pv, yv = _as_vectors(p, y)
    pc, interior = _clamp(pv)
    n = pv.size
    value = Scalar(-float(np.mean(yv * np.log(pc) + (1.0 - yv) * np.log1p(-pc))))

    tape = active_tape()
    if tape is not None and p_mat is not None:

        def vjp(g):
            dp = (-yv / pc + (1.0 - yv) / (1.0 - pc)) / n
            dp = np.where(interior, dp, 0.0) * float(g)
            return (dp.reshape(p_mat.a.shape),)

        tape.record(value, (p_mat,), vjp)
    return value


def asymmetric_loss(p, y, gamma_pos: float, gamma_neg: float, clip: float) -> float:
    """Asymmetric focal-style loss for imbalanced multi-label targets.

    Positive term y*(1-p)^gamma_pos*ln(p); negative term uses the shifted
    probability p_m = max(p - clip, 0): (1-y)*p_m^gamma_neg*ln(1-p_m).
    Degenerates to bce_loss at gamma_pos = gamma_neg = 0, clip = 0.
    """
    if gamma_pos < 0 or gamma_neg < 0:
        raise ConfigError(f"gammas must be >= 0, got ({gamma_pos}, {gamma_neg})")
    if not 0.0 <= clip < 1.0:
        raise ConfigError(f"clip must be in [0, 1), got {clip}")
    p_mat, pv, yv = _as_vectors(p, y)
    pc, interior = _clamp(pv)
    n = pv.size

    pm = np.clip(pc - clip, 0.0, 1.0 - CLAMP_EPS)
    pos = yv * (1.0 - pc) ** gamma_pos * np.log(pc)
    neg = (1.0 - yv) * pm**gamma_neg * np.log1p(-pm)
    value = Scalar(-float(np.mean(pos + neg)))

    tape = active_tape()
    if tape is not None and p_mat is not None:

        def vjp(g):
            one_m_p = 1.0 - pc
            d_pos = yv * (one_m_p**gamma_pos / pc - gamma_pos * one_m_p ** (gamma_pos - 1.0) * np.log(pc))
            shift_active = pm > 0.0
            safe_pm = np.where(shift_active, pm, 1.0)
            if gamma_neg > 0:
                t1 = gamma_neg * safe_pm ** (gamma_neg - 1.0) * np.log1p(-pm)
            else:
                t1 = np.zeros_like(pm)
            d_neg = (1.0 - yv) * np.where(shift_active, t1 - pm**gamma_neg / (1.0 - pm), 0.0)
            dp = np.where(interior, -(d_pos + d_neg) / n, 0.0) * float(g)
            return (dp.reshape(p_mat.a.shape),)

        tape.record(value, (p_mat,), vjp)
    return value
