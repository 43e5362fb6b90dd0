"""Coupling-point location, withdrawal inversion and safety classification.

The coupling point is the pressure maximum of the ring: the position where
a new consumer can be attached with the least disturbance.  Because the
pressure there is affine in the withdrawal total, the admissible withdrawal
under an inlet-pressure floor has a closed-form inversion, which is cross-
checked by bisection.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import series
from .core import (GradientMode, PipelineConfig, SafetyThresholds,
                   SeriesOptions, WithdrawalPoint, WithdrawalSchedule)
from .errors import (InfeasibleConstraint, InvalidParameter, MultipleExtrema,
                     NegativeWithdrawalWarning, NoExtremum, OutOfDomain)

_PI = math.pi

#: Bisection stops once the bracket is narrower than this, in metres.
POSITION_TOLERANCE_M = 0.01

#: Step of the second central difference used for the concavity check,
#: as a fraction of the ring length.
CURVATURE_STEP_FRACTION = 1.0 / 3000.0


@dataclass(frozen=True)
class CouplingPoint:
    """Location and value of the ring pressure maximum."""

    position_m: float
    pressure_pa: float
    time_s: float


@dataclass(frozen=True)
class AdmissibleWithdrawal:
    """Largest withdrawal meeting the inlet-pressure floor."""

    total: float                # admissible G_total, Pa*s/m
    cap_binding: bool           # True when the external cap was the limit
    binding_time_s: float       # time at which the floor binds
    inlet_pressure_pa: float    # inlet pressure at the binding time
    per_unit_drop_pa: float     # inlet drop per unit of withdrawal


class Band(str, enum.Enum):
    OPTIMAL = "Optimal"
    PERMISSIBLE = "Permissible"
    CAUTION = "Caution"
    UNSAFE = "Unsafe"


@dataclass(frozen=True)
class DropClassification:
    drop_fraction: float
    band: Band


def _scan_gradient(t, schedule, cfg, opts, include_withdrawals):
    """Smooth gradient used for extremum scans.

    By default the coupling point is located on the base, pre-connection
    field, so the schedule is ignored; with ``include_withdrawals`` the full
    gradient of the loaded field is scanned instead.
    """
    if include_withdrawals:
        sched, mode = schedule, GradientMode.FULL
    else:
        sched, mode = series.EMPTY_SCHEDULE, GradientMode.BASE_ONLY

    def grad(x: float) -> float:
        return series.continuous_gradient(x, t, sched, cfg, opts, mode=mode)

    def field(x: float) -> float:
        return series.pressure(x, t, sched, cfg, opts)

    return grad, field


def _bisect_root(grad, lo: float, hi: float) -> float:
    while hi - lo > POSITION_TOLERANCE_M:
        mid = 0.5 * (lo + hi)
        value = grad(mid)
        if value > 0.0:
            lo = mid
        elif value < 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def find_coupling_point(t: float, schedule: WithdrawalSchedule,
                        cfg: PipelineConfig, opts: SeriesOptions | None = None,
                        grid_step: float = 100.0,
                        include_withdrawals: bool = False) -> CouplingPoint:
    """Locate the pressure maximum by a sign-change scan of dP/dx.

    Scans x in (0, L) at ``grid_step`` for a + to - crossing, refines it by
    bisection to within 0.01 m and confirms concavity with a second central
    difference.  Raises :class:`NoExtremum` when the gradient never changes
    sign (for instance at t = 0) and :class:`MultipleExtrema`, with all
    refined candidates attached, when more than one crossing exists.
    """
    opts = opts or series.DEFAULT_OPTIONS
    if t < 0.0:
        raise OutOfDomain(f"time {t:g} is negative")
    if t == 0.0:
        raise NoExtremum("the gradient is identically zero at t = 0")
    if not 0.0 < grid_step < cfg.length_m:
        raise InvalidParameter("grid_step must lie in (0, L)")

    grad, field = _scan_gradient(t, schedule, cfg, opts, include_withdrawals)

    brackets: list[tuple[float, float]] = []
    prev_x: float | None = None
    prev_v = 0.0
    for x in np.arange(grid_step, cfg.length_m, grid_step):
        value = grad(float(x))
        if value == 0.0:
            continue                      # carry the last definite sign
        if prev_x is not None and prev_v > 0.0 and value < 0.0:
            brackets.append((prev_x, float(x)))
        prev_x, prev_v = float(x), value

    if not brackets:
        raise NoExtremum(f"no + to - gradient crossing on (0, L) at t = {t:g}")
    roots = [_bisect_root(grad, lo, hi) for lo, hi in brackets]
    if len(roots) > 1:
        raise MultipleExtrema(
            f"{len(roots)} gradient crossings found at t = {t:g}", roots)

    root = roots[0]
    h = cfg.length_m * CURVATURE_STEP_FRACTION
    curvature = field(root + h) - 2.0 * field(root) + field(root - h)
    if curvature >= 0.0:
        raise NoExtremum(
            f"stationary point at {root:.2f} m failed the concavity check")
    return CouplingPoint(position_m=root, pressure_pa=field(root), time_s=t)


def tap_pressure(total: float, t: float, x_new: float,
                 cfg: PipelineConfig,
                 opts: SeriesOptions | None = None) -> float:
    """Pressure at the tap when a total withdrawal ``total`` sits there.

    Equals the full series evaluated at its own tap: the cosine response
    collapses to the s_e kernel because cos(0) = 1 in every mode.
    """
    opts = opts or series.DEFAULT_OPTIONS
    c_sq = cfg.sound_speed_m_s**2
    base_coeff = 2.0 * cfg.linearization_a * cfg.base_flow * cfg.length_m
    kernel = t + 2.0 * _PI * series.s_e(t, cfg, opts)
    return (cfg.nominal_pressure()
            + base_coeff * series.s_sin(x_new, t, cfg, opts)
            - (c_sq / cfg.length_m) * total * kernel)


def pressure_at_coupling(t: float, g_new: float, x_new: float,
                         cfg: PipelineConfig,
                         opts: SeriesOptions | None = None) -> float:
    """Tap pressure once the base flow plus ``g_new`` is drawn at ``x_new``."""
    opts = opts or series.DEFAULT_OPTIONS
    if not 0.0 < x_new < cfg.length_m:
        raise OutOfDomain(f"tap position {x_new:g} outside (0, L)")
    if g_new < 0.0:
        raise InvalidParameter("g_new must be >= 0")
    if t < 0.0:
        raise OutOfDomain(f"time {t:g} is negative")
    return tap_pressure(cfg.base_flow + g_new, t, x_new, cfg, opts)


def invert_withdrawal(p_target: float, t: float, x_new: float,
                      cfg: PipelineConfig, opts: SeriesOptions | None = None,
                      printed_form: bool = False) -> float:
    """Withdrawal increment g_new that yields ``p_target`` at the tap.

    Closed-form inversion of the affine tap-pressure relation, so
    ``pressure_at_coupling(t, g, x)`` and this function round-trip exactly.
    The self-consistent time kernel is (t + 2*pi*S_e); ``printed_form``
    selects the (t + 2*S_e) variant found in the source formula, which does
    not round-trip and is kept only for comparison.
    """
    opts = opts or series.DEFAULT_OPTIONS
    if not 0.0 < x_new < cfg.length_m:
        raise OutOfDomain(f"tap position {x_new:g} outside (0, L)")
    if t <= 0.0:
        raise InvalidParameter("inversion requires t > 0")
    c_sq = cfg.sound_speed_m_s**2
    a, g0, length = cfg.linearization_a, cfg.base_flow, cfg.length_m
    kernel_scale = 2.0 if printed_form else 2.0 * _PI
    kernel = t + kernel_scale * series.s_e(t, cfg, opts)
    numerator = (cfg.inlet_pressure_pa - p_target
                 - a * g0 * length * (1.0 - 2.0 * series.s_sin(x_new, t, cfg, opts)))
    total = numerator / ((c_sq / length) * kernel)
    g_new = total - g0
    if g_new < 0.0:
        warnings.warn(
            f"target pressure {p_target:g} Pa exceeds the zero-withdrawal "
            f"tap pressure; implied increment {g_new:g} is negative",
            NegativeWithdrawalWarning, stacklevel=2)
    return g_new


def max_admissible_withdrawal(horizon_s: float, p_min: float,
                              g_max: float | None, x_new: float,
                              cfg: PipelineConfig,
                              opts: SeriesOptions | None = None,
                              method: str = "affine",
                              time_samples: int = 240) -> AdmissibleWithdrawal:
    """Largest total withdrawal at ``x_new`` keeping P(0, t) >= p_min.

    The inlet pressure is nominal minus the withdrawal total times a
    per-unit drop D(t), so the constraint over the horizon reduces to an
    affine inversion at the binding time (``method="affine"``).  The
    ``"bisection"`` method solves the same sampled min-over-time constraint
    iteratively to 1e-6 flow units and exists as a cross-check.

    D(t) is checked for monotone growth on the sample grid; if that ever
    failed, the sampled maximum would be used as the binding point.
    """
    opts = opts or series.DEFAULT_OPTIONS
    if horizon_s <= 0.0:
        raise InvalidParameter("horizon_s must be > 0")
    if not 0.0 < x_new < cfg.length_m:
        raise OutOfDomain(f"tap position {x_new:g} outside (0, L)")
    if g_max is not None and g_max < 0.0:
        raise InvalidParameter("g_max must be >= 0 or None")
    if time_samples < 2:
        raise InvalidParameter("time_samples must be >= 2")
    nominal = cfg.nominal_pressure()
    if p_min > nominal:
        raise InfeasibleConstraint(
            f"pressure floor {p_min:g} Pa exceeds the nominal level "
            f"{nominal:g} Pa; even zero withdrawal violates it")

    unit = WithdrawalSchedule((WithdrawalPoint(x_new, 1.0),))
    times = horizon_s * np.arange(1, time_samples + 1) / time_samples
    drops = np.array([
        -series.withdrawal_response(0.0, float(tt), unit, cfg, opts)
        for tt in times])
    monotone = bool(np.all(np.diff(drops) >= -1e-9 * abs(drops[-1])))
    bind = len(drops) - 1 if monotone else int(np.argmax(drops))
    drop_max = float(drops[bind])
    budget = nominal - p_min

    if method == "affine":
        total = budget / drop_max
    elif method == "bisection":
        def feasible(g: float) -> bool:
            return bool(np.all(nominal - g * drops >= p_min - 1e-9))
        lo, hi = 0.0, 2.0 * budget / drop_max + 1.0
        while hi - lo > 1e-6:
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        total = lo
    else:
        raise InvalidParameter(f"unknown method {method!r}")

    cap_binding = g_max is not None and math.isfinite(g_max) and total > g_max
    if cap_binding:
        total = g_max
    return AdmissibleWithdrawal(
        total=total,
        cap_binding=cap_binding,
        binding_time_s=float(times[bind]),
        inlet_pressure_pa=nominal - total * drop_max,
        per_unit_drop_pa=drop_max,
    )


def classify_pressure_drop(p_nominal: float, p_current: float,
                           thresholds: SafetyThresholds | None = None
                           ) -> DropClassification:
    """Band the relative drop (p_nominal - p_current) / p_nominal.

    Negative drops (pressure above nominal) land in the Optimal band.  The
    band between ``permissible_max`` and ``unsafe_min`` is reported as
    Caution.
    """
    thresholds = thresholds or SafetyThresholds()
    if p_nominal <= 0.0:
        raise InvalidParameter("p_nominal must be > 0")
    drop = (p_nominal - p_current) / p_nominal
    if drop <= thresholds.optimal_max:
        band = Band.OPTIMAL
    elif drop <= thresholds.permissible_max:
        band = Band.PERMISSIBLE
    elif drop <= thresholds.unsafe_min:
        band = Band.CAUTION
    else:
        band = Band.UNSAFE
    return DropClassification(drop_fraction=drop, band=band)
