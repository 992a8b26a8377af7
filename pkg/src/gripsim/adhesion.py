"""Pressure-dependent adhesive force capacity with switching latency.

The pad holds with a capacity that scales like sqrt(interface energy times
contact area over compliance). Lowering the chamber pressure stiffens the
foam (compliance drops), so capacity rises as pressure falls. A pneumatic
command takes effect only after a fixed transport delay.
"""

from __future__ import annotations

import math
from typing import Sequence

from .scenario import AdhesionParams, GripperParams

# Slack absorbing float noise in t - tau_sw comparisons; far below any
# sensible control period.
_TIME_EPS = 1e-9


def compliance(pressure: float, params: AdhesionParams, gripper: GripperParams) -> float:
    """Pad compliance C(P) in m/N; strictly increasing in pressure."""
    if not (gripper.p_min - 1e-9 <= pressure <= gripper.p_max + 1e-9):
        raise ValueError(f"pressure {pressure} outside [{gripper.p_min}, {gripper.p_max}]")
    return params.c0 * math.exp(params.c_p * (pressure - gripper.p_min))


def force_capacity(
    pressure: float,
    contact_radius: float,
    adhesion_energy: float,
    params: AdhesionParams,
    gripper: GripperParams,
) -> float:
    """Holding capacity in N for a single item of nominal size ``contact_radius``.

    The contact cannot exceed the active pad area, so the effective radius
    saturates at the pad radius.
    """
    return group_capacity(pressure, contact_radius, adhesion_energy, 1, params, gripper)


def group_capacity(
    pressure: float,
    contact_radius: float,
    adhesion_energy: float,
    items: int,
    params: AdhesionParams,
    gripper: GripperParams,
) -> float:
    """Capacity for ``items`` identical pieces held under one pad at once.

    Contact areas of the individual pieces add until the pad is covered, so
    capacity grows like sqrt(items) up to the packing limit.
    """
    if contact_radius <= 0 or adhesion_energy <= 0:
        raise ValueError("contact_radius and adhesion_energy must be > 0")
    if items < 1:
        raise ValueError("items must be >= 1")
    r_eff = min(contact_radius, gripper.pad_radius)
    area_scale = min(float(items) * r_eff * r_eff, gripper.pad_radius**2)
    c = compliance(pressure, params, gripper)
    return params.k_cal * math.sqrt(adhesion_energy * area_scale / c)


def max_items_under_pad(contact_radius: float, gripper: GripperParams) -> int:
    """Geometric packing bound: how many items of this size fit under the pad.

    A single item always fits (an oversized item makes partial contact, which
    the pad-radius saturation in the capacity already accounts for).
    """
    if contact_radius <= 0:
        raise ValueError("contact_radius must be > 0")
    return max(1, math.floor((gripper.pad_radius / contact_radius) ** 2))


def delay_ticks(tau_sw: float, dt: float) -> int:
    """Switching latency expressed in whole control ticks (ceil)."""
    return max(0, math.ceil(tau_sw / dt - _TIME_EPS))


def effective_pressure(
    history: Sequence[tuple[float, float]],
    t: float,
    tau_sw: float,
    initial: float,
) -> float:
    """Pressure the pad physically sees at time ``t``: the command from
    ``tau_sw`` seconds ago (pure transport delay).

    ``history`` is (time, commanded pressure) in nondecreasing time order;
    before the first entry the pad sits at ``initial``.
    """
    cutoff = t - tau_sw + _TIME_EPS
    value = initial
    for t_cmd, p_cmd in history:
        if t_cmd <= cutoff:
            value = p_cmd
        else:
            break
    return value


def effective_capacity(
    history: Sequence[tuple[float, float]],
    t: float,
    contact_radius: float,
    adhesion_energy: float,
    params: AdhesionParams,
    gripper: GripperParams,
    initial: float = 0.0,
    items: int = 1,
) -> float:
    """Capacity at time ``t`` under the delayed pressure command."""
    p = effective_pressure(history, t, gripper.tau_sw, initial)
    return group_capacity(p, contact_radius, adhesion_energy, items, params, gripper)
