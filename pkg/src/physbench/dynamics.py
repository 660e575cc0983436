"""Fixed-step RK4 integration with collision-event localization.

Events are guard functions that fire when they cross from positive to
negative inside a step.  The crossing time is bracketed by bisection to
1e-10 of the step, the state is advanced to just before contact, the
event's resolve map is applied, and integration resumes for the rest of
the step.  Grazing contacts (guard touching zero without going negative)
never fire, so a ball sliding along a wall does not chatter.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from physbench.core.quat import quat_normalize
from physbench.errors import EventStorm, NonFinite

DerivFn = Callable[[np.ndarray], np.ndarray]

# more simultaneous events than this inside one dt signals a modeling
# error, e.g. a body wedged into a corner at zero speed
MAX_EVENTS_PER_STEP = 16

_BISECT_REL_TOL = 1e-10


@dataclass(frozen=True)
class DimSpec:
    """One named state dimension with its unit and kinematic role.

    role is one of "pos", "vel", "quat", "pixel", "flag", "aux"; "vel"
    on a pos entry names the dimension holding its time derivative.
    """

    name: str
    unit: str
    role: str = "aux"
    vel: Optional[str] = None
    group: Optional[int] = None


@dataclass(frozen=True)
class StateLayout:
    dims: tuple

    def __post_init__(self):
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names in layout: {names}")

    @property
    def size(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple:
        return tuple(d.name for d in self.dims)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def quat_start(self) -> Optional[int]:
        """Start of the contiguous 4-wide quaternion block, if any."""
        idx = [i for i, d in enumerate(self.dims) if d.role == "quat"]
        if not idx:
            return None
        if len(idx) != 4 or idx != list(range(idx[0], idx[0] + 4)):
            raise ValueError("quaternion block must be 4 contiguous dims")
        return idx[0]

    def vel_pairs(self) -> list[tuple[int, int]]:
        """(position index, velocity index) pairs declared in the layout."""
        pairs = []
        for i, d in enumerate(self.dims):
            if d.role == "pos" and d.vel is not None:
                pairs.append((i, self.index(d.vel)))
        return pairs


@dataclass
class OdeState:
    values: np.ndarray
    layout: StateLayout

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.layout.size,):
            raise ValueError(
                f"state length {self.values.shape} does not match layout size {self.layout.size}"
            )


@dataclass(frozen=True)
class EventSpec:
    """guard crosses + -> - at contact; resolve moves the state off it."""

    guard: Callable[[np.ndarray], float]
    resolve: Callable[[np.ndarray], np.ndarray]
    name: str = "event"


@dataclass
class FiredEvent:
    name: str
    time_in_step: float


def rk4_values(deriv: DerivFn, y: np.ndarray, dt: float) -> np.ndarray:
    """Layout-free RK4 update on a raw value vector."""
    k1 = deriv(y)
    k2 = deriv(y + (0.5 * dt) * k1)
    k3 = deriv(y + (0.5 * dt) * k2)
    k4 = deriv(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)



def _finalize(values: np.ndarray, layout: StateLayout) -> np.ndarray:
    qs = layout.quat_start
    if qs is not None:
        values = values.copy()
        values[qs : qs + 4] = quat_normalize(values[qs : qs + 4])
    if not np.all(np.isfinite(values)):
        raise NonFinite(f"non-finite state component: {values}")
    return values


def rk4_step(deriv: DerivFn, s: OdeState, dt: float) -> OdeState:
    """One classical RK4 step; quaternion block renormalized afterward."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    out = rk4_values(deriv, s.values, dt)
    return OdeState(_finalize(out, s.layout), s.layout)


def _locate_crossing(
    deriv: DerivFn, event: EventSpec, y: np.ndarray, h: float
) -> Optional[float]:
    """Earliest guard zero-crossing time in (0, h], or None.

    Trial states are single RK4 steps of varying size from y.  The
    midpoint is sampled too, so a crossing that reverts within the step
    is still caught when it is visible at h/2.  Returns the left edge of
    the final bracket, where the guard is still strictly positive.
    """
    g_half = event.guard(rk4_values(deriv, y, 0.5 * h))
    if g_half < 0.0:
        a, b = 0.0, 0.5 * h
    else:
        g_full = event.guard(rk4_values(deriv, y, h))
        if g_full < 0.0:
            a, b = 0.5 * h, h
        else:
            return None
    tol = _BISECT_REL_TOL * h
    while b - a > tol:
        mid = 0.5 * (a + b)
        if event.guard(rk4_values(deriv, y, mid)) > 0.0:
            a = mid
        else:
            b = mid
    return a


def step_with_events(
    deriv: DerivFn,
    events: Sequence[EventSpec],
    s: OdeState,
    dt: float,
    fired: Optional[list] = None,
) -> OdeState:
    """Advance dt, resolving every guard crossing in time order.

    A state sitting exactly on a contact with zero normal velocity and an
    inward force (resolve is the identity, guard would sink) is held
    unchanged for the step: a resting contact, not an event storm.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    y = s.values
    remaining = dt
    n_fired = 0
    while True:
        # contacts already at or below the surface: resolve if worsening
        repeat = True
        while repeat:
            repeat = False
            for ev in events:
                g0 = ev.guard(y)
                if g0 <= 0.0 and ev.guard(rk4_values(deriv, y, remaining)) < g0:
                    resolved = np.asarray(ev.resolve(y), dtype=float)
                    if np.array_equal(resolved, y):
                        # resting contact: hold for the rest of the step
                        return OdeState(_finalize(y, s.layout), s.layout)
                    y = resolved
                    n_fired += 1
                    if n_fired > MAX_EVENTS_PER_STEP:
                        raise EventStorm(
                            f"more than {MAX_EVENTS_PER_STEP} events within one step"
                        )
                    if fired is not None:
                        fired.append(FiredEvent(ev.name, dt - remaining))
                    repeat = True
        earliest: Optional[tuple[float, EventSpec]] = None
        for ev in events:
            if ev.guard(y) <= 0.0:
                continue
            t_hit = _locate_crossing(deriv, ev, y, remaining)
            if t_hit is not None and (earliest is None or t_hit < earliest[0]):
                earliest = (t_hit, ev)
        if earliest is None:
            return OdeState(_finalize(rk4_values(deriv, y, remaining), s.layout), s.layout)
        t_star, ev = earliest
        if t_star > 0.0:
            y = rk4_values(deriv, y, t_star)
        y = np.asarray(ev.resolve(y), dtype=float)
        n_fired += 1
        if n_fired > MAX_EVENTS_PER_STEP:
            raise EventStorm(f"more than {MAX_EVENTS_PER_STEP} events within one step")
        if fired is not None:
            fired.append(FiredEvent(ev.name, dt - remaining + t_star))
        remaining -= t_star
