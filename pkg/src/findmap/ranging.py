"""Distance estimation: received signal strength, synchronous time of flight,
and differential arrival time, each with its adversarial corruption.

Every estimate is produced by forward-simulating the physical observable
(received power, time stamps, arrival gap) and inverting it, so a corrupted
transmission is seen exactly as a receiver would see it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import IllegalCorruption, NegativeDelay, NonPositivePower, ZeroDistance
from .geometry import Point2D, distance


class Technique(str, Enum):
    RSS = "rss"
    STOF = "stof"
    DAT = "dat"


@dataclass(frozen=True)
class RadioParams:
    s_common: float = 1.0
    wavelength: float = 0.125
    s_r: float = 3e8
    s_u: float = 340.0

    def __post_init__(self):
        for name in ("s_common", "wavelength", "s_r", "s_u"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if not self.s_u < self.s_r:
            raise ValueError("ultrasound must be slower than radio")

    @property
    def friis_constant(self) -> float:
        """lambda / (4 pi)."""
        return self.wavelength / (4.0 * math.pi)


@dataclass(frozen=True)
class RangingModel:
    technique: Technique = Technique.STOF
    params: RadioParams = RadioParams()


@dataclass(frozen=True)
class NoCorruption:
    pass


@dataclass(frozen=True)
class PowerScale:
    """Sender transmits at ``s_fake`` watts instead of the common power."""

    s_fake: float

    def __post_init__(self):
        if not self.s_fake > 0:
            raise ValueError("transmit power must be positive")

    def ratio(self, params: RadioParams) -> float:
        """Multiplicative distance bias sqrt(S_common / S_fake)."""
        return math.sqrt(params.s_common / self.s_fake)

    @classmethod
    def for_ratio(cls, lam: float, params: RadioParams) -> PowerScale:
        return cls(params.s_common / (lam * lam))


@dataclass(frozen=True)
class TimeShift:
    """Additive distance bias ``b`` in meters (signed)."""

    b: float

    @classmethod
    def from_stof_offset(cls, t_shift: float, params: RadioParams) -> TimeShift:
        return cls(params.s_r * t_shift)

    @classmethod
    def from_dat_offset(cls, t_shift: float, params: RadioParams) -> TimeShift:
        # ultrasound delayed by t_shift relative to radio
        return cls(t_shift / (1.0 / params.s_u - 1.0 / params.s_r))

    def stof_offset(self, params: RadioParams) -> float:
        return self.b / params.s_r

    def dat_offset(self, params: RadioParams) -> float:
        return self.b * (1.0 / params.s_u - 1.0 / params.s_r)


Corruption = Union[NoCorruption, PowerScale, TimeShift]
NO_CORRUPTION = NoCorruption()


@dataclass(frozen=True)
class Transmission:
    sender_true_pos: Point2D
    corruption: Corruption = NO_CORRUPTION


def check_corruption(technique: Technique, corruption: Corruption) -> None:
    if isinstance(corruption, PowerScale) and technique is not Technique.RSS:
        raise IllegalCorruption("power scaling only affects RSS ranging")
    if isinstance(corruption, TimeShift) and technique is Technique.RSS:
        raise IllegalCorruption("time shifting only affects SToF/DAT ranging")


def friis_receive_power(s_s: float, wavelength: float, d: float) -> float:
    if d == 0:
        raise ZeroDistance("receive power undefined at zero distance")
    return s_s * (wavelength / (4.0 * math.pi * d)) ** 2


def rss_estimate(s_received: float, params: RadioParams) -> float:
    """Distance implied by received power, assuming the common transmit power."""
    if not s_received > 0:
        raise NonPositivePower(f"received power {s_received} is not positive")
    return params.friis_constant * math.sqrt(params.s_common / s_received)


def stof_estimate(t_send: float, t_recv: float, s_r: float) -> float:
    if t_recv < t_send:
        raise NegativeDelay(f"arrival {t_recv} precedes stamped send time {t_send}")
    return s_r * (t_recv - t_send)


def dat_estimate(t_diff: float, params: RadioParams) -> float:
    """Invert t = d/s_u - d/s_r (ultrasound arrives after radio)."""
    if t_diff < 0:
        raise NegativeDelay(f"arrival gap {t_diff} is negative")
    return t_diff * params.s_r * params.s_u / (params.s_r - params.s_u)


def observe(model: RangingModel, tx: Transmission, receiver: Point2D) -> float:
    """Distance the receiver estimates for a single transmission.

    Raises NegativeDelay when a time shift drives the estimate below zero.
    """
    d = distance(tx.sender_true_pos, receiver)
    if d == 0:
        raise ZeroDistance("receiver coincides with sender")
    c = tx.corruption
    check_corruption(model.technique, c)
    p = model.params
    if model.technique is Technique.RSS:
        s_tx = c.s_fake if isinstance(c, PowerScale) else p.s_common
        return rss_estimate(friis_receive_power(s_tx, p.wavelength, d), p)
    if model.technique is Technique.STOF:
        # real emission at t = 0; a faker back-dates (or forward-dates) the stamp
        t_stamp = -c.stof_offset(p) if isinstance(c, TimeShift) else 0.0
        return stof_estimate(t_stamp, d / p.s_r, p.s_r)
    t_gap = d / p.s_u - d / p.s_r
    if isinstance(c, TimeShift):
        t_gap += c.dat_offset(p)
    return dat_estimate(t_gap, p)
