"""Line-of-sight optical channel model for an indoor LED downlink.

Each LED radiates with a Lambertian pattern and each photodiode sits behind
an optical filter and a concentrator:

    h = R * A_p * (m + 1) / (2 pi d^2) * cos^m(v) * T * g(phi) * cos(phi)

    m      = -1 / log2(cos(half_intensity_angle))
    g(phi) = n^2 / sin^2(fov_semi_angle)   for 0 <= phi <= fov, else 0

LEDs point straight down and photodiodes straight up, so the irradiance
angle v and the incidence angle phi share the same cosine, (led_z - pd_z)/d.
Gains from L cooperating LEDs combine per user as ||h_k||^2 = sum_l h_lk^2,
and users are ranked by ||h_k||^2 ascending (weakest channel decoded first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Position3",
    "DeviceParams",
    "LinkGeometry",
    "ChannelGains",
    "lambertian_order",
    "concentrator_gain",
    "link_geometry",
    "channel_gain",
    "combined_gains",
    "plane_combined_sq",
]

_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class Position3:
    """A point in room coordinates, meters; z is height above the floor."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"position coordinates must be finite, got {self!r}")


@dataclass(frozen=True)
class DeviceParams:
    """LED and photodiode hardware parameters.

    All SI units, angles in radians. Degree/cm^2 conversions happen at the
    config boundary, never here.
    """

    pd_area: float             # m^2
    responsivity: float        # A/W
    half_intensity_angle: float  # rad, radiation angle at half intensity
    fov_semi_angle: float      # rad, concentrator field-of-view semi-angle
    refractive_index: float
    optical_filter_gain: float
    led_optical_power: float   # W

    def __post_init__(self):
        if self.pd_area <= 0.0:
            raise ValueError("pd_area must be positive")
        if self.responsivity <= 0.0:
            raise ValueError("responsivity must be positive")
        if not 0.0 < self.half_intensity_angle < _HALF_PI:
            raise ValueError("half_intensity_angle must be in (0, pi/2)")
        if not 0.0 < self.fov_semi_angle <= _HALF_PI:
            raise ValueError("fov_semi_angle must be in (0, pi/2]")
        if self.refractive_index < 1.0:
            raise ValueError("refractive_index must be >= 1")
        if self.optical_filter_gain <= 0.0:
            raise ValueError("optical_filter_gain must be positive")
        if self.led_optical_power <= 0.0:
            raise ValueError("led_optical_power must be positive")

    @property
    def lambertian_m(self) -> float:
        return lambertian_order(self.half_intensity_angle)


@dataclass(frozen=True)
class LinkGeometry:
    """Distance and angles of a single LED-to-photodiode link (rad)."""

    distance: float
    irradiance_angle: float
    incidence_angle: float


@dataclass(frozen=True)
class ChannelGains:
    """Per-LED gain matrix plus the combined gains and SIC order.

    per_led[l, k] is the gain from LED l to user k (original user index).
    combined_sq[k] = sum_l per_led[l, k]^2. sic_order holds the original
    user indices sorted by combined_sq ascending, ties broken by original
    index so the permutation is deterministic.
    """

    per_led: np.ndarray     # (L, K)
    combined_sq: np.ndarray  # (K,)
    sic_order: np.ndarray   # (K,) int

    @property
    def sorted_combined_sq(self) -> np.ndarray:
        """||h||^2 per SIC rank, ascending (rank 1 = weakest first)."""
        return self.combined_sq[self.sic_order]


def lambertian_order(half_intensity_angle: float) -> float:
    """Emission order m = -1/log2(cos(angle)) of a Lambertian source.

    The angle must lie strictly inside (0, pi/2): at 0 the log vanishes and
    at pi/2 the cosine does.
    """
    if not 0.0 < half_intensity_angle < _HALF_PI:
        raise ValueError(
            f"half-intensity angle must be in (0, pi/2) rad, got {half_intensity_angle}"
        )
    return -1.0 / math.log2(math.cos(half_intensity_angle))


def concentrator_gain(incidence_angle: float, refractive_index: float,
                      fov_semi_angle: float) -> float:
    """Optical concentrator gain: n^2/sin^2(fov) inside the FoV, else 0.

    The FoV boundary is inclusive (gain still n^2/sin^2(fov) at
    incidence_angle == fov_semi_angle).
    """
    if not 0.0 < fov_semi_angle <= _HALF_PI:
        raise ValueError(f"FoV semi-angle must be in (0, pi/2] rad, got {fov_semi_angle}")
    if refractive_index < 1.0:
        raise ValueError(f"refractive index must be >= 1, got {refractive_index}")
    if incidence_angle < 0.0:
        raise ValueError(f"incidence angle must be >= 0, got {incidence_angle}")
    if incidence_angle > fov_semi_angle:
        return 0.0
    s = math.sin(fov_semi_angle)
    return refractive_index * refractive_index / (s * s)


def link_geometry(led: Position3, user: Position3) -> LinkGeometry:
    """Distance and angles for a downward LED and an upward-facing PD.

    Both normals are vertical, so irradiance and incidence angles coincide:
    cos = (led.z - user.z) / d.
    """
    dz = led.z - user.z
    if dz <= 0.0:
        raise ValueError("LED must sit strictly above the receiver plane")
    dx = led.x - user.x
    dy = led.y - user.y
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    ang = math.acos(min(1.0, dz / d))
    return LinkGeometry(distance=d, irradiance_angle=ang, incidence_angle=ang)


def channel_gain(geom: LinkGeometry, dev: DeviceParams) -> float:
    """Lambertian LoS gain of one LED-PD link; exactly 0 outside the FoV."""
    g = concentrator_gain(geom.incidence_angle, dev.refractive_index, dev.fov_semi_angle)
    if g == 0.0:
        return 0.0
    m = dev.lambertian_m
    d_sq = geom.distance * geom.distance
    return (
        dev.responsivity * dev.pd_area * (m + 1.0) / (2.0 * math.pi * d_sq)
        * math.cos(geom.irradiance_angle) ** m
        * dev.optical_filter_gain
        * g
        * math.cos(geom.incidence_angle)
    )


def combined_gains(leds: Sequence[Position3], users: Sequence[Position3],
                   dev: DeviceParams) -> ChannelGains:
    """Gain matrix, per-user combined ||h||^2, and deterministic SIC order."""
    if len(leds) < 1 or len(users) < 1:
        raise ValueError("need at least one LED and one user")
    per_led = np.array(
        [[channel_gain(link_geometry(led, user), dev) for user in users] for led in leds],
        dtype=float,
    )
    combined_sq = np.sum(per_led * per_led, axis=0)
    # stable argsort = ascending gain, ties broken by original user index
    sic_order = np.argsort(combined_sq, kind="stable")
    return ChannelGains(per_led=per_led, combined_sq=combined_sq, sic_order=sic_order)


def plane_combined_sq(led_xy: np.ndarray, user_xy: np.ndarray, separation: float,
                      dev: DeviceParams) -> np.ndarray:
    """Combined squared gains for users on a horizontal receiver plane.

    Vectorized over any leading batch axes: led_xy is (L, 2), user_xy is
    (..., K, 2), separation is the vertical LED-to-PD distance. Returns
    combined_sq with shape (..., K). Matches combined_gains() link by link.
    """
    led = np.atleast_2d(np.asarray(led_xy, dtype=float))       # (L, 2)
    usr = np.asarray(user_xy, dtype=float)                     # (..., K, 2)
    if separation <= 0.0:
        raise ValueError("vertical separation must be positive")
    dx = usr[..., None, :, 0] - led[:, 0][:, None]             # (..., L, K)
    dy = usr[..., None, :, 1] - led[:, 1][:, None]
    d_sq = dx * dx + dy * dy + separation * separation
    cos_ang = separation / np.sqrt(d_sq)
    m = dev.lambertian_m
    g0 = dev.refractive_index ** 2 / math.sin(dev.fov_semi_angle) ** 2
    in_fov = cos_ang >= math.cos(dev.fov_semi_angle)
    h = (
        dev.responsivity * dev.pd_area * (m + 1.0) / (2.0 * math.pi * d_sq)
        * cos_ang ** m
        * dev.optical_filter_gain
        * g0
        * cos_ang
    ) * in_fov
    return np.sum(h * h, axis=-2)
