"""Built-in device profiles and the little math that goes with them."""

from __future__ import annotations

from typing import Optional

from .visspec import DeviceProfile

REFERENCE_PPI = 96.0

DEVICE_PRESETS = (
    DeviceProfile(name="desktop", cls="desktop", screenWidth=1280, screenHeight=800,
                  ppi=96.0),
    DeviceProfile(name="tablet", cls="tablet", screenWidth=768, screenHeight=1024,
                  ppi=132.0),
    DeviceProfile(name="phone", cls="phone", screenWidth=375, screenHeight=667,
                  ppi=163.0),
    DeviceProfile(name="thumbnail", cls="thumbnail", screenWidth=160, screenHeight=160,
                  ppi=96.0),
    DeviceProfile(name="print", cls="print", screenWidth=600, screenHeight=800,
                  ppi=300.0),
    DeviceProfile(name="social", cls="social", screenWidth=1080, screenHeight=1080,
                  ppi=96.0),
)


def preset(name: str) -> Optional[DeviceProfile]:
    for p in DEVICE_PRESETS:
        if p.name == name:
            return DeviceProfile.from_dict(p.to_dict(), path="device")
    return None


def display_width(profile: DeviceProfile) -> float:
    """Physical pixels scaled to layout pixels at the reference density."""
    return profile.screenWidth * REFERENCE_PPI / profile.ppi


def display_height(profile: DeviceProfile) -> float:
    return profile.screenHeight * REFERENCE_PPI / profile.ppi


def edit_direction(source_cls: str) -> str:
    """Which way the responsive workflow is flowing, by source device class."""
    if source_cls == "desktop":
        return "desktopFirst"
    if source_cls == "phone":
        return "mobileFirst"
    return "simultaneous"


__all__ = ["DEVICE_PRESETS", "REFERENCE_PPI", "preset", "display_width",
           "display_height", "edit_direction"]
