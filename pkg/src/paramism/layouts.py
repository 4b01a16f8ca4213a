"""Loudspeaker layouts (CICP 6, 16, 12, 19) and the downmix prototype matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Speaker:
    label: str
    azimuth_deg: float
    elevation_deg: float
    is_lfe: bool = False


@dataclass(frozen=True)
class SpeakerLayout:
    name: str
    cicp_index: int
    speakers: tuple

    @property
    def num_channels(self) -> int:
        return len(self.speakers)

    @property
    def lfe_mask(self) -> np.ndarray:
        return np.array([s.is_lfe for s in self.speakers])

    @property
    def panned_indices(self) -> np.ndarray:
        """Channel indices of the non-LFE speakers, in output order."""
        return np.nonzero(~self.lfe_mask)[0]

    @property
    def panned_speakers(self) -> tuple:
        return tuple(s for s in self.speakers if not s.is_lfe)

    def directions(self) -> np.ndarray:
        """(S, 2) azimuth/elevation of the non-LFE speakers."""
        return np.array([[s.azimuth_deg, s.elevation_deg] for s in self.panned_speakers])


def _spk(label, az, el=0.0):
    return Speaker(label, float(az), float(el))


_LFE = Speaker("LFE", 0.0, 0.0, True)

# channel order follows the CICP definitions
LAYOUTS = {
    "5_1": SpeakerLayout("5_1", 6, (
        _spk("L", 30), _spk("R", -30), _spk("C", 0), _LFE,
        _spk("Ls", 110), _spk("Rs", -110),
    )),
    "5_1_4": SpeakerLayout("5_1_4", 16, (
        _spk("L", 30), _spk("R", -30), _spk("C", 0), _LFE,
        _spk("Ls", 110), _spk("Rs", -110),
        _spk("Ltf", 30, 35), _spk("Rtf", -30, 35),
        _spk("Ltr", 110, 35), _spk("Rtr", -110, 35),
    )),
    "7_1": SpeakerLayout("7_1", 12, (
        _spk("L", 30), _spk("R", -30), _spk("C", 0), _LFE,
        _spk("Ls", 110), _spk("Rs", -110),
        _spk("Lsr", 135), _spk("Rsr", -135),
    )),
    "7_1_4": SpeakerLayout("7_1_4", 19, (
        _spk("L", 30), _spk("R", -30), _spk("C", 0), _LFE,
        _spk("Lsr", 135), _spk("Rsr", -135),
        _spk("Lss", 90), _spk("Rss", -90),
        _spk("Ltf", 45, 35), _spk("Rtf", -45, 35),
        _spk("Ltr", 135, 35), _spk("Rtr", -135, 35),
    )),
}


def get_layout(name: str) -> SpeakerLayout:
    key = name.strip().replace(".", "_")
    try:
        return LAYOUTS[key]
    except KeyError:
        raise ValueError(f"unknown layout {name!r}; choose from {', '.join(LAYOUTS)}") from None


def prototype_matrix(layout: SpeakerLayout) -> np.ndarray:
    """(S, 2) map from downmix to non-LFE speakers by hemisphere.

    Left-hemisphere speakers take the left channel, right ones the right
    channel; speakers on the median plane (0 or 180 degrees) take half of
    each.
    """
    rows = []
    for s in layout.panned_speakers:
        az = s.azimuth_deg
        if az in (0.0, 180.0, -180.0):
            rows.append((0.5, 0.5))
        elif az > 0:
            rows.append((1.0, 0.0))
        else:
            rows.append((0.0, 1.0))
    return np.array(rows)
