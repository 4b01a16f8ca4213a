"""ParamISM: 2-4 audio objects coded as a stereo downmix plus per-band side information."""

from .codec import (
    ParamIsmDecoder,
    ParamIsmEncoder,
    decode_file,
    decode_frames,
    encode_signals,
    encode_to_file,
)
from .layouts import LAYOUTS, SpeakerLayout, get_layout
from .reference import render_reference
from .scene import (
    CorruptStreamError,
    ObjectMetadataFrame,
    QuantizedDirection,
    SceneConfig,
)
from .sideinfo import BandPartition, FrameSideInfo

__version__ = "0.1.0"

__all__ = [
    "LAYOUTS",
    "BandPartition",
    "CorruptStreamError",
    "FrameSideInfo",
    "ObjectMetadataFrame",
    "ParamIsmDecoder",
    "ParamIsmEncoder",
    "QuantizedDirection",
    "SceneConfig",
    "SpeakerLayout",
    "decode_file",
    "decode_frames",
    "encode_signals",
    "encode_to_file",
    "get_layout",
    "render_reference",
]
