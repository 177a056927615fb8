from .layout import CodeLayout
from .nms import (
    CheckState,
    DecodeParams,
    DecodeResult,
    decode_layered_nms,
    layer_update,
    min2,
    syndrome_check,
)
from .spa import decode_flooding_spa

__all__ = [
    "CheckState",
    "CodeLayout",
    "DecodeParams",
    "DecodeResult",
    "decode_flooding_spa",
    "decode_layered_nms",
    "layer_update",
    "min2",
    "syndrome_check",
]
