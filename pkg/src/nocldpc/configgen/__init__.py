from .image import ConfigImage, ConfigIntegrityError, gen_config, pack_rm_word, unpack_rm_word
from .upload import (
    UploadInfeasibleError,
    UploadPlan,
    UploadReport,
    min_buffer_size,
    plan_upload,
    simulate_upload,
)

__all__ = [
    "ConfigImage",
    "ConfigIntegrityError",
    "UploadInfeasibleError",
    "UploadPlan",
    "UploadReport",
    "gen_config",
    "min_buffer_size",
    "pack_rm_word",
    "plan_upload",
    "simulate_upload",
    "unpack_rm_word",
]
