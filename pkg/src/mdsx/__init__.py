"""Construction and repair of high-rate MDS codes with delta-optimal access."""

from .builder import AccessOptimalCode, RepairPlan, build, repair_plan
from .code_model import BlockParityCheckCode, decode_any_k, encode, is_mds, vandermonde_code
from .field_linalg import Field, field_make, mat_rank, mat_solve
from .repair import BandwidthReport, audit, check_repair_systems, repair
from .transform import TransformSpec, apply_transform, verify_transform_mds

__all__ = [
    "AccessOptimalCode", "BandwidthReport", "BlockParityCheckCode", "Field", "RepairPlan",
    "TransformSpec", "apply_transform", "audit", "build", "check_repair_systems",
    "decode_any_k", "encode", "field_make", "is_mds", "mat_rank", "mat_solve", "repair",
    "repair_plan", "vandermonde_code", "verify_transform_mds",
]
