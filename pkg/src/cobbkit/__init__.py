"""Cobb angle measurement from vertebra instance masks and landmarks."""

from .annotations import (
    ExclusionList,
    LandmarkLayout,
    SpineAnnotation,
    apply_exclusions,
    parse_landmarks,
)
from .augment import AugmentationPlan, Transform, apply_transform, plan_augmentation
from .cobb import (
    CobbMeasurement,
    EndplateLine,
    angle_between,
    endplate_lines,
    measure_from_landmarks,
    measure_from_masks,
    select_cobb_angles,
)
from .coco import export_coco, import_coco
from .contours import extract_contour
from .evaluation import EvalReport, abs_diff, bucket_report, comparison_table, evaluate, smape
from .geometry import RotatedRect, convex_hull, min_area_rect
from .landmarks import VertebraQuad, quad_from_rect, sort_and_prune
from .masks import (
    CoeffMatrix,
    InstanceMask,
    LossTriple,
    PrototypeStack,
    SoftMask,
    activate_coefficients,
    assemble_masks,
    binarize,
    mask_bce_loss,
    total_loss,
)
from .splits import DatasetSplit, split_dataset
from .synthetic import SpineParams, analytic_cobb, generate_spine, rasterize

__version__ = "0.1.0"

__all__ = [
    "AugmentationPlan",
    "CobbMeasurement",
    "CoeffMatrix",
    "DatasetSplit",
    "EndplateLine",
    "EvalReport",
    "ExclusionList",
    "InstanceMask",
    "LandmarkLayout",
    "LossTriple",
    "PrototypeStack",
    "RotatedRect",
    "SoftMask",
    "SpineAnnotation",
    "SpineParams",
    "Transform",
    "VertebraQuad",
    "abs_diff",
    "activate_coefficients",
    "analytic_cobb",
    "angle_between",
    "apply_exclusions",
    "apply_transform",
    "assemble_masks",
    "binarize",
    "bucket_report",
    "comparison_table",
    "convex_hull",
    "endplate_lines",
    "evaluate",
    "export_coco",
    "extract_contour",
    "generate_spine",
    "import_coco",
    "mask_bce_loss",
    "measure_from_landmarks",
    "measure_from_masks",
    "min_area_rect",
    "parse_landmarks",
    "plan_augmentation",
    "quad_from_rect",
    "rasterize",
    "select_cobb_angles",
    "smape",
    "sort_and_prune",
    "split_dataset",
    "total_loss",
]
