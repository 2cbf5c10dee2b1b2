"""Command-line entry point wiring the measurement workflow together.

Subcommands: convert raw landmarks to canonical/COCO JSON, measure Cobb
angles from masks or landmarks, assemble masks from prototype tensors,
evaluate predictions against ground truth, render overlays, plan and
apply augmentation, and produce deterministic dataset splits. Batch
failures are collected rather than fail-fast; the exit code is 0 only
when every item succeeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import augment as aug
from . import coco as coco_mod
from . import png_io, tensor_io
from .annotations import ExclusionList, LandmarkLayout, SpineAnnotation, parse_landmarks
from .cobb import measure_from_landmarks, measure_from_masks, measurement_record
from .evaluation import evaluate, report_text
from .landmarks import SPINE_VERTEBRA_COUNT
from .masks import InstanceMask, activate_coefficients, assemble_masks, binarize
from .splits import exclude_from_test, split_dataset

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")


def parse_layout_descriptor(descriptor: str) -> LandmarkLayout:
    """Parse "order=TL,TR,BL,BR;major=vertebra;coords=absolute;count=17"."""
    kwargs: dict = {}
    for part in descriptor.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, value = part.partition("=")
        key, value = key.strip(), value.strip()
        if key == "order":
            kwargs["corner_order"] = tuple(v.strip().upper() for v in value.split(","))
        elif key == "major":
            if value not in ("vertebra", "corner"):
                raise ValueError(f"layout major must be vertebra or corner, got {value!r}")
            kwargs["vertebra_major"] = value == "vertebra"
        elif key == "coords":
            if value not in ("absolute", "normalized"):
                raise ValueError(f"layout coords must be absolute or normalized, got {value!r}")
            kwargs["normalized"] = value == "normalized"
        elif key == "count":
            kwargs["vertebra_count"] = int(value)
        else:
            raise ValueError(f"unknown layout key {key!r}")
    return LandmarkLayout(**kwargs)


def _load_exclusions(args) -> ExclusionList:
    if getattr(args, "exclusions", None):
        return ExclusionList.from_file(args.exclusions)
    return ExclusionList.default()


def _find_image(images_dir: Path, stem: str) -> Path | None:
    for ext in IMAGE_EXTENSIONS:
        candidate = images_dir / f"{stem}{ext}"
        if candidate.exists():
            return candidate
    return None


def _load_annotation_file(path: Path) -> list[SpineAnnotation]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(doc, list):
        return [SpineAnnotation.from_json_dict(d) for d in doc]
    return [SpineAnnotation.from_json_dict(doc)]


def _gather_annotations(path: Path) -> list[SpineAnnotation]:
    if path.is_dir():
        out = []
        for f in sorted(path.glob("*.json")):
            out.extend(_load_annotation_file(f))
        return out
    return _load_annotation_file(path)


def cmd_convert(args) -> int:
    layout = parse_layout_descriptor(args.layout) if args.layout else LandmarkLayout()
    inputs: list[Path] = []
    for raw in args.inputs:
        p = Path(raw)
        if p.is_dir():
            inputs.extend(sorted(p.glob("*.txt")))
        else:
            inputs.append(p)
    if not inputs:
        print("no landmark files found", file=sys.stderr)
        return 1

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    images_dir = Path(args.images) if args.images else None
    excl = _load_exclusions(args) if args.apply_exclusions else None

    annotations: list[SpineAnnotation] = []
    failures: list[str] = []
    flagged = 0
    for path in inputs:
        image_id = path.stem
        width, height = args.width, args.height
        if images_dir is not None:
            img_path = _find_image(images_dir, path.stem)
            if img_path is not None:
                image_id = img_path.name
                h, w = png_io.read_grayscale(img_path).shape
                width, height = w, h
        if width is None or height is None:
            failures.append(f"{path}: no image dimensions (use --images or --width/--height)")
            continue
        try:
            ann = parse_landmarks(
                path.read_text(encoding="utf-8"),
                image_id=image_id,
                width=width,
                height=height,
                layout=layout,
            )
        except ValueError as e:
            failures.append(f"{path}: {e}")
            continue
        for note in ann.warnings:
            print(f"warning: {image_id}: {note}", file=sys.stderr)
        if excl is not None and image_id in excl:
            flagged += 1
            print(f"flagged (excluded): {image_id}", file=sys.stderr)
        annotations.append(ann)
        (out_dir / f"{path.stem}.json").write_text(
            json.dumps(ann.to_json_dict(), indent=2), encoding="utf-8"
        )

    if args.coco and annotations:
        Path(args.coco).write_text(
            json.dumps(coco_mod.export_coco(annotations), indent=2), encoding="utf-8"
        )
    print(f"converted {len(annotations)} of {len(inputs)} files; {flagged} flagged")
    for msg in failures:
        print(f"failed: {msg}", file=sys.stderr)
    return 1 if failures else 0


def _masks_for_dir(mask_dir: Path) -> list[InstanceMask]:
    scores = {}
    scores_file = mask_dir / "scores.json"
    if scores_file.exists():
        scores = json.loads(scores_file.read_text(encoding="utf-8"))
    masks = []
    for f in sorted(mask_dir.glob("*.png")):
        masks.append(png_io.read_mask(f, score=float(scores.get(f.name, 1.0))))
    return masks


def cmd_measure(args) -> int:
    records = []
    failures: list[str] = []

    if args.masks:
        root = Path(args.masks)
        image_dirs = sorted(d for d in root.iterdir() if d.is_dir()) if root.is_dir() else []
        if not image_dirs and root.is_dir() and list(root.glob("*.png")):
            image_dirs = [root]
        if not image_dirs:
            print(f"no mask directories under {root}", file=sys.stderr)
            return 1
        for d in image_dirs:
            try:
                masks = _masks_for_dir(d)
                m = measure_from_masks(masks, target=args.target_count, line_mode=args.line_mode)
                records.append(measurement_record(d.name, m))
            except (ValueError, OSError) as e:
                failures.append(f"{d.name}: {e}")
    else:
        annotations = _gather_annotations(Path(args.annotations))
        if not annotations:
            print("no annotations found", file=sys.stderr)
            return 1
        for ann in annotations:
            try:
                m = measure_from_landmarks(ann, line_mode=args.line_mode)
                rec = measurement_record(ann.image_id, m)
                if ann.gt_angles is not None:
                    pt, mt, tl = ann.gt_angles
                    rec["gtAngles"] = {"pt": pt, "mt": mt, "tl": tl}
                records.append(rec)
            except ValueError as e:
                failures.append(f"{ann.image_id}: {e}")

    Path(args.out).write_text(json.dumps(records, indent=2), encoding="utf-8")
    print(f"measured {len(records)} images -> {args.out}")
    for msg in failures:
        print(f"failed: {msg}", file=sys.stderr)
    return 1 if failures else 0


def cmd_assemble(args) -> int:
    try:
        p = tensor_io.read_prototypes(args.prototypes)
        c = tensor_io.read_coefficients(args.coefficients)
        if args.activate:
            c = activate_coefficients(c)
        soft = assemble_masks(p, c)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(soft):
        mask = binarize(s, threshold=args.threshold, label=f"instance-{i:02d}")
        png_io.write_mask(mask, out_dir / f"mask-{i:02d}.png")
    print(f"assembled {len(soft)} masks -> {out_dir}")
    return 0


def _angles_by_id(path: Path) -> dict[str, tuple[float, float, float]]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    entries = doc if isinstance(doc, list) else [doc]
    out = {}
    for e in entries:
        angles = e.get("angles") or e.get("gtAngles")
        if angles is None:
            raise ValueError(f"{path}: record {e.get('imageId')!r} carries no angles")
        out[str(e["imageId"])] = (float(angles["pt"]), float(angles["mt"]), float(angles["tl"]))
    return out


def cmd_evaluate(args) -> int:
    try:
        preds = _angles_by_id(Path(args.pred))
        gts = _angles_by_id(Path(args.gt))
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    missing = sorted(set(preds) ^ set(gts))
    if missing:
        print("error: ids present on only one side:", file=sys.stderr)
        for m in missing:
            print(f"  {m}", file=sys.stderr)
        return 1
    ids = sorted(preds)
    report = evaluate([preds[i] for i in ids], [gts[i] for i in ids])
    if args.format == "table":
        print(report_text(report))
    else:
        print(json.dumps(report.to_json_dict(), indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_json_dict(), indent=2), encoding="utf-8")
    return 0


_PAIR_COLORS = {"mt": (220, 40, 40), "pt": (40, 90, 220), "tl": (40, 170, 60)}
_QUAD_COLOR = (240, 200, 40)


def cmd_render(args) -> int:
    from PIL import Image, ImageDraw

    image = png_io.read_grayscale(args.image)
    try:
        annotations = _gather_annotations(Path(args.annotation))
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if len(annotations) != 1:
        print(f"error: expected exactly 1 annotation, got {len(annotations)}", file=sys.stderr)
        return 1
    ann = annotations[0]
    h, w = image.shape
    if (ann.width, ann.height) != (w, h):
        print(
            f"error: annotation is {ann.width}x{ann.height} but image is {w}x{h}",
            file=sys.stderr,
        )
        return 1

    canvas = Image.fromarray(image).convert("RGB")
    draw = ImageDraw.Draw(canvas)
    for q in ann.quads:
        tl, tr, bl, br = q.corners
        draw.polygon([tl, tr, br, bl], outline=_QUAD_COLOR)

    caption = None
    if args.measure and ann.quads:
        from .cobb import build_lines, measure_quads

        try:
            m = measure_quads(ann.quads, line_mode=args.line_mode)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        lines = build_lines(ann.quads, line_mode=args.line_mode)
        for name, pair in (("mt", m.mt_pair), ("pt", m.pt_pair), ("tl", m.tl_pair)):
            if pair is None:
                continue
            for idx in pair:
                line = lines[idx]
                draw.line([line.p1, line.p2], fill=_PAIR_COLORS[name], width=2)
        caption = f"({m.pt:.1f}, {m.mt:.1f}, {m.tl:.1f})"
    if caption:
        draw.text((4, 4), caption, fill=(255, 255, 255))

    canvas.save(args.out, format="PNG")
    print(f"rendered overlay -> {args.out}")
    return 0


def cmd_split(args) -> int:
    if args.ids:
        ids = [
            line.strip()
            for line in Path(args.ids).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
    else:
        ids = [a.image_id for a in _gather_annotations(Path(args.annotations))]
    try:
        if args.exclude_all_splits:
            excl = _load_exclusions(args)
            ids = [i for i in ids if i not in excl]
        split = split_dataset(ids, seed=args.seed)
        removed: list[str] = []
        if args.apply_exclusions and not args.exclude_all_splits:
            split, removed = exclude_from_test(split, _load_exclusions(args))
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    Path(args.out).write_text(json.dumps(split.to_json_dict(), indent=2), encoding="utf-8")
    print(
        f"split {len(ids)} ids -> train {len(split.train)}, "
        f"validation {len(split.validation)}, test {len(split.test)}"
        + (f" ({len(removed)} excluded from test)" if removed else "")
    )
    return 0


def cmd_augment(args) -> int:
    annotations = _gather_annotations(Path(args.annotations))
    if not annotations:
        print("no annotations found", file=sys.stderr)
        return 1
    by_id = {a.image_id: a for a in annotations}
    plan = aug.plan_augmentation(sorted(by_id), master_seed=args.seed)
    if args.plan_out:
        Path(args.plan_out).write_text(json.dumps(plan.to_json_dict(), indent=2), encoding="utf-8")

    images_dir = Path(args.images)
    out_images = Path(args.out_images)
    out_annotations = Path(args.out_annotations)
    out_images.mkdir(parents=True, exist_ok=True)
    out_annotations.mkdir(parents=True, exist_ok=True)

    failures: list[str] = []
    applied = 0
    for image_id in sorted(by_id):
        t = plan.transform_for(image_id)
        if t is None:
            continue
        img_path = images_dir / image_id
        if not img_path.exists():
            img_path = _find_image(images_dir, Path(image_id).stem)
        if img_path is None or not img_path.exists():
            failures.append(f"{image_id}: image file not found under {images_dir}")
            continue
        try:
            image = png_io.read_grayscale(img_path)
            ann = by_id[image_id]
            out_img, out_ann = aug.apply_transform(image, ann, t)
        except ValueError as e:
            failures.append(f"{image_id}: {e}")
            continue
        stem = Path(image_id).stem
        suffix = t.kind if t.kind != "rotate" else f"rotate{t.angle:+.2f}"
        out_ann.image_id = f"{stem}_aug-{suffix}.png"
        png_io.write_grayscale(out_img, out_images / out_ann.image_id)
        (out_annotations / f"{stem}_aug-{suffix}.json").write_text(
            json.dumps(out_ann.to_json_dict(), indent=2), encoding="utf-8"
        )
        applied += 1

    print(
        f"augmented {applied} images "
        f"(rotate {len(plan.rotate)}, hflip {len(plan.hflip)}, "
        f"vflip {len(plan.vflip)}, histeq {len(plan.histeq)})"
    )
    for msg in failures:
        print(f"failed: {msg}", file=sys.stderr)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cobbkit",
        description="Cobb angle measurement from vertebra instance masks and landmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="raw landmark files -> canonical JSON (+ COCO)")
    p.add_argument("inputs", nargs="+", help="landmark .txt files or directories")
    p.add_argument("--out", required=True, help="output directory for canonical JSON")
    p.add_argument("--coco", help="also write a combined COCO JSON file here")
    p.add_argument("--images", help="directory with matching images (dimensions, ids)")
    p.add_argument("--width", type=int, help="image width when --images is not given")
    p.add_argument("--height", type=int, help="image height when --images is not given")
    p.add_argument("--layout", help="layout descriptor, e.g. 'order=TL,TR,BL,BR;coords=normalized'")
    p.add_argument("--apply-exclusions", action="store_true", help="flag excluded image ids")
    p.add_argument("--exclusions", help="exclusion list file (default: built-in list)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("measure", help="Cobb triples from masks or landmark annotations")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--masks", help="directory of per-image mask directories")
    src.add_argument("--annotations", help="canonical annotation JSON file or directory")
    p.add_argument("--out", required=True, help="output measurement JSON")
    p.add_argument("--line-mode", choices=("both", "lower"), default="both")
    p.add_argument("--target-count", type=int, default=SPINE_VERTEBRA_COUNT)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("assemble", help="prototype + coefficient tensors -> mask PNGs")
    p.add_argument("--prototypes", required=True, help="tensor-text prototype stack")
    p.add_argument("--coefficients", required=True, help="tensor-text coefficient matrix")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--activate", action="store_true", help="pass coefficients through tanh first")
    p.add_argument("--out", required=True, help="output directory for mask PNGs")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("evaluate", help="compare prediction and ground-truth angles")
    p.add_argument("--pred", required=True, help="measurement/annotation JSON with angles")
    p.add_argument("--gt", required=True, help="measurement/annotation JSON with angles")
    p.add_argument("--out", help="also write the report JSON here")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("render", help="draw quads, endplate lines, and angles on an image")
    p.add_argument("--image", required=True, help="grayscale radiograph PNG")
    p.add_argument("--annotation", required=True, help="canonical annotation JSON")
    p.add_argument("--out", required=True, help="output overlay PNG")
    p.add_argument("--measure", action="store_true", help="draw measured angle pairs and caption")
    p.add_argument("--line-mode", choices=("both", "lower"), default="both")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("split", help="deterministic 70/15/15 split of image ids")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ids", help="file with one image id per line")
    src.add_argument("--annotations", help="canonical annotation JSON file or directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output split JSON")
    p.add_argument("--apply-exclusions", action="store_true", help="drop excluded ids from test")
    p.add_argument("--exclude-all-splits", action="store_true", help="drop excluded ids everywhere")
    p.add_argument("--exclusions", help="exclusion list file (default: built-in list)")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("augment", help="apply the seeded 10%% augmentation plan")
    p.add_argument("--images", required=True, help="directory of grayscale images")
    p.add_argument("--annotations", required=True, help="canonical annotation JSON file or directory")
    p.add_argument("--out-images", required=True)
    p.add_argument("--out-annotations", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plan-out", help="also write the augmentation plan JSON here")
    p.set_defaults(func=cmd_augment)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
