#!/usr/bin/env python3
"""
Multi-source Voxel Attention Toolkit

Usage:
  voxel_toolkit.py analyze sparsity --input=<path> [--voxel-size=<m>] [--window=<n>]
                   [--bins=<n>] [--average] [--output=<yaml>] [--quiet]
  voxel_toolkit.py analyze variance --input=<path> --signal=<name> [--voxel-size=<m>]
                   [--window=<n>] [--bins=<n>] [--average] [--output=<yaml>] [--quiet]
  voxel_toolkit.py init --config=<yaml> --seed=<n> --output=<npz> [--quiet]
  voxel_toolkit.py calibrate --checkpoint=<npz> --input=<path> --domain=<id>
                   --output=<npz> [--quiet]
  voxel_toolkit.py forward --checkpoint=<npz> --input=<ply> --domain=<id>
                   --output=<bin> [--quiet]
  voxel_toolkit.py gradcheck [--seed=<n>] [--trials=<n>] [--tolerance=<t>]
                   [--corrupt-gradient] [--output=<yaml>] [--quiet]
  voxel_toolkit.py params [--config=<yaml>] [--output=<yaml>] [--quiet]
  voxel_toolkit.py augment --input=<ply> --outdir=<dir> [--subsets=<codes>]
                   [--dataset=<name>] [--quiet]
  voxel_toolkit.py mix --ratios=<list> --batches=<n> --seed=<n> [--scenes=<dir>]
                   [--outdir=<dir>] [--crop-size=<m>] [--output=<yaml>]
                   [--quiet]
  voxel_toolkit.py divergence --err-s=<e> --err-t=<e> [--output=<yaml>] [--quiet]
  voxel_toolkit.py divergence --source=<dir> --target=<dir> --seed=<n> [--crops=<n>]
                   [--crop-size=<m>] [--voxel-size=<m>] [--window=<n>] [--bins=<n>]
                   [--features=<list>] [--output=<yaml>] [--quiet]
  voxel_toolkit.py (-h | --help)
  voxel_toolkit.py --version

Options:
  --input=<path>       PLY file or directory of PLY files
  --signal=<name>      Signal whose window variance is analyzed (position, color, normal)
  --voxel-size=<m>     Voxel edge in meters [default: 0.02]
  --window=<n>         Window edge in voxels [default: 5]
  --bins=<n>           Histogram bins over [0, 1] [default: 50]
  --average            Average per-scene histograms instead of pooling all windows
  --output=<path>      Output file
  --config=<yaml>      Model config file
  --seed=<n>           Seed for every random choice of the command [default: 0]
  --checkpoint=<npz>   Checkpoint written by 'init'
  --domain=<id>        Domain id of the input clouds
  --trials=<n>         Random windows per encoding mode [default: 50]
  --tolerance=<t>      Largest accepted relative gradient error [default: 1e-4]
  --corrupt-gradient   Perturb one analytic gradient (negative control)
  --outdir=<dir>       Directory for augmented variants or drawn batches
  --scenes=<dir>       One sub-directory of PLY scenes per mixed source
  --subsets=<codes>    Comma-separated signal subsets, e.g. p,pc,pn,pcn
  --dataset=<name>     Dataset name of the variants, the input file stem if omitted
  --ratios=<list>      Batch ratios per source, e.g. synthetic:2,scanned:1
  --batches=<n>        Number of batches to schedule
  --err-s=<e>          Classifier error on the source
  --err-t=<e>          Classifier error on the target
  --source=<dir>       Directory of source scenes
  --target=<dir>       Directory of target scenes
  --crops=<n>          Random crops per scene [default: 20]
  --crop-size=<m>      Crop cube edge in meters [default: 5.0]
  --features=<list>    Crop statistics among occupancy,position,color,normal [default: occupancy,position]
  --quiet              Show only error messages and summary
  -h --help            Show this help
  --version            Show version

Examples:
  voxel_toolkit.py analyze sparsity --input=scenes/ --voxel-size 0.02 --window 5
  voxel_toolkit.py init --config=configs/model.yaml --seed=0 --output=model.npz
  voxel_toolkit.py calibrate --checkpoint=model.npz --input=scenes/ --domain=0 --output=model.npz
  voxel_toolkit.py forward --checkpoint=model.npz --input=scene.ply --domain=0 --output=features.bin
  voxel_toolkit.py gradcheck --trials 50
  voxel_toolkit.py augment --input=scene.ply --outdir=variants --subsets p,pc,pn,pcn
"""

from collections import Counter
from pathlib import Path

from docopt import DocoptExit, docopt

from attention import run_gradcheck
from discrepancy import (
    OCCUPANCY,
    HistogramAccumulator,
    as_signal,
    average_histograms,
    baseline_domain_classifier,
    h_divergence,
    merge_accumulators,
    occupancy_accumulator,
    variance_accumulator,
)
from encoder import (
    build_model,
    calibrate,
    count_parameters,
    forward,
    load_checkpoint,
    save_checkpoint,
)
from errors import EmptyInputError, ToolkitError, UsageError
from run_utils import RunConfig, save_feature_dump, write_histogram, write_yaml
from scene_io import PointCloud, load_pointcloud, save_pointcloud
from sources import (
    PlySceneSource,
    augment_sources,
    draw_batch,
    mix_batches,
    realize_variant,
)

VERSION = "Voxel Toolkit 1.0.0"
USAGE_EXIT = 64


def _number(args: dict, flag: str, kind=float):
    try:
        return kind(args[flag])
    except (TypeError, ValueError) as e:
        raise UsageError(f"{flag} expects a {kind.__name__}, got {args[flag]!r}") from e


def _split(value: str) -> list[str]:
    return [token.strip() for token in value.split(",") if token.strip()]


def load_clouds(path: Path) -> list[PointCloud]:
    """One cloud per PLY file under a directory, or the single file given."""
    if path.is_dir():
        clouds = PlySceneSource({"name": path.name, "path": path}).load()
    else:
        clouds = [load_pointcloud(path)]
    if not clouds:
        raise EmptyInputError(f"No PLY files under {path}")
    return clouds


def cmd_analyze(args: dict, quiet: bool) -> int:
    run = RunConfig.build(inputs=[Path(args["--input"])])
    voxel_size = _number(args, "--voxel-size")
    window = _number(args, "--window", int)
    bins = _number(args, "--bins", int)
    statistic = OCCUPANCY if args["sparsity"] else as_signal(args["--signal"]).value

    if not quiet:
        print(f"🚀 Window {statistic} statistics")
        print(f"📂 Input: {run.inputs[0]}")
        print(f"🔧 Voxel size {voxel_size} m, window {window}, {bins} bins")

    clouds = load_clouds(run.inputs[0])
    accumulators: list[HistogramAccumulator] = []
    for cloud in clouds:
        if statistic == OCCUPANCY:
            accumulators.append(occupancy_accumulator(cloud, voxel_size, window, bins))
        else:
            accumulators.append(
                variance_accumulator(cloud, voxel_size, window, statistic, bins)
            )

    if args["--average"]:
        histogram = average_histograms(
            [a.normalized(statistic, voxel_size, window) for a in accumulators]
        )
    else:
        histogram = merge_accumulators(accumulators).normalized(
            statistic, voxel_size, window
        )
    output = write_histogram(args["--output"] or f"nch_{statistic}.yaml", histogram)

    peak = int(histogram.mass().argmax())
    windows = sum(a.total for a in accumulators)
    print(
        f"📊 {statistic}: {windows} windows in {len(clouds)} scene(s), peak bin "
        f"[{histogram.bin_edges[peak]:.3f}, {histogram.bin_edges[peak + 1]:.3f})"
    )
    if not quiet:
        print(f"📄 Histogram saved to: {output}")
    return 0


def cmd_init(args: dict, quiet: bool) -> int:
    run = RunConfig.build(
        config=Path(args["--config"]), seed=_number(args, "--seed", int)
    )
    config = run.model()
    if not quiet:
        print("🚀 Building model")
        print(f"📁 Config: {run.config}")
        print(f"🔧 {config.levels} levels, cRSE mode {config.crse_mode}")
    model = build_model(config, run.require_seed())
    path = save_checkpoint(model, args["--output"])
    print(f"✅ {model.block_count} blocks, checksum {model.checksum()[:16]}")
    if not quiet:
        print(f"📄 Checkpoint saved to: {path}")
    return 0


def cmd_calibrate(args: dict, quiet: bool) -> int:
    run = RunConfig.build(
        inputs=[Path(args["--checkpoint"]), Path(args["--input"])],
        domain=_number(args, "--domain", int),
        output=Path(args["--output"]),
    )
    checkpoint, cloud_path = run.inputs
    if not quiet:
        print("🚀 Calibrating embedding statistics")
        print(f"📂 Checkpoint: {checkpoint}")
        print(f"📂 Input: {cloud_path} (domain {run.domain})")
    clouds = load_clouds(cloud_path)
    model = calibrate(load_checkpoint(checkpoint), clouds, run.domain)
    path = save_checkpoint(model, run.output)
    voxels = int(model.embedding.domain(run.domain).calibration_voxels)
    print(f"✅ Domain {run.domain} calibrated over {voxels} voxels")
    if not quiet:
        print(f"📄 Checkpoint saved to: {path}")
    return 0


def cmd_forward(args: dict, quiet: bool) -> int:
    run = RunConfig.build(
        inputs=[Path(args["--checkpoint"]), Path(args["--input"])],
        domain=_number(args, "--domain", int),
        output=Path(args["--output"]),
    )
    checkpoint, cloud_path = run.inputs
    if not quiet:
        print("🚀 Encoder forward pass")
        print(f"📂 Checkpoint: {checkpoint}")
        print(f"📂 Input: {cloud_path} (domain {run.domain})")
    model = load_checkpoint(checkpoint)
    grids = forward(model, load_pointcloud(cloud_path), run.domain)
    save_feature_dump(grids, run.output)
    if not quiet:
        for grid in grids:
            channels = grid.features.shape[1]
            print(f"   level {grid.level}: {len(grid)} voxels x {channels}")
    print(f"✅ {len(grids)} levels written to {run.output}")
    return 0


def cmd_gradcheck(args: dict, quiet: bool) -> int:
    seed = _number(args, "--seed", int)
    trials = _number(args, "--trials", int)
    tolerance = _number(args, "--tolerance")
    if trials < 1 or tolerance <= 0:
        raise UsageError("--trials and --tolerance must be positive")
    if not quiet:
        print(f"🚀 Gradient check: {trials} windows per mode, seed {seed}")
        print("━" * 50)

    report = run_gradcheck(seed, trials, tolerance, corrupt=args["--corrupt-gradient"])
    for mode, result in report.per_mode.items():
        status = "✅" if result.max_error < tolerance else "❌"
        print(
            f"{status} {mode}: max error {result.max_error:.3e} over "
            f"{result.checked} entries"
        )
    if args["--output"]:
        write_yaml(
            args["--output"],
            {
                "seed": seed,
                "trials": trials,
                "tolerance": tolerance,
                "passed": report.passed,
                "modes": {
                    mode: {
                        "max_error": r.max_error,
                        "worst": r.worst_path,
                        "checked": r.checked,
                    }
                    for mode, r in report.per_mode.items()
                },
            },
        )

    worst = report.worst
    if not report.passed:
        print(f"❌ Gradient check failed: {worst.max_error:.3e} at {worst.worst_path}")
        return 1
    print(f"✅ Gradient check passed (max error {worst.max_error:.3e})")
    return 0


def cmd_params(args: dict, quiet: bool) -> int:
    run = RunConfig.build(config=Path(args["--config"]) if args["--config"] else None)
    config = run.model()
    breakdown = count_parameters(build_model(config, seed=0))
    if not quiet:
        print(f"📋 Parameters ({config.crse_mode}, {config.domain_count} domains)")
        print("━" * 50)
        for name, value in breakdown.as_dict().items():
            if name != "modulation_per_block":
                print(f"   {name}: {value}")
    per_block = sorted(set(breakdown.modulation_per_block))
    print(f"📊 Modulation entries per block: {', '.join(str(v) for v in per_block)}")
    if args["--output"]:
        write_yaml(
            args["--output"],
            {"crse_mode": str(config.crse_mode), **breakdown.as_dict()},
        )
    return 0


def cmd_augment(args: dict, quiet: bool) -> int:
    run = RunConfig.build(inputs=[Path(args["--input"])])
    cloud = load_pointcloud(run.inputs[0])
    dataset = args["--dataset"] or run.inputs[0].stem
    subsets = _split(args["--subsets"]) if args["--subsets"] else None
    descriptors = augment_sources(dataset, cloud.signal_mask, subsets)

    outdir = Path(args["--outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    for descriptor in descriptors:
        path = save_pointcloud(
            realize_variant(cloud, descriptor), outdir / f"{descriptor.name}.ply"
        )
        if not quiet:
            print(f"📄 {descriptor.code} -> domain {descriptor.domain_id}: {path}")
    write_yaml(
        outdir / "domains.yaml",
        {"domains": [{"name": d.name, "signals": d.code} for d in descriptors]},
    )
    print(f"✅ {len(descriptors)} variants of {dataset} written to {outdir}")
    return 0


def _parse_ratios(value: str) -> dict[str, int]:
    ratios = {}
    for token in _split(value):
        name, _, ratio = token.rpartition(":")
        if not name:
            raise UsageError(f"--ratios entry {token!r} is not name:ratio")
        try:
            ratios[name] = int(ratio)
        except ValueError as e:
            raise UsageError(f"--ratios entry {token!r} has no integer ratio") from e
    return ratios


def cmd_mix(args: dict, quiet: bool) -> int:
    slots = mix_batches(
        _parse_ratios(args["--ratios"]),
        _number(args, "--seed", int),
        _number(args, "--batches", int),
    )
    counts = Counter(slot.source for slot in slots)
    if not quiet:
        for index, slot in enumerate(slots[:5]):
            print(f"   batch {index}: {slot.source} (seed {slot.seed})")
    if bool(args["--scenes"]) != bool(args["--outdir"]):
        raise UsageError("--scenes and --outdir go together")
    if args["--scenes"]:
        names = sorted(counts)
        run = RunConfig.build(inputs=[Path(args["--scenes"]) / n for n in names])
        clouds = {name: load_clouds(path) for name, path in zip(names, run.inputs)}
        size = _number(args, "--crop-size")
        outdir = Path(args["--outdir"])
        outdir.mkdir(parents=True, exist_ok=True)
        for index, slot in enumerate(slots):
            save_pointcloud(
                draw_batch(clouds[slot.source], slot, size),
                outdir / f"batch_{index:04d}_{slot.source}.ply",
            )
        if not quiet:
            print(f"📄 {len(slots)} batches written to {outdir}")

    summary = ", ".join(f"{name}: {count}" for name, count in sorted(counts.items()))
    print(f"📊 {summary}")
    if args["--output"]:
        write_yaml(
            args["--output"],
            {"batches": [{"source": s.source, "seed": s.seed} for s in slots]},
        )
    return 0


def cmd_divergence(args: dict, quiet: bool) -> int:
    if args["--err-s"] is not None:
        report = h_divergence(_number(args, "--err-s"), _number(args, "--err-t"))
    else:
        run = RunConfig.build(
            inputs=[Path(args["--source"]), Path(args["--target"])],
            seed=_number(args, "--seed", int),
        )
        if not quiet:
            print("🚀 Baseline domain classifier")
            print(f"📂 Source: {run.inputs[0]}")
            print(f"📂 Target: {run.inputs[1]}")
        _, report = baseline_domain_classifier(
            load_clouds(run.inputs[0]),
            load_clouds(run.inputs[1]),
            run.require_seed(),
            crops_per_scene=_number(args, "--crops", int),
            crop_size=_number(args, "--crop-size"),
            voxel_size=_number(args, "--voxel-size"),
            window_size=_number(args, "--window", int),
            bins=_number(args, "--bins", int),
            features=_split(args["--features"]),
        )
        if not quiet:
            print(
                f"   err_source={report.err_source:.3f} "
                f"err_target={report.err_target:.3f}"
            )

    if report.worse_than_chance:
        print("⚠️  Classifier is worse than chance; d_H is negative")
    print(f"{report.d_h:.3f}")
    if args["--output"]:
        write_yaml(args["--output"], report.as_dict())
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "init": cmd_init,
    "calibrate": cmd_calibrate,
    "forward": cmd_forward,
    "gradcheck": cmd_gradcheck,
    "params": cmd_params,
    "augment": cmd_augment,
    "mix": cmd_mix,
    "divergence": cmd_divergence,
}


def main(argv: list[str] | None = None) -> int:
    """Main function of the toolkit; returns the process exit code."""
    try:
        args = docopt(__doc__, argv=argv, version=VERSION)
    except DocoptExit as e:
        print(e)
        return USAGE_EXIT

    quiet = args["--quiet"]
    command = next(name for name in COMMANDS if args[name])
    try:
        return COMMANDS[command](args, quiet)
    except ToolkitError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    exit(main())
