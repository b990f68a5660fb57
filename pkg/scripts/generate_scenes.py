#!/usr/bin/env python3
"""
Scene Fixture Generator

Usage:
  generate_scenes.py [--scenes=<yaml>] [--outdir=<dir>] [--format=<fmt>] [--quiet]
  generate_scenes.py (-h | --help)
  generate_scenes.py --version

Options:
  --scenes=<yaml>    YAML file with scene sources [default: scenes.yaml]
  --outdir=<dir>     Target directory for PLY files [default: ./fixtures]
  --format=<fmt>     ply-ascii or ply-binary-le [default: ply-binary-le]
  --quiet            Show only error messages and summary
  -h --help          Show this help
  --version          Show version

Examples:
  generate_scenes.py
  generate_scenes.py --scenes=scenes.yaml --outdir=./fixtures --format=ply-ascii
"""

import os

from docopt import DocoptExit, docopt

from errors import ToolkitError
from run_utils import load_scene_sources, write_yaml
from scene_io import PlyFormat, save_pointcloud
from sources import create_source


def main(argv: list[str] | None = None) -> int:
    """Materialize every scene source as PLY files."""
    try:
        args = docopt(__doc__, argv=argv, version="Scene Fixture Generator 1.0.0")
    except DocoptExit as e:
        print(e)
        return 64

    scenes_file = args["--scenes"]
    out_dir = args["--outdir"]
    quiet = args["--quiet"]
    try:
        ply_format = PlyFormat(args["--format"])
    except ValueError:
        print(f"❌ Unknown format: {args['--format']}")
        return 64

    if not quiet:
        print("🚀 Scene Fixture Generator started")
        print(f"📁 Scenes file: {scenes_file}")
        print(f"📂 Target directory: {out_dir}")

    try:
        sources_list = load_scene_sources(scenes_file)
    except ToolkitError as e:
        print(f"❌ {e}")
        return e.exit_code
    if not sources_list:
        print("❌ No sources found in configuration")
        return 1

    os.makedirs(out_dir, exist_ok=True)
    successful = 0
    failed = 0
    inventory = {}
    for source_config in sources_list:
        try:
            source = create_source(source_config)
            clouds = source.load()
            for index, cloud in enumerate(clouds):
                path = os.path.join(out_dir, f"{source.name}_{index}.ply")
                save_pointcloud(cloud, path, ply_format)
            inventory[source.name] = {**source.get_info(), "files": len(clouds)}
            successful += 1
            if not quiet:
                print(f"✅ {source.name}: {len(clouds)} scene(s)")
        except ToolkitError as e:
            source_name = source_config.get("name", "unknown")
            print(f"❌ {source_name}: {e}")
            failed += 1

    write_yaml(os.path.join(out_dir, "inventory.yaml"), {"sources": inventory})

    total = successful + failed
    if not quiet:
        print("\n🎉 Processing complete!")
        print(f"   ✅ Successful: {successful}/{total}")
        if failed > 0:
            print(f"   ❌ Failed: {failed}/{total}")
        print(f"   📂 Scenes saved to: {os.path.abspath(out_dir)}")

    return 0 if failed == 0 else 1


if __name__ == "__main__":
    exit(main())
