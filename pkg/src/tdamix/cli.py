"""Command-line entry point: ``tdamix [--config PATH] [--seed N] [--out DIR] [--scale ...]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import SCALES, load_config_file, validate_config
from .errors import ConfigError, PipelineError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tdamix",
        description="Run the landmark-sampling / persistence-landscape / mixture experiment.")
    p.add_argument("--config", metavar="PATH",
                   help="key: value document (or a previous manifest.json) overriding defaults")
    p.add_argument("--seed", type=int, metavar="N", help="master seed (overrides the config)")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    p.add_argument("--scale", choices=sorted(SCALES), default="paper",
                   help="default preset; 'desk' uses M=2000, s=200, runs=10")
    p.add_argument("--workers", type=int, default=1, metavar="N",
                   help="threads for the mixture stage (outputs do not depend on it)")
    p.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(asctime)s %(name)s %(message)s", stream=sys.stderr)
    try:
        raw = load_config_file(args.config) if args.config else {}
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.out is not None:
            raw["output_dir"] = args.out
        cfg = validate_config(raw, args.scale)
        if args.workers < 1:
            raise ConfigError([f"workers: must be at least 1, got {args.workers}"])
    except (ConfigError, OSError) as exc:
        print(f"tdamix: configuration error: {exc}", file=sys.stderr)
        return 2

    # imported late so that --help and config errors stay fast
    from .pipeline import run_pipeline

    try:
        manifest = run_pipeline(cfg, workers=args.workers)
    except PipelineError as exc:
        print(f"tdamix: {exc}", file=sys.stderr)
        return 1
    s = manifest["summary"]
    logging.getLogger("tdamix").info("done: k*=%d g*=%d mean IMSE %.6g -> %s",
                                     s["k_star"], s["g_star"], s["mean_imse"], cfg.output_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
