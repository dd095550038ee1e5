#!/usr/bin/env python3
"""Build and cache Hermite reference samples ahead of series and rate runs."""

import argparse
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dotenv import load_dotenv
load_dotenv()

import structlog

from src.cli import configure_logging
from src.config import load_config
from src.errors import FbmVarError
from src.limitlaws import reference_sample, sample_moments

logger = structlog.get_logger(__name__)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--q", type=int, nargs="+", default=[2])
    parser.add_argument("--hurst", type=float, nargs="+", default=[0.9])
    parser.add_argument("--workers", type=int)
    parser.add_argument("--cache-dir")
    args = parser.parse_args()

    configure_logging("info")
    config = load_config()
    if args.workers:
        config.sampling.workers = args.workers
    if args.cache_dir:
        config.reference.cache_dir = args.cache_dir

    failures = 0
    for q in args.q:
        for hurst in args.hurst:
            try:
                sample = reference_sample(q, hurst, config)
            except FbmVarError as e:
                print(f"❌ q={q} H={hurst}: {e.message}")
                failures += 1
                continue
            moments = sample_moments(sample.values)
            print(
                f"✅ q={q} H={hurst}: m={sample.m} "
                f"variance={moments['variance']:.4f} skewness={moments['skewness']:.4f}"
            )

    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
