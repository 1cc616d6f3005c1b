#!/usr/bin/env python3
"""Generate a seed-0 demo dataset and serve the cleansing dashboard on it.

Usage: python scripts/serve_demo.py [--port 8080] [--seed 0]
"""

import argparse
import tempfile
from pathlib import Path

from elqadash.cli import main as cli_main
from elqadash.synth import GenConfig, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--port", type=int, default=8080)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    workdir = Path(tempfile.mkdtemp(prefix="elqadash-demo-"))
    generate(GenConfig(seed=args.seed, n_circuits=8, missing_rate=0.05, tp4_noise_rate=0.2), workdir)
    print(f"demo dataset in {workdir}; serving on http://localhost:{args.port}/")
    cli_main(["serve", "--data", str(workdir), "--port", str(args.port)])


if __name__ == "__main__":
    main()
