"""Rt0 against spacing for the reference codes, plus the cost ranking at 1000 km.

Writes two CSV files into the given directory (default: current directory).
"""

import argparse
from pathlib import Path

from qpc_repeater.cli import main

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("outdir", nargs="?", default=".")
parser.add_argument("--eta-missing", default="1")
args = parser.parse_args()

out = Path(args.outdir)
out.mkdir(parents=True, exist_ok=True)
main(["curve", "--paper-fig3", "--eta-missing", args.eta_missing, "--out", str(out / "fig3_curve.csv")])
main(["optimize", "--paper-fig3", "--top", "320", "--eta-missing", args.eta_missing, "--out", str(out / "fig3_ranking.csv")])
print(f"wrote {out / 'fig3_curve.csv'} and {out / 'fig3_ranking.csv'}")
