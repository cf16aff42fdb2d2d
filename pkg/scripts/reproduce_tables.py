"""Print the BM success table and the p_mu table for the published code sets."""

import sys

from qpc_repeater.cli import main

if __name__ == "__main__":
    fmt = sys.argv[1] if len(sys.argv) > 1 else "csv"
    main(["bm-prob", "--paper-table-1", "--format", fmt])
    print()
    main(["pmu-table", "--paper-table-s1", "--format", fmt])
