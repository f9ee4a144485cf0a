#!/usr/bin/env python3
"""Reproduce the continuation-path figure set.

Writes, into --out-dir (default out/figures):

* trajectories_XX.svg   one panel per path vertex, showing how the three
                        Borel-plane singularities have moved so far;
* section_x2_*.svg/csv  sections of the Stokes set at the three fixed
                        values of x2, with turning-point markers and the
                        vertex markers of the continuation path;
* connect.json          the five crossings and connection matrices.
"""

import argparse
import sys

from pearcey_wkb.cli import main as cli_main
from pearcey_wkb.stokes import PAPER_POLYLINE


def run(out_dir: str) -> int:
    base = ["--out-dir", out_dir, "--no-timestamp"]
    rc = cli_main(base + ["track-u", "--path", "paper-polyline", "--panels"])
    if rc:
        return rc
    rc = cli_main(base + ["connect", "--path", "paper-polyline"])
    if rc:
        return rc
    sections = [
        ("0", "-0.45,0.45,-0.45,0.45", ["0.15,0"]),
        ("0.5,0.25", "-0.8,0.8,-0.8,0.8", ["0.15,0"]),
        ("0.5,0.5", "-0.8,0.8,-0.8,0.8", None),
    ]
    for x2, window, marks in sections:
        args = base + [
            "stokes-section",
            "--x2",
            x2,
            f"--window={window}",
            "--res",
            "128",
        ]
        if marks is None:
            # mark the x1 coordinates of the later path vertices
            marks = [f"{p[0].real},{p[0].imag}" for p in
                     [(complex(a), complex(b)) for a, b in PAPER_POLYLINE][4:]]
        for m in marks:
            args += ["--mark", m]
        rc = cli_main(args)
        if rc:
            return rc
        import os

        tag = x2.replace(",", "_").replace(".", "p")
        for ext in ("svg", "csv"):
            os.replace(
                os.path.join(out_dir, f"stokes_section.{ext}"),
                os.path.join(out_dir, f"section_x2_{tag}.{ext}"),
            )
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/figures")
    args = ap.parse_args()
    sys.exit(run(args.out_dir))
