"""Time progression of the 1+1D scenario: kick, feedback, travelling well.

Runs the bundled ``fig1_lorentzian`` configuration through the CLI and
writes one CSV per snapshot time.  The five snapshots show:

* t = 0 and t = 5 -- the sender's two counter-propagating positive pulses;
* t = 15.289 (just before the feedback kick) -- receiver inactive;
* t = 15.291 (just after) -- a negative region appears on the receiver's
  smearing support;
* t = 20 -- the receiver's left-mover has departed, leaving a deeper
  negative well riding on the sender's right-moving pulse.

Usage: python3 demo/fig1_time_progression.py [--outdir DIR]
"""

import argparse
import csv
from pathlib import Path

from qetlab import bundled_config_path, load_config
from qetlab.cli import main as cli_main


def run(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    config = bundled_config_path("fig1_lorentzian")
    out = outdir / "fig1.csv"
    rc = cli_main(["density1d", "--config", str(config), "--out", str(out)])
    if rc != 0:
        raise SystemExit(rc)

    times = load_config(config).times
    print(f"wrote {len(times)} snapshots to {outdir}/")
    for i, t in enumerate(times):
        path = outdir / f"fig1_t{i}.csv"
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        total = [float(r["total"]) for r in rows]
        x = [float(r["x"]) for r in rows]
        lo = min(range(len(total)), key=total.__getitem__)
        print(f"  t={t:7.3f}  {path.name}: min total {total[lo]:+.6e} "
              f"at x={x[lo]:+.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", type=Path, default=Path("demo/output"))
    run(ap.parse_args().outdir)
