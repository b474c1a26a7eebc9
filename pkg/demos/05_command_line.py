"""Driving the toolkit from the command line.

Runs each subcommand on the configurations in ``configs/`` and shows the
files written to a temporary directory. The same commands work from a
shell as ``adiabatic-topology <subcommand> ...`` once the package is
installed.
"""
import json
import pathlib
import subprocess
import sys
import tempfile

here = pathlib.Path(__file__).parent
out = pathlib.Path(tempfile.mkdtemp(prefix="adiabatic-topology-"))


def cli(*args):
    cmd = [sys.executable, "-m", "adiabatic_topology", *args]
    done = subprocess.run(cmd, capture_output=True, text=True)
    print("$ adiabatic-topology", " ".join(args), f"  [exit {done.returncode}]")
    if done.stdout:
        print("  " + done.stdout.strip())
    if done.stderr:
        print("  " + done.stderr.strip())
    return done.returncode


cli("classify", "--dp", "-0.5", "--ds", "-1.5")
cli("classify", "--dp", "0", "--ds", "1")

cli("surfaces", "--config", str(here / "configs" / "surfaces_123.toml"), "--out", str(out / "surfaces"))
meta = json.loads((out / "surfaces" / "surfaces.json").read_text())
print("  case", meta["case"], "with crossings at", meta["intersections"])

cli("propagate", "--config", str(here / "configs" / "scrap_b.toml"), "--out", str(out / "scrap"))
meta = json.loads((out / "scrap" / "propagation.json").read_text())
print("  final populations", [round(p, 6) for p in meta["final_populations"]],
      "margin", round(meta["adiabaticity_margin"], 1))

cli("propagate", "--preset", "landau-zener", "--out", str(out / "lz"))
cli("sweep", "--config", str(here / "configs" / "small_sweep.toml"), "--out", str(out / "sweep"))
cli("boundaries", "--omega-max", "1", "--out", str(out / "boundaries"))
cli("surfaces", "--config", str(here / "configs" / "surfaces_123.toml"), "--out", str(out / "bad"), "--tol", "x")

print("\nfiles written:")
for p in sorted(out.rglob("*")):
    if p.is_file():
        print("  ", p.relative_to(out), p.stat().st_size, "bytes")
