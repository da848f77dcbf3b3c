"""Drive the hv3d command line end to end in a scratch directory.

Run: python demos/07_cli.py
"""
import subprocess
import sys
import tempfile
from pathlib import Path

from hv3d.synthetic import make_stereo_sequence
from hv3d.video_io import write_stereo_sequence


def hv3d(*args):
    cmd = [sys.executable, "-m", "hv3d", *map(str, args)]
    print("$ hv3d", " ".join(map(str, args)))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout + proc.stderr, end="")
    print(f"(exit {proc.returncode})\n")
    return proc


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    ref = write_stereo_sequence(tmp, make_stereo_sequence(320, 192, frames=2, seed=3), "ref")
    coded = tmp / "coded.json"
    hv3d("distort", "--manifest-ref", ref, "--kind", "dct_quantize", "--level", "2", "--out", coded)
    hv3d("score", "--manifest-ref", ref, "--manifest-dist", coded)
    hv3d("baselines", "--manifest-ref", ref, "--manifest-dist", coded)
    # configuration errors exit with 2
    (tmp / "zero.json").write_text('{"w1": 0, "w2": 0, "w3": 0, "w4": 0}')
    hv3d("score", "--manifest-ref", ref, "--manifest-dist", coded, "--weights", tmp / "zero.json")
