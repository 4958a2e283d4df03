#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-Python fallback.

Runs a fixed workload in the current process, then (unless --no-compare)
re-runs it in a subprocess with SLOWFAST_NO_NUMBA=1 and reports the speedup
and the maximum result deviation between the two paths.

Usage: python benchmarks/bench_kernels.py [--no-compare] [--json]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload():
    """Fixed small workload touching every hot kernel; returns results+timings."""
    import numpy as np

    from fractalcodim import _kernels as K
    from fractalcodim.dimension import estimate_all, EstimatorMethod
    from fractalcodim.entryexit import SequenceConfig, generate_sequence
    from fractalcodim.models import NormalFormModel, TwoStrokeModel

    out = {"numba": K.NUMBA_ENABLED, "results": {}, "seconds": {}}

    nf = NormalFormModel(n=2, m=1, j=1, alpha=1.0, beta=1)
    nf.sdi(0.05, 0.05)  # warm any JIT before timing
    t0 = time.perf_counter()
    acc = 0.0
    for k in range(200):
        acc += nf.sdi(0.01 + 1e-4 * k, 0.02)
    out["seconds"]["nf_sdi_x200"] = time.perf_counter() - t0
    out["results"]["nf_sdi_sum"] = acc

    ts = TwoStrokeModel(alpha_p=1.0, delta_p=1.0, gamma_p=1.0)
    ts.omega_limit(0.05)
    t0 = time.perf_counter()
    acc = 0.0
    for k in range(200):
        acc += ts.omega_limit(0.01 + 1e-4 * k) + ts.alpha_limit(0.01 + 1e-4 * k)
    out["seconds"]["ts_crossings_x400"] = time.perf_counter() - t0
    out["results"]["ts_crossing_sum"] = acc

    t0 = time.perf_counter()
    seq = generate_sequence(nf, SequenceConfig(h0=0.1, max_iterations=60))
    out["seconds"]["nf_sequence_60"] = time.perf_counter() - t0
    out["results"]["nf_seq_last"] = float(seq.heights[-1])
    out["results"]["nf_seq_cahen"] = estimate_all(seq)[EstimatorMethod.CAHEN].final_value

    t0 = time.perf_counter()
    seq = generate_sequence(ts, SequenceConfig(h0=0.1, max_iterations=40))
    out["seconds"]["ts_sequence_40"] = time.perf_counter() - t0
    out["results"]["ts_seq_last"] = float(seq.heights[-1])
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--no-compare", action="store_true", help="only run the current mode")
    parser.add_argument("--json", action="store_true", help="emit raw JSON (used internally)")
    args = parser.parse_args()

    here = workload()
    if args.json:
        print(json.dumps(here))
        return 0

    mode = "numba" if here["numba"] else "pure-python"
    print(f"current mode: {mode}")
    for name, sec in here["seconds"].items():
        print(f"  {name:22s} {sec * 1e3:10.2f} ms")

    if args.no_compare:
        return 0

    env = dict(os.environ)
    if here["numba"]:
        env["SLOWFAST_NO_NUMBA"] = "1"
        other_mode = "pure-python"
    else:
        env.pop("SLOWFAST_NO_NUMBA", None)
        other_mode = "numba"
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--no-compare", "--json"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    other = json.loads(proc.stdout)
    print(f"comparison mode: {other_mode}")
    for name, sec in other["seconds"].items():
        ratio = sec / here["seconds"][name]
        print(f"  {name:22s} {sec * 1e3:10.2f} ms   ({ratio:8.1f}x current)")
    dev = max(
        abs(here["results"][k] - other["results"][k])
        / max(1e-300, abs(here["results"][k]))
        for k in here["results"]
    )
    print(f"max relative result deviation between modes: {dev:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
