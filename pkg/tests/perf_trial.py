"""Run one large trial in a fresh process and print timings and peak memory as JSON.

Usage: python perf_trial.py N D C SEED
"""

import json
import resource
import sys
import time


def main():
    n, D, c, seed = int(sys.argv[1]), int(sys.argv[2]), float(sys.argv[3]), int(sys.argv[4])
    from pspark import GeneratorSpec, TrialConfig, run_trial
    from pspark.harness import _prepared

    # compile the numba kernels on a small instance first
    run_trial(TrialConfig(GeneratorSpec("random-regular", {"n": 500, "D": 20}, seed=1), c=c))
    spec = GeneratorSpec("random-regular", {"n": n, "D": D}, seed=seed)
    t0 = time.perf_counter()
    _prepared(spec, None, False)
    gen = time.perf_counter() - t0
    cfg = TrialConfig(spec, c=c, eps=0.05, seed=seed)
    t0 = time.perf_counter()
    r = run_trial(cfg)
    trial = time.perf_counter() - t0
    peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    print(json.dumps({"generate_s": gen, "trial_s": trial, "success": r.success,
                      "phase": r.failure_phase, "ell": r.ell, "peak_mb": peak_kb / 1024}))


if __name__ == "__main__":
    main()
