"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py --steps 50000 --repeat 3
"""

import argparse
import time

import numpy as np

from infosig import _core, io_cli, simlab


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    agent = simlab.train_agent(0, 50_000)
    log = simlab.run_deployment(1, agent, max(args.steps, 2000))
    counts = np.sort(np.random.default_rng(0).integers(1, 50, 5000)).astype(np.int64)
    cases = {
        "train_loop": lambda: simlab.run_training(0, args.steps, preset="learning"),
        "deploy_loop": lambda: simlab.run_deployment(1, agent, args.steps, simlab.deployment_noise("obs", 0.1)),
        "entropy x1000": lambda: [_core.kernels().entropy_bits(counts, int(counts.sum())) for _ in range(1000)],
        "sliding analyze": lambda: io_cli.analyze(log, io_cli.RunConfig(), "sliding"),
    }
    backends = _core.available_backends()
    results = {}
    for name in backends:
        _core.use_backend(name)
        results[name] = {case: _best(fn, args.repeat) for case, fn in cases.items()}
    print(f"{'case':<18}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for case in cases:
        row = f"{case:<18}" + "".join(f"{results[b][case]:>11.3f}s" for b in backends)
        if len(backends) > 1:
            row += f"{results['python'][case] / results['cython'][case]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
