"""Compare the compiled and NumPy payoff kernels on realistic payoff tensors.

    python benchmarks/bench_kernels.py [--repeat 5] [--sizes 10 25 50]

Tensors come from generated scenarios with the given device counts, so the
strategy count and sparsity match what the matcher actually sees.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from trm_hypergraph import kernels
from trm_hypergraph.hypergraph import build_resource_hypergraph, build_task_hypergraph
from trm_hypergraph.matching import DynamicsConfig, build_payoff, generate_candidates, initial_state
from trm_hypergraph.scenario import ScenarioConfig, generate_scenario


def tensor_for(device_count: int, seed: int):
    cfg = ScenarioConfig(device_count=device_count)
    sc = generate_scenario(cfg, seed)
    rh = build_resource_hypergraph(sc.devices, sc.channel)
    th = build_task_hypergraph(sc.task, sc.channel)
    strategies = generate_candidates(th, rh, cfg.weights, cfg.alpha1)
    return build_payoff(strategies), initial_state(strategies)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = {"python": kernels.get_backend("python")}
    try:
        backends["cython"] = kernels.get_backend("cython")
    except ImportError:
        print("compiled kernel not available; timing the NumPy fallback only")
    cfg = DynamicsConfig()

    print(f"{'J':>4} {'N':>5} {'triples':>8} {'backend':>7} {'payoff us':>10} {'run ms':>9} {'iters':>6}")
    for j in args.sizes:
        pt, q0 = tensor_for(j, args.seed)
        cols = pt.columns
        ref = None
        for name, mod in backends.items():
            t_pay = best_of(lambda: mod.expected_payoffs(*cols, q0), args.repeat * 20) * 1e6
            out = mod.run(*cols, q0, cfg.max_iters, cfg.epsilon)
            t_run = best_of(lambda: mod.run(*cols, q0, cfg.max_iters, cfg.epsilon), args.repeat) * 1e3
            if ref is None:
                ref = out[0]
            elif not np.allclose(ref, out[0], atol=1e-10):
                print(f"warning: backends disagree at J={j}")
            print(f"{j:>4} {pt.n:>5} {len(pt.values):>8} {name:>7} {t_pay:>10.1f} {t_run:>9.2f} {out[1]:>6}")


if __name__ == "__main__":
    main()
