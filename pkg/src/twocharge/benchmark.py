"""Backend benchmark: compiled stepping core vs pure-Python twin.

Runs the same chain on both cores, checks that the accumulators agree
exactly (they must: same RNG stream, same arithmetic), and reports the
steps/second of each.  Usage:

    python -m twocharge.benchmark [--n 8] [--fugacity 2] [--steps 200000]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import _chain_py
from .sampler import Accumulators, ChainConfig, initial_configuration

try:
    from . import _chain
except ImportError:
    _chain = None


def _run(core, config: ChainConfig):
    acc = Accumulators.empty(config)
    init = initial_configuration(config)
    t0 = time.perf_counter()
    out = core.run_chain(
        config.total_charge,
        config.fugacity,
        config.rotate_prob,
        config.split_prob,
        config.merge_prob,
        config.sigma_rotate,
        config.sigma_split,
        config.steps,
        config.burn_in,
        config.thin,
        config.check_every,
        config.seed,
        list(init.charge1),
        list(init.charge2),
        acc.count_hist,
        acc.density1,
        acc.density2,
        acc.pair11,
        acc.pair22,
        acc.pair12,
        acc.spacing1,
        acc.spacing2,
        acc.spacing_all,
        acc.spacing_overflow,
        acc.degenerate,
        acc.proposed,
        acc.accepted,
        config.total_charge / (2.0 * np.pi),
        config.spacing_max,
    )
    elapsed = time.perf_counter() - t0
    return acc, out, elapsed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=8, help="total charge")
    parser.add_argument("--fugacity", type=float, default=2.0)
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)

    config = ChainConfig(
        total_charge=args.n,
        fugacity=args.fugacity,
        steps=args.steps,
        burn_in=min(10_000, args.steps // 10),
        seed=args.seed,
    )

    acc_py, out_py, t_py = _run(_chain_py, config)
    print(f"python core: {args.steps / t_py:,.0f} steps/s ({t_py:.2f} s)")

    if _chain is None:
        print("compiled core not built; nothing to compare", file=sys.stderr)
        return 0

    acc_cy, out_cy, t_cy = _run(_chain, config)
    print(f"cython core: {args.steps / t_cy:,.0f} steps/s ({t_cy:.2f} s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    same = (
        np.array_equal(acc_py.count_hist, acc_cy.count_hist)
        and np.array_equal(acc_py.density1, acc_cy.density1)
        and np.array_equal(acc_py.pair11, acc_cy.pair11)
        and np.array_equal(acc_py.accepted, acc_cy.accepted)
        and out_py[0] == out_cy[0]
        and out_py[1] == out_cy[1]
    )
    print(f"trajectory match: {'yes' if same else 'NO'}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
