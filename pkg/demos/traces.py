"""Fidelity traces of the collision protocol and a check against dense matrices.

Run with ``python3 demos/traces.py``.
"""

from __future__ import annotations

import numpy as np

from collisional_dicke.oracle import full_space_oracle
from collisional_dicke.protocol import ProtocolSpec, run_trace, state_after
from collisional_dicke.subspace import embed_full


def main():
    # D_6^(3) reaches its best magnitude overlap after three rounds
    spec = ProtocolSpec(6, 3)
    trace = run_trace(spec, 0.243, 0.475, 10, "magnitude")
    for r, f in enumerate(trace.values, 1):
        print(f"round {r:2d}  magnitude fidelity {f:.4f}")
    print(f"best round {trace.best_round}")

    # the subspace engine against brute-force 2^n matrices
    fast = embed_full(state_after(spec, 0.243, 0.475, 5))
    dense = full_space_oracle(spec, 0.243, 0.475, 5)
    print(f"max amplitude difference vs dense oracle: {np.max(np.abs(fast - dense)):.2e}")


if __name__ == "__main__":
    main()
