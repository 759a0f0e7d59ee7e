"""Re-optimizing under gate dropout versus freezing the noiseless controller.

Run with ``python3 demos/noise_robustness.py`` (a few minutes on one core).
"""

from __future__ import annotations

from collisional_dicke.noise import NoiseConfig, run_noisy_trace, run_trajectories
from collisional_dicke.optimizer import OptimizerConfig, sweep_noise
from collisional_dicke.protocol import ProtocolSpec


def main():
    spec = ProtocolSpec(5, 2)
    config = OptimizerConfig(grid_spacing=0.4)
    entries = sweep_noise(spec, config, "pmiss", [0.0, 0.1, 0.2])
    for e in entries:
        print(f"p_miss={e.level:.2f}  reoptimized {e.solution.fidelity_phase_aligned:.4f} "
              f"(round {e.solution.best_round})  frozen {e.baseline.fidelity_phase_aligned:.4f}")

    # exact density matrix and sampled trajectories agree for the same controller
    ref = entries[0].solution
    rounds = ref.best_round
    exact = run_noisy_trace(spec, ref.gamma_in, ref.gamma_sh, rounds, NoiseConfig(p_miss=0.1),
                            rz_angles=ref.rz_angles).values[-1]
    traj = run_trajectories(spec, ref.gamma_in, ref.gamma_sh, rounds, 0.1, 2000, rz_angles=ref.rz_angles)
    print(f"p_miss=0.1 at round {rounds}: exact {exact:.4f}, "
          f"trajectories {traj.values[-1]:.4f} +- {traj.stderr[-1]:.4f}")


if __name__ == "__main__":
    main()
