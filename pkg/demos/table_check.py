"""Cross-check the bundled table of published controllers.

Each row is evaluated under both schedule orders and both Rz sign
conventions. Run with ``python3 demos/table_check.py``.
"""

from __future__ import annotations

from collisional_dicke.cli import bundled_table, load_table, row_status, verify_row


def main(max_n: int = 8):
    for row in load_table(bundled_table()):
        if row.n > max_n:
            continue
        results = verify_row(row)
        status, best = row_status(results, 0.9)
        best_run = max(results, key=lambda r: r.fidelity_table_round)
        print(f"D_{row.n}^{row.m} rounds={row.rounds:3d}  {status:4s} best {best:.4f}  "
              f"table angles {best_run.fidelity_table_round:.4f} ({best_run.variant}, sign {best_run.sign:+d})")


if __name__ == "__main__":
    main()
