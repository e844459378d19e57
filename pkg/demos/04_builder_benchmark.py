"""Cost of building the N^2 x N^2 evolution matrix, two ways.

The naive builder evaluates the full Liouvillian once per matrix entry, so
its cost grows like N^4 Liouvillian evaluations.  The column-fill builder
writes each column's handful of nonzeros directly.  Both are timed on the
same random closed systems and checked against each other.
"""

from liouville.cli import bench

print(f"{'N':>4} {'naive [ms]':>12} {'fast [ms]':>12} {'ratio':>8}")
for N, naive, fast, ratio in bench([2, 3, 5, 8, 10, 15], reps=3, seed=0):
    print(f"{N:>4} {naive * 1e3:>12.3f} {fast * 1e3:>12.4f} {ratio:>8.0f}")
