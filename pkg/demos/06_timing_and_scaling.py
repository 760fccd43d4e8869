"""Per-iteration cost: group sparsity vs the SVD-bound models.

Replacing the trace norm with row sparsity removes every SVD from the
iteration, so cost grows like k*n*(k+m): linear in the frame count.  The
harness below times fixed-iteration runs single-threaded.

Shapes here are kept small so the demo finishes in seconds; the acceptance
suite runs the full 706x100xn shapes.
"""

from gsrsep import run_scaling

print("per-iteration time vs frame count (gsr, m=200, k=40):")
rows = run_scaling("gsr", m=200, k=40, n_values=[250, 500, 1000], seed=7, iters=30)
base = rows[0].seconds_per_iter
for row in rows:
    print(f"  n={row.n:5d}: {row.seconds_per_iter * 1e3:7.2f} ms/iter "
          f"(x{row.seconds_per_iter / base:.2f})")
print("doubling n should roughly double the time.\n")

print("method comparison at n=1000 (same shape, 30 fixed iterations):")
for method in ("gsr", "gsri", "lrr", "rpca"):
    row = run_scaling(method, m=200, k=40, n_values=[1000], seed=7, iters=30)[0]
    print(f"  {method:5s}: {row.seconds_per_iter * 1e3:7.2f} ms/iter")
print("rpca pays for full-size SVDs; lrr only decomposes the small "
      "activation matrix; gsr/gsri avoid the SVD entirely.")
