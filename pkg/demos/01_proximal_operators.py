"""The three proximal operators that drive every solver update.

Each one minimizes `penalty(B) + 0.5*||B - M||_F^2` in closed form:

* elementwise soft threshold  -> l1 penalty (sparse entries)
* row-wise soft threshold     -> l2,1 penalty (sparse rows / groups)
* singular value threshold    -> trace norm penalty (low rank)
"""

import numpy as np

from gsrsep import matrix_norms, singular_value_threshold, soft_threshold, soft_threshold_rows

M = np.array([[3.0, -0.5, 0.2],
              [0.1, 0.1, -0.1],
              [2.0, -2.0, 2.0]])

print("input:\n", M)

print("\nelementwise soft threshold, tau=1 (entries shrink toward 0):")
print(soft_threshold(M, 1.0))

print("\nrow-wise soft threshold, tau=1 (weak rows die as a unit):")
print(soft_threshold_rows(M, 1.0))
print("row norms before:", np.round(np.linalg.norm(M, axis=1), 3))

print("\nsingular value threshold, tau=1 (rank drops):")
low_rank = singular_value_threshold(M, 1.0)
print(np.round(low_rank, 4))
print("singular values before:", np.round(np.linalg.svd(M, compute_uv=False), 3))
print("singular values after: ", np.round(np.linalg.svd(low_rank, compute_uv=False), 3))

norms = matrix_norms(M)
print("\nnorms of the input: l1=%.3f fro=%.3f row-l21=%.3f trace=%.3f"
      % (norms.l1, norms.fro, norms.l21_rows, norms.trace))

# For matrices with mutually orthogonal rows the trace norm and the row-l21
# norm coincide, which is what links the low-rank and group-sparse models.
q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 3)))
ortho = q.T * np.array([[2.0], [0.7], [1.3]])
n = matrix_norms(ortho)
print("\northogonal-row matrix: trace=%.12f row-l21=%.12f" % (n.trace, n.l21_rows))
