import numpy as np


def count_3cycles(P) -> tuple[np.ndarray, int]:
    """Per-strategy number of 3-cycles through it, and the total.

    With ``A[i, j] = 1`` iff ``i`` beats ``j``, ``diag(A^3)`` counts closed
    walks of length three, i.e. every directed triangle once per vertex.
    """
    A = (np.asarray(P) > 0).astype(np.float64)
    per = np.rint(np.einsum("ij,ji->i", A @ A, A)).astype(np.int64)
    return per, int(per.sum() // 3)


def count_3cycles_naive(P) -> int:
    P = np.asarray(P)
    n = len(P)
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if (P[i, j] > 0 and P[j, k] > 0 and P[k, i] > 0) or (
                        P[j, i] > 0 and P[k, j] > 0 and P[i, k] > 0):
                    total += 1
    return total
