"""Independent oracles used across the test suite.

Everything here is deliberately written as plain double loops over the
generic correlation form, so the closed-form implementations in the
package are checked against a second, independent arithmetic path.
"""

import math

import numpy as np


def gamma_double_sum(a_mat, b_mat) -> float:
    num = 0.0
    sum_a = 0.0
    sum_b = 0.0
    n = len(a_mat)
    for i in range(n):
        for j in range(n):
            num += a_mat[i][j] * b_mat[i][j]
            sum_a += a_mat[i][j] ** 2
            sum_b += b_mat[i][j] ** 2
    return num / math.sqrt(sum_a * sum_b)


def rho_w_double_sum(a, b, w) -> float:
    n = len(a)
    a_mat = [[math.sqrt(w[i] * w[j]) * (a[j] - a[i]) for j in range(n)] for i in range(n)]
    b_mat = [[math.sqrt(w[i] * w[j]) * (b[j] - b[i]) for j in range(n)] for i in range(n)]
    return gamma_double_sum(a_mat, b_mat)


def _sign(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def tau_w_double_sum(a, b, w) -> float:
    n = len(a)
    a_mat = [[math.sqrt(w[i] * w[j]) * _sign(a[j] - a[i]) for j in range(n)] for i in range(n)]
    b_mat = [[math.sqrt(w[i] * w[j]) * _sign(b[j] - b[i]) for j in range(n)] for i in range(n)]
    return gamma_double_sum(a_mat, b_mat)


def ranks_by_counting(values, higher_is_better=True) -> np.ndarray:
    """Average-rank assignment by direct counting of better/equal values."""
    n = len(values)
    ranks = np.empty(n)
    for i in range(n):
        if higher_is_better:
            better = sum(1 for j in range(n) if values[j] > values[i])
        else:
            better = sum(1 for j in range(n) if values[j] < values[i])
        equal = sum(1 for j in range(n) if values[j] == values[i])
        ranks[i] = better + (equal + 1) / 2.0
    return ranks


def random_ranking(rng, n, with_ties=True) -> np.ndarray:
    """Random valid ranking; tie groups come from a small score alphabet."""
    if with_ties and rng.random() < 0.5:
        while True:
            scores = rng.integers(0, max(2, n // 2 + 1), size=n)
            if len(set(scores.tolist())) > 1:
                return ranks_by_counting(scores)
    return rng.permutation(n).astype(float) + 1.0


def random_weights(rng, n) -> np.ndarray:
    w = rng.uniform(0.05, 1.0, size=n)
    return w / w.sum()
