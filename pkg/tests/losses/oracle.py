"""逐项直写的 numpy 参考实现，只用于和被测代码对拍。"""

import numpy as np


def softmax(x: np.ndarray, axis: int) -> np.ndarray:
    e = np.exp(x - x.max(axis=axis, keepdims=True))
    return e / e.sum(axis=axis, keepdims=True)


def directed_uniform_prior(sp, st, tau_row, tau_col):
    n, c = sp.shape
    p = softmax(sp / tau_row, axis=1)
    col = p.sum(axis=0, keepdims=True)
    q = softmax(st / tau_col, axis=0)
    w = q / q.sum(axis=1, keepdims=True)
    arg = np.maximum((n / c) * p / col, 1e-12)
    return float(-(w * np.log(arg)).sum() / n)


def incorrect_entropy(y, g):
    n, k = y.shape
    total = 0.0
    for i in range(n):
        denom = 1.0 - y[i, g[i]]
        if denom <= 1e-12:
            continue
        for j in range(k):
            if j == g[i]:
                continue
            q = y[i, j] / denom
            if q > 0:
                total -= q * np.log(q)
    return total / n


def col(s1, s2, tau_row, tau_col, gamma):
    k = s1.shape[1]
    y1 = softmax(s1 / tau_row, axis=1)
    y2 = softmax(s2 / tau_row, axis=1)
    g1, g2 = np.argmax(y1, axis=1), np.argmax(y2, axis=1)
    uniform = 0.5 * (
        directed_uniform_prior(s1, s2, tau_row, tau_col)
        + directed_uniform_prior(s2, s1, tau_row, tau_col)
    )
    beta = gamma / (k - 1)
    return uniform + beta * 0.5 * (incorrect_entropy(y1, g2) + incorrect_entropy(y2, g1))


def vne(h):
    lam = np.linalg.eigvalsh(h.T @ h / h.shape[0])
    lam = lam[lam > 1e-12]
    return float(-(lam * np.log(lam)).sum())
