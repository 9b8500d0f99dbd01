"""Compiled inner loops for the linear epsilon-insensitive SVR paths.

Both paths minimize, over the bias-augmented weight vector v,

    F(v) = 0.5 * ||v||^2 + C * sum_i max(0, |y_i - v . x_i| - eps)

where each row x_i carries a trailing constant 1.0, so the intercept is
regularized together with the weights.

The dual path is coordinate descent on the box-constrained dual
(one multiplier per sample, |beta_i| <= C, v = X^T beta) visiting
coordinates in a freshly shuffled order each epoch; the shuffle comes
from an explicit splitmix64 generator so runs are reproducible
bit-for-bit from the seed alone.

The primal path takes one full-batch subgradient step per epoch with
trial step size 1/(lambda * t), lambda = 1/(C n), halving the step until
the objective strictly decreases.  The halving guard is what makes the
per-epoch objective trace monotone, which plain subgradient steps do not
guarantee; if no halving yields a decrease the path has converged to
within float resolution and stops.

Kept free of Python object types so numba can cache the machine code;
everything is strict IEEE double arithmetic (fastmath stays off).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MAX_BACKTRACKS = 64


@njit(cache=True)
def _splitmix64_next(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def _shuffle(idx, state):
    for i in range(idx.shape[0] - 1, 0, -1):
        state, z = _splitmix64_next(state)
        j = int(z % np.uint64(i + 1))
        tmp = idx[i]
        idx[i] = idx[j]
        idx[j] = tmp
    return state


@njit(cache=True)
def primal_objective(Xa, y, v, C, eps):
    n, d = Xa.shape
    reg = 0.0
    for k in range(d):
        reg += v[k] * v[k]
    loss = 0.0
    for i in range(n):
        p = 0.0
        for k in range(d):
            p += v[k] * Xa[i, k]
        r = abs(y[i] - p)
        if r > eps:
            loss += r - eps
    return 0.5 * reg + C * loss


@njit(cache=True)
def dual_cd_train(Xa, y, C, eps, max_iter, tol, seed, record):
    """Coordinate descent on the dual; returns (v, epochs, trace, ok).

    trace holds the dual objective (maximization form) after each epoch,
    so it is non-decreasing; with record=False only the last value is kept.
    """
    n, d = Xa.shape
    v = np.zeros(d)
    beta = np.zeros(n)
    qdiag = np.empty(n)
    for i in range(n):
        s = 0.0
        for k in range(d):
            s += Xa[i, k] * Xa[i, k]
        qdiag[i] = s
    order = np.arange(n)
    trace = np.empty(max_iter if record else 1)
    state = seed
    prev = 0.0  # dual objective at beta = 0
    epochs = 0
    for epoch in range(max_iter):
        state = _shuffle(order, state)
        for t in range(n):
            i = order[t]
            g = -y[i]
            for k in range(d):
                g += v[k] * Xa[i, k]
            b = beta[i]
            h = qdiag[i]
            gp = g + eps
            gn = g - eps
            if gp < h * b:
                z = b - gp / h
            elif gn > h * b:
                z = b - gn / h
            else:
                z = 0.0
            if z > C:
                z = C
            elif z < -C:
                z = -C
            diff = z - b
            if diff != 0.0:
                beta[i] = z
                for k in range(d):
                    v[k] += diff * Xa[i, k]
        obj = 0.0
        for i in range(n):
            obj += y[i] * beta[i] - eps * abs(beta[i])
        s = 0.0
        for k in range(d):
            s += v[k] * v[k]
        obj -= 0.5 * s
        epochs = epoch + 1
        trace[epoch if record else 0] = obj
        if not np.isfinite(obj):
            return v, epochs, trace[: epochs if record else 1], False
        if obj - prev < tol:
            break
        prev = obj
    return v, epochs, trace[: epochs if record else 1], True


@njit(cache=True)
def primal_sgd_train(Xa, y, C, eps, max_iter, tol, record):
    """Descent-guarded subgradient method; returns (v, epochs, trace, ok).

    trace holds F before the first step and after every accepted epoch,
    so it is non-increasing by construction.
    """
    n, d = Xa.shape
    lam = 1.0 / (C * n)
    v = np.zeros(d)
    g = np.empty(d)
    v_try = np.empty(d)
    f_cur = primal_objective(Xa, y, v, C, eps)
    trace = np.empty(max_iter + 1 if record else 1)
    trace[0] = f_cur
    epochs = 0
    for t in range(1, max_iter + 1):
        # subgradient of F/(C n) = 0.5*lam*||v||^2 + mean eps-insensitive loss
        for k in range(d):
            g[k] = lam * v[k]
        for i in range(n):
            p = 0.0
            for k in range(d):
                p += v[k] * Xa[i, k]
            r = y[i] - p
            if r > eps:
                for k in range(d):
                    g[k] -= Xa[i, k] / n
            elif r < -eps:
                for k in range(d):
                    g[k] += Xa[i, k] / n
        gnorm2 = 0.0
        for k in range(d):
            gnorm2 += g[k] * g[k]
        if gnorm2 == 0.0:
            break  # sampled subgradient vanished: stationary point
        eta = 1.0 / (lam * t)
        f_new = f_cur
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            for k in range(d):
                v_try[k] = v[k] - eta * g[k]
            f_try = primal_objective(Xa, y, v_try, C, eps)
            if f_try < f_cur:
                for k in range(d):
                    v[k] = v_try[k]
                f_new = f_try
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break  # no descent step at float resolution: converged
        epochs = t
        trace[t if record else 0] = f_new
        if not np.isfinite(f_new):
            return v, epochs, trace[: epochs + 1 if record else 1], False
        improvement = f_cur - f_new
        f_cur = f_new
        if improvement < tol:
            break
    return v, epochs, trace[: epochs + 1 if record else 1], True
