"""Independent reference computations used by the tests.

Nothing here imports the package under test.
"""
import math

import numpy as np

N_LEVELS = 21
HALF = N_LEVELS // 2  # levels -HALF..HALF


def walk_signal(n_steps, seed, n_levels=N_LEVELS):
    """Symmetric +-1 random walk on a clamped grid, starting at the middle level."""
    half = n_levels // 2
    rng = np.random.default_rng(seed)
    steps = np.where(rng.random(n_steps - 1) < 0.5, -1, 1)
    s = np.empty(n_steps, dtype=np.int64)
    s[0] = 0
    cur = 0
    for i, d in enumerate(steps, start=1):
        cur = min(half, max(-half, cur + d))
        s[i] = cur
    return s.astype(np.float64)


def walk_markov_oracle(threshold_steps=3, n_levels=N_LEVELS):
    """Exact event statistics of a change detector driven by the clamped walk.

    Thresholds are ``threshold_steps`` grid units on both sides (an event needs a
    deviation strictly larger), zero refractory period: the reference is
    re-sampled on the step after each event. States are
    ``("A", s, d)`` armed at level s with deviation d, and ``("R", s)`` waiting
    for reset release.

    Returns ``(event_rate_per_step, pair_freq)`` with ``pair_freq[(p, q)]`` the
    fraction of consecutive event pairs with polarities p then q (1 = ON).
    """
    half = n_levels // 2
    m = threshold_steps
    levels = range(-half, half + 1)
    states = [("A", s, d) for s in levels for d in range(-m, m + 1)] + [("R", s) for s in levels]
    index = {st: i for i, st in enumerate(states)}
    n = len(states)

    def moves(s):
        return [(min(half, s + 1), 0.5), (max(-half, s - 1), 0.5)]

    P = np.zeros((n, n))
    # emit[i, pol, s'] probability of an event of polarity pol landing at s'
    emit = np.zeros((n, 2, n_levels))
    for st, i in index.items():
        if st[0] == "R":
            for s2, pr in moves(st[1]):
                P[i, index[("A", s2, 0)]] += pr
            continue
        _, s, d = st
        for s2, pr in moves(s):
            d2 = d + (s2 - s)
            if d2 > m:
                P[i, index[("R", s2)]] += pr
                emit[i, 1, s2 + half] += pr
            elif d2 < -m:
                P[i, index[("R", s2)]] += pr
                emit[i, 0, s2 + half] += pr
            else:
                P[i, index[("A", s2, d2)]] += pr

    # stationary distribution: pi P = pi, sum pi = 1
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi = np.linalg.lstsq(A, b, rcond=None)[0]
    flux = np.einsum("i,ipk->pk", pi, emit)  # per-step event flux by (polarity, landing level)
    rate = flux.sum()

    # absorption: h[i, q] = P(next event has polarity q | start in state i, no event yet)
    # R states are entered only through events, so dropping those columns
    # leaves the event-free dynamics
    Q = P.copy()
    Q[:, [index[("R", s)] for s in levels]] = 0.0
    B = emit.sum(axis=2)  # (n, 2) one-step absorption into OFF/ON
    h = np.linalg.solve(np.eye(n) - Q, B)

    pair = {}
    for p in (0, 1):
        for q in (0, 1):
            pair[(p, q)] = sum(flux[p, s + half] * h[index[("R", s)], q] for s in levels)
    total = sum(pair.values())
    return rate, {k: v / total for k, v in pair.items()}


def ou_lag1_bruteforce(n, a, seed):
    """Lag-1 autocorrelation of unit white noise through a first-order IIR filter."""
    from scipy.signal import lfilter

    g = np.random.default_rng(seed).standard_normal(n + 5000)
    y = lfilter([math.sqrt(1 - a * a)], [1.0, -a], g)[5000:]
    y = y - y.mean()
    return float(np.dot(y[1:], y[:-1]) / np.dot(y, y))


def nearest_rank(values, p):
    v = sorted(values)
    k = 1
    while k < len(v) and k < p / 100.0 * len(v):
        k += 1
    return v[k - 1]
