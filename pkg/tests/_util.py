"""Shared helpers for the test suite."""
import random


def random_unimodular(rng: random.Random, n: int, steps: int = 6, spread: int = 2):
    """Product of random elementary integer operations, so det = +-1."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 1:
        return [[rng.choice((1, -1))]]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-spread, spread)
        for k in range(n):
            U[i][k] += c * U[j][k]
        if rng.random() < 0.3:
            U[i], U[j] = U[j], U[i]
        if rng.random() < 0.3:
            U[i] = [-x for x in U[i]]
    return U
