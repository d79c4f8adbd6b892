"""Independent reference results used across the test modules."""
import math

import numpy as np


def birth_death_stationary(birth, death):
    """Stationary law of a chain on 0..D-1 by detailed balance.

    birth[n] is the rate n -> n+1 (n < D-1), death[n] the rate n -> n-1 (n >= 1).
    """
    p = [1.0]
    for n in range(len(birth)):
        p.append(p[-1] * birth[n] / death[n + 1])
    p = np.array(p)
    return p / p.sum()


def ideal_rates(mu, dim, kappa=1.0):
    return [kappa * mu] * (dim - 1), [kappa * n for n in range(dim)]


def linear_amp_rates(mu, dim, kappa=1.0):
    return ([kappa * mu / (mu + 1) * (n + 1) for n in range(dim - 1)],
            [kappa * n for n in range(dim)])


def generic_rates(nu, n_s, dim, kappa=1.0):
    return ([kappa * nu * (n + 1) / (n_s + n + 1) for n in range(dim - 1)],
            [kappa * n for n in range(dim)])


def moments(p):
    n = np.arange(len(p))
    mean = float(n @ p)
    return mean, float(n * n @ p - mean ** 2), float(n * (n - 1) @ p / mean ** 2)


def poisson(mean, dim):
    return np.array([math.exp(-mean + n * math.log(mean) - math.lgamma(n + 1)) for n in range(dim)])
