import random

from hypothesis import HealthCheck, settings, strategies as st

from constructible.shv.random import random_poset, random_rep

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def poset_from_seed(seed, max_n=8, min_n=1):
    rng = random.Random(seed)
    return random_poset(rng, rng.randint(min_n, max_n))


def rep_from_seed(seed, max_n=6):
    rng = random.Random(seed)
    P = random_poset(rng, rng.randint(1, max_n))
    return random_rep(rng, P)
