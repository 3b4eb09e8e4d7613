"""Random maps for the series and acceptance tests."""
import random

from saddlenf.scalar import COMPLEX, GAUSSIAN, RATIONAL, GaussianRational, rational
from saddlenf.series import PlanarMap

Q = rational


def random_map(seed, D, ring=RATIONAL, axis=False, density=0.6):
    rng = random.Random(seed)

    def value():
        c = Q(f"{rng.randint(-3, 3)}/{rng.randint(1, 4)}")
        if ring is GAUSSIAN:
            return GaussianRational(c, Q(f"{rng.randint(-2, 2)}/{rng.randint(1, 3)}"))
        if ring is COMPLEX:
            return complex(float(c), rng.uniform(-1, 1))
        return c

    mu1 = ring.coerce(Q(f"{rng.choice([-1, 1]) * rng.randint(1, 5)}/{rng.randint(1, 5)}"))
    mu2 = ring.coerce(Q(f"{rng.randint(1, 7)}/{rng.randint(1, 3)}"))
    terms = []
    for n in range(2, D + 1):
        for a in range(n + 1):
            k = (a, n - a)
            for i in (1, 2):
                if axis and k[i - 1] == 0:
                    continue
                if rng.random() < density:
                    terms.append((i, k, value()))
    return PlanarMap.from_terms(ring, D, mu1, mu2, terms)
