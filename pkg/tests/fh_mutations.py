"""Seeded mutations of catalog Friedlander-Halperin data, each of which must break a rule."""

import random

from stabthresh.catalog import FHData, catalog_entries, fh_data


def mutate(data: FHData, rng: random.Random) -> tuple[str, FHData]:
    odd, even, betti = list(data.odd_degrees), list(data.even_degrees), list(data.betti)
    n = len(betti) - 1
    free = [m for m in range(1, n) if 2 * m != n]
    kinds = ["odd"] if odd else []
    kinds += ["even"] if even else []
    kinds += ["betti"] if free else []
    kind = rng.choice(kinds)
    if kind == "odd":
        i = rng.randrange(len(odd))
        step = rng.choice((-2, 2)) if odd[i] > 3 else 2
        odd[i] += step
        return f"odd degree {data.odd_degrees[i]} -> {odd[i]}", FHData(tuple(odd), tuple(even), tuple(betti))
    if kind == "even":
        i = rng.randrange(len(even))
        step = rng.choice((-2, 2)) if even[i] > 2 else 2
        even[i] += step
        return f"even degree {data.even_degrees[i]} -> {even[i]}", FHData(tuple(odd), tuple(even), tuple(betti))
    m = rng.choice(free)
    betti[m] += 1
    return f"b_{m} + 1", FHData(tuple(odd), tuple(even), tuple(betti))


def seeded_mutations(count: int = 20, seed: int = 2024):
    rng = random.Random(seed)
    spaces = catalog_entries()
    out = []
    for _ in range(count):
        x = rng.choice(spaces)
        label, mutated = mutate(fh_data(x), rng)
        out.append((x, label, mutated))
    return out
