#!/usr/bin/env python3
"""Regenerates data/workspace: a synthetic contact-network-style test fixture.

92 individuals across 5 one-hot-encoded departments, 788 small group
interactions with strong department homophily, a heavy-tailed activity
distribution, and a planted core/periphery split. Deterministic: rerunning
this script reproduces the committed files byte for byte.
"""

import collections
import pathlib
import random

SEED = 1
N_CORE = 71
N_FRINGE = 21
N_DEPT = 5
N_EDGES = 788
ZIPF = 0.9

# within/between-department interaction weights; the periphery mixes across
# departments while teams stay homophilous
CORE_SAME, CORE_BASE, CORE_DIFF = 0.14, 0.90, 0.03
FRINGE_SAME, FRINGE_BASE, FRINGE_DIFF = 0.004, 0.92, 0.16


def attach_prob(d1, d2, same, base, diff):
    if d1 == d2:
        return same * base ** (N_DEPT - 1)
    return diff * diff * base ** (N_DEPT - 2)


def main():
    rng = random.Random(SEED)
    n = N_CORE + N_FRINGE
    dept = [i % N_DEPT for i in range(n)]
    rng.shuffle(dept)

    weights = [1.0 / (i + 1) ** ZIPF for i in range(N_CORE)]
    total = sum(weights)
    cumulative = []
    acc = 0.0
    for w in weights:
        acc += w / total
        cumulative.append(acc)

    edges = []
    for _ in range(N_EDGES):
        u = rng.random()
        seed_node = next(i for i, c in enumerate(cumulative) if u < c)
        group = {seed_node}
        for c in range(N_CORE):
            if c == seed_node:
                continue
            if rng.random() < attach_prob(dept[seed_node], dept[c],
                                          CORE_SAME, CORE_BASE, CORE_DIFF):
                group.add(c)
        edge = set(group)
        members = list(group)
        for f in range(N_CORE, n):
            mixed = dept[rng.choice(members)]
            if rng.random() < attach_prob(mixed, dept[f],
                                          FRINGE_SAME, FRINGE_BASE, FRINGE_DIFF):
                edge.add(f)
        edges.append(sorted(edge))

    out_dir = pathlib.Path(__file__).resolve().parent.parent / "data" / "workspace"
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "edges.txt", "w") as fh:
        for e in edges:
            fh.write(" ".join(str(v) for v in e) + "\n")
    with open(out_dir / "attrs.txt", "w") as fh:
        for v in range(n):
            row = ["1" if dept[v] == d else "0" for d in range(N_DEPT)]
            fh.write(" ".join(row) + "\n")

    degree = collections.Counter()
    for e in edges:
        for v in e:
            degree[v] += 1
    print(f"nodes={n} edges={len(edges)} attrs={N_DEPT} "
          f"mean_size={sum(len(e) for e in edges) / len(edges):.2f} "
          f"max_degree={max(degree.values())}")


if __name__ == "__main__":
    main()
