"""Synthetic graph generators with known structure.

These back the test suite and the desk-scale study configs: a chain-anchored
bijection toy that a translation model can represent exactly, a
category-skew family whose regions trade balanced relation categories
against many-to-many mass, and plain random graphs for oracle checks.
"""

from __future__ import annotations

import numpy as np

from .graph import KnowledgeGraph
from .seeding import derive_seed, derived_rng


def _kg(entities: list[str], relations: list[str], train, valid, test) -> KnowledgeGraph:
    def arr(rows):
        return np.array(rows, dtype=np.int64).reshape(-1, 3)

    return KnowledgeGraph(entities, relations, {"train": arr(train), "valid": arr(valid), "test": arr(test)})


def bijection_toy(n_pairs: int = 10, train_pairs: int = 6, valid_pairs: int = 2) -> KnowledgeGraph:
    """Two parallel chains joined by a partially held-out bijection.

    Entities a_i and b_i each form a chain under their own successor
    relation; a third relation maps a_i to b_i. Only the first train_pairs
    mapping triples are trainable, but every entity is anchored by the
    chains, so embedding a_i = p + i*u, b_i = q + i*u with the mapping
    vector q - p satisfies all triples exactly: held-out mappings are
    predictable from structure alone.
    """
    if not 0 < train_pairs < n_pairs or valid_pairs < 0 or train_pairs + valid_pairs >= n_pairs:
        raise ValueError("need train_pairs + valid_pairs < n_pairs with both positive")
    entities = [f"a{i}" for i in range(n_pairs)] + [f"b{i}" for i in range(n_pairs)]
    relations = ["next_a", "next_b", "maps_to"]
    a = list(range(n_pairs))
    b = [n_pairs + i for i in range(n_pairs)]

    train = [(a[i], 0, a[i + 1]) for i in range(n_pairs - 1)]
    train += [(b[i], 1, b[i + 1]) for i in range(n_pairs - 1)]
    train += [(a[i], 2, b[i]) for i in range(train_pairs)]
    valid = [(a[i], 2, b[i]) for i in range(train_pairs, train_pairs + valid_pairs)]
    test = [(a[i], 2, b[i]) for i in range(train_pairs + valid_pairs, n_pairs)]
    return _kg(entities, relations, train, valid, test)


def _interp(lo: float, hi: float, g: int, n: int) -> float:
    return lo if n == 1 else lo + (hi - lo) * g / (n - 1)


def category_skew_graph(
    seed: int = 0,
    n_regions: int = 5,
    region_size: int = 60,
    triples_per_region: int = 600,
    nn_share: tuple[float, float] = (0.85, 0.25),
    fan_out: int = 3,
    star_size: int = 20,
    holdout: tuple[float, float] = (0.1, 0.1),
) -> KnowledgeGraph:
    """Connected graph whose regions slide from many-to-many-heavy to balanced.

    Region g allocates a share of its triple budget (interpolated across
    nn_share) to an unstructured many-to-many relation over small node pools;
    the remainder splits evenly between exactly-representable bijections
    (anchored to a global spine chain) and disjoint fan-out / fan-in
    relations. Every region gets the same spine and hub-star furniture, so
    the per-region category mix (and hence a subgraph's category Gini) is
    controlled by the share alone, and each region's hub is its degree
    maximum: with candidate-set size k = n_regions, BFS starts spread
    uniformly over regions.

    A holdout fraction of each non-furniture family goes to valid/test.
    """
    half = region_size // 2
    if half < 2 or star_size >= region_size - 1:
        raise ValueError("region_size too small for the construction")
    n = n_regions * region_size
    entities = [f"v{g:02d}_{i:03d}" for g in range(n_regions) for i in range(region_size)]
    relations: list[str] = ["spine"]
    train: list[tuple[int, int, int]] = []
    valid: list[tuple[int, int, int]] = []
    test: list[tuple[int, int, int]] = []

    def node(g: int, i: int) -> int:
        return g * region_size + i

    def new_rel(name: str) -> int:
        relations.append(name)
        return len(relations) - 1

    # global spine: one path through every node keeps the graph connected and
    # provides the linear anchoring the bijections rely on
    for v in range(n - 1):
        train.append((v, 0, v + 1))

    def split_family(rows: list[tuple[int, int, int]], rng: np.random.Generator) -> None:
        rows = list(rows)
        m = len(rows)
        n_valid = int(round(holdout[0] * m))
        n_test = int(round(holdout[1] * m))
        idx = rng.permutation(m)
        hold_v = set(idx[:n_valid].tolist())
        hold_t = set(idx[n_valid : n_valid + n_test].tolist())
        for i, row in enumerate(rows):
            if i in hold_v:
                valid.append(row)
            elif i in hold_t:
                test.append(row)
            else:
                train.append(row)

    for g in range(n_regions):
        rng = derived_rng(seed, "region", g)
        members = [node(g, i) for i in range(region_size)]
        p = _interp(nn_share[0], nn_share[1], g, n_regions)
        c_nn = int(round(p * triples_per_region))
        c_each = (triples_per_region - c_nn) // 3

        # hub star, identical in every region: the hub is the region's
        # degree maximum and the only node surfaced to the BFS candidate set
        hub = members[0]
        rel_out = new_rel(f"starout{g}")
        rel_in = new_rel(f"starin{g}")
        for i in range(1, star_size + 1):
            train.append((hub, rel_out, members[i]))
        for i in range(star_size + 1, 2 * star_size + 1):
            train.append((members[i], rel_in, hub))

        # one-one: bijections i -> i + offset, one offset per relation, all
        # consistent with the spine's linear order
        remaining = c_each
        offset = half
        while remaining > 0:
            cap = region_size - offset
            if cap < 1:
                raise ValueError("bijection budget exceeds region capacity")
            take = min(remaining, cap)
            rel = new_rel(f"bij{g}_{offset - half}")
            split_family([(members[i], rel, members[i + offset]) for i in range(take)], rng)
            remaining -= take
            offset += 1

        # one-n / n-one: per relation, disjoint head and tail node sets with
        # exact fan_out so the category is unambiguous
        def fan_rows(rel: int, flip: bool, perm: np.ndarray, count: int):
            n_hubs = len(perm) // (fan_out + 1)
            hubs = perm[:n_hubs]
            leaves = perm[n_hubs : n_hubs * (fan_out + 1)]
            rows = []
            for j in range(n_hubs):
                for leaf in leaves[j * fan_out : (j + 1) * fan_out]:
                    rows.append(
                        (int(leaf), rel, int(hubs[j])) if flip else (int(hubs[j]), rel, int(leaf))
                    )
                    if len(rows) == count:
                        return rows
            return rows

        for flip, tag in ((False, "fan"), (True, "funnel")):
            remaining = c_each
            idx = 0
            while remaining > 0:
                perm = rng.permutation(members)
                cap = (len(perm) // (fan_out + 1)) * fan_out
                take = min(remaining, cap)
                rows = fan_rows(new_rel(f"{tag}{g}_{idx}"), flip, perm, take)
                split_family(rows, rng)
                remaining -= take
                idx += 1

        # n-n: unstructured dense pairs between two small pools
        pool = max(4, int(np.ceil(c_nn / 15)), int(np.ceil(np.sqrt(c_nn / 0.8))))
        pool = min(pool, half)
        heads = rng.choice(members, size=pool, replace=False)
        tails = rng.choice(members, size=pool, replace=False)
        rel = new_rel(f"nn{g}")
        seen: set[tuple[int, int]] = set()
        rows = []
        while len(rows) < c_nn:
            h = int(heads[rng.integers(pool)])
            t = int(tails[rng.integers(pool)])
            if h != t and (h, t) not in seen:
                seen.add((h, t))
                rows.append((h, rel, t))
        split_family(rows, rng)

    return _kg(entities, relations, train, valid, test)


def random_graph(
    num_entities: int,
    num_relations: int,
    num_triples: int,
    seed: int = 0,
    split_fracs: tuple[float, float] = (0.8, 0.1),
) -> KnowledgeGraph:
    """Uniform random distinct triples split into train/valid/test."""
    rng = derived_rng(seed, "random_graph")
    seen: set[tuple[int, int, int]] = set()
    rows: list[tuple[int, int, int]] = []
    cap = num_entities * num_entities * num_relations
    if num_triples > cap:
        raise ValueError("more triples requested than distinct triples exist")
    while len(rows) < num_triples:
        h = int(rng.integers(num_entities))
        r = int(rng.integers(num_relations))
        t = int(rng.integers(num_entities))
        if (h, r, t) not in seen:
            seen.add((h, r, t))
            rows.append((h, r, t))
    n_train = int(round(split_fracs[0] * num_triples))
    n_valid = int(round(split_fracs[1] * num_triples))
    entities = [f"e{i}" for i in range(num_entities)]
    relations = [f"r{i}" for i in range(num_relations)]
    return _kg(
        entities,
        relations,
        rows[:n_train],
        rows[n_train : n_train + n_valid],
        rows[n_train + n_valid :],
    )


def random_connected_graph(
    num_entities: int,
    extra_edges: int,
    num_relations: int = 3,
    seed: int = 0,
) -> KnowledgeGraph:
    """Random spanning tree plus extra random edges, all in the train split."""
    rng = derived_rng(seed, "random_connected")
    rows: list[tuple[int, int, int]] = []
    seen: set[tuple[int, int, int]] = set()
    for v in range(1, num_entities):
        parent = int(rng.integers(v))
        row = (parent, int(rng.integers(num_relations)), v)
        seen.add(row)
        rows.append(row)
    added = 0
    while added < extra_edges:
        h = int(rng.integers(num_entities))
        r = int(rng.integers(num_relations))
        t = int(rng.integers(num_entities))
        if h != t and (h, r, t) not in seen:
            seen.add((h, r, t))
            rows.append((h, r, t))
            added += 1
    entities = [f"e{i}" for i in range(num_entities)]
    relations = [f"r{i}" for i in range(num_relations)]
    return _kg(entities, relations, rows, [], [])
