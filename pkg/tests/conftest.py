"""Shared helpers: fixture loading and seeded random module generators."""

import random
from collections import Counter
from pathlib import Path

import pytest

from intres import (
    QQ,
    Mat,
    PersModule,
    cokernel,
    direct_sum,
    enumerate_intervals,
    hom_basis,
    interval_module,
    parse_module_file,
    zero_morphism,
)

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name):
    return parse_module_file(FIXTURES / name)


@pytest.fixture(scope="session")
def cl3_m45():
    return load_fixture("cl3_m45.mod")


@pytest.fixture(scope="session")
def cl5_m():
    return load_fixture("cl5_m.mod")


# ---- randomized module constructions ----------------------------------------


def rand_scalar(field, rng):
    if field.kind == "Q":
        return field.coerce(rng.randrange(-2, 3))
    return field.coerce(rng.randrange(field.p))


def random_invertible(field, n, rng):
    if n == 0:
        return Mat.identity(field, 0)
    while True:
        m = Mat(field, n, n, [rand_scalar(field, rng) for _ in range(n * n)])
        if m.rank() == n:
            return m


def shuffle_basis(module, rng):
    """An isomorphic copy: random invertible change of basis at every vertex."""
    field = module.field
    u = {}
    uinv = {}
    for v in module.quiver.vertices:
        m = random_invertible(field, module.dims[v], rng)
        u[v] = m
        uinv[v] = m.solve_matrix(Mat.identity(field, m.nrows))
    maps = {}
    for a, (s, t) in module.quiver.arrows.items():
        maps[a] = u[t] * module.map(a) * uinv[s]
    return PersModule(module.quiver, field, dict(module.dims), maps)


def random_interval_sum(quiver, rng, field=QQ, max_summands=3, intervals=None,
                        shuffle=True):
    """A direct sum of interval modules (optionally basis-shuffled) plus the
    multiset of summands it was built from."""
    ivs = intervals if intervals is not None else enumerate_intervals(quiver)
    k = rng.randrange(1, max_summands + 1)
    chosen = [rng.choice(ivs) for _ in range(k)]
    mods = [interval_module(quiver, i, field) for i in chosen]
    m = mods[0] if k == 1 else direct_sum(mods).module
    if shuffle:
        m = shuffle_basis(m, rng)
    return m, Counter(chosen)


def random_hom(src, tgt, rng):
    out = zero_morphism(src, tgt)
    for b in hom_basis(src, tgt):
        out = out + b.scale(rand_scalar(src.field, rng))
    return out


def lattice_example():
    """The running 4-element example: a Y-shaped poset, the interval family
    without the sink/source singletons, and that family ordered by existence
    of nonzero morphisms (a cube lattice).  Returns (quiver, family, lattice,
    embedding) with the identity embedding of lattice elements as intervals."""
    from intres import BoundQuiver, Poset, good_components

    quiver = BoundQuiver(
        ["1", "2", "3", "4"],
        [("x", "1", "2"), ("y", "2", "3"), ("z", "2", "4")],
    )
    family = [
        i for i in enumerate_intervals(quiver)
        if len(i) > 1 or i.vertex_set == {"2"}
    ]
    lattice = Poset.from_leq(
        tuple(family),
        lambda a, b: len(good_components(quiver, a, b)) > 0,
    )
    embedding = {i: i for i in family}
    return quiver, family, lattice, embedding


def random_commuting_module(quiver, rng, field=QQ, max_dim=3, tries=60):
    """A random module that commutes by construction: the cokernel of a random
    morphism between interval sums, in a shuffled basis.  Vertex dimensions are
    bounded by ``max_dim``; zero modules are rejected."""
    ivs = enumerate_intervals(quiver)
    for _ in range(tries):
        tgt, _ = random_interval_sum(quiver, rng, field, max_summands=3,
                                     intervals=ivs, shuffle=False)
        src, _ = random_interval_sum(quiver, rng, field, max_summands=2,
                                     intervals=ivs, shuffle=False)
        f = random_hom(src, tgt, rng)
        m = cokernel(f).module
        if m.total_dim() == 0:
            continue
        if max(m.dims.values()) > max_dim:
            continue
        return shuffle_basis(m, rng)
    raise RuntimeError("could not sample a random commuting module")
