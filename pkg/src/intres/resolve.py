"""Minimal resolutions and coresolutions by interval modules.

A resolution is built by repeatedly taking a minimal right approximation and
passing to its kernel; a coresolution dually with left approximations and
cokernels.  The multiplicity of each interval summand in the i-th term is
the degree-i Betti (resp. co-Betti) number of the module at that interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from intres.approx import (
    ApproxContext,
    minimal_left_approximation,
    minimal_right_approximation,
)
from intres.repmod import cokernel, kernel


class MaxLengthExceeded(RuntimeError):
    """The iteration did not terminate within the allowed number of steps."""


def _default_max_len(quiver):
    return 4 * len(quiver.vertices)


@dataclass
class IntervalResolution:
    """0 -> ... -> X_1 -> X_0 -> M -> 0 with interval-decomposable X_i."""

    module: object
    terms: list  # per degree: list of Interval tags (one per summand)
    term_modules: list  # per degree: PersModule (the tagged direct sum)
    diffs: list  # diffs[i]: X_i -> X_{i-1} for i >= 1; diffs[0]: X_0 -> M

    @property
    def length(self):
        return len(self.terms) - 1 if self.terms else -1


@dataclass
class IntervalCoresolution:
    """0 -> M -> Y^0 -> Y^1 -> ... with interval-decomposable Y^i."""

    module: object
    terms: list
    term_modules: list
    diffs: list  # diffs[0]: M -> Y^0; diffs[i]: Y^{i-1} -> Y^i

    @property
    def length(self):
        return len(self.terms) - 1 if self.terms else -1


@dataclass
class BettiTable:
    """Finitely supported table (degree, Interval) -> multiplicity."""

    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def add(self, degree, interval, mult=1):
        if mult:
            key = (degree, interval)
            self.entries[key] = self.entries.get(key, 0) + mult

    def degree(self, i):
        return {
            interval: m for (d, interval), m in self.entries.items() if d == i
        }

    def max_degree(self):
        return max((d for (d, _) in self.entries), default=-1)

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        keys = set(self.entries) | set(other.entries)
        return all(self[k] == other[k] for k in keys)

    def sorted_items(self):
        out = list(self.entries.items())
        out.sort(key=lambda kv: (kv[0][0], kv[0][1].vertices))
        return out


def minimal_interval_resolution(module, max_len=None, family=None):
    """Iterate minimal right approximations and kernels until exhaustion.

    `family=None` uses all intervals of the quiver (the approximations then
    are epimorphisms and the resolution is exact).  Raises MaxLengthExceeded
    if more than max_len terms are produced.
    """
    if max_len is None:
        max_len = _default_max_len(module.quiver)
    terms = []
    term_modules = []
    diffs = []
    current = module
    embed = None  # inclusion of current into the previous term
    while not current.is_zero():
        if len(terms) > max_len:
            raise MaxLengthExceeded(
                f"resolution exceeded {max_len} terms; raise max_len if the "
                "configuration is legitimate"
            )
        ctx = ApproxContext(current)
        approx = minimal_right_approximation(current, family, ctx)
        f = approx.morphism
        terms.append(list(approx.summand_index))
        term_modules.append(approx.source_or_target)
        diffs.append(embed.compose(f) if embed is not None else f)
        ker = kernel(f)
        # re-validate the constructed pieces: cheap, catches bugs early
        ker.module.validate_commutativity()
        ker.inclusion.validate_naturality()
        current = ker.module
        embed = ker.inclusion
    return IntervalResolution(module, terms, term_modules, diffs)


def minimal_interval_coresolution(module, max_len=None, family=None):
    """Iterate minimal left approximations and cokernels (dual)."""
    if max_len is None:
        max_len = _default_max_len(module.quiver)
    terms = []
    term_modules = []
    diffs = []
    current = module
    project = None  # projection of the previous term onto current
    while not current.is_zero():
        if len(terms) > max_len:
            raise MaxLengthExceeded(
                f"coresolution exceeded {max_len} terms; raise max_len if the "
                "configuration is legitimate"
            )
        ctx = ApproxContext(current)
        approx = minimal_left_approximation(current, family, ctx)
        g = approx.morphism
        terms.append(list(approx.summand_index))
        term_modules.append(approx.source_or_target)
        diffs.append(g.compose(project) if project is not None else g)
        cok = cokernel(g)
        cok.module.validate_commutativity()
        cok.projection.validate_naturality()
        current = cok.module
        project = cok.projection
    return IntervalCoresolution(module, terms, term_modules, diffs)


def betti(module, max_len=None, family=None, resolution=None):
    """Betti table: multiplicity of each interval in each resolution term."""
    if resolution is None:
        resolution = minimal_interval_resolution(module, max_len, family)
    table = BettiTable()
    for degree, tags in enumerate(resolution.terms):
        for interval in tags:
            table.add(degree, interval)
    return table


def cobetti(module, max_len=None, family=None, coresolution=None):
    """Co-Betti table from the minimal coresolution."""
    if coresolution is None:
        coresolution = minimal_interval_coresolution(module, max_len, family)
    table = BettiTable()
    for degree, tags in enumerate(coresolution.terms):
        for interval in tags:
            table.add(degree, interval)
    return table
