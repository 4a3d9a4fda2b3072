"""Pointwise finite-dimensional representations of a Hasse quiver.

A `PersModule` assigns a finite-dimensional space to every vertex and a
matrix to every arrow, with all parallel paths agreeing (full commutativity).
A `ModMorphism` is a vertex-indexed family of matrices natural in the arrows.

Thin indecomposables supported on intervals (`interval_module`) have hom
spaces with a purely combinatorial basis (`good_components`), which the
resolution and Koszul machinery exploit heavily.
"""

from __future__ import annotations

from dataclasses import dataclass

from intres.exactla import Mat
from intres.poset import Interval


class CommutativityError(ValueError):
    """Two parallel paths of the quiver act differently."""


class PersModule:
    """A representation: spaces over vertices, matrices along arrows.

    `maps[a]` has shape dims[tgt] x dims[src] for an arrow a: src -> tgt and
    sends column vectors at src to column vectors at tgt.  Omitted arrows get
    zero matrices.
    """

    __slots__ = ("quiver", "field", "dims", "maps")

    def __init__(self, quiver, field, dims, maps=None, check=True):
        self.quiver = quiver
        self.field = field
        self.dims = {}
        for v in quiver.vertices:
            d = int(dims.get(v, 0))
            if d < 0:
                raise ValueError(f"negative dimension at vertex {v!r}")
            self.dims[v] = d
        for v in dims:
            if v not in self.dims:
                raise ValueError(f"dimension given for unknown vertex {v!r}")
        maps = maps or {}
        for a in maps:
            if a not in quiver.arrows:
                raise ValueError(f"matrix given for unknown arrow {a!r}")
        self.maps = {}
        for a, (src, tgt) in quiver.arrows.items():
            want = (self.dims[tgt], self.dims[src])
            m = maps.get(a)
            if m is None:
                m = Mat.zeros(field, *want)
            elif not isinstance(m, Mat):
                m = Mat.from_rows(field, m, ncols=want[1])
            if m.shape != want:
                raise ValueError(
                    f"matrix for arrow {a!r} has shape {m.shape}, expected {want}"
                )
            if m.field != field:
                raise ValueError(f"matrix for arrow {a!r} is over the wrong field")
            self.maps[a] = m
        if check:
            self.validate_commutativity()

    def at(self, v):
        return self.dims[v]

    def map(self, a):
        return self.maps[a]

    def dim_vector(self):
        return dict(self.dims)

    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return self.total_dim() == 0

    def validate_commutativity(self):
        """Check every pair of parallel paths acts identically.

        Walks vertices in topological order keeping, per start vertex, the
        matrix of the first path found; every additional arrow into an
        already-reached vertex must reproduce the stored matrix.
        """
        q = self.quiver
        topo = q.topological_order()
        for u in topo:
            paths = {u: Mat.identity(self.field, self.dims[u])}
            for w in topo:
                if w not in paths:
                    continue
                for a, x in q.arrows_from(w):
                    cand = self.maps[a] * paths[w]
                    if x in paths:
                        if paths[x] != cand:
                            raise CommutativityError(
                                f"paths from {u!r} to {x!r} do not commute"
                            )
                    else:
                        paths[x] = cand
        return True

    def path_map(self, u, v):
        """Matrix of any directed path u -> v (all agree); None if u !<= v."""
        if u == v:
            return Mat.identity(self.field, self.dims[u])
        if not self.quiver.lt(u, v):
            return None
        q = self.quiver
        paths = {u: Mat.identity(self.field, self.dims[u])}
        for w in q.topological_order():
            if w not in paths:
                continue
            if w == v:
                return paths[v]
            for a, x in q.arrows_from(w):
                if x not in paths:
                    paths[x] = self.maps[a] * paths[w]
        return paths[v]

    def __eq__(self, other):
        return (
            isinstance(other, PersModule)
            and self.quiver == other.quiver
            and self.field == other.field
            and self.dims == other.dims
            and all(self.maps[a] == other.maps[a] for a in self.maps)
        )

    def __repr__(self):
        dims = " ".join(f"{v}:{self.dims[v]}" for v in self.quiver.vertices)
        return f"PersModule({dims})"


def zero_module(quiver, field):
    return PersModule(quiver, field, {}, {}, check=False)


def interval_module(quiver, interval, field):
    """The thin representation: k on the interval, identity inner arrows."""
    if not isinstance(interval, Interval):
        interval = Interval(quiver, interval)
    dims = {v: 1 for v in interval.vertices}
    one = field.one()
    maps = {}
    for a in interval.arrows():
        maps[a] = Mat(field, 1, 1, [one])
    return PersModule(quiver, field, dims, maps, check=False)


class ModMorphism:
    """A morphism of representations: one matrix per vertex, natural in arrows."""

    __slots__ = ("src", "tgt", "comps")

    def __init__(self, src, tgt, comps=None, check=True):
        if src.quiver != tgt.quiver:
            raise ValueError("morphism endpoints live on different quivers")
        if src.field != tgt.field:
            raise ValueError("morphism endpoints live over different fields")
        self.src = src
        self.tgt = tgt
        comps = comps or {}
        self.comps = {}
        for v in src.quiver.vertices:
            want = (tgt.dims[v], src.dims[v])
            m = comps.get(v)
            if m is None:
                m = Mat.zeros(src.field, *want)
            elif not isinstance(m, Mat):
                m = Mat.from_rows(src.field, m, ncols=want[1])
            if m.shape != want:
                raise ValueError(
                    f"component at {v!r} has shape {m.shape}, expected {want}"
                )
            self.comps[v] = m
        if check:
            self.validate_naturality()

    @property
    def field(self):
        return self.src.field

    def comp(self, v):
        return self.comps[v]

    def validate_naturality(self):
        for a, (u, v) in self.src.quiver.arrows.items():
            lhs = self.tgt.maps[a] * self.comps[u]
            rhs = self.comps[v] * self.src.maps[a]
            if lhs != rhs:
                raise ValueError(f"naturality fails along arrow {a!r}")
        return True

    # ---- algebra ---------------------------------------------------------

    def __add__(self, other):
        self._check_parallel(other)
        return ModMorphism(
            self.src,
            self.tgt,
            {v: self.comps[v] + other.comps[v] for v in self.comps},
            check=False,
        )

    def __sub__(self, other):
        self._check_parallel(other)
        return ModMorphism(
            self.src,
            self.tgt,
            {v: self.comps[v] - other.comps[v] for v in self.comps},
            check=False,
        )

    def scale(self, c):
        return ModMorphism(
            self.src,
            self.tgt,
            {v: self.comps[v].scale(c) for v in self.comps},
            check=False,
        )

    def compose(self, first):
        """self o first, where first: A -> self.src."""
        if first.tgt is not self.src and first.tgt != self.src:
            raise ValueError("composition endpoints do not match")
        return ModMorphism(
            first.src,
            self.tgt,
            {v: self.comps[v] * first.comps[v] for v in self.comps},
            check=False,
        )

    def is_zero(self):
        return all(m.is_zero() for m in self.comps.values())

    def is_mono(self):
        return all(
            self.comps[v].rank() == self.src.dims[v] for v in self.comps
        )

    def is_epi(self):
        return all(
            self.comps[v].rank() == self.tgt.dims[v] for v in self.comps
        )

    def is_iso(self):
        return self.is_mono() and self.is_epi()

    def flat(self):
        """All entries as one list: vertices in quiver order, row-major."""
        out = []
        for v in self.src.quiver.vertices:
            out.extend(self.comps[v].data)
        return out

    @classmethod
    def from_flat(cls, src, tgt, coords, check=False):
        comps = {}
        pos = 0
        for v in src.quiver.vertices:
            n = tgt.dims[v] * src.dims[v]
            comps[v] = Mat(src.field, tgt.dims[v], src.dims[v], list(coords[pos : pos + n]))
            pos += n
        if pos != len(coords):
            raise ValueError("flat coordinate vector has wrong length")
        return cls(src, tgt, comps, check=check)

    def _check_parallel(self, other):
        if self.src != other.src or self.tgt != other.tgt:
            raise ValueError("morphisms are not parallel")

    def __eq__(self, other):
        return (
            isinstance(other, ModMorphism)
            and self.src == other.src
            and self.tgt == other.tgt
            and all(self.comps[v] == other.comps[v] for v in self.comps)
        )

    def __repr__(self):
        return f"ModMorphism({self.src!r} -> {self.tgt!r})"


def identity_morphism(m):
    return ModMorphism(
        m,
        m,
        {v: Mat.identity(m.field, m.dims[v]) for v in m.quiver.vertices},
        check=False,
    )


def zero_morphism(src, tgt):
    return ModMorphism(src, tgt, {}, check=False)


# ---- hom spaces -------------------------------------------------------------


def hom_basis(m, n):
    """Basis of the space of morphisms m -> n, by exact linear algebra.

    Unknowns are all component entries; one linear block per arrow encodes
    naturality.  Returns ModMorphisms in the canonical kernel-basis order.
    """
    if m.quiver != n.quiver or m.field != n.field:
        raise ValueError("hom endpoints do not match")
    field = m.field
    q = m.quiver
    offsets = {}
    total = 0
    for v in q.vertices:
        offsets[v] = total
        total += n.dims[v] * m.dims[v]
    if total == 0:
        return []
    rows = []
    zero = field.zero()
    for a, (u, v) in q.arrows.items():
        na = n.maps[a]
        ma = m.maps[a]
        # equation block: n(a) * f_u - f_v * m(a) = 0, entrywise (i, j)
        for i in range(n.dims[v]):
            for j in range(m.dims[u]):
                row = [zero] * total
                # (n(a) f_u)[i, j] = sum_s n(a)[i, s] f_u[s, j]
                for s in range(n.dims[u]):
                    c = na[i, s]
                    if c:
                        row[offsets[u] + s * m.dims[u] + j] = c
                # (f_v m(a))[i, j] = sum_t f_v[i, t] m(a)[t, j]
                for t in range(m.dims[v]):
                    c = ma[t, j]
                    if c:
                        idx = offsets[v] + i * m.dims[v] + t
                        row[idx] = row[idx] - c if field.kind == "Q" else (row[idx] - c) % field.p
                if any(row):
                    rows.append(row)
    if not rows:
        sys = Mat.zeros(field, 0, total)
    else:
        sys = Mat(field, len(rows), total, [x for r in rows for x in r])
    basis = sys.kernel_basis()
    return [ModMorphism.from_flat(m, n, vec) for vec in basis]


def hom_dim(m, n):
    return len(hom_basis(m, n))


def good_components(quiver, i_interval, j_interval):
    """Combinatorial basis of Hom(V_I, V_J) for intervals I, J.

    Returns the connected components C of I&J (connectivity through cover
    arrows inside I&J) such that no cover leaves C into J\\I and no cover
    enters C from I\\J; the indicator of each such C is a morphism, and
    together they form a basis.  Components are returned as frozensets,
    sorted by their vertex index tuples.
    """
    iset = i_interval.vertex_set
    jset = j_interval.vertex_set
    meet = iset & jset
    if not meet:
        return []
    # split meet into components
    comps = []
    todo = set(meet)
    while todo:
        start = next(iter(todo))
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for _, w in quiver.arrows_from(v):
                if w in meet and w not in comp:
                    comp.add(w)
                    stack.append(w)
            for _, w in quiver.arrows_into(v):
                if w in meet and w not in comp:
                    comp.add(w)
                    stack.append(w)
        todo -= comp
        comps.append(frozenset(comp))
    good = []
    for comp in comps:
        ok = True
        for v in comp:
            for _, w in quiver.arrows_from(v):
                if w in jset and w not in iset:
                    ok = False
                    break
            if not ok:
                break
            for _, w in quiver.arrows_into(v):
                if w in iset and w not in jset:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            good.append(comp)
    vindex = quiver._vindex
    good.sort(key=lambda c: tuple(sorted(vindex[v] for v in c)))
    return good


def component_morphism(quiver, i_interval, j_interval, component, field):
    """The hom-basis morphism V_I -> V_J that is 1 on a good component."""
    vi = interval_module(quiver, i_interval, field)
    vj = interval_module(quiver, j_interval, field)
    one = field.one()
    comps = {v: Mat(field, 1, 1, [one]) for v in component}
    return ModMorphism(vi, vj, comps, check=False)


def interval_hom_basis(quiver, i_interval, j_interval, field):
    """Hom(V_I, V_J) basis as ModMorphisms (combinatorial, no elimination)."""
    return [
        component_morphism(quiver, i_interval, j_interval, c, field)
        for c in good_components(quiver, i_interval, j_interval)
    ]


# ---- kernels, cokernels, images ---------------------------------------------


@dataclass
class KernelResult:
    module: PersModule
    inclusion: ModMorphism


@dataclass
class CokernelResult:
    module: PersModule
    projection: ModMorphism


@dataclass
class ImageResult:
    module: PersModule
    inclusion: ModMorphism
    corestriction: ModMorphism


def kernel(f):
    """Kernel submodule of f: M -> N with its inclusion into M."""
    m = f.src
    field = f.field
    incls = {}
    dims = {}
    for v in m.quiver.vertices:
        basis = f.comps[v].kernel_basis()
        dims[v] = len(basis)
        cols = Mat(
            field,
            m.dims[v],
            len(basis),
            [basis[j][i] for i in range(m.dims[v]) for j in range(len(basis))],
        )
        incls[v] = cols
    maps = {}
    for a, (u, v) in m.quiver.arrows.items():
        rhs = m.maps[a] * incls[u]
        sol = incls[v].solve_matrix(rhs)
        if sol is None:
            raise AssertionError("kernel is not invariant; morphism not natural?")
        maps[a] = sol
    k = PersModule(m.quiver, field, dims, maps, check=False)
    incl = ModMorphism(k, m, incls, check=False)
    return KernelResult(k, incl)


def cokernel(f):
    """Cokernel quotient of f: M -> N with the projection from N."""
    n = f.tgt
    field = f.field
    projs = {}
    dims = {}
    for v in n.quiver.vertices:
        left = f.comps[v].transpose().kernel_basis()  # rows annihilating im f_v
        dims[v] = len(left)
        projs[v] = Mat(
            field,
            len(left),
            n.dims[v],
            [x for row in left for x in row],
        )
    maps = {}
    for a, (u, v) in n.quiver.arrows.items():
        rhs = (projs[v] * n.maps[a]).transpose()
        sol = projs[u].transpose().solve_matrix(rhs)
        if sol is None:
            raise AssertionError("cokernel projection is not corepresentable")
        maps[a] = sol.transpose()
    c = PersModule(n.quiver, field, dims, maps, check=False)
    proj = ModMorphism(n, c, projs, check=False)
    return CokernelResult(c, proj)


def image(f):
    """Image submodule of f: M -> N, with inclusion and corestriction."""
    n = f.tgt
    field = f.field
    incls = {}
    dims = {}
    for v in n.quiver.vertices:
        fv = f.comps[v]
        _, pivots = fv.rref()
        # pivot columns of the ROW-reduced matrix index independent columns
        cols = [fv.col(c) for c in pivots]
        dims[v] = len(cols)
        incls[v] = Mat(
            field,
            n.dims[v],
            len(cols),
            [cols[j][i] for i in range(n.dims[v]) for j in range(len(cols))],
        )
    maps = {}
    cores = {}
    for a, (u, v) in n.quiver.arrows.items():
        rhs = n.maps[a] * incls[u]
        sol = incls[v].solve_matrix(rhs)
        if sol is None:
            raise AssertionError("image is not invariant")
        maps[a] = sol
    for v in n.quiver.vertices:
        q = incls[v].solve_matrix(f.comps[v])
        if q is None:
            raise AssertionError("image inclusion does not factor the morphism")
        cores[v] = q
    im = PersModule(n.quiver, field, dims, maps, check=False)
    incl = ModMorphism(im, n, incls, check=False)
    core = ModMorphism(f.src, im, cores, check=False)
    return ImageResult(im, incl, core)


# ---- direct sums -------------------------------------------------------------


@dataclass
class DirectSum:
    module: PersModule
    inclusions: list
    projections: list


def direct_sum(mods):
    """Direct sum with canonical inclusions and projections."""
    mods = list(mods)
    if not mods:
        raise ValueError("direct sum needs at least the quiver; pass summands")
    q = mods[0].quiver
    field = mods[0].field
    for m in mods:
        if m.quiver != q or m.field != field:
            raise ValueError("summands live on different quivers or fields")
    dims = {v: sum(m.dims[v] for m in mods) for v in q.vertices}
    maps = {}
    for a, (u, v) in q.arrows.items():
        # block diagonal
        blocks = []
        for r, mr in enumerate(mods):
            row = []
            for c, mc in enumerate(mods):
                if r == c:
                    row.append(mr.maps[a])
                else:
                    row.append(Mat.zeros(field, mr.dims[v], mc.dims[u]))
            blocks.append(row)
        maps[a] = Mat.block(field, blocks) if mods else Mat.zeros(field, 0, 0)
    total = PersModule(q, field, dims, maps, check=False)
    incls = []
    projs = []
    for t, m in enumerate(mods):
        icomps = {}
        pcomps = {}
        for v in q.vertices:
            before = sum(mods[s].dims[v] for s in range(t))
            after = sum(mods[s].dims[v] for s in range(t + 1, len(mods)))
            d = m.dims[v]
            icomps[v] = Mat.vstack(
                field,
                [
                    Mat.zeros(field, before, d),
                    Mat.identity(field, d),
                    Mat.zeros(field, after, d),
                ],
            )
            pcomps[v] = icomps[v].transpose()
        incls.append(ModMorphism(m, total, icomps, check=False))
        projs.append(ModMorphism(total, m, pcomps, check=False))
    return DirectSum(total, incls, projs)


def morphism_from_columns(summands, target, parts):
    """Assemble f: (sum of summands.module) -> target from f o inclusion_t."""
    comps = {}
    q = target.quiver
    for v in q.vertices:
        comps[v] = Mat.hstack(
            target.field, [p.comps[v] for p in parts], nrows=target.dims[v]
        ) if parts else Mat.zeros(target.field, target.dims[v], 0)
    return ModMorphism(summands.module, target, comps, check=False)


def morphism_from_rows(source, summands, parts):
    """Assemble g: source -> (sum of summands.module) from projection_t o g."""
    comps = {}
    q = source.quiver
    for v in q.vertices:
        comps[v] = Mat.vstack(
            source.field, [p.comps[v] for p in parts], ncols=source.dims[v]
        ) if parts else Mat.zeros(source.field, 0, source.dims[v])
    return ModMorphism(source, summands.module, comps, check=False)


# ---- spanning sets of monos / epis -------------------------------------------


class SpanSearchError(RuntimeError):
    """Could not realize a spanning family of the requested shape (can occur
    over small finite fields where scalar avoidance may be impossible)."""


def _avoiding_scalar(field, bad):
    """A field scalar different from every value in `bad`."""
    if field.kind == "Q":
        t = 1
        while field.coerce(t) in bad:
            t += 1
        return field.coerce(t)
    for t in range(1, field.p):
        if t not in bad:
            return t
    raise SpanSearchError(
        f"no usable scalar in GF({field.p}); field is too small"
    )


def mono_exists_interval(hom):
    """Given a hom basis from an interval module, test pointwise fullness.

    For thin sources over an infinite field a generic combination is mono
    exactly when every source vertex supports some basis element.
    """
    if not hom:
        return False
    src = hom[0].src
    for v in src.quiver.vertices:
        if src.dims[v] == 0:
            continue
        if all(h.comps[v].is_zero() for h in hom):
            return False
    return True


def epi_exists_interval(hom):
    if not hom:
        return False
    tgt = hom[0].tgt
    for v in tgt.quiver.vertices:
        if tgt.dims[v] == 0:
            continue
        if all(h.comps[v].is_zero() for h in hom):
            return False
    return True


def _killing_scalar(field, cvec, hvec):
    """The unique t with cvec + t*hvec = 0 entrywise, or None if no t works."""
    ts = set()
    for ce, he in zip(cvec.data, hvec.data):
        if he:
            val = (
                -ce * field.invert(he)
                if field.kind == "Q"
                else (-ce) * field.invert(he) % field.p
            )
            ts.add(val)
        elif ce:
            return None
    return next(iter(ts)) if len(ts) == 1 else None


def _adjusted_sum(field, cur, h, support):
    """cur + t*h with t chosen so no component over `support` vanishes."""
    bad = {field.zero()}
    for v in support:
        t = _killing_scalar(field, cur.comps[v], h.comps[v])
        if t is not None:
            bad.add(t)
    return cur + h.scale(_avoiding_scalar(field, bad))


def _nonvanishing_combination(hom, support):
    """A combination of the basis with nonzero component at every support
    vertex.  At most one scalar per vertex needs avoiding at each step."""
    field = hom[0].field
    cur = hom[0]
    for v in support:
        if not cur.comps[v].is_zero():
            continue
        h = next((g for g in hom if not g.comps[v].is_zero()), None)
        if h is None:
            return None
        cur = _adjusted_sum(field, cur, h, support)
    if any(cur.comps[v].is_zero() for v in support):
        return None
    return cur


def _pointwise_spanning_set(hom, support):
    """Spanning set of the hom space consisting of morphisms with nonzero
    components on all of `support` (monos resp. epis for thin modules)."""
    field = hom[0].field
    base = _nonvanishing_combination(hom, support)
    if base is None:
        raise SpanSearchError("could not assemble a base pointwise-full morphism")
    # base is kept in the set so that span{base, h + t*base} = span{hom}
    out = [base]
    for h in hom:
        if all(not h.comps[v].is_zero() for v in support):
            out.append(h)
        else:
            out.append(_adjusted_sum(field, h, base, support))
    return out


def mono_spanning_set(hom):
    """From a hom basis out of an interval module, a spanning set of monos.

    Returns None when no mono exists.  Over the rationals this succeeds
    whenever a mono exists; over a small prime field a SpanSearchError may
    be raised if scalar avoidance runs out of room.
    """
    if not mono_exists_interval(hom):
        return None
    src = hom[0].src
    support = [v for v in src.quiver.vertices if src.dims[v]]
    return _pointwise_spanning_set(hom, support)


def epi_spanning_set(hom):
    """Dual of mono_spanning_set, for homs into an interval module."""
    if not epi_exists_interval(hom):
        return None
    tgt = hom[0].tgt
    support = [v for v in tgt.quiver.vertices if tgt.dims[v]]
    return _pointwise_spanning_set(hom, support)
