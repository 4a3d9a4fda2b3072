"""Decomposability tests and interval replacement on commutative ladders.

Three ingredients tie together here:

 - `beta0` / decomposability: the degree-0 interval multiplicity read off the
   front of the Koszul-type complex, and the dimension identity that holds
   exactly for interval-decomposable modules.
 - compression: restricting a ladder module along the fixed 5-vertex zigzag
   assigned to each interval (corner evaluations, with paths degenerating to
   identities), then decomposing the zigzag representation.
 - replacement: the signed interval vector whose alternating-sum definition
   (homology of the Koszul complex) and whose compressed-multiplicity
   companion must agree under Mobius inversion over the containment order;
   disagreement is reported as an internal error, never silently.
"""

from __future__ import annotations

from dataclasses import dataclass

from intres.approx import ApproxContext, compute_fint, compute_sint
from intres.exactla import Mat
from intres.koszul import _shared_end_category, koszul_complex
from intres.poset import (
    BoundQuiver,
    cl_describe,
    containment_poset,
    ladder_length,
)
from intres.repmod import PersModule


class RouteMismatchError(RuntimeError):
    """Two independent computation routes disagreed; indicates a defect."""


# ---- the fixed 5-vertex zigzag ---------------------------------------------------

_ZIGZAG = None


def zigzag_quiver():
    """The fixed zigzag 1 <- 2 -> 3 <- 4 -> 5 (vertices z1..z5)."""
    global _ZIGZAG
    if _ZIGZAG is None:
        _ZIGZAG = BoundQuiver(
            ["z1", "z2", "z3", "z4", "z5"],
            [
                ("al1", "z2", "z1"),
                ("al2", "z2", "z3"),
                ("al3", "z4", "z3"),
                ("al4", "z4", "z5"),
            ],
        )
    return _ZIGZAG


def _require_ladder(quiver):
    n = ladder_length(quiver)
    if n is None:
        raise ValueError("operation requires a commutative-ladder quiver")
    return n


def xi_assignment(quiver, interval):
    """Corner vertices and arrow paths of the zigzag restriction at I.

    Returns (vertex_of, path_of): zigzag vertex name -> ladder vertex, and
    zigzag arrow name -> (src ladder vertex, tgt ladder vertex) whose path
    composite gives the arrow's matrix.  Shapes: a two-row staircase uses
    the five corners (top-right, top-left, top-over-inner-corner, inner
    corner, bottom-right); one-row segments repeat their endpoints with
    identity paths in the middle.
    """
    _require_ladder(quiver)
    top, bot = cl_describe(interval)
    if top and bot:
        k, l = top
        i, j = bot
        vertex_of = {
            "z1": f"t{l}",
            "z2": f"t{k}",
            "z3": f"t{i}",
            "z4": f"b{i}",
            "z5": f"b{j}",
        }
        path_of = {
            "al1": (f"t{k}", f"t{l}"),
            "al2": (f"t{k}", f"t{i}"),
            "al3": (f"b{i}", f"t{i}"),
            "al4": (f"b{i}", f"b{j}"),
        }
    elif bot:
        i, j = bot
        vertex_of = {
            "z1": f"b{j}",
            "z2": f"b{i}",
            "z3": f"b{i}",
            "z4": f"b{i}",
            "z5": f"b{j}",
        }
        path_of = {
            "al1": (f"b{i}", f"b{j}"),
            "al2": (f"b{i}", f"b{i}"),
            "al3": (f"b{i}", f"b{i}"),
            "al4": (f"b{i}", f"b{j}"),
        }
    else:
        k, l = top
        vertex_of = {
            "z1": f"t{l}",
            "z2": f"t{k}",
            "z3": f"t{k}",
            "z4": f"t{k}",
            "z5": f"t{l}",
        }
        path_of = {
            "al1": (f"t{k}", f"t{l}"),
            "al2": (f"t{k}", f"t{k}"),
            "al3": (f"t{k}", f"t{k}"),
            "al4": (f"t{k}", f"t{l}"),
        }
    return vertex_of, path_of


def xi_restriction(module, interval):
    """The zigzag representation of M at I: corner spaces and path maps."""
    vertex_of, path_of = xi_assignment(module.quiver, interval)
    zq = zigzag_quiver()
    dims = {z: module.dims[v] for z, v in vertex_of.items()}
    maps = {}
    for name, (u, v) in path_of.items():
        m = module.path_map(u, v)
        if m is None:
            raise AssertionError("corner path missing; ladder order violated")
        maps[name] = m
    return PersModule(zq, module.field, dims, maps, check=False)


# ---- zigzag decomposition ---------------------------------------------------------


def _segment_rank(z, b, d):
    """Rank of the canonical map (limit -> colimit) of z over vertices b..d."""
    field = z.field
    verts = [f"z{m}" for m in range(b, d + 1)]
    dims = [z.dims[v] for v in verts]
    offs = [0]
    for dd in dims:
        offs.append(offs[-1] + dd)
    total = offs[-1]
    if total == 0:
        return 0
    pos = {v: t for t, v in enumerate(verts)}
    arrows = []
    for name, (u, v) in z.quiver.arrows.items():
        if u in pos and v in pos:
            arrows.append((name, u, v))
    arrows.sort()
    # limit: compatible families, kernel of D: (+)Z_x -> (+)_arrows Z_tgt
    drows = sum(z.dims[v] for _, _, v in arrows)
    D = Mat.zeros(field, drows, total)
    row = 0
    for name, u, v in arrows:
        m = z.maps[name]
        cu, cv = offs[pos[u]], offs[pos[v]]
        for r in range(m.nrows):
            for c in range(m.ncols):
                D.data[(row + r) * total + (cu + c)] = m[r, c]
            D.data[(row + r) * total + (cv + r)] = -field.one() if field.kind == "Q" else (
                (-field.one()) % field.p
            )
        row += m.nrows
    kb = D.kernel_basis()
    K = Mat(
        field,
        total,
        len(kb),
        [kb[j][i] for i in range(total) for j in range(len(kb))],
    )
    # colimit: cokernel of B: (+)_arrows Z_src -> (+)Z_x
    bcols = sum(z.dims[u] for _, u, _ in arrows)
    B = Mat.zeros(field, total, bcols)
    col = 0
    for name, u, v in arrows:
        m = z.maps[name]
        cu, cv = offs[pos[u]], offs[pos[v]]
        for r in range(m.nrows):
            for c in range(m.ncols):
                B.data[(cv + r) * bcols + (col + c)] = m[r, c]
        for c in range(m.ncols):
            B.data[(cu + c) * bcols + (col + c)] = (
                -field.one() if field.kind == "Q" else (-field.one()) % field.p
            )
        col += m.ncols
    rank_b = B.rank()
    return Mat.hstack(field, [K, B]).rank() - rank_b


def zigzag_interval_multiplicities(z):
    """Multiplicities of the 15 interval summands of a zigzag representation.

    Uses inclusion-exclusion over the ranks of the canonical limit-to-colimit
    maps of all segments; exact over the module's field.
    """
    if z.quiver != zigzag_quiver():
        raise ValueError("expected a representation of the fixed 5-vertex zigzag")
    rank = {}
    for b in range(1, 6):
        for d in range(b, 6):
            rank[(b, d)] = _segment_rank(z, b, d)

    def r(b, d):
        return rank.get((b, d), 0)

    out = {}
    for b in range(1, 6):
        for d in range(b, 6):
            m = r(b, d) - r(b - 1, d) - r(b, d + 1) + r(b - 1, d + 1)
            if m < 0:
                raise RouteMismatchError(
                    "negative multiplicity in zigzag decomposition"
                )
            out[(b, d)] = m
    return out


def compressed_multiplicity(module, interval):
    """Multiplicity of the full-support summand of the zigzag restriction."""
    _require_ladder(module.quiver)
    return zigzag_interval_multiplicities(xi_restriction(module, interval))[(1, 5)]


# ---- degree-0 Betti number and decomposability ------------------------------------


def beta0(module, interval, intervals=None, cat=None):
    """dim Hom(V_I, M) minus the rank of the incoming Koszul differential."""
    if cat is None:
        cat = _shared_end_category(module.quiver, intervals, module.field)
    chain = koszul_complex(module.quiver, interval, module, cat.field, cat=cat)
    if not chain.mats:
        return chain.dims[0]
    return chain.dims[0] - chain.mats[0].rank()


@dataclass
class DecompositionResult:
    decomposable: bool
    certificate: dict | None  # Interval -> positive multiplicity

    def __bool__(self):
        return self.decomposable


def is_interval_decomposable(module, cat=None):
    """Test whether M is a direct sum of interval modules.

    Computes the candidate multiplicity beta0 at every interval admitting
    both a mono into and an epi from M, and accepts exactly when these
    account for the full dimension of M; the certificate then lists the
    summands with multiplicity.
    """
    if module.total_dim() == 0:
        return DecompositionResult(True, {})
    if cat is None:
        cat = _shared_end_category(module.quiver, None, module.field)
    ctx = ApproxContext(module, cat.objects)
    sint = set(compute_sint(module, ctx))
    fint = set(compute_fint(module, ctx))
    candidates = [i for i in cat.objects if i in sint and i in fint]
    cert = {}
    covered = 0
    for i in candidates:
        b = beta0(module, i, cat=cat)
        if b:
            cert[i] = b
            covered += b * len(i)
    if covered == module.total_dim():
        return DecompositionResult(True, cert)
    return DecompositionResult(False, None)


# ---- interval replacement ----------------------------------------------------------


@dataclass
class ReplacementVector:
    delta: dict  # Interval -> signed integer
    compressed: dict  # Interval -> nonnegative integer

    def sorted_items(self):
        return sorted(
            self.delta.items(), key=lambda kv: (len(kv[0]), kv[0].vertices)
        )


def replacement_at(module, interval, cat=None):
    """The signed coefficient at one interval: alternating sum of the
    homology dimensions of the Koszul complex of M at I."""
    if cat is None:
        cat = _shared_end_category(module.quiver, None, module.field)
    chain = koszul_complex(module.quiver, interval, module, cat.field, cat=cat)
    return sum((-1) ** i * h for i, h in enumerate(chain.homology_dims()))


def _unique_minimal_cover_join(intervals, members):
    """Smallest interval containing all members: (found, interval_or_none).

    found=False flags an ambiguous join (several minimal candidates); a
    total absence of candidates returns (True, None) meaning "contribute
    zero by convention"."""
    candidates = [
        k
        for k in intervals
        if all(m.vertex_set <= k.vertex_set for m in members)
    ]
    if not candidates:
        return True, None
    minimal = [
        k
        for k in candidates
        if not any(
            c is not k and c.vertex_set < k.vertex_set for c in candidates
        )
    ]
    if len(minimal) == 1:
        return True, minimal[0]
    return False, None


def interval_replacement(module, cat=None):
    """The signed interval-replacement vector of a ladder module.

    delta comes from Koszul homology per interval; the compressed table
    comes from zigzag restrictions; the two must satisfy the inversion
    identity c(I) = sum of delta(J) over J containing I, and, where joins
    of cover sets exist unambiguously, the cover-set alternating identity.
    Any violation raises RouteMismatchError.
    """
    _require_ladder(module.quiver)
    if cat is None:
        cat = _shared_end_category(module.quiver, None, module.field)
    intervals = cat.objects
    delta = {i: replacement_at(module, i, cat=cat) for i in intervals}
    compressed = {i: compressed_multiplicity(module, i) for i in intervals}
    # inversion gate: summing delta over containing intervals reproduces c
    for i in intervals:
        total = sum(
            delta[j] for j in intervals if i.vertex_set <= j.vertex_set
        )
        if total != compressed[i]:
            raise RouteMismatchError(
                f"replacement inversion failed at {i!r}: "
                f"sum(delta)={total}, compressed={compressed[i]}"
            )
    # cover-set alternating cross-check, where joins are unambiguous
    cont = containment_poset(intervals)
    from itertools import combinations

    for j in intervals:
        covers = cont.covers_of(j)
        usable = True
        total = 0
        for size in range(len(covers) + 1):
            for subset in combinations(covers, size):
                if size == 0:
                    total += compressed[j]
                    continue
                ok, join = _unique_minimal_cover_join(intervals, subset)
                if not ok:
                    usable = False
                    break
                if join is not None:
                    total += (-1) ** size * compressed[join]
            if not usable:
                break
        if usable and total != delta[j]:
            raise RouteMismatchError(
                f"cover-set identity failed at {j!r}: {total} != {delta[j]}"
            )
    return ReplacementVector(delta, compressed)
