"""Presheaves and sheaves of finitely generated abelian groups on finite spaces.

Groups are carried as presentations (free rank plus relation matrix) and
all quotients, kernels and comparisons go through Smith normal form, so
every answer is exact, torsion included.

The minimal open U_x attains the germ colimit on a finite space, so the
stalk at x is F(U_x) and sheafification is the group of compatible
minimal-open stalk families.  Three independent sheaf-cohomology pipelines
are provided (specialization-chain complex, Godement envelopes, Cech on a
cover) plus the comparison against the order complex's simplicial
cohomology.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact import (
    HomologySummary,
    IntMatrix,
    Presentation,
    cohomology as complex_cohomology,
    cokernel_witness,
    direct_sum,
    hom_cokernel,
    hom_is_well_defined,
    hom_kernel,
    hom_preimage,
    homs_equal,
    presented_cohomology_at,
    smith_normal_form,
    solve_exact,
    ZCOEFF,
)
from .finite_space import FiniteSpace, example03_space
from .simplicial import vkey


class SheafError(Exception):
    pass


class CoverCapExceeded(SheafError):
    def __init__(self, cap, needed, where):
        self.cap = cap
        self.needed = needed
        super().__init__(
            f"cover enumeration over {where} needs {needed}, cap is {cap}")


def coefficient_presentation(coeff) -> Presentation:
    if coeff[0] == "Z":
        return Presentation.free(1)
    if coeff[0] == "Zmod":
        m = coeff[1]
        if m <= 0:
            raise SheafError("modulus must be a positive integer")
        return Presentation.cyclic(m)
    raise SheafError(f"unsupported coefficient descriptor {coeff!r}")


class Presheaf:
    """Lazy presheaf: groups and restriction matrices computed on demand.

    ``group_fn(U) -> Presentation`` and ``res_fn(U, V) -> IntMatrix`` for
    V contained in U; values are memoized per open / per inclusion.
    """

    def __init__(self, space: FiniteSpace, group_fn, res_fn, name="presheaf"):
        self.space = space
        self.name = name
        self._group_fn = group_fn
        self._res_fn = res_fn
        self._groups = {}
        self._res = {}

    def group(self, U) -> Presentation:
        U = frozenset(U)
        if U not in self._groups:
            if not self.space.is_open(U):
                raise SheafError(f"{set(U)!r} is not open")
            g = self._group_fn(U)
            if not U and g.rank != 0:
                raise SheafError("value on the empty open must be the zero group")
            self._groups[U] = g
        return self._groups[U]

    def restriction(self, U, V) -> IntMatrix:
        U, V = frozenset(U), frozenset(V)
        if not V <= U:
            raise SheafError("restriction requires V inside U")
        key = (U, V)
        if key not in self._res:
            if U == V:
                mat = IntMatrix.identity(self.group(U).rank)
            else:
                mat = self._res_fn(U, V)
            self._res[key] = mat
        return self._res[key]

    def stalk(self, x) -> Presentation:
        return self.group(self.space.minimal_open(x))

    def stalk_restriction(self, x, U) -> IntMatrix:
        """Germ map F(U) -> F_x = F(U_x), for x in U."""
        return self.restriction(U, self.space.minimal_open(x))

    def restrict_element(self, U, V, vec):
        return self.restriction(U, V).apply(vec)


def check_presheaf(F: Presheaf):
    """Functoriality and zero-on-empty, exactly, over the whole lattice."""
    opens = F.space.opens_sorted()
    if F.group(frozenset()).rank != 0:
        raise SheafError("F(empty) is not zero")
    for U in opens:
        gU = F.group(U)
        for V in opens:
            if not V <= U:
                continue
            rUV = F.restriction(U, V)
            if rUV.cols != gU.rank or rUV.rows != F.group(V).rank:
                raise SheafError(f"restriction shape mismatch {U}->{V}")
            if not hom_is_well_defined(rUV, gU, F.group(V)):
                raise SheafError(f"restriction ill-defined on {set(U)}->{set(V)}")
            for W in opens:
                if W <= V:
                    lhs = F.restriction(V, W) * rUV
                    if not homs_equal(lhs, F.restriction(U, W), F.group(W)):
                        raise SheafError(
                            f"functoriality fails on {set(U)}>{set(V)}>{set(W)}")


# ---------------------------------------------------------------------------
# stock presheaves

def constant_presheaf(space, coeff) -> Presheaf:
    """A on every nonempty open, identity restrictions (not a sheaf)."""
    base = coefficient_presentation(coeff)

    def group_fn(U):
        return base if U else Presentation.zero()

    def res_fn(U, V):
        if V:
            return IntMatrix.identity(base.rank)
        return IntMatrix.zeros(0, base.rank)

    return Presheaf(space, group_fn, res_fn, name="constant-presheaf")


def constant_sheaf(space, coeff) -> Presheaf:
    """Locally constant functions: F(U) = A^{#components(U)}."""
    base = coefficient_presentation(coeff)

    def comps(U):
        return space.components(U) if U else []

    def group_fn(U):
        parts = [base] * len(comps(U))
        return direct_sum(parts)[0] if parts else Presentation.zero()

    def res_fn(U, V):
        cu, cv = comps(U), comps(V)
        r = base.rank
        rows = len(cv) * r
        cols = len(cu) * r
        mat = [[0] * cols for _ in range(rows)]
        for i, cv_i in enumerate(cv):
            j = next(jj for jj, cu_j in enumerate(cu) if cv_i <= cu_j)
            for t in range(r):
                mat[i * r + t][j * r + t] = 1
        return IntMatrix(rows, cols, [e for row in mat for e in row])

    return Presheaf(space, group_fn, res_fn, name="constant-sheaf")


def skyscraper_sheaf(space, point, coeff) -> Presheaf:
    base = coefficient_presentation(coeff)

    def group_fn(U):
        return base if point in U else Presentation.zero()

    def res_fn(U, V):
        if point in V:
            return IntMatrix.identity(base.rank)
        return IntMatrix.zeros(0, base.rank if point in U else 0)

    return Presheaf(space, group_fn, res_fn, name=f"skyscraper@{point}")


def image_cochain_presheaf(space, degree, coeff) -> Presheaf:
    """Functions on nonempty connected subsets of U (on points in degree 0).

    This is the image-determined model of degree-``degree`` cochains: the
    image of a singular n-simplex (n >= 1) in a finite space is exactly a
    nonempty connected subset, and a cochain depending only on images is a
    function on those.  No coboundary is defined on this model; it exists
    for sheafification and lifting experiments.
    """
    if degree < 0:
        raise SheafError("cochain degree must be nonnegative")
    base = coefficient_presentation(coeff)
    if base.rank != 1:
        raise SheafError("cyclic coefficients only")

    def domains(U):
        if not U:
            return []
        if degree == 0:
            return [frozenset([p]) for p in sorted(U, key=vkey)]
        return space.connected_subsets(U)

    def group_fn(U):
        parts = [base] * len(domains(U))
        return direct_sum(parts)[0] if parts else Presentation.zero()

    def res_fn(U, V):
        du, dv = domains(U), domains(V)
        index = {d: j for j, d in enumerate(du)}
        rows, cols = len(dv), len(du)
        mat = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(dv):
            mat[i][index[d]] = 1
        return IntMatrix(rows, cols, [e for row in mat for e in row])

    F = Presheaf(space, group_fn, res_fn, name=f"image-cochain-{degree}")
    F.domains = domains
    return F


def table_presheaf(space, groups, restrictions, name="table") -> Presheaf:
    groups = {frozenset(k): v for k, v in groups.items()}
    restrictions = {(frozenset(a), frozenset(b)): m
                    for (a, b), m in restrictions.items()}
    return Presheaf(space, lambda U: groups[U],
                    lambda U, V: restrictions[(U, V)], name=name)


# ---------------------------------------------------------------------------
# sheafification by compatible minimal-open stalk families

@dataclass
class SheafificationResult:
    source: Presheaf
    plus: Presheaf
    _embeddings: dict = field(default_factory=dict)  # U -> basis in stalk sum
    _units: dict = field(default_factory=dict)       # U -> unit matrix

    def embedding(self, U):
        self.plus.group(U)
        return self._embeddings[frozenset(U)]

    def unit_matrix(self, U) -> IntMatrix:
        """F(U) -> F^+(U) in the computed coordinates."""
        U = frozenset(U)
        if U not in self._units:
            F = self.source
            sp = F.space
            pts = sorted(U, key=vkey)
            basis = self.embedding(U)
            bsnf = smith_normal_form(basis)
            cols = []
            for j in range(F.group(U).rank):
                vec = []
                for x in pts:
                    col = F.stalk_restriction(x, U).col(j)
                    vec.extend(col)
                y = solve_exact(basis, tuple(vec), bsnf)
                if y is None:
                    raise SheafError("unit image escapes the family lattice")
                cols.append(y)
            t = basis.cols
            self._units[U] = IntMatrix(
                t, len(cols), [[c[i] for c in cols] for i in range(t)]) \
                if cols else IntMatrix.zeros(t, 0)
        return self._units[U]

    def family_coordinates(self, U, stalk_vectors):
        """Coordinates in F^+(U) of a compatible family, or None."""
        U = frozenset(U)
        pts = sorted(U, key=vkey)
        vec = []
        for x in pts:
            vec.extend(stalk_vectors[x])
        basis = self.embedding(U)
        return solve_exact(basis, tuple(vec))

    def unit_is_iso(self, U) -> bool:
        from .exact import hom_is_injective, hom_is_surjective
        m = self.unit_matrix(U)
        src = self.source.group(U)
        dst = self.plus.group(U)
        return hom_is_injective(m, src, dst) and hom_is_surjective(m, src, dst)


def sheafify(F: Presheaf) -> SheafificationResult:
    """F^+(U) = compatible families (s_x in F(U_x))_{x in U}; lazy per open."""
    sp = F.space
    result = SheafificationResult(F, None)

    def family_kernel(U):
        pts = sorted(U, key=vkey)
        stalks = [F.stalk(x) for x in pts]
        big, _ = direct_sum(stalks)
        offsets = {}
        off = 0
        for x, g in zip(pts, stalks):
            offsets[x] = off
            off += g.rank
        # constraints: x in U_y (x != y)  =>  res_{U_y -> U_x}(s_y) = s_x
        blocks = []
        targets = []
        for y in pts:
            Uy = sp.minimal_open(y)
            for x in pts:
                if x == y or x not in Uy:
                    continue
                Ux = sp.minimal_open(x)
                res = F.restriction(Uy, Ux)
                gx = F.group(Ux)
                rows = gx.rank
                block = [[0] * big.rank for _ in range(rows)]
                for i in range(rows):
                    for j in range(res.cols):
                        block[i][offsets[y] + j] = res.entry(i, j)
                    block[i][offsets[x] + i] += -1
                blocks.extend(block)
                targets.append(gx)
        if blocks:
            phi = IntMatrix(len(blocks), big.rank,
                            [e for row in blocks for e in row])
            target = direct_sum(targets)[0]
        else:
            phi = IntMatrix.zeros(0, big.rank)
            target = Presentation.zero()
        pres, basis = hom_kernel(phi, big, target)
        return pres, basis

    def group_fn(U):
        if not U:
            result._embeddings[frozenset()] = IntMatrix.zeros(0, 0)
            return Presentation.zero()
        pres, basis = family_kernel(U)
        result._embeddings[frozenset(U)] = basis
        return pres

    def res_fn(U, V):
        gU = result.plus.group(U)
        gV = result.plus.group(V)
        bU = result._embeddings[frozenset(U)]
        bV = result._embeddings[frozenset(V)]
        ptsU = sorted(U, key=vkey)
        ptsV = sorted(V, key=vkey)
        # project the stalk-sum coordinates of U onto those of V
        keep_rows = []
        off = 0
        offsets = {}
        for x in ptsU:
            offsets[x] = off
            off += F.stalk(x).rank
        for x in ptsV:
            keep_rows.extend(range(offsets[x], offsets[x] + F.stalk(x).rank))
        proj = bU.take_rows(keep_rows)
        vsnf = smith_normal_form(bV)
        cols = []
        for j in range(gU.rank):
            y = solve_exact(bV, proj.col(j), vsnf)
            if y is None:
                raise SheafError("restricted family escapes the lattice")
            cols.append(y)
        t = bV.cols
        return IntMatrix(t, len(cols), [[c[i] for c in cols] for i in range(t)]) \
            if cols else IntMatrix.zeros(t, 0)

    result.plus = Presheaf(sp, group_fn, res_fn, name=f"{F.name}+")
    return result


def global_sections_summary(F: Presheaf) -> HomologySummary:
    """Compatible stalk families over X, computed directly."""
    res = sheafify(F)
    return res.plus.group(frozenset(F.space.points)).summary(0)


# ---------------------------------------------------------------------------
# flasqueness and gluability

def is_flasque(F: Presheaf):
    """All restrictions from global sections surjective; else a witness."""
    sp = F.space
    X = frozenset(sp.points)
    gX = F.group(X)
    for U in sp.opens_sorted():
        m = F.restriction(X, U)
        gU = F.group(U)
        cok = hom_cokernel(m, gX, gU)
        if not cok.is_trivial():
            wit = cokernel_witness(m, gX, gU)
            return False, (U, wit)
    return True, None


def _antichain_covers(space, U, cap):
    """Irredundant covers of U by opens: antichains with union U."""
    below = [O for O in space.opens_sorted() if O and O <= U]
    if len(below) > cap:
        raise CoverCapExceeded(cap, len(below), f"open {sorted(map(str, U))}")
    below.sort(key=len, reverse=True)
    out = []

    def rec(idx, chosen, union):
        if union == U and chosen:
            out.append(tuple(chosen))
            # extensions would be redundant only if comparable; still allow
        if idx == len(below):
            return
        cand = below[idx]
        rec(idx + 1, chosen, union)
        if not any(cand <= c or c <= cand for c in chosen):
            chosen.append(cand)
            rec(idx + 1, chosen, union | cand)
            chosen.pop()

    rec(0, [], frozenset())
    # dedupe (the recursion can emit a cover before exhausting extensions)
    seen = set()
    covers = []
    for c in out:
        key = frozenset(c)
        if key not in seen:
            seen.add(key)
            covers.append(sorted(key, key=lambda o: (len(o), tuple(
                vkey(v) for v in sorted(o, key=vkey)))))
    return covers


def _matching_families(F: Presheaf, cover):
    """Kernel presentation of pairwise-difference, plus the embedding basis."""
    parts = [F.group(V) for V in cover]
    big, _ = direct_sum(parts)
    offsets = []
    off = 0
    for g in parts:
        offsets.append(off)
        off += g.rank
    blocks = []
    targets = []
    for i in range(len(cover)):
        for j in range(i + 1, len(cover)):
            W = cover[i] & cover[j]
            gW = F.group(W)
            if gW.rank == 0:
                continue
            ri = F.restriction(cover[i], W)
            rj = F.restriction(cover[j], W)
            block = [[0] * big.rank for _ in range(gW.rank)]
            for r in range(gW.rank):
                for c in range(ri.cols):
                    block[r][offsets[i] + c] += ri.entry(r, c)
                for c in range(rj.cols):
                    block[r][offsets[j] + c] -= rj.entry(r, c)
            blocks.extend(block)
            targets.append(gW)
    if blocks:
        phi = IntMatrix(len(blocks), big.rank, [e for row in blocks for e in row])
        target = direct_sum(targets)[0]
    else:
        phi = IntMatrix.zeros(0, big.rank)
        target = Presentation.zero()
    pres, basis = hom_kernel(phi, big, target)
    return pres, basis, big, offsets


def satisfies_gluability(F: Presheaf, cover_cap=24):
    """Every matching family over every irredundant cover glues; else witness.

    Covers refine to the antichain of their maximal members with the same
    matching data, so checking antichain covers decides all covers.
    """
    sp = F.space
    for U in sp.opens_sorted():
        if not U:
            continue
        for cover in _antichain_covers(sp, U, cover_cap):
            pres, basis, big, offsets = _matching_families(F, cover)
            gU = F.group(U)
            # stacked restriction F(U) -> sum F(V_i)
            rows = []
            for V in cover:
                rows.extend(F.restriction(U, V).rows_list())
            stacked = IntMatrix(big.rank, gU.rank,
                                [e for row in rows for e in row]) \
                if rows else IntMatrix.zeros(0, gU.rank)
            aug = stacked.hstack(big.relations)
            asnf = smith_normal_form(aug)
            for j in range(basis.cols):
                fam = basis.col(j)
                if solve_exact(aug, fam, asnf) is None:
                    return False, (U, cover, fam)
    return True, None


def is_sheaf(F: Presheaf) -> bool:
    """Identity + gluability against minimal-open covers of every open.

    On Alexandrov spaces these covers decide the sheaf condition: any
    section is determined by, and glued from, its minimal-open germs.
    """
    sp = F.space
    for U in sp.opens_sorted():
        if not U:
            if F.group(U).rank != 0:
                return False
            continue
        pts = sorted(U, key=vkey)
        gU = F.group(U)
        stalks = [F.group(sp.minimal_open(x)) for x in pts]
        big, _ = direct_sum(stalks)
        rows = []
        for x in pts:
            rows.extend(F.stalk_restriction(x, U).rows_list())
        stacked = IntMatrix(big.rank, gU.rank, [e for row in rows for e in row])
        from .exact import hom_is_injective
        if not hom_is_injective(stacked, gU, big):
            return False
        cover = [sp.minimal_open(x) for x in pts]
        pres, basis, bigc, offsets = _matching_families(F, cover)
        aug = stacked.hstack(bigc.relations)
        asnf = smith_normal_form(aug)
        for j in range(basis.cols):
            if solve_exact(aug, basis.col(j), asnf) is None:
                return False
    return True


# ---------------------------------------------------------------------------
# cohomology pipelines

def _chains_of_length(space, length):
    return [c for c in space.poset().chains(max_len=length) if len(c) == length]


def _nerve_group(F, chains):
    parts = [F.stalk(c[0]) for c in chains]
    return (direct_sum(parts)[0] if parts else Presentation.zero(), parts)


def _nerve_differential(F, chains_n, chains_n1):
    """Alternating-sum differential on specialization-chain cochains."""
    sp = F.space
    index = {c: i for i, c in enumerate(chains_n)}
    col_off = []
    off = 0
    for c in chains_n:
        col_off.append(off)
        off += F.stalk(c[0]).rank
    total_cols = off
    row_off = []
    off = 0
    for e in chains_n1:
        row_off.append(off)
        off += F.stalk(e[0]).rank
    total_rows = off
    mat = [[0] * total_cols for _ in range(total_rows)]
    for r, e in enumerate(chains_n1):
        ge = F.stalk(e[0])
        for i in range(len(e)):
            face = e[:i] + e[i + 1:]
            ci = index.get(face)
            if ci is None:
                continue
            sign = (-1) ** i
            if i == 0:
                block = F.restriction(sp.minimal_open(e[1]),
                                      sp.minimal_open(e[0]))
            else:
                block = IntMatrix.identity(ge.rank)
            for a in range(block.rows):
                for b in range(block.cols):
                    mat[row_off[r] + a][col_off[ci] + b] += sign * block.entry(a, b)
    return IntMatrix(total_rows, total_cols, [e for row in mat for e in row])


def sheaf_cohomology_nerve(F: Presheaf, max_degree) -> list:
    """Cohomology of the specialization-chain cochain complex of stalks.

    Degree-0 cocycles are exactly the compatible stalk families, so H^0 is
    the global-section group; agreement with the Godement and Cech methods
    anchors the higher degrees.
    """
    sp = F.space
    chains = {n: _chains_of_length(sp, n + 1) for n in range(max_degree + 2)}
    groups = {n: _nerve_group(F, chains[n])[0] for n in range(max_degree + 2)}
    groups[-1] = Presentation.zero()
    diffs = {}
    for n in range(max_degree + 1):
        diffs[n] = _nerve_differential(F, chains[n], chains[n + 1])
    diffs[-1] = IntMatrix.zeros(groups[0].rank, 0)
    out = []
    for n in range(max_degree + 1):
        out.append(presented_cohomology_at(
            [groups[n - 1], groups[n], groups[n + 1]],
            [diffs[n - 1], diffs[n]], n))
    return out


def godement_envelope(F: Presheaf):
    """G(F)(U) = product of stalks over U, with the canonical unit."""
    sp = F.space

    def group_fn(U):
        parts = [F.stalk(x) for x in sorted(U, key=vkey)]
        return direct_sum(parts)[0] if parts else Presentation.zero()

    def res_fn(U, V):
        ptsU = sorted(U, key=vkey)
        ptsV = sorted(V, key=vkey)
        offsets = {}
        off = 0
        for x in ptsU:
            offsets[x] = off
            off += F.stalk(x).rank
        rows = []
        for x in ptsV:
            r = F.stalk(x).rank
            for i in range(r):
                row = [0] * off
                row[offsets[x] + i] = 1
                rows.append(row)
        return IntMatrix(len(rows), off, [e for row in rows for e in row])

    G = Presheaf(sp, group_fn, res_fn, name=f"G({F.name})")

    def unit_matrix(U):
        rows = []
        for x in sorted(U, key=vkey):
            rows.extend(F.stalk_restriction(x, U).rows_list())
        return IntMatrix(G.group(U).rank, F.group(U).rank,
                         [e for row in rows for e in row])

    return G, unit_matrix


def _coker_presheaf(F: Presheaf, G: Presheaf, unit_matrix):
    """Presheaf cokernel of a unit F -> G, on G's coordinates."""
    sp = F.space

    def group_fn(U):
        return hom_cokernel(unit_matrix(U), F.group(U), G.group(U))

    def res_fn(U, V):
        return G.restriction(U, V)

    return Presheaf(sp, group_fn, res_fn, name=f"coker({F.name})")


def sheaf_cohomology_godement(F: Presheaf, max_degree,
                              degree_cap=3, point_cap=6) -> list:
    """Global sections of iterated stalk-product envelopes, then cohomology."""
    sp = F.space
    if max_degree > degree_cap:
        raise CoverCapExceeded(degree_cap, max_degree, "godement degree")
    if len(sp.points) > point_cap:
        raise CoverCapExceeded(point_cap, len(sp.points), "godement points")
    X = frozenset(sp.points)
    cur = F
    gs_groups = []
    gs_diffs = []
    envelopes = []
    for k in range(max_degree + 2):
        G, unit = godement_envelope(cur)
        envelopes.append((cur, G, unit))
        gs_groups.append(G.group(X))
        Q = _coker_presheaf(cur, G, unit)
        QS = sheafify(Q)
        if k < max_degree + 1:
            # d^k: G_k(X) ->> Q_k(X) -> QS_k(X) -> G_{k+1}(QS_k)(X)
            unit_q = QS.unit_matrix(X)  # Q(X) -> QS(X); Q coords = G coords
            nextG, next_unit = godement_envelope(QS.plus)
            d = next_unit(X) * unit_q
            gs_diffs.append(d)
        cur = QS.plus
    out = []
    zero = Presentation.zero()
    for n in range(max_degree + 1):
        g_prev = gs_groups[n - 1] if n > 0 else zero
        d_prev = gs_diffs[n - 1] if n > 0 else IntMatrix.zeros(
            gs_groups[0].rank, 0)
        out.append(presented_cohomology_at(
            [g_prev, gs_groups[n], gs_groups[n + 1]],
            [d_prev, gs_diffs[n]], n))
    return out


def cech_cohomology(F: Presheaf, cover, max_degree) -> list:
    """Alternating Cech complex of the given open cover."""
    import itertools
    sp = F.space
    cover = [frozenset(c) for c in cover]
    for c in cover:
        if not sp.is_open(c):
            raise SheafError(f"cover member {set(c)!r} is not open")
    union = frozenset().union(*cover) if cover else frozenset()
    if union != frozenset(sp.points):
        raise SheafError("cover does not cover the space")
    n_members = len(cover)

    def inter(idxs):
        out = cover[idxs[0]]
        for i in idxs[1:]:
            out = out & cover[i]
        return out

    tuples = {p: list(itertools.combinations(range(n_members), p + 1))
              for p in range(max_degree + 2)}
    groups = {}
    for p, tts in tuples.items():
        parts = [F.group(inter(t)) for t in tts]
        groups[p] = direct_sum(parts)[0] if parts else Presentation.zero()
    groups[-1] = Presentation.zero()

    def diff(p):
        src = tuples[p]
        dst = tuples[p + 1]
        src_index = {t: i for i, t in enumerate(src)}
        col_off = []
        off = 0
        for t in src:
            col_off.append(off)
            off += F.group(inter(t)).rank
        ncols = off
        row_off = []
        off = 0
        for t in dst:
            row_off.append(off)
            off += F.group(inter(t)).rank
        nrows = off
        mat = [[0] * ncols for _ in range(nrows)]
        for r, t in enumerate(dst):
            W = inter(t)
            for i in range(len(t)):
                face = t[:i] + t[i + 1:]
                ci = src_index[face]
                block = F.restriction(inter(face), W)
                sign = (-1) ** i
                for a in range(block.rows):
                    for b in range(block.cols):
                        mat[row_off[r] + a][col_off[ci] + b] += \
                            sign * block.entry(a, b)
        return IntMatrix(nrows, ncols, [e for row in mat for e in row])

    diffs = {p: diff(p) for p in range(max_degree + 1)}
    diffs[-1] = IntMatrix.zeros(groups[0].rank, 0)
    out = []
    for n in range(max_degree + 1):
        out.append(presented_cohomology_at(
            [groups[n - 1], groups[n], groups[n + 1]],
            [diffs[n - 1], diffs[n]], n))
    return out


def minimal_open_cover(space: FiniteSpace):
    mins = space.minimal_opens()
    seen = []
    for x in space.points:
        if mins[x] not in seen:
            seen.append(mins[x])
    # drop members contained in other members
    return [m for m in seen if not any(m < other for other in seen)]


# ---------------------------------------------------------------------------
# the comparison report

@dataclass
class ComparisonReport:
    space_points: tuple
    coefficients: tuple
    degrees: list
    sheaf_side: list
    simplicial_side: list

    def agree(self) -> bool:
        return all(a.same_group(b)
                   for a, b in zip(self.sheaf_side, self.simplicial_side))

    def rows(self):
        return [(n, a.group_label(), b.group_label(), a.same_group(b))
                for n, a, b in zip(self.degrees, self.sheaf_side,
                                   self.simplicial_side)]


def compare_theorem(space: FiniteSpace, coeff, max_degree) -> ComparisonReport:
    """Constant-sheaf cohomology vs order-complex simplicial cohomology.

    The simplicial side runs through the chain-complex pipeline, an
    independent code path; identifying it with the singular cohomology of
    the space is the documented weak-equivalence bridge.
    """
    F = constant_sheaf(space, coeff)
    sheaf_side = sheaf_cohomology_nerve(F, max_degree)
    K = space.order_complex()
    C = K.chain_complex()
    simp_side = [complex_cohomology(C, coeff, n) for n in range(max_degree + 1)]
    return ComparisonReport(space.points, coeff, list(range(max_degree + 1)),
                            sheaf_side, simp_side)


# ---------------------------------------------------------------------------
# the bundled counterexample: a sheafification section with no global lift

def example03_reproduce() -> dict:
    """Builds the five-point space and the two cochains, checks germ
    agreement, membership in the sheafification, and non-liftability.

    Returns a machine-checkable transcript; every ``ok`` field must be True.
    """
    X = example03_space()
    F = image_cochain_presheaf(X, 1, ZCOEFF)
    U1 = frozenset({1, 2, 3, 4})
    U2 = frozenset({2, 3, 4, 5})
    A = frozenset({2, 3})
    B = frozenset({3, 4})

    def rule_f1(C):
        return 1 if (C <= A or C <= B) else 0

    def rule_f2(C):
        return 1 if (C <= A or C <= B) else 2

    dom1 = F.domains(U1)
    dom2 = F.domains(U2)
    f1 = tuple(rule_f1(C) for C in dom1)
    f2 = tuple(rule_f2(C) for C in dom2)

    t = {"space": {"points": list(map(str, X.points)),
                   "opens": len(X.opens)},
         "checks": []}

    def record(name, ok, detail):
        t["checks"].append({"name": name, "ok": bool(ok), "detail": detail})

    # (a) the defining rule values, and the disagreement on U1 cap U2
    inter = frozenset({2, 3, 4})
    conn_inter = X.is_connected_subset(inter)
    v1 = rule_f1(inter)
    v2 = rule_f2(inter)
    record("rule-values", rule_f1(A) == 1 and rule_f1(inter) == 0
           and rule_f2(inter) == 2,
           {"f1[{2,3}]": rule_f1(A), "f1[{2,3,4}]": rule_f1(inter),
            "f2[{2,3,4}]": rule_f2(inter)})
    record("surjective-1-simplex-image-exists", conn_inter,
           {"connected": conn_inter, "subset": sorted(inter)})
    record("cochains-disagree-on-intersection", v1 != v2,
           {"f1": v1, "f2": v2})

    # (b) same germs on U1 cap U2: equality after restriction to the cover
    ra = F.restriction(U1, A).apply(f1) == F.restriction(U2, A).apply(f2)
    rb = F.restriction(U1, B).apply(f1) == F.restriction(U2, B).apply(f2)
    record("germ-agreement-on-cover", ra and rb,
           {"agree-on-{2,3}": ra, "agree-on-{3,4}": rb})
    germs_ok = True
    for x in sorted(inter):
        Ux = X.minimal_open(x)
        gx = F.restriction(U1, Ux).apply(f1) == F.restriction(U2, Ux).apply(f2)
        germs_ok = germs_ok and gx
    record("germ-agreement-pointwise", germs_ok, {"points": sorted(inter)})

    # (c) the pair defines a section of the sheafification over X
    res = sheafify(F)
    stalk_vectors = {}
    for x in X.points:
        Ux = X.minimal_open(x)
        if x == 5:
            stalk_vectors[x] = F.restriction(U2, Ux).apply(f2)
        else:
            stalk_vectors[x] = F.restriction(U1, Ux).apply(f1)
    coords = res.family_coordinates(frozenset(X.points), stalk_vectors)
    record("is-section-of-sheafification", coords is not None,
           {"coordinates-found": coords is not None})

    # (d) non-liftability, by the forcing argument made algorithmic
    forced = {"minimal-open-of-1-is-U1": X.minimal_open(1) == U1,
              "minimal-open-of-5-is-U2": X.minimal_open(5) == U2}
    # any global preimage restricts to f1 on U1 and to f2 on U2, hence
    # assigns both v1 and v2 to the connected set {2,3,4}
    forced["forced-conflict"] = conn_inter and v1 != v2
    record("forcing-argument", all(forced.values()), forced)

    lift = None
    if coords is not None:
        unit = res.unit_matrix(frozenset(X.points))
        lift = hom_preimage(unit, F.group(frozenset(X.points)),
                            res.plus.group(frozenset(X.points)), coords)
    record("no-global-lift", coords is not None and lift is None,
           {"preimage-exists": lift is not None})

    # unit at X is not surjective (the sheafification strictly grows)
    gX = F.group(frozenset(X.points))
    pX = res.plus.group(frozenset(X.points))
    unit = res.unit_matrix(frozenset(X.points))
    cok = hom_cokernel(unit, gX, pX)
    record("unit-not-surjective", not cok.is_trivial(),
           {"cokernel": cok.summary().group_label()})

    t["ok"] = all(c["ok"] for c in t["checks"])
    return t
