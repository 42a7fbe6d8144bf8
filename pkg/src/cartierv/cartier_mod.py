"""Cartier modules: presentations with a p^{-1}-linear structure.

A level-1 Cartier structure on R^r is kappa(v) = C(U v) applied entrywise,
for an r x r twist matrix U.  Since kappa(x^a v) for 0 <= a < p spans the
R-module generated by kappa(R v), every stability or image computation only
ever touches the p^n digit monomials.  Quotients are never first-class: a
module supported on a closed subscheme is presented as a subquotient W/N of
a free module over the ambient ring, with both W and N kappa-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CartierError, RankMismatchError, RingMismatchError
from .field_poly import Monomial, Poly, Ring, cartier_trace
from .groebner import (
    FreeSubmodule,
    QuotientPresentation,
    Vec,
    full_module,
    preimage,
    zero_module,
)

MAX_IMAGE_ITERATIONS = 256


# -- vector helpers -----------------------------------------------------------


def vec_mul_monomial(v: Vec, mon: Monomial) -> Vec:
    return tuple(f.mul_monomial(mon) for f in v)


def vec_mul_poly(v: Vec, g: Poly) -> Vec:
    return tuple(g * f for f in v)


def vec_add(v: Vec, w: Vec) -> Vec:
    return tuple(a + b for a, b in zip(v, w))


def vec_sub(v: Vec, w: Vec) -> Vec:
    return tuple(a - b for a, b in zip(v, w))


def vec_is_zero(v: Vec) -> bool:
    return all(f.is_zero() for f in v)


def unit_vector(ring: Ring, rank: int, i: int, f: Poly | None = None) -> Vec:
    f = ring.one() if f is None else f
    return tuple(f if j == i else ring.zero() for j in range(rank))


# -- structures ---------------------------------------------------------------


class CartierStructure:
    """kappa(v) = C(U v) entrywise, level 1."""

    __slots__ = ("ring", "rank", "U")

    def __init__(self, ring: Ring, rank: int, U: Sequence[Sequence[Poly]]):
        rows = tuple(tuple(row) for row in U)
        if len(rows) != rank or any(len(r) != rank for r in rows):
            raise RankMismatchError(f"twist matrix must be {rank}x{rank}")
        for row in rows:
            for entry in row:
                if entry.ring != ring:
                    raise RingMismatchError("twist entry over wrong ring")
        self.ring = ring
        self.rank = rank
        self.U = rows

    @staticmethod
    def scalar(ring: Ring, u: Poly | None = None) -> "CartierStructure":
        u = ring.one() if u is None else u
        return CartierStructure(ring, 1, ((u,),))

    def is_scalar(self) -> bool:
        return self.rank == 1

    def scalar_twist(self) -> Poly:
        if self.rank != 1:
            raise RankMismatchError("not a rank-1 structure")
        return self.U[0][0]

    def apply(self, v: Vec) -> Vec:
        if len(v) != self.rank:
            raise RankMismatchError(f"vector of length {len(v)}, rank {self.rank}")
        out = []
        for row in self.U:
            acc = self.ring.zero()
            for entry, comp in zip(row, v):
                if entry.terms and comp.terms:
                    acc = acc + entry * comp
            out.append(cartier_trace(acc, 1))
        return tuple(out)

    def apply_iter(self, v: Vec, e: int) -> Vec:
        for _ in range(e):
            v = self.apply(v)
        return v

    def twisted(self, g: Poly) -> "CartierStructure":
        """The structure kappa composed with multiplication by g."""
        if g.ring != self.ring:
            raise RingMismatchError("twist over wrong ring")
        return CartierStructure(self.ring, self.rank,
                                tuple(tuple(g * e for e in row) for row in self.U))

    def map_ring(self, target: Ring) -> "CartierStructure":
        return CartierStructure(target, self.rank,
                                tuple(tuple(e.map_ring(target) for e in row) for row in self.U))

    def __repr__(self):
        if self.rank == 1:
            return f"<C o ({self.U[0][0].to_str()}) on {self.ring}>"
        return f"<Cartier structure rank {self.rank} on {self.ring}>"


def kappa_span(structure: CartierStructure, sub: FreeSubmodule) -> FreeSubmodule:
    """The R-span of kappa(sub), generated by kappa(x^a w) for digit a."""
    ring = structure.ring
    gens: list[Vec] = []
    for w in sub.gens:
        for a in ring.digit_monomials(1):
            v = structure.apply(vec_mul_monomial(w, a))
            if not vec_is_zero(v):
                gens.append(v)
    return FreeSubmodule(ring, sub.rank, gens).minimal_gens()


# -- modules ------------------------------------------------------------------


class CartierModule:
    """A subquotient presentation W/N together with a stable structure."""

    __slots__ = ("pres", "structure")

    def __init__(self, pres: QuotientPresentation, structure: CartierStructure,
                 check: bool = True):
        if pres.ring != structure.ring:
            raise RingMismatchError("presentation and structure over different rings")
        if pres.rank != structure.rank:
            raise RankMismatchError("presentation and structure rank differ")
        if check:
            for label, sub in (("numerator", pres.W), ("denominator", pres.N)):
                bad = _stability_failure(structure, sub)
                if bad is not None:
                    raise CartierError(
                        f"structure does not preserve the {label}: kappa of "
                        f"{_vec_str(bad[0])} times x^{bad[1]} escapes")
        self.pres = pres
        self.structure = structure

    @staticmethod
    def over_ring(ring: Ring, u: Poly | None = None) -> "CartierModule":
        """(R, C o u): full free rank-1 module with a scalar twist."""
        pres = QuotientPresentation(full_module(ring, 1), zero_module(ring, 1))
        return CartierModule(pres, CartierStructure.scalar(ring, u), check=False)

    @staticmethod
    def free(ring: Ring, structure: CartierStructure) -> "CartierModule":
        pres = QuotientPresentation(full_module(ring, structure.rank),
                                    zero_module(ring, structure.rank))
        return CartierModule(pres, structure, check=False)

    @property
    def ring(self) -> Ring:
        return self.pres.ring

    @property
    def rank(self) -> int:
        return self.pres.rank

    @property
    def W(self) -> FreeSubmodule:
        return self.pres.W

    @property
    def N(self) -> FreeSubmodule:
        return self.pres.N

    def kappa(self, v: Vec) -> Vec:
        return self.structure.apply(v)

    def is_full_free(self) -> bool:
        return self.N.is_zero() and self.W.contains(full_module(self.ring, self.rank))

    def __repr__(self):
        return f"<Cartier module {self.structure!r} on W/N in {self.ring}^{self.rank}>"


def _vec_str(v: Vec) -> str:
    return "(" + ", ".join(f.to_str() for f in v) + ")"


def _stability_failure(structure: CartierStructure, sub: FreeSubmodule):
    for w in sub.gens:
        for a in structure.ring.digit_monomials(1):
            img = structure.apply(vec_mul_monomial(w, a))
            if not sub.contains_vector(img):
                return (w, a)
    return None


def kappa_apply(M: CartierModule, v: Vec) -> Vec:
    return M.structure.apply(v)


def kappa_image(M: CartierModule, sub: FreeSubmodule | None = None) -> FreeSubmodule:
    """Span of kappa(sub) as a submodule; defaults to the numerator."""
    if sub is None:
        sub = M.pres.W
    return kappa_span(M.structure, sub)


def underline(M: CartierModule) -> tuple[FreeSubmodule, int]:
    """Image-stable part: iterate V <- kappa(V) + N from V = W to the fixed
    point.  Returns (fixed submodule, number of strict descents)."""
    V = M.pres.W
    N = M.pres.N
    for step in range(MAX_IMAGE_ITERATIONS):
        nxt = kappa_span(M.structure, V).add(N)
        if nxt == V:
            return V.minimal_gens(), step
        V = nxt
    raise CartierError("image iteration failed to stabilize")


def is_F_pure(M: CartierModule) -> bool:
    return kappa_span(M.structure, M.pres.W).add(M.pres.N) == M.pres.W


def nilpotence_order(M: CartierModule, e_max: int = MAX_IMAGE_ITERATIONS) -> int | None:
    """Smallest e with kappa^e(M) = 0, or None when the image chain fixes at
    a nonzero submodule.  The verdict is exact either way."""
    Y = M.pres.W
    N = M.pres.N
    for step in range(e_max):
        if N.contains(Y):
            return step
        nxt = kappa_span(M.structure, Y).add(N)
        if nxt == Y:
            return None
        Y = nxt
    raise CartierError(f"image chain did not stabilize within {e_max} steps")


def is_nilpotent(M: CartierModule, e_max: int = MAX_IMAGE_ITERATIONS) -> bool:
    return nilpotence_order(M, e_max) is not None


# -- bounded nilpotent part ----------------------------------------------------


class _FpSpan:
    """Echelonized F_p-span of vectors given as dicts keyed by (comp, mon)."""

    def __init__(self, p: int):
        self.p = p
        self.rows: list[dict] = []
        self.pivots: list = []

    @staticmethod
    def _lead(d: dict):
        return max(d)

    def _reduce(self, d: dict) -> dict:
        d = dict(d)
        for row, piv in zip(self.rows, self.pivots):
            c = d.get(piv)
            if c:
                for t, v in row.items():
                    nv = (d.get(t, 0) - c * v) % self.p
                    if nv:
                        d[t] = nv
                    else:
                        d.pop(t, None)
        return d

    def add(self, d: dict) -> bool:
        """Insert; returns True when the vector was independent."""
        d = self._reduce(d)
        if not d:
            return False
        piv = self._lead(d)
        inv = pow(d[piv], self.p - 2, self.p)
        d = {t: (v * inv) % self.p for t, v in d.items()}
        self.rows.append(d)
        self.pivots.append(piv)
        order = sorted(range(len(self.rows)), key=lambda i: self.pivots[i], reverse=True)
        self.rows = [self.rows[i] for i in order]
        self.pivots = [self.pivots[i] for i in order]
        return True

    def coordinates(self, d: dict) -> list[int] | None:
        """Coordinates in the row basis, or None if outside the span."""
        d = dict(d)
        coords = [0] * len(self.rows)
        for i, (row, piv) in enumerate(zip(self.rows, self.pivots)):
            c = d.get(piv, 0)
            if c:
                coords[i] = c
                for t, v in row.items():
                    nv = (d.get(t, 0) - c * v) % self.p
                    if nv:
                        d[t] = nv
                    else:
                        d.pop(t, None)
        if d:
            return None
        return coords


def _vec_to_flat(v: Vec) -> dict:
    out = {}
    for i, f in enumerate(v):
        for m, c in f.terms.items():
            out[(i, m)] = c
    return out


def _kernel_mod_p(matrix: list[list[int]], p: int, ncols: int) -> list[list[int]]:
    """Kernel basis of the stacked matrix over F_p (columns = unknowns)."""
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    pivot_cols: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivot_cols):
            v[pc] = (-rows[i][fc]) % p
        basis.append(v)
    return basis


def nilpotent_kernel_bounded(M: CartierModule, degree_bound: int) -> tuple[FreeSubmodule, bool]:
    """Span of bounded-degree elements generating nilpotent submodules.

    Sound always; complete (flag True) exactly when the normal-form space of
    M closes up under variable multiplication within the degree bound, i.e.
    when M is finite dimensional over F_p with top degree below the bound.
    """
    ring = M.ring
    p = ring.p
    pres = M.pres
    span = _FpSpan(p)
    basis_vecs: list[Vec] = []
    work = [pres.reduce(w) for w in pres.W.gens]
    complete = True
    guard = 0
    while work:
        guard += 1
        if guard > 4096:
            complete = False
            break
        v = work.pop()
        if vec_is_zero(v):
            continue
        if max(f.total_degree() for f in v) > degree_bound:
            complete = False
            continue
        if span.add(_vec_to_flat(v)):
            basis_vecs.append(v)
            for i in range(ring.n):
                mon = tuple(1 if j == i else 0 for j in range(ring.n))
                work.append(pres.reduce(vec_mul_monomial(v, mon)))

    if not basis_vecs:
        return zero_module(ring, M.rank).add(pres.N), True

    if not complete:
        # fall back to per-vector exact cyclic checks; a sum of nilpotent
        # submodules is nilpotent, so the span returned is still sound
        good: list[Vec] = []
        for v in basis_vecs:
            cyc = FreeSubmodule(ring, M.rank, [v]).add(pres.N)
            sub = CartierModule(QuotientPresentation(cyc, pres.N), M.structure, check=False)
            if _kappa_stable(M.structure, cyc) and is_nilpotent(sub):
                good.append(v)
        return FreeSubmodule(ring, M.rank, good).add(pres.N), False

    # finite-dimensional case: iterate kernels of the digit-translated maps
    digit_mons = ring.digit_monomials(1)
    images: list[list[list[int]]] = []  # per basis vector, per digit, coords
    for v in basis_vecs:
        per_digit = []
        for a in digit_mons:
            img = pres.reduce(M.structure.apply(vec_mul_monomial(v, a)))
            coords = span.coordinates(_vec_to_flat(img))
            if coords is None:
                raise CartierError("kappa image escaped the closed span")
            per_digit.append(coords)
        images.append(per_digit)

    dim = len(basis_vecs)
    # K_1 = common kernel of the digit-translated maps, K_{i+1} = preimage of
    # K_i under all of them; the increasing tower stabilizes at the largest
    # nilpotent part of the finite-dimensional quotient
    k_rows: list[dict] = []
    while True:
        kspan = _FpSpan(p)
        for row in k_rows:
            kspan.add(dict(row))
        constraints: list[list[int]] = []
        for d_idx in range(len(digit_mons)):
            reduced = [kspan._reduce({(0, (i,)): c for i, c in enumerate(images[j][d_idx]) if c})
                       for j in range(dim)]
            for i in range(dim):
                constraints.append([reduced[j].get((0, (i,)), 0) for j in range(dim)])
        kern = _kernel_mod_p(constraints, p, dim)
        newspan = _FpSpan(p)
        for row in kern:
            newspan.add({(0, (i,)): c for i, c in enumerate(row) if c})
        if len(newspan.rows) == len(k_rows):
            break
        k_rows = newspan.rows
    kernel_rows = [[row.get((0, (i,)), 0) for i in range(dim)] for row in k_rows]
    out_vecs: list[Vec] = []
    for row in kernel_rows:
        acc = tuple(ring.zero() for _ in range(M.rank))
        for c, v in zip(row, basis_vecs):
            if c:
                acc = vec_add(acc, tuple(f.scale(c) for f in v))
        if not vec_is_zero(acc):
            out_vecs.append(acc)
    return FreeSubmodule(ring, M.rank, out_vecs).add(pres.N), True


def _kappa_stable(structure: CartierStructure, sub: FreeSubmodule) -> bool:
    return _stability_failure(structure, sub) is None


# -- morphisms ----------------------------------------------------------------


class CartierMorphism:
    """R-linear map R^{r_src} -> R^{r_tgt} given by a matrix, intended to
    intertwine the structures of two modules."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: CartierModule, target: CartierModule,
                 matrix: Sequence[Sequence[Poly]]):
        if source.ring != target.ring:
            raise RingMismatchError("morphism across different rings")
        rows = tuple(tuple(r) for r in matrix)
        if len(rows) != target.rank or any(len(r) != source.rank for r in rows):
            raise RankMismatchError("morphism matrix shape mismatch")
        self.source = source
        self.target = target
        self.matrix = rows

    def apply(self, v: Vec) -> Vec:
        out = []
        for row in self.matrix:
            acc = self.source.ring.zero()
            for entry, comp in zip(row, v):
                if entry.terms and comp.terms:
                    acc = acc + entry * comp
            out.append(acc)
        return tuple(out)

    def columns(self) -> list[Vec]:
        return [tuple(self.matrix[i][j] for i in range(self.target.rank))
                for j in range(self.source.rank)]


def morphism_check(phi: CartierMorphism) -> tuple[bool, str]:
    """Verify phi maps W->W, N->N and intertwines the structures.

    Checking the intertwining on generators times digit monomials suffices
    because both sides are p^{-1}-linear in the scalar argument.
    """
    src, tgt = phi.source, phi.target
    for w in src.pres.W.gens:
        if not tgt.pres.W.contains_vector(phi.apply(w)):
            return False, f"image of numerator generator {_vec_str(w)} escapes"
    for n in src.pres.N.gens:
        if not tgt.pres.N.contains_vector(phi.apply(n)):
            return False, f"image of denominator generator {_vec_str(n)} escapes"
    for w in src.pres.W.gens:
        for a in src.ring.digit_monomials(1):
            va = vec_mul_monomial(w, a)
            lhs = phi.apply(src.structure.apply(va))
            rhs = tgt.structure.apply(phi.apply(va))
            if not tgt.pres.N.contains_vector(vec_sub(lhs, rhs)):
                return False, f"structures do not intertwine on x^{a} * {_vec_str(w)}"
    return True, "ok"


def kernel_presentation(phi: CartierMorphism) -> CartierModule:
    """The kernel {v in W_src : phi(v) in N_tgt} as a Cartier module."""
    src, tgt = phi.source, phi.target
    pre = preimage(src.ring, tgt.rank, phi.columns(), tgt.pres.N)
    K = pre.intersect(src.pres.W).add(src.pres.N)
    return CartierModule(QuotientPresentation(K, src.pres.N), src.structure, check=False)


def cokernel_presentation(phi: CartierMorphism) -> CartierModule:
    tgt = phi.target
    image = FreeSubmodule(tgt.ring, tgt.rank,
                          [phi.apply(w) for w in phi.source.pres.W.gens])
    D = image.add(tgt.pres.N)
    return CartierModule(QuotientPresentation(tgt.pres.W, D), tgt.structure, check=False)


@dataclass(frozen=True)
class NilIsoReport:
    is_morphism: bool
    kernel_nilpotent: bool
    cokernel_nilpotent: bool
    detail: str

    @property
    def is_nil_isomorphism(self) -> bool:
        return self.is_morphism and self.kernel_nilpotent and self.cokernel_nilpotent


def nil_isomorphism_check(phi: CartierMorphism) -> NilIsoReport:
    """Kernel and cokernel nilpotence; both are exact fixed-point verdicts."""
    ok, why = morphism_check(phi)
    if not ok:
        return NilIsoReport(False, False, False, why)
    kern = is_nilpotent(kernel_presentation(phi))
    coker = is_nilpotent(cokernel_presentation(phi))
    return NilIsoReport(True, kern, coker, "ok")


# -- graph embedding -----------------------------------------------------------


def graph_embed(M: CartierModule, f: Poly, var_name: str = "s") -> CartierModule:
    """Push M forward along the graph of f: same module over R[s], s acts
    as f.  The twist picks up the factor (s - f)^{p-1}; reducing s -> f
    recovers the original action on representatives."""
    ring = M.ring
    if f.ring != ring:
        raise RingMismatchError("graph element over wrong ring")
    if var_name in ring.names:
        raise ValueError(f"variable name {var_name!r} already in use")
    ext = ring.extend(var_name)
    s = ext.var(var_name)
    f_ext = f.map_ring(ext)
    W = M.pres.W.map_ring(ext)
    relations = [vec_mul_poly(tuple(c.map_ring(ext) for c in w), s - f_ext)
                 for w in M.pres.W.gens]
    N = M.pres.N.map_ring(ext).add_vectors(relations)
    twist = (s - f_ext) ** (ext.p - 1)
    structure = M.structure.map_ring(ext).twisted(twist)
    return CartierModule(QuotientPresentation(W, N), structure)


def reduce_from_graph(sub: FreeSubmodule, base: Ring, f: Poly, var_name: str = "s") -> FreeSubmodule:
    """Substitute s -> f in every generator and land back in the base ring."""
    idx = sub.ring.names.index(var_name)
    f_ext = f.map_ring(sub.ring)
    gens = []
    for v in sub.gens:
        gens.append(tuple(c.substitute(var_name, f_ext).map_ring(base) for c in v))
    return FreeSubmodule(base, sub.rank, gens)


# -- finite extensions ---------------------------------------------------------


class FiniteExtension:
    """S = P/(g) finite free over the base ring, g monic in the last variable.

    Carries the y-power basis 1, y, .., y^{d-1}, the Frobenius reduction
    rows (y^{jp} mod g), trace values and the discriminant.
    """

    __slots__ = ("P", "base", "g", "yidx", "degree", "frob_rows", "trace_values",
                 "discriminant")

    def __init__(self, P: Ring, g: Poly):
        if g.ring != P:
            raise RingMismatchError("extension polynomial over wrong ring")
        if P.n < 1:
            raise ValueError("extension needs at least one variable")
        yidx = P.n - 1
        d = g.degree_in_var(yidx)
        if d < 1:
            raise ValueError("extension polynomial must involve the last variable")
        lead = g.coeffs_in_var(yidx).get(d)
        if lead is None or not lead.is_one():
            raise ValueError("extension polynomial must be monic in the last variable")
        self.P = P
        self.base = P.drop_last()
        self.g = g
        self.yidx = yidx
        self.degree = d
        self.frob_rows = tuple(self._coords(self.reduce(self.y_power(j * P.p)))
                               for j in range(d))
        traces = [self._trace_reduced(self.reduce(self.y_power(k))) for k in range(2 * d - 1)]
        self.trace_values = tuple(traces[:d])
        self.discriminant = _det([[traces[i + j] for j in range(d)] for i in range(d)])

    def y_power(self, k: int) -> Poly:
        exps = [0] * self.P.n
        exps[self.yidx] = k
        return self.P.monomial(tuple(exps))

    def reduce(self, h: Poly) -> Poly:
        """Normal form with y-degree < d, dividing by the monic g."""
        d = self.degree
        while h.degree_in_var(self.yidx) >= d:
            k = h.degree_in_var(self.yidx)
            coeffs = h.coeffs_in_var(self.yidx)
            lead = coeffs[k]
            h = h - lead * self.y_power(k - d) * self.g
        return h

    def reduce_vec(self, v: Vec) -> Vec:
        return tuple(self.reduce(c) for c in v)

    def _coords(self, h: Poly) -> tuple[Poly, ...]:
        """Coordinates of a y-reduced element in the y-power basis, over base."""
        coeffs = h.coeffs_in_var(self.yidx)
        return tuple(coeffs.get(k, self.P.zero()).map_ring(self.base)
                     for k in range(self.degree))

    def _trace_reduced(self, h: Poly) -> Poly:
        """Trace of multiplication by a y-reduced element."""
        acc = self.base.zero()
        for j in range(self.degree):
            prod = self.reduce(h * self.y_power(j))
            acc = acc + self._coords(prod)[j]
        return acc

    def trace(self, s: Poly) -> Poly:
        """Field trace S -> base ring."""
        return self._trace_reduced(self.reduce(s))

    def split(self, v: Vec) -> Vec:
        """P^r vector (y-reduced) -> base^{d r}, blocks indexed by y-power."""
        r = len(v)
        out: list[Poly] = []
        for j in range(self.degree):
            for i in range(r):
                out.append(self._coords(self.reduce(v[i]))[j])
        return tuple(out)

    def unsplit(self, w: Vec, r: int) -> Vec:
        """Inverse of split: base^{d r} -> P^r."""
        if len(w) != self.degree * r:
            raise RankMismatchError("unsplit length mismatch")
        out = [self.P.zero()] * r
        for j in range(self.degree):
            yj = self.y_power(j)
            for i in range(r):
                out[i] = out[i] + w[j * r + i].map_ring(self.P) * yj
        return tuple(out)

    def quotient_structure(self, u: Poly | None = None) -> CartierStructure:
        """The Cartier structure C_P o g^{p-1} (times an optional base twist)
        on S presented as P/(g); for etale g this is the canonical lift."""
        tw = self.g ** (self.P.p - 1)
        if u is not None:
            tw = tw * u
        return CartierStructure.scalar(self.P, tw)

    def quotient_module(self, u: Poly | None = None) -> CartierModule:
        W = full_module(self.P, 1)
        N = FreeSubmodule.from_polys(self.P, [self.g])
        return CartierModule(QuotientPresentation(W, N), self.quotient_structure(u))

    def __repr__(self):
        return f"<extension {self.P}/({self.g.to_str()}) of degree {self.degree}>"


def _det(matrix: list[list[Poly]]) -> Poly:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    ring = matrix[0][0].ring
    out = ring.zero()
    for j in range(n):
        minor = [[matrix[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = matrix[0][j] * _det(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out


def make_extension(P: Ring, g: Poly) -> FiniteExtension:
    return FiniteExtension(P, g)


def semilinear_structure(ring: Ring, rank: int,
                         action: Callable[[Vec], Vec]) -> CartierStructure:
    """Reconstruct the twist matrix of a p^{-1}-linear action.

    A p^{-1}-linear map psi is psi(v) = C(G v) with
    G = sum_a psi(x^{(p-1)(1,..,1)-a})^p x^a over digit monomials a; the
    result is verified against the action on every digit monomial.
    """
    p = ring.p
    top = tuple(p - 1 for _ in range(ring.n))
    rows: list[list[Poly]] = [[ring.zero() for _ in range(rank)] for _ in range(rank)]
    for j in range(rank):
        for a in ring.digit_monomials(1):
            comp = tuple(t - ai for t, ai in zip(top, a))
            w = action(unit_vector(ring, rank, j, ring.monomial(comp)))
            for i in range(rank):
                rows[i][j] = rows[i][j] + w[i].frobenius_power(1).mul_monomial(a)
    structure = CartierStructure(ring, rank, rows)
    # a map defined only on digit monomials always looks semilinear, so the
    # consistency probes go up to exponent 2p-2 in every variable
    probes = sorted({tuple(ai + bi for ai, bi in zip(a, b))
                     for a in ring.digit_monomials(1)
                     for b in ring.digit_monomials(1)})
    for j in range(rank):
        for mon in probes:
            probe = unit_vector(ring, rank, j, ring.monomial(mon))
            if structure.apply(probe) != tuple(action(probe)):
                raise CartierError("action is not p^{-1}-linear over the ring")
    return structure


def pushforward_finite(ext: FiniteExtension, M: CartierModule) -> CartierModule:
    """View a module over P = base[y] annihilated by g as a module over the
    base ring, rank d*r, with the transported structure."""
    if M.ring != ext.P:
        raise RingMismatchError("module not presented over the extension ring")
    g_full = full_module(ext.P, M.rank).scaled(ext.g)
    if not M.pres.N.contains(g_full):
        raise CartierError("denominator must absorb g times the free module")
    r = M.rank
    d = ext.degree

    def push_sub(sub: FreeSubmodule) -> FreeSubmodule:
        gens = []
        for w in sub.gens:
            for j in range(d):
                yj = ext.y_power(j)
                gens.append(ext.split(tuple(yj * c for c in w)))
        return FreeSubmodule(ext.base, d * r, gens).minimal_gens()

    W = push_sub(M.pres.W)
    N = push_sub(M.pres.N)

    def action(v: Vec) -> Vec:
        return ext.split(ext.reduce_vec(M.structure.apply(ext.unsplit(v, r))))

    structure = semilinear_structure(ext.base, d * r, action)
    return CartierModule(QuotientPresentation(W, N), structure)


def pushforward_submodule(ext: FiniteExtension, sub: FreeSubmodule, r: int) -> FreeSubmodule:
    """Pushforward of a submodule of P^r that absorbs g, as a base submodule."""
    gens = []
    for w in sub.gens:
        for j in range(ext.degree):
            yj = ext.y_power(j)
            gens.append(ext.split(tuple(yj * c for c in w)))
    return FreeSubmodule(ext.base, ext.degree * r, gens).minimal_gens()


def shriek_finite(ext: FiniteExtension, M: CartierModule) -> CartierModule:
    """f^! M = Hom_base(S, M) with (kappa phi)(y^j) = kappa_M(phi(y^{jp} mod g)).

    Presented over the base ring with rank d*r; slot (j, i) holds component
    i of phi(y^j)."""
    if M.ring != ext.base:
        raise RingMismatchError("shriek input must live over the base ring")
    r = M.rank
    d = ext.degree
    rank = d * r
    U = M.structure.U
    rows: list[list[Poly]] = [[ext.base.zero() for _ in range(rank)] for _ in range(rank)]
    for j in range(d):
        for l in range(d):
            c = ext.frob_rows[j][l]
            if c.is_zero():
                continue
            for i in range(r):
                for i2 in range(r):
                    rows[j * r + i][l * r + i2] = rows[j * r + i][l * r + i2] + c * U[i][i2]
    structure = CartierStructure(ext.base, rank, rows)

    def block_sub(sub: FreeSubmodule) -> FreeSubmodule:
        gens = []
        for j in range(d):
            for w in sub.gens:
                v = [ext.base.zero()] * rank
                for i in range(r):
                    v[j * r + i] = w[i]
                gens.append(tuple(v))
        return FreeSubmodule(ext.base, rank, gens)

    W = block_sub(M.pres.W)
    N = block_sub(M.pres.N)
    return CartierModule(QuotientPresentation(W, N), structure)


def evaluation_at_one(ext: FiniteExtension, v: Vec, r: int) -> Vec:
    """Duality trace f_* f^! M -> M: a hom goes to its value at 1, which is
    the first block of the coordinate vector."""
    return tuple(v[:r])


def pullback_etale(ext: FiniteExtension, M: CartierModule) -> CartierModule:
    """M tensored up to S = P/(g), with the g^{p-1}-lifted structure.

    Only full free numerators are supported, which covers structures on the
    ring itself.
    """
    if M.ring != ext.base:
        raise RingMismatchError("pullback input must live over the base ring")
    if not M.is_full_free():
        raise CartierError("pullback implemented for full free modules only")
    r = M.rank
    W = full_module(ext.P, r)
    N = full_module(ext.P, r).scaled(ext.g)
    lift_U = M.structure.map_ring(ext.P)
    structure = lift_U.twisted(ext.g ** (ext.P.p - 1))
    return CartierModule(QuotientPresentation(W, N), structure)


def trace_map(ext: FiniteExtension) -> tuple[Poly, ...]:
    """Trace values Tr(y^j) for j < d; the trace of s is the pairing of
    these with the y-coordinates of s reduced mod g."""
    return ext.trace_values


def trace_kappa_commutes(ext: FiniteExtension, samples: Iterable[Poly],
                         u: Poly | None = None) -> bool:
    """Does Tr o kappa_S = kappa_base o Tr on the given samples?

    kappa_S is the quotient structure (canonical lift when g is etale);
    kappa_base is C o u on the base ring.  Meaningful when the discriminant
    is not identically zero.
    """
    if ext.discriminant.is_zero():
        raise CartierError("extension is nowhere etale; trace comparison is void")
    kS = ext.quotient_structure(u.map_ring(ext.P) if u is not None else None)
    base_u = u if u is not None else ext.base.one()
    for s in samples:
        if s.ring != ext.P:
            raise RingMismatchError("sample over wrong ring")
        lhs = ext.trace(ext.reduce(kS.apply((s,))[0]))
        rhs = cartier_trace(base_u * ext.trace(s), 1)
        if lhs != rhs:
            return False
    return True


def trace_surjective(ext: FiniteExtension) -> bool:
    """Is Tr: S -> base surjective?  True iff the trace values generate the
    unit ideal."""
    from .groebner import ideal as _ideal

    I = _ideal(ext.base, *ext.trace_values)
    return I.contains_vector((ext.base.one(),))


# -- localization ---------------------------------------------------------------


def localize_presentation(M: CartierModule, h: Poly) -> CartierModule:
    """Saturate numerator and denominator at h; the structure is unchanged
    because kappa(h^{-pk} v) = h^{-k} kappa(v) keeps stability."""
    if h.is_zero():
        raise ValueError("cannot localize at zero")
    W = M.pres.W.saturate_element(h)
    N = M.pres.N.saturate_element(h)
    return CartierModule(QuotientPresentation(W, N), M.structure)
