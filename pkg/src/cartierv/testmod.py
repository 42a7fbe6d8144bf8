"""Test-module filtrations tau(M, f^t) for principal pairs.

The value at t is the smallest fixed point of the finite system of
relations walked out by the multiply-by-p orbit of t in (0, 1]:

    tau(s) = kappa(f^m tau(s'))      where  p s = m + s',  s' in (0, 1],
    tau(t + 1) = f tau(t)            for t > 0,

seeded with the first summand kappa(f^{ceil(s p)} c D) at every orbit
point, D being the image-stable part of M.  One sweep of the system turns
the level-e summand of the defining series into the level-(e+1) summand,
so the iteration converges to the exact infinite sum; no stabilization
heuristics are involved.  All exponents handled along the way stay below
p, which keeps everything sparse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cartier_mod import CartierModule, kappa_span, underline
from .errors import (
    CartierError,
    FptDivergenceError,
    NonDegenerateError,
    RingMismatchError,
    StabilizationCapExceededError,
)
from .field_poly import Poly, Ring
from .frobenius import level_cap, scaled_root
from .groebner import FreeSubmodule, full_module, ideal

CONVENTIONS = ("ceil_pe", "ceil_pe_minus_1")
MAX_SWEEPS = 64
MAX_MODULE_SUM_STEPS = 256


@dataclass(frozen=True)
class PairSpec:
    """A module with a ring element and exponent, ready for tau."""

    module: CartierModule
    f: Poly
    t: Fraction
    c: Poly | None = None
    convention: str = "ceil_pe"

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.t < 0:
            raise ValueError("exponent t must be nonnegative")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.f.ring != self.module.ring:
            raise RingMismatchError("f over wrong ring")
        if self.c is not None and self.c.ring != self.module.ring:
            raise RingMismatchError("test element over wrong ring")

    def tau(self, e_cap: int | None = None) -> "TauResult":
        return tau(self.module, self.f, self.t, self.c, self.convention, e_cap)


@dataclass(frozen=True)
class TauResult:
    value: FreeSubmodule
    certified: bool
    stabilized_at_e: int
    path: str


def exponent_at(t: Fraction, p: int, e: int, convention: str = "ceil_pe") -> int:
    scale = p ** e if convention == "ceil_pe" else p ** e - 1
    return max(0, math.ceil(t * scale))


def is_regular_element(M: CartierModule, f: Poly) -> bool:
    """Is multiplication by f injective on W/N?"""
    if f.is_zero():
        return M.pres.is_zero_module()
    bad = M.pres.N.colon_element(f).intersect(M.pres.W)
    return M.pres.N.contains(bad)


def suggest_test_element(M: CartierModule, f: Poly) -> Poly:
    """Default test element u*f for a full free rank-1 module with scalar
    twist u; anything presented as a proper subquotient needs an explicit
    choice, since u*f may vanish on its support."""
    if M.rank != 1 or not M.is_full_free():
        raise NonDegenerateError(
            "no default test element for a subquotient presentation; pass c=")
    c = M.structure.scalar_twist() * f
    if c.is_zero():
        raise NonDegenerateError("u*f vanishes; the pair is degenerate")
    return c


def module_test_submodule(M: CartierModule, c: Poly) -> tuple[FreeSubmodule, int]:
    """tau of the module itself: sum of kappa^e(c W) + N over e >= 1.

    Each summand is kappa of the previous one, so the first repeat of the
    partial sums certifies the limit exactly.
    """
    if c.ring != M.ring:
        raise RingMismatchError("test element over wrong ring")
    return module_test_submodule_from(M, M.pres.W.scaled(c))


def is_F_regular(M: CartierModule, c: Poly | None = None) -> bool:
    """Does the test submodule recover all of M?"""
    if c is None:
        if M.rank != 1 or not M.is_full_free():
            raise NonDegenerateError("pass a test element for subquotient input")
        c = M.structure.scalar_twist()
        if c.is_zero():
            return M.pres.is_zero_module()
    value, _ = module_test_submodule(M, c)
    return value.contains(M.pres.W)


def _orbit(t0: Fraction, p: int) -> tuple[list[Fraction], list[int], int]:
    """Multiply-by-p orbit of t0 in (0, 1]: points, integer shifts, and the
    index the last point loops back to."""
    points: list[Fraction] = []
    shifts: list[int] = []
    seen: dict[Fraction, int] = {}
    s = t0
    while s not in seen:
        seen[s] = len(points)
        points.append(s)
        m = math.ceil(p * s) - 1
        shifts.append(m)
        s = p * s - m
        if len(points) > 4096:
            raise StabilizationCapExceededError("orbit of t did not close")
    return points, shifts, seen[s]


def tau(M: CartierModule, f: Poly, t, c: Poly | None = None,
        convention: str = "ceil_pe", e_cap: int | None = None) -> TauResult:
    """tau(M, f^t), exact.

    The default convention uses exponents ceil(t p^e) and is computed by
    the orbit fixed point; ceil_pe_minus_1 accumulates its own series up
    to the level cap and is certified by agreement with the default.
    """
    spec_t = Fraction(t)
    if spec_t < 0:
        raise ValueError("exponent t must be nonnegative")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if f.ring != M.ring:
        raise RingMismatchError("f over wrong ring")
    if c is None:
        c = suggest_test_element(M, f)
    if c.ring != M.ring:
        raise RingMismatchError("test element over wrong ring")
    if c.is_zero():
        raise NonDegenerateError("zero test element")
    if spec_t > 0 and not is_regular_element(M, f):
        raise NonDegenerateError("f is a zerodivisor on the module")

    p = M.ring.p
    N = M.pres.N
    D, _ = underline(M)
    cD = D.scaled(c)

    if spec_t == 0:
        value, steps = module_test_submodule_from(M, cD)
        return TauResult(value, True, steps, "fixed-sum")

    exact, sweeps = _tau_orbit(M, f, spec_t, cD)
    if not D.contains(exact):
        raise CartierError("tau escaped the image-stable part; test element invalid")

    if convention == "ceil_pe_minus_1":
        cap = level_cap() if e_cap is None else e_cap
        # the smaller exponents need the test element deepened by
        # f^ceil(t), otherwise the series overshoots tau for t > 1
        deep = cD.scaled(f ** math.ceil(spec_t))
        value, stable = _tau_series_capped(M, f, spec_t, deep, convention, cap)
        if value == exact:
            return TauResult(value, True, stable, "series+orbit")
        raise StabilizationCapExceededError(
            f"ceil_pe_minus_1 series not stable within level cap {cap}",
            partial=TauResult(value, False, cap, "series"))

    _root_cross_check(M, f, spec_t, c, exact, e_cap)
    return TauResult(exact, True, sweeps, "orbit")


def module_test_submodule_from(M: CartierModule, cW: FreeSubmodule) -> tuple[FreeSubmodule, int]:
    N = M.pres.N
    term = kappa_span(M.structure, cW)
    acc = N.add(term).minimal_gens()
    for step in range(1, MAX_MODULE_SUM_STEPS):
        term = kappa_span(M.structure, term)
        nxt = acc.add(term).minimal_gens()
        if nxt == acc:
            return acc, step
        acc = nxt
    raise CartierError("module test submodule failed to stabilize")


def _tau_orbit(M: CartierModule, f: Poly, t: Fraction,
               cD: FreeSubmodule) -> tuple[FreeSubmodule, int]:
    p = M.ring.p
    N = M.pres.N
    m0 = math.ceil(t) - 1
    t0 = t - m0
    points, shifts, loop = _orbit(t0, p)
    K = len(points)
    fpow = {m: f ** m for m in set(shifts) | {exponent_at(s, p, 1) for s in points}}
    X: list[FreeSubmodule] = []
    for s in points:
        seed = kappa_span(M.structure, cD.scaled(fpow[exponent_at(s, p, 1)])).add(N)
        X.append(seed.minimal_gens())
    sweeps = 0
    changed = True
    while changed:
        sweeps += 1
        if sweeps > MAX_SWEEPS:
            raise StabilizationCapExceededError("orbit iteration exceeded sweep cap")
        changed = False
        for k in reversed(range(K)):
            nxt = loop if k == K - 1 else k + 1
            incoming = kappa_span(M.structure, X[nxt].scaled(fpow[shifts[k]]))
            upd = X[k].add(incoming).minimal_gens()
            if upd != X[k]:
                X[k] = upd
                changed = True
    value = X[0].scaled(f ** m0).add(N).minimal_gens()
    return value, sweeps


def _tau_series_capped(M: CartierModule, f: Poly, t: Fraction, cD: FreeSubmodule,
                       convention: str, cap: int) -> tuple[FreeSubmodule, int]:
    p = M.ring.p
    acc = M.pres.N
    stable_from = None
    prev = None
    for e in range(1, cap + 1):
        term = _kappa_power_scaled(M, f, exponent_at(t, p, e, convention), e, cD)
        acc = acc.add(term).minimal_gens()
        if prev is not None and acc == prev:
            if stable_from is None:
                stable_from = e - 1
        else:
            stable_from = None
        prev = acc
    return acc, cap if stable_from is None else stable_from


def _kappa_power_scaled(M: CartierModule, f: Poly, b: int, e: int,
                        Z: FreeSubmodule) -> FreeSubmodule:
    """Span of kappa^e(f^b Z), peeling one base-p digit of b per level."""
    p = M.ring.p
    for _ in range(e):
        Z = kappa_span(M.structure, Z.scaled(f ** (b % p)))
        b //= p
    return Z.scaled(f ** b)


def _root_cross_check(M: CartierModule, f: Poly, t: Fraction, c: Poly,
                      exact: FreeSubmodule, e_cap: int | None):
    """For the classical shape, the root-path partial sums must sit inside
    the exact value."""
    if M.rank != 1 or not M.is_full_free():
        return
    u = M.structure.scalar_twist()
    p = M.ring.p
    depth = min(3, level_cap() if e_cap is None else e_cap)
    acc = ideal(M.ring)
    for e in range(1, depth + 1):
        s_e = (p ** e - 1) // (p - 1)
        J = scaled_root(ideal(M.ring, c), e, u=u, A=s_e, f=f,
                        B=exponent_at(t, p, e))
        acc = acc.add(J)
        if not exact.contains(acc):
            raise CartierError("root-path sum escapes the exact tau value")


def verify_test_element(M: CartierModule, f: Poly, t, c: Poly) -> bool:
    """Necessary consistency check: c, c^2 and c*f must give the same tau."""
    base = tau(M, f, t, c).value
    for other in (c * c, c * f):
        if other.is_zero():
            return False
        if tau(M, f, t, other).value != base:
            return False
    return True


def tau_left_limit(M: CartierModule, f: Poly, t, c: Poly | None = None,
                   k_max: int = 8) -> TauResult:
    """Value of tau just below t, found once two refinements agree.

    Jumping numbers have denominators of the form p^k (p - 1), so two
    consecutive agreeing refinements on that ladder pin the left limit.
    """
    spec_t = Fraction(t)
    if spec_t <= 0:
        raise ValueError("left limit needs t > 0")
    p = M.ring.p
    prev = None
    for k in range(1, k_max + 1):
        delta = Fraction(1, p ** k * (p - 1))
        if spec_t - delta < 0:
            continue
        cur = tau(M, f, spec_t - delta, c)
        if prev is not None and cur.value == prev.value:
            return TauResult(cur.value, True, k, "left-limit")
        prev = cur
    raise StabilizationCapExceededError(
        f"left limit at {spec_t} unsettled after {k_max} refinements",
        partial=prev)


@dataclass(frozen=True)
class JumpScan:
    jumps: tuple[Fraction, ...]
    values: tuple[FreeSubmodule, ...]
    baseline: FreeSubmodule
    t_min: Fraction
    t_max: Fraction


def _candidate_grid(p: int, lo: Fraction, hi: Fraction, max_denominator: int,
                    ladder_limit: int | None = None) -> list[Fraction]:
    dens = set(range(1, max_denominator + 1))
    d = p - 1
    for _ in range(level_cap() + 1):
        if ladder_limit is not None and d > ladder_limit:
            break
        dens.add(d)
        d *= p
    out = set()
    for den in dens:
        a_lo = math.floor(lo * den) - 1
        a_hi = math.ceil(hi * den) + 1
        for a in range(max(a_lo, 0), a_hi + 1):
            q = Fraction(a, den)
            if lo <= q <= hi:
                out.add(q)
    return sorted(out)


def jumping_numbers(M: CartierModule, f: Poly, t_min, t_max,
                    max_denominator: int, c: Poly | None = None) -> JumpScan:
    """Jumping numbers of t -> tau(M, f^t) in (t_min, t_max].

    Scans the candidate grid (all denominators up to the bound, plus the
    p^k (p-1) ladder just past it), locates value changes, and confirms
    each jump sits exactly at its candidate via the left limit.  A jump
    falling between grid points is detected by that confirmation and
    raises, so the ladder depth only affects which jumps are found, not
    whether a miss goes unnoticed.  Monotonicity of the scanned values is
    asserted along the way.
    """
    lo, hi = Fraction(t_min), Fraction(t_max)
    if lo < 0 or hi <= lo:
        raise ValueError("need 0 <= t_min < t_max")
    p = M.ring.p
    grid = [q for q in _candidate_grid(p, lo, hi, max_denominator,
                                       ladder_limit=p * max_denominator)
            if q > lo]
    baseline = tau(M, f, lo, c).value
    jumps: list[Fraction] = []
    values: list[FreeSubmodule] = []
    prev = baseline
    for q in grid:
        cur = tau(M, f, q, c).value
        if cur == prev:
            continue
        if not prev.contains(cur):
            raise CartierError(f"tau not monotone at t={q}")
        left = tau_left_limit(M, f, q, c).value
        if left != prev:
            raise CartierError(
                f"jump between grid points below t={q}; raise max_denominator")
        jumps.append(q)
        values.append(cur)
        prev = cur
    return JumpScan(tuple(jumps), tuple(values), baseline, lo, hi)


@dataclass(frozen=True)
class FptResult:
    value: Fraction
    nu_lower: Fraction
    nu_upper: Fraction
    nu_level: int


def nu_interval(ring: Ring, f: Poly, e: int) -> tuple[Fraction, Fraction]:
    """[nu/p^e, (nu+1)/p^e] where nu is the largest r with f^r outside the
    e-th Frobenius power of the maximal ideal; brackets the F-threshold."""
    nu = _nu_value(ring, f, e)
    q = ring.p ** e
    return Fraction(nu, q), Fraction(nu + 1, q)


def _nu_value(ring: Ring, f: Poly, e: int) -> int:
    if f.is_zero():
        raise ValueError("nu needs a nonzero f")
    if f.terms.get(tuple(0 for _ in range(ring.n))) is not None:
        raise NonDegenerateError("nu needs f in the maximal ideal")
    q = ring.p ** e

    def truncate(g: Poly) -> Poly:
        return Poly(ring, {m: coef for m, coef in g.terms.items()
                           if all(x < q for x in m)})

    g = ring.one()
    r = 0
    bound = ring.n * (q - 1) + 1
    while True:
        g = truncate(g * f)
        if g.is_zero():
            return r
        r += 1
        if r > bound:
            raise CartierError("nu computation exceeded the degree bound")


def _default_nu_level(ring: Ring) -> int:
    e = 1
    while ring.p ** ((e + 1) * max(ring.n, 1)) <= 2 ** 14:
        e += 1
    return e


def fpt(ring: Ring, f: Poly, max_denominator: int | None = None,
        e_nu: int | None = None) -> FptResult:
    """F-pure threshold of f: the first jump of t -> tau(R, f^t).

    The candidate scan is restricted to the Frobenius interval
    [nu/p^e, (nu+1)/p^e] and the winner must look like a jump from both
    sides; anything else raises FptDivergenceError instead of guessing.
    """
    if f.ring != ring:
        raise RingMismatchError("f over wrong ring")
    p = ring.p
    if max_denominator is None:
        max_denominator = p * p * (p - 1)
    level = _default_nu_level(ring) if e_nu is None else e_nu
    lo, hi = nu_interval(ring, f, level)
    M = CartierModule.over_ring(ring)
    full = full_module(ring, 1)
    for q in _candidate_grid(p, lo, hi, max_denominator):
        if q == 0:
            continue
        if tau(M, f, q).value != full:
            left = tau_left_limit(M, f, q).value
            if left != full:
                raise FptDivergenceError(
                    f"threshold lies below candidate {q}; grid too coarse")
            return FptResult(q, lo, hi, level)
    raise FptDivergenceError(
        f"no jump found in the Frobenius window [{lo}, {hi}]")
