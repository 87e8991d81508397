"""Bidegree-(p,q) cochains with controlled supports: differentials, the
splitting, R-seminorms, and budgeted law audits.

A cochain assigns a coefficient value to a pair (x, y) where x is a
(p+1)-tuple and y a (q+1)-tuple of points; q = -1 (empty y) is first class.
Sign conventions, chosen so every identity below is exact for all p, q:

  D removes x-coordinates with alternating signs starting at +1;
  d removes y-coordinates with signs (-1)**(i+p), which on the row q = -1
    degenerates to the y-constant extension times (-1)**p (this exact sign
    is what makes Dd + dD = 0 and s(d phi) = phi hold at every p);
  s moves x_0 to the front of the y-tuple with sign (-1)**p.

Seminorms constrain x to the radius-R tuple domain and leave y unrestricted;
audits enumerate exactly within a budget and fall back to seeded uniform
samples, reporting which one happened.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

import numpy as np

from .coefficients import (L1, L1_ZERO, SCALAR, SupportedVector, dirac_diff,
                           entry_gap, pi_sum, scalar_of)
from .space import FiniteMetricSpace, derive_seed, enumerate_tuples

IDENTITY_TOL = 1e-10
EXACT_TOL = 1e-12
NORM_BOUND_TOL = 1e-10
DEFAULT_AUDIT_BUDGET = 20_000
DEFAULT_SAMPLE_SIZE = 10_000


class Cochain:
    """Intensional cochain: a pure evaluation rule plus metadata.

    support_witness, when declared, maps a radius R to an S such that values
    on radius-R tuples are supported within S of every tuple coordinate; it
    stays None when unknown and support_radius() measures it instead.
    """

    __slots__ = ("space", "p", "q", "module", "rule", "support_witness",
                 "name", "_memo")

    def __init__(self, space: FiniteMetricSpace, p: int, q: int, module: str,
                 rule, support_witness=None, name: str = "",
                 memoize: bool = False):
        if p < 0 or q < -1:
            raise ValueError("bidegree must satisfy p >= 0, q >= -1")
        self.space = space
        self.p = p
        self.q = q
        self.module = module
        self.rule = rule
        self.support_witness = support_witness
        self.name = name
        self._memo = {} if memoize else None

    def __call__(self, xs: tuple, ys: tuple = ()) -> SupportedVector:
        memo = self._memo
        if memo is None:
            return self.rule(xs, ys)
        key = (xs, ys)
        got = memo.get(key)
        if got is None:
            got = self.rule(xs, ys)
            memo[key] = got
        return got

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Cochain(p={self.p}, q={self.q}, {self.module}{tag})"


def _compose_witness(wit, bump):
    if wit is None:
        return None
    return lambda r: wit(r) + bump(r)


# -- arithmetic on cochains --------------------------------------------------

def cochain_add(a: Cochain, b: Cochain) -> Cochain:
    if a.space is not b.space or (a.p, a.q) != (b.p, b.q) or a.module != b.module:
        raise ValueError("cochain_add needs matching space, bidegree, module")

    def rule(xs, ys):
        return a(xs, ys) + b(xs, ys)

    wit = None
    if a.support_witness is not None and b.support_witness is not None:
        wit = lambda r: max(a.support_witness(r), b.support_witness(r))
    return Cochain(a.space, a.p, a.q, a.module, rule, support_witness=wit,
                   name=f"({a.name}+{b.name})" if a.name and b.name else "")


def cochain_sub(a: Cochain, b: Cochain) -> Cochain:
    return cochain_add(a, cochain_scale(b, -1.0))


def cochain_scale(a: Cochain, factor: float) -> Cochain:
    def rule(xs, ys):
        return a(xs, ys) * factor

    return Cochain(a.space, a.p, a.q, a.module, rule,
                   support_witness=a.support_witness,
                   name=f"{factor}*{a.name}" if a.name else "")


def constant_one(space: FiniteMetricSpace) -> Cochain:
    one = scalar_of(1.0)
    return Cochain(space, 0, -1, SCALAR, lambda xs, ys: one,
                   support_witness=lambda r: 0.0, name="1")


def push_scalar(phi: Cochain) -> Cochain:
    """Apply the summation map to every value: lands in the scalar module."""
    if phi.module == SCALAR:
        raise ValueError("push_scalar expects an l1-type cochain")

    def rule(xs, ys):
        return scalar_of(pi_sum(phi(xs, ys)))

    return Cochain(phi.space, phi.p, phi.q, SCALAR, rule,
                   support_witness=lambda r: 0.0,
                   name=f"pi({phi.name})" if phi.name else "")


# -- differentials and splitting ----------------------------------------------

def diff_D(phi: Cochain) -> Cochain:
    """Left differential E^{p,q} -> E^{p+1,q}.

    ||D phi||_R <= (p+2) ||phi||_R and a support witness S(R) gets bumped to
    S(R) + R (a removed coordinate sits within R of the survivors).
    """
    base = phi.__call__
    module = phi.module

    def rule(xs, ys):
        ent: dict = {}
        sca = 0.0
        sign = 1.0
        for i in range(len(xs)):
            v = base(xs[:i] + xs[i + 1:], ys)
            if v.entries:
                for k, w in v.entries.items():
                    ent[k] = ent.get(k, 0.0) + sign * w
            else:
                sca += sign * v.scalar
            sign = -sign
        return SupportedVector(module, ent, sca)

    return Cochain(phi.space, phi.p + 1, phi.q, module, rule,
                   support_witness=_compose_witness(phi.support_witness,
                                                    lambda r: r),
                   name=f"D({phi.name})" if phi.name else "")


def diff_d(phi: Cochain) -> Cochain:
    """Right differential E^{p,q} -> E^{p,q+1}, signs (-1)**(i+p)."""
    base = phi.__call__
    module = phi.module
    start = 1.0 if phi.p % 2 == 0 else -1.0

    def rule(xs, ys):
        ent: dict = {}
        sca = 0.0
        sign = start
        for i in range(len(ys)):
            v = base(xs, ys[:i] + ys[i + 1:])
            if v.entries:
                for k, w in v.entries.items():
                    ent[k] = ent.get(k, 0.0) + sign * w
            else:
                sca += sign * v.scalar
            sign = -sign
        return SupportedVector(module, ent, sca)

    return Cochain(phi.space, phi.p, phi.q + 1, module, rule,
                   support_witness=_compose_witness(phi.support_witness,
                                                    lambda r: r),
                   name=f"d({phi.name})" if phi.name else "")


def split_s(phi: Cochain) -> Cochain:
    """Splitting E^{p,q} -> E^{p,q-1}: reuse x_0 as the leading y-coordinate.

    Then ds + sd = id for q >= 0 and s(d phi) = phi on the row q = -1;
    ||s phi||_R <= ||phi||_R. Refuses q = -1 (nothing below the row).
    """
    if phi.q < 0:
        raise ValueError("cannot split below the augmentation row (q = -1)")
    base = phi.__call__
    negate = phi.p % 2 == 1

    def rule(xs, ys):
        v = base(xs, (xs[0],) + ys)
        return -v if negate else v

    return Cochain(phi.space, phi.p, phi.q - 1, phi.module, rule,
                   support_witness=phi.support_witness,
                   name=f"s({phi.name})" if phi.name else "")


# -- audit domains ------------------------------------------------------------

def audit_points(space: FiniteMetricSpace, xlen: int, ylen: int, r: float,
                 budget: int = DEFAULT_AUDIT_BUDGET,
                 sample_size: int = DEFAULT_SAMPLE_SIZE,
                 seed: int = 0):
    """(x, y) evaluation points: x in the radius-r domain, y unrestricted.

    Returns (points, exact). Exhaustive while the joint count fits the
    budget, otherwise a seeded de-duplicated sample of sample_size points.
    """
    n = space.n
    cache_key = ("audit", xlen, ylen, float(r), budget, sample_size, seed)
    cached = space._tuple_cache.get(cache_key)
    if cached is not None:
        return cached
    xdom = enumerate_tuples(space, xlen - 1, r, budget=budget, seed=seed)
    if xdom.exact and len(xdom.tuples) * n ** ylen <= budget:
        ypart = list(product(range(n), repeat=ylen))
        got = [(xs, ys) for xs in xdom.tuples for ys in ypart], True
        space._tuple_cache[cache_key] = got
        return got
    rng = random.Random(derive_seed(seed, "audit-points", xlen, ylen, float(r)))
    picked: set = set()
    want = min(sample_size, budget)
    limit = 60 * want + 1000
    attempts = 0
    if xlen == 1:
        while len(picked) < want and attempts < limit:
            attempts += 1
            xs = (rng.randrange(n),)
            ys = tuple(rng.randrange(n) for _ in range(ylen))
            picked.add((xs, ys))
        got = sorted(picked), False
        space._tuple_cache[cache_key] = got
        return got
    balls = space.balls_list(r)
    weights = np.cumsum([float(len(b)) ** (xlen - 1) for b in balls])
    total = float(weights[-1])
    while len(picked) < want and attempts < limit:
        attempts += 1
        v0 = int(np.searchsorted(weights, rng.random() * total, side="right"))
        if v0 >= n:
            v0 = n - 1
        ball = balls[v0]
        coords = [v0]
        ok = True
        for _ in range(xlen - 1):
            u = ball[rng.randrange(len(ball))]
            for c in coords[1:]:
                if not space.within(u, c, r):
                    ok = False
                    break
            if not ok:
                break
            coords.append(u)
        if not ok:
            continue
        ys = tuple(rng.randrange(n) for _ in range(ylen))
        picked.add((tuple(coords), ys))
    got = sorted(picked), False
    space._tuple_cache[cache_key] = got
    return got


def _witness_json(witness):
    if witness is None:
        return None
    xs, ys = witness
    return [list(xs), list(ys)]


# -- seminorms -----------------------------------------------------------------

@dataclass
class SeminormReport:
    """sup over audited tuples of the value norm; a lower bound if sampled."""
    r: float
    value: float
    exact: bool
    witness: tuple | None
    samples: int | None

    def to_json(self) -> dict:
        return {"check": "seminorm", "R": self.r, "value": self.value,
                "exact": self.exact, "witness": _witness_json(self.witness),
                "samples": self.samples}


def seminorm(phi: Cochain, r: float, budget: int = DEFAULT_AUDIT_BUDGET,
             sample_size: int = DEFAULT_SAMPLE_SIZE, seed: int = 0,
             include=()) -> SeminormReport:
    """R-seminorm of phi; `include` forces extra (xs, ys) points into the
    audit so coupled bound checks stay sound under sampling."""
    points, exact = audit_points(phi.space, phi.p + 1, phi.q + 1, r,
                                 budget=budget, sample_size=sample_size,
                                 seed=seed)
    best = 0.0
    witness = None
    for xs, ys in points:
        val = phi(xs, ys).norm
        if val > best:
            best = val
            witness = (xs, ys)
    for xs, ys in include:
        val = phi(xs, ys).norm
        if val > best:
            best = val
            witness = (xs, ys)
    report = SeminormReport(float(r), best, exact, witness,
                            None if exact else len(points) + len(tuple(include)))
    return report


@dataclass
class SupportRadiusReport:
    """Least S covering every measured support on the joint radius-r domain."""
    r: float
    s: float
    witness: tuple | None
    exact: bool
    samples: int | None
    within_witness: bool | None = None

    def to_json(self) -> dict:
        return {"check": "support_radius", "R": self.r, "value": self.s,
                "exact": self.exact, "witness": _witness_json(self.witness),
                "samples": self.samples, "within_witness": self.within_witness}


def support_radius(phi: Cochain, r: float, budget: int = DEFAULT_AUDIT_BUDGET,
                   seed: int = 0) -> SupportRadiusReport:
    """Measured controlled-support radius over the joint radius-r domain.

    Tuples (x, y) here have all p+q+2 coordinates pairwise within r (the
    joint domain, unlike seminorms); S is the largest distance from a value's
    support to any tuple coordinate. Large S is data, not failure.
    """
    space = phi.space
    degree = phi.p + phi.q + 1
    dom = enumerate_tuples(space, degree, r, budget=budget, seed=seed)
    cut = phi.p + 1
    worst = 0.0
    witness = None
    for t in dom.tuples:
        xs, ys = t[:cut], t[cut:]
        supp = phi(xs, ys).entries
        if not supp:
            continue
        for c in t:
            for w in supp:
                dcw = space.d(c, w)
                if dcw > worst:
                    worst = dcw
                    witness = (xs, ys)
    within = None
    if phi.support_witness is not None:
        slack = 0.0 if space.integer_metric else 1e-12
        within = worst <= phi.support_witness(float(r)) + slack
    return SupportRadiusReport(float(r), worst, witness, dom.exact,
                               None if dom.exact else len(dom.tuples), within)


# -- identity audits ------------------------------------------------------------

@dataclass
class AuditReport:
    check: str
    p: int
    q: int
    r: float
    max_violation: float
    exact: bool
    witness: tuple | None
    samples: int | None

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.tol

    tol: float = IDENTITY_TOL

    def to_json(self) -> dict:
        return {"check": self.check, "p": self.p, "q": self.q, "R": self.r,
                "max_violation": self.max_violation, "exact": self.exact,
                "witness": _witness_json(self.witness),
                "samples": self.samples, "tol": self.tol,
                "ok": self.ok}


def audit_equal(check: str, lhs: Cochain, rhs: Cochain | None, r: float,
                budget: int = DEFAULT_AUDIT_BUDGET,
                sample_size: int = DEFAULT_SAMPLE_SIZE, seed: int = 0,
                tol: float = IDENTITY_TOL) -> AuditReport:
    """Pointwise comparison of two cochains (rhs None = zero) over the
    budgeted audit domain of lhs; records the worst per-entry gap."""
    if rhs is not None and (lhs.p, lhs.q, lhs.module) != (rhs.p, rhs.q, rhs.module):
        raise ValueError("audit_equal needs matching bidegree and module")
    points, exact = audit_points(lhs.space, lhs.p + 1, lhs.q + 1, r,
                                 budget=budget, sample_size=sample_size,
                                 seed=seed)
    worst = 0.0
    witness = None
    if rhs is None:
        for xs, ys in points:
            gap = entry_gap(lhs(xs, ys))
            if gap > worst:
                worst = gap
                witness = (xs, ys)
    else:
        for xs, ys in points:
            gap = entry_gap(lhs(xs, ys), rhs(xs, ys))
            if gap > worst:
                worst = gap
                witness = (xs, ys)
    return AuditReport(check, lhs.p, lhs.q, float(r), worst, exact, witness,
                       None if exact else len(points), tol)


def audit_zero(check: str, lhs: Cochain, r: float, **kw) -> AuditReport:
    return audit_equal(check, lhs, None, r, **kw)


# -- operator norm bounds ---------------------------------------------------------

@dataclass
class BoundReport:
    """Audited ||result||_R <= factor * ||base|| with coupled base points.

    rhs is the sup of ||base|| over exactly the points the triangle
    inequality needs for each audited result point, so a sampled audit can
    never produce a spurious violation.
    """
    check: str
    r: float
    lhs: float
    rhs: float
    factor: float
    exact: bool
    witness: tuple | None
    samples: int | None
    tol: float = NORM_BOUND_TOL

    @property
    def ok(self) -> bool:
        return self.lhs <= self.factor * self.rhs + self.tol

    def to_json(self) -> dict:
        return {"check": self.check, "R": self.r, "value": self.lhs,
                "bound": self.factor * self.rhs, "factor": self.factor,
                "exact": self.exact, "witness": _witness_json(self.witness),
                "samples": self.samples, "ok": self.ok}


def _audit_bound(check: str, result: Cochain, base: Cochain, couple,
                 factor: float, r: float, budget: int, sample_size: int,
                 seed: int) -> BoundReport:
    points, exact = audit_points(result.space, result.p + 1, result.q + 1, r,
                                 budget=budget, sample_size=sample_size,
                                 seed=seed)
    lhs = 0.0
    rhs = 0.0
    witness = None
    for xs, ys in points:
        val = result(xs, ys).norm
        if val > lhs:
            lhs = val
            witness = (xs, ys)
        for bxs, bys in couple(xs, ys):
            bval = base(bxs, bys).norm
            if bval > rhs:
                rhs = bval
    return BoundReport(check, float(r), lhs, rhs, factor, exact, witness,
                       None if exact else len(points))


def diff_D_norm_audit(phi: Cochain, r: float, budget: int = DEFAULT_AUDIT_BUDGET,
                      sample_size: int = DEFAULT_SAMPLE_SIZE,
                      seed: int = 0) -> BoundReport:
    """||D phi||_R <= (p+2) ||phi||_R."""
    def couple(xs, ys):
        return [(xs[:i] + xs[i + 1:], ys) for i in range(len(xs))]

    return _audit_bound("norm_bound_D", diff_D(phi), phi, couple,
                        float(phi.p + 2), r, budget, sample_size, seed)


def diff_d_norm_audit(phi: Cochain, r: float, budget: int = DEFAULT_AUDIT_BUDGET,
                      sample_size: int = DEFAULT_SAMPLE_SIZE,
                      seed: int = 0) -> BoundReport:
    """||d phi||_R <= (q+2) ||phi||_R."""
    def couple(xs, ys):
        return [(xs, ys[:i] + ys[i + 1:]) for i in range(len(ys))]

    return _audit_bound("norm_bound_d", diff_d(phi), phi, couple,
                        float(phi.q + 2), r, budget, sample_size, seed)


def split_s_norm_audit(phi: Cochain, r: float, budget: int = DEFAULT_AUDIT_BUDGET,
                       sample_size: int = DEFAULT_SAMPLE_SIZE,
                       seed: int = 0) -> BoundReport:
    """||s phi||_R <= ||phi||_R (the splitting never grows norms)."""
    def couple(xs, ys):
        return [(xs, (xs[0],) + ys)]

    return _audit_bound("norm_bound_s", split_s(phi), phi, couple,
                        1.0, r, budget, sample_size, seed)


# -- Johnson cocycles --------------------------------------------------------------

def johnson_cocycles(space: FiniteMetricSpace, audit: bool = True,
                     budget: int = 800, seed: int = 0):
    """The three basic zero-sum cochains on a space with >= 2 points.

    j01(x,(y0,y1)) = delta_y1 - delta_y0   (D-flat and d-flat),
    j10((x0,x1),(y)) = delta_x1 - delta_x0,
    hom(x,(y)) = delta_y - delta_x   with  D hom = -j10  and  d hom = j01.

    The two identities (and flatness of j01) are audited on a budgeted domain
    unless audit=False.
    """
    if space.n < 2:
        raise ValueError("Johnson cocycles need at least two points")
    wit = lambda r: r
    j01 = Cochain(space, 0, 1, L1_ZERO,
                  lambda xs, ys: dirac_diff(ys[1], ys[0]),
                  support_witness=wit, name="j01")
    j10 = Cochain(space, 1, 0, L1_ZERO,
                  lambda xs, ys: dirac_diff(xs[1], xs[0]),
                  support_witness=wit, name="j10")
    hom = Cochain(space, 0, 0, L1_ZERO,
                  lambda xs, ys: dirac_diff(ys[0], xs[0]),
                  support_witness=wit, name="hom")
    if audit:
        r = 1.0
        checks = [
            audit_zero("D(j01)=0", diff_D(j01), r, budget=budget, seed=seed,
                       tol=EXACT_TOL),
            audit_zero("d(j01)=0", diff_d(j01), r, budget=budget, seed=seed,
                       tol=EXACT_TOL),
            audit_equal("D(hom)=-j10", diff_D(hom), cochain_scale(j10, -1.0),
                        r, budget=budget, seed=seed, tol=EXACT_TOL),
            audit_equal("d(hom)=j01", diff_d(hom), j01, r, budget=budget,
                        seed=seed, tol=EXACT_TOL),
        ]
        bad = [c for c in checks if not c.ok]
        if bad:
            raise AssertionError(f"Johnson identities failed: {bad[0]}")
    return j01, j10, hom
