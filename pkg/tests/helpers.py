"""Reference implementations the tests compare the package against.

Everything here recomputes values straight from definitions, in a
deliberately different style from the package (plain dicts, itertools
filtering, Fraction arithmetic), so agreement is evidence, not tautology.
"""

from fractions import Fraction
from itertools import product


def cycle_dist(m, i, j):
    k = abs(i - j)
    return min(k, m - k)


def torus_dist(size, dim, a, b):
    # a, b are flat indices; the last axis varies fastest
    total = 0
    for _ in range(dim):
        total += cycle_dist(size, a % size, b % size)
        a //= size
        b //= size
    return total


def vec_dict(v):
    """SupportedVector -> plain dict; scalars keyed under 'scalar'."""
    if v.module == "scalar":
        return {"scalar": v.scalar} if v.scalar != 0.0 else {}
    return dict(v.entries)


def dict_add(acc, d, sign):
    for k, w in d.items():
        acc[k] = acc.get(k, 0.0) + sign * w


def dict_gap(a, b):
    worst = 0.0
    for k in set(a) | set(b):
        worst = max(worst, abs(a.get(k, 0.0) - b.get(k, 0.0)))
    return worst


def dict_norm(d):
    return sum(abs(w) for w in d.values())


def ref_diff_D(phi, xs, ys):
    """Alternating sum over dropped x-coordinates, signs +,-,+,..."""
    out = {}
    for i in range(len(xs)):
        dropped = xs[:i] + xs[i + 1:]
        dict_add(out, phi(dropped, ys), (-1) ** i)
    return out


def ref_diff_d(phi, p, xs, ys):
    """Alternating sum over dropped y-coordinates, signs (-1)**(i+p)."""
    out = {}
    for i in range(len(ys)):
        dropped = ys[:i] + ys[i + 1:]
        dict_add(out, phi(xs, dropped), (-1) ** (i + p))
    return out


def ref_split_s(phi, p, xs, ys):
    out = {}
    dict_add(out, phi(xs, (xs[0],) + ys), (-1) ** p)
    return out


def brute_tuples(space, p, r):
    """All (p+1)-tuples with pairwise distances <= r, by full product scan."""
    pts = range(space.n)
    out = []
    for t in product(pts, repeat=p + 1):
        if all(space.d(a, b) <= r for a in t for b in t):
            out.append(t)
    return out


def frac_ball_nu(space, s, r):
    """Exact rational ball-averaging variation nu(s, r)."""
    balls = [set(space.ball(i, s)) for i in range(space.n)]
    best = Fraction(0)
    for i in range(space.n):
        for j in range(i + 1, space.n):
            if space.d(i, j) > r:
                continue
            bi, bj = balls[i], balls[j]
            wi, wj = Fraction(1, len(bi)), Fraction(1, len(bj))
            tot = Fraction(0)
            for z in bi | bj:
                tot += abs((wi if z in bi else 0) - (wj if z in bj else 0))
            if tot > best:
                best = tot
    return best
