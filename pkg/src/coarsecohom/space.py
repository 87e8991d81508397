"""Finite metric spaces and the bounded-diameter tuple sets they carry.

Everything downstream (seminorms, support audits, variation profiles) is a
supremum over tuples whose coordinates sit pairwise within some radius R.
This module owns the spaces themselves, the graph families used as test
beds, and exact-or-sampled enumeration of those tuple sets.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

REAL_METRIC_SLACK = 1e-12
TRIANGLE_SCAN_LIMIT = 256
DEFAULT_TUPLE_BUDGET = 20_000

_FREE_GEN_NAMES = "abcdefghijklmnopqrstuvwxyz"


def derive_seed(*parts) -> int:
    """Stable 64-bit sub-seed from a master seed plus context tags."""
    blob = repr(parts).encode()
    return int.from_bytes(hashlib.blake2b(blob, digest_size=8).digest(), "big")


class FiniteMetricSpace:
    """Points 0..n-1 with a symmetric distance matrix.

    Graph families carry exact integer hop distances and radius comparisons
    are exact; real-valued metrics get a 1e-12 slack when compared against a
    radius. Instances are treated as immutable after construction.
    """

    def __init__(self, dist, labels=None, integer_metric=None, meta=None,
                 validate=True):
        dist = np.asarray(dist)
        if integer_metric is None:
            integer_metric = np.issubdtype(dist.dtype, np.integer)
        self.dist = dist.astype(np.int64) if integer_metric else dist.astype(float)
        self.integer_metric = bool(integer_metric)
        self.n = int(dist.shape[0])
        self.labels = list(labels) if labels is not None else None
        self.meta = dict(meta) if meta else {"kind": "custom", "params": {}, "seed": 0}
        self._ball_lists: dict[float, list[tuple[int, ...]]] = {}
        self._ball_sets: dict[float, list[frozenset]] = {}
        self._dist_rows: list | None = None
        self._tuple_cache: dict[tuple, "TupleDomain"] = {}
        if validate:
            self.validate()

    # -- invariants ---------------------------------------------------------

    def validate(self) -> None:
        d = self.dist
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if self.n < 1:
            raise ValueError("space needs at least one point")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels length does not match point count")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diagonal(d) != 0):
            raise ValueError("diagonal distances must be zero")
        off = d[~np.eye(self.n, dtype=bool)]
        if off.size and np.any(off <= 0):
            raise ValueError("off-diagonal distances must be positive")
        if not self.integer_metric and not np.all(np.isfinite(d)):
            raise ValueError("distances must be finite")
        if self.n <= TRIANGLE_SCAN_LIMIT:
            # full triple scan, vectorized one intermediate point at a time
            slack = 0 if self.integer_metric else REAL_METRIC_SLACK
            for k in range(self.n):
                through = d[:, k, None] + d[None, k, :]
                if np.any(d > through + slack):
                    i, j = np.argwhere(d > through + slack)[0]
                    raise ValueError(
                        f"triangle inequality fails: d({i},{j}) > "
                        f"d({i},{k}) + d({k},{j})")

    # -- basic queries ------------------------------------------------------

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def d(self, i: int, j: int) -> float:
        if self._dist_rows is None:
            self._dist_rows = self.dist.tolist()
        return self._dist_rows[i][j]

    def within(self, i: int, j: int, r: float) -> bool:
        slack = 0.0 if self.integer_metric else REAL_METRIC_SLACK
        return self.d(i, j) <= r + slack

    def diameter(self) -> float:
        return float(self.dist.max())

    def eccentricity(self, i: int) -> float:
        return float(self.dist[i].max())

    def min_positive_distance(self) -> float:
        if self.n < 2:
            raise ValueError("no positive distances on a single point")
        off = self.dist[~np.eye(self.n, dtype=bool)]
        return float(off.min())

    def balls_list(self, r: float) -> list[tuple[int, ...]]:
        """Sorted closed-ball membership per point, cached per radius."""
        key = float(r)
        got = self._ball_lists.get(key)
        if got is None:
            slack = 0.0 if self.integer_metric else REAL_METRIC_SLACK
            mask = self.dist <= r + slack
            # tolist() so ball members are Python ints end to end (hash
            # stability and JSON witnesses both rely on that)
            got = [tuple(np.flatnonzero(mask[i]).tolist())
                   for i in range(self.n)]
            self._ball_lists[key] = got
        return got

    def ball_sets(self, r: float) -> list[frozenset]:
        key = float(r)
        got = self._ball_sets.get(key)
        if got is None:
            got = [frozenset(b) for b in self.balls_list(r)]
            self._ball_sets[key] = got
        return got

    def ball(self, i: int, r: float) -> tuple[int, ...]:
        return self.balls_list(r)[i]

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "version": 1,
            "kind": self.meta.get("kind", "custom"),
            "params": self.meta.get("params", {}),
            "seed": self.meta.get("seed", 0),
            "n": self.n,
        }
        if self.labels is not None:
            out["labels"] = list(self.labels)
        if "edges" in self.meta:
            out["edges"] = [list(e) for e in self.meta["edges"]]
        else:
            out["dist"] = self.dist.tolist()
        for extra in ("retries",):
            if extra in self.meta:
                out[extra] = self.meta[extra]
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_json(cls, payload: dict) -> "FiniteMetricSpace":
        n = payload["n"]
        labels = payload.get("labels")
        meta = {
            "kind": payload.get("kind", "custom"),
            "params": payload.get("params", {}),
            "seed": payload.get("seed", 0),
        }
        if "retries" in payload:
            meta["retries"] = payload["retries"]
        if "edges" in payload:
            edges = [tuple(e) for e in payload["edges"]]
            meta["edges"] = sorted(edges)
            return build_graph_metric(edges, n, labels=labels, meta=meta)
        return cls(np.asarray(payload["dist"]), labels=labels, meta=meta)

    def __repr__(self) -> str:
        kind = self.meta.get("kind", "custom")
        return f"FiniteMetricSpace(n={self.n}, kind={kind!r})"


def scaled_metric(space: FiniteMetricSpace, factor: float) -> FiniteMetricSpace:
    """Same point set with every distance multiplied by factor > 0."""
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    dist = space.dist * factor
    integer = space.integer_metric and float(factor).is_integer()
    meta = {"kind": "scaled", "params": {"factor": factor,
                                         "base": space.meta.get("kind")},
            "seed": space.meta.get("seed", 0)}
    return FiniteMetricSpace(dist if integer else dist.astype(float),
                             labels=space.labels, integer_metric=integer,
                             meta=meta)


# -- graph construction -----------------------------------------------------

def build_graph_metric(edges, n: int, labels=None, meta=None) -> FiniteMetricSpace:
    """Hop metric of an undirected graph via all-pairs BFS.

    Raises on vertex indices out of range, self-loops, or a disconnected
    graph (the error names two mutually unreachable vertices).
    """
    adj: list[list[int]] = [[] for _ in range(n)]
    seen = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u} is not allowed")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            continue
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = row[u]
            for w in adj[u]:
                if row[w] < 0:
                    row[w] = du + 1
                    queue.append(w)
        if np.any(row < 0):
            far = int(np.flatnonzero(row < 0)[0])
            raise ValueError(
                f"graph is disconnected: vertex {far} is unreachable "
                f"from vertex {src}")
    meta = dict(meta) if meta else {"kind": "graph", "params": {"n": n}, "seed": 0}
    meta.setdefault("edges", sorted(seen))
    return FiniteMetricSpace(dist, labels=labels, integer_metric=True, meta=meta)


def load_edge_list(text: str, n: int | None = None) -> FiniteMetricSpace:
    """Parse 'u v' per line (0-based); n defaults to max index + 1."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if not edges:
        raise ValueError("edge list is empty")
    if n is None:
        n = max(max(e) for e in edges) + 1
    return build_graph_metric(edges, n)


def _cycle_edges(m: int):
    if m < 3:
        raise ValueError("cycle needs size >= 3")
    return [(i, (i + 1) % m) for i in range(m)], m, None


def _path_edges(m: int):
    if m < 1:
        raise ValueError("path needs size >= 1")
    return [(i, i + 1) for i in range(m - 1)], m, None


def _complete_edges(m: int):
    if m < 1:
        raise ValueError("complete graph needs n >= 1")
    return [(i, j) for i, j in combinations(range(m), 2)], m, None


def _torus_edges(dim: int, size: int):
    if dim < 1:
        raise ValueError("torus needs dim >= 1")
    if size < 3:
        raise ValueError("torus needs size >= 3 per axis")
    verts = list(product(range(size), repeat=dim))
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for v in verts:
        for axis in range(dim):
            w = list(v)
            w[axis] = (w[axis] + 1) % size
            edges.append((index[v], index[tuple(w)]))
    labels = ["(" + ",".join(map(str, v)) + ")" for v in verts]
    return edges, len(verts), labels


def _free_ball_edges(rank: int, radius: int):
    """Ball of given radius in the Cayley graph of the free group.

    Words are tuples of nonzero ints, letter i+1 for generator i and its
    negative for the inverse; geodesics between ball elements stay in the
    ball, so the induced hop metric is the word metric.
    """
    if rank < 1 or rank > len(_FREE_GEN_NAMES):
        raise ValueError("free_ball rank out of range")
    if radius < 0:
        raise ValueError("free_ball radius must be >= 0")
    letters = [i + 1 for i in range(rank)] + [-(i + 1) for i in range(rank)]
    words = [()]
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        words.extend(nxt)
        frontier = nxt
    index = {w: i for i, w in enumerate(words)}
    edges = []
    for w in words:
        for a in letters:
            u = w[:-1] if (w and w[-1] == -a) else w + (a,)
            j = index.get(u)
            if j is not None and index[w] < j:
                edges.append((index[w], j))

    def name(w):
        if not w:
            return "e"
        return "".join(_FREE_GEN_NAMES[a - 1] if a > 0
                       else _FREE_GEN_NAMES[-a - 1].upper() for a in w)

    return edges, len(words), [name(w) for w in words]


def _random_regular_edges(n: int, k: int, seed: int, max_attempts: int = 10_000):
    """Seeded pairing model, rejecting multigraphs and disconnected draws."""
    if n < 1 or k < 1 or k >= n:
        raise ValueError("random_regular needs 1 <= k < n")
    if (n * k) % 2 != 0:
        raise ValueError(f"random_regular infeasible: n*k = {n * k} is odd")
    rng = random.Random(derive_seed(seed, "random_regular", n, k))
    stubs = [v for v in range(n) for _ in range(k)]
    for attempt in range(max_attempts):
        rng.shuffle(stubs)
        seen = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            key = (u, v) if u < v else (v, u)
            if u == v or key in seen:
                ok = False
                break
            seen.add(key)
        if not ok:
            continue
        # connectivity check before accepting the draw
        adj = [[] for _ in range(n)]
        for u, v in seen:
            adj[u].append(v)
            adj[v].append(u)
        reach = [False] * n
        reach[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not reach[w]:
                    reach[w] = True
                    count += 1
                    queue.append(w)
        if count == n:
            return sorted(seen), n, None, attempt
    raise ValueError(f"random_regular gave up after {max_attempts} attempts")


def generate_family(kind: str, params: dict, seed: int = 0) -> FiniteMetricSpace:
    """Deterministic test-family constructor.

    kind in {cycle, path, complete, torus, free_ball, random_regular};
    identical (kind, params, seed) always serializes byte-for-byte equal.
    """
    kind = kind.lower()
    extra: dict = {}
    if kind == "cycle":
        edges, n, labels = _cycle_edges(int(params["size"]))
    elif kind == "path":
        edges, n, labels = _path_edges(int(params["size"]))
    elif kind == "complete":
        edges, n, labels = _complete_edges(int(params.get("n", params.get("size", 0))))
    elif kind == "torus":
        edges, n, labels = _torus_edges(int(params.get("dim", 2)), int(params["size"]))
    elif kind == "free_ball":
        edges, n, labels = _free_ball_edges(int(params["rank"]), int(params["radius"]))
    elif kind == "random_regular":
        edges, n, labels, retries = _random_regular_edges(
            int(params["n"]), int(params["k"]), seed)
        extra["retries"] = retries
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    canon = {key: int(val) for key, val in params.items()}
    meta = {"kind": kind, "params": canon, "seed": seed,
            "edges": sorted((min(e), max(e)) for e in edges), **extra}
    return build_graph_metric(edges, n, labels=labels, meta=meta)


# -- tuple domains ----------------------------------------------------------

@dataclass
class TupleDomain:
    """Ordered (p+1)-tuples with all pairwise distances <= r.

    `tuples` is either the full domain (exact=True, lexicographic order) or a
    de-duplicated uniform sample of size <= budget (exact=False); `attempts`
    records the rejection-sampler proposals in the sampled case.
    """
    space: FiniteMetricSpace
    p: int
    r: float
    tuples: list = field(repr=False)
    exact: bool = True
    attempts: int = 0

    def __len__(self) -> int:
        return len(self.tuples)

    def check_invariants(self) -> None:
        assert len(set(self.tuples)) == len(self.tuples), "duplicate tuples"
        for t in self.tuples:
            assert len(t) == self.p + 1
            for a in t:
                for b in t:
                    assert self.space.within(a, b, self.r), (t, a, b)


class _BudgetExceeded(Exception):
    pass


def _enumerate_exact(space: FiniteMetricSpace, p: int, r: float, budget: int):
    n = space.n
    if p == 0:
        return [(i,) for i in range(n)] if n <= budget else None
    balls = space.balls_list(r)
    ball_sets = space.ball_sets(r)
    out: list[tuple[int, ...]] = []

    def extend(prefix: tuple, cands):
        if len(prefix) == p + 1:
            out.append(prefix)
            if len(out) > budget:
                raise _BudgetExceeded
            return
        for u in cands:
            bu = ball_sets[u]
            extend(prefix + (u,), [w for w in cands if w in bu])

    try:
        for v0 in range(n):
            extend((v0,), list(balls[v0]))
    except _BudgetExceeded:
        return None
    return out


def sample_tuples(space: FiniteMetricSpace, p: int, r: float, count: int,
                  seed: int, tag: str = "tuple-sample"):
    """Uniform seeded sample of distinct tuples from the radius-r domain.

    First coordinate drawn with weight |B_r(x0)|^p, the rest uniformly from
    B_r(x0), rejecting inadmissible proposals: conditional on acceptance the
    draw is uniform over the whole domain.
    """
    rng = random.Random(derive_seed(seed, tag, p, float(r)))
    n = space.n
    if p == 0:
        picked_set: set = set()
        attempts = 0
        while len(picked_set) < min(count, n) and attempts < 60 * count + 1000:
            attempts += 1
            picked_set.add((rng.randrange(n),))
        return sorted(picked_set), attempts
    balls = space.balls_list(r)
    weights = [float(len(b)) ** p for b in balls]
    cum = np.cumsum(weights)
    total = float(cum[-1])
    picked: set = set()
    attempts = 0
    limit = 60 * count + 1000
    while len(picked) < count and attempts < limit:
        attempts += 1
        v0 = int(np.searchsorted(cum, rng.random() * total, side="right"))
        if v0 >= n:
            v0 = n - 1
        ball = balls[v0]
        coords = [v0]
        ok = True
        for _ in range(p):
            u = ball[rng.randrange(len(ball))]
            for c in coords[1:]:
                if not space.within(u, c, r):
                    ok = False
                    break
            if not ok:
                break
            coords.append(u)
        if ok:
            picked.add(tuple(coords))
    return sorted(picked), attempts


def enumerate_tuples(space: FiniteMetricSpace, p: int, r: float,
                     budget: int = DEFAULT_TUPLE_BUDGET,
                     seed: int = 0) -> TupleDomain:
    """Exact domain when it fits the budget, else a seeded uniform sample."""
    if p < 0:
        raise ValueError("tuple degree must be >= 0")
    key = (p, float(r), budget, seed)
    cached = space._tuple_cache.get(key)
    if cached is not None:
        return cached
    exact = _enumerate_exact(space, p, r, budget)
    if exact is not None:
        dom = TupleDomain(space, p, float(r), exact, exact=True)
    else:
        sampled, attempts = sample_tuples(space, p, r, budget, seed)
        dom = TupleDomain(space, p, float(r), sampled, exact=False,
                          attempts=attempts)
    space._tuple_cache[key] = dom
    return dom
