"""r-uniform hypergraph densities, strict balance, threshold families, the
blow-up lower-bound construction, the random dense-member sampler, and the
greedy oscillation sequence builder.

All density comparisons are exact rationals; the parametric max-flow
check clears denominators so capacities stay integral.  Randomized paths
take explicit seeds and are reproducible.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import (
    BudgetExceeded,
    EmptyVertexSet,
    EstimatorFailed,
    InfeasibleDensity,
    SampleBudgetExceeded,
    SearchBudgetExceeded,
    TooSmall,
)

BRUTE_CROSSCHECK_LIMIT = 14
SUBSET_BUDGET = 2_000_000


@dataclass(frozen=True)
class Hypergraph:
    """r-uniform hypergraph on vertex set [v]."""

    r: int
    v: int
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("uniformity must be >= 2")
        for e in self.edges:
            if len(e) != self.r:
                raise ValueError(f"edge {sorted(e)} is not an {self.r}-set")
            if any(x < 1 or x > self.v for x in e):
                raise ValueError(f"edge {sorted(e)} leaves [{self.v}]")

    @property
    def e(self) -> int:
        return len(self.edges)

    def induced(self, vertices: Iterable[int]) -> "Hypergraph":
        keep = frozenset(vertices)
        sub = frozenset(e for e in self.edges if e <= keep)
        relabel = {x: i + 1 for i, x in enumerate(sorted(keep))}
        return Hypergraph(self.r, len(keep), frozenset(frozenset(relabel[x] for x in e) for e in sub))

    def edge_count_within(self, vertices: frozenset[int]) -> int:
        return sum(1 for e in self.edges if e <= vertices)


def hypergraph(r: int, v: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    return Hypergraph(r, v, frozenset(frozenset(e) for e in edges))


def hypergraph_to_json(g: Hypergraph) -> dict:
    return {"r": g.r, "v": g.v, "edges": sorted(sorted(e) for e in g.edges)}


def hypergraph_from_json(obj: dict) -> Hypergraph:
    return hypergraph(int(obj["r"]), int(obj["v"]), obj.get("edges", ()))


def density(g: Hypergraph) -> Fraction:
    if g.v < 1:
        raise EmptyVertexSet("density needs at least one vertex")
    return Fraction(g.e, g.v)


# ---------------------------------------------------------------------------
# densest subgraph: subset brute force and parametric max-flow


def _subset_edge_counts(g: Hypergraph) -> list[int]:
    """f[mask] = number of edges inside the subset encoded by mask (vertex i -> bit i-1)."""
    f = [0] * (1 << g.v)
    for e in g.edges:
        mask = 0
        for x in e:
            mask |= 1 << (x - 1)
        f[mask] += 1
    for b in range(g.v):
        bit = 1 << b
        for mask in range(1 << g.v):
            if mask & bit:
                f[mask] += f[mask ^ bit]
    return f


def max_subgraph_density_brute(g: Hypergraph) -> tuple[Fraction, frozenset[int]]:
    """Max density over nonempty subsets by subset-sum dynamic programming."""
    if g.v < 1:
        raise EmptyVertexSet("no vertices")
    f = _subset_edge_counts(g)
    best_e, best_v, best_mask = 0, 1, 1
    for mask in range(1, 1 << g.v):
        cnt = f[mask]
        size = mask.bit_count()
        if cnt * best_v > best_e * size:
            best_e, best_v, best_mask = cnt, size, mask
    witness = frozenset(i + 1 for i in range(g.v) if best_mask >> i & 1)
    return Fraction(best_e, best_v), witness


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, c: int):
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def maxflow(self, s: int, t: int) -> int:
        flow = 0
        INFCAP = 1 << 62
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = [s]
            for u in queue:
                for ei in self.adj[u]:
                    if self.cap[ei] > 0 and level[self.to[ei]] < 0:
                        level[self.to[ei]] = level[u] + 1
                        queue.append(self.to[ei])
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.adj[u]):
                    ei = self.adj[u][it[u]]
                    v = self.to[ei]
                    if self.cap[ei] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[ei]))
                        if got:
                            self.cap[ei] -= got
                            self.cap[ei ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, INFCAP)
                if not pushed:
                    break
                flow += pushed

    def source_side(self, s: int) -> set[int]:
        seen = {s}
        queue = [s]
        while queue:
            u = queue.pop()
            for ei in self.adj[u]:
                if self.cap[ei] > 0 and self.to[ei] not in seen:
                    seen.add(self.to[ei])
                    queue.append(self.to[ei])
        return seen


def _excess_subgraph(g: Hypergraph, threshold: Fraction) -> frozenset[int] | None:
    """A vertex set with e(U) - threshold*|U| > 0, or None if none exists.

    Network: source -> edge nodes (cap q), edge -> its vertices (cap inf),
    vertex -> sink (cap p), with threshold = p/q and capacities scaled by q.
    """
    p, q = threshold.numerator, threshold.denominator
    edges = sorted(sorted(e) for e in g.edges)
    ne = len(edges)
    source, sink = 0, 1 + ne + g.v
    net = _Dinic(sink + 1)
    big = q * max(ne, 1) + 1
    for i, e in enumerate(edges):
        net.add(source, 1 + i, q)
        for x in e:
            net.add(1 + i, 1 + ne + (x - 1), big)
    for x in range(1, g.v + 1):
        net.add(1 + ne + (x - 1), sink, p)
    flow = net.maxflow(source, sink)
    if q * ne - flow <= 0:
        return None
    side = net.source_side(source)
    return frozenset(x for x in range(1, g.v + 1) if (1 + ne + x - 1) in side)


def max_subgraph_density(g: Hypergraph) -> tuple[Fraction, frozenset[int]]:
    """Exact max over nonempty U of e(G[U])/|U| with a witness set.

    Parametric max-flow with binary search over candidate densities e'/v';
    cross-checked against the subset brute force whenever v <= 14.
    """
    if g.v < 1:
        raise EmptyVertexSet("no vertices")
    if g.e == 0:
        result = (Fraction(0), frozenset([1]))
    else:
        candidates = sorted({Fraction(ep, vp) for vp in range(1, g.v + 1) for ep in range(0, g.e + 1)})
        lo, hi = 0, len(candidates) - 1  # invariant: density >= candidates[lo]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            gap = (candidates[mid - 1] + candidates[mid]) / 2
            if _excess_subgraph(g, gap) is not None:
                lo = mid
            else:
                hi = mid - 1
        if lo == 0:
            witness = max_subgraph_density_brute(g)[1] if g.v <= BRUTE_CROSSCHECK_LIMIT else frozenset([1])
            result = (candidates[0], witness)
        else:
            gap = (candidates[lo - 1] + candidates[lo]) / 2
            witness = _excess_subgraph(g, gap)
            assert witness is not None
            result = (candidates[lo], witness)
    if g.v <= BRUTE_CROSSCHECK_LIMIT:
        brute_value, _ = max_subgraph_density_brute(g)
        if brute_value != result[0]:
            raise RuntimeError(
                f"flow density {result[0]} disagrees with brute force {brute_value}"
            )
    value, witness = result
    if witness and Fraction(g.edge_count_within(witness), len(witness)) != value:
        raise RuntimeError("witness does not achieve the maximum density")
    return result


def is_strictly_balanced(g: Hypergraph) -> bool:
    """Every proper nonempty induced subhypergraph has strictly smaller density."""
    if g.v < 1:
        raise EmptyVertexSet("no vertices")
    if g.v == 1:
        return True
    rho = density(g)
    if g.v <= BRUTE_CROSSCHECK_LIMIT:
        f = _subset_edge_counts(g)
        full = (1 << g.v) - 1
        for mask in range(1, full):
            size = mask.bit_count()
            if f[mask] * rho.denominator * g.v >= rho.numerator * size * g.v:
                if Fraction(f[mask], size) >= rho:
                    return False
        return True
    for x in range(1, g.v + 1):
        sub = g.induced([y for y in range(1, g.v + 1) if y != x])
        if sub.v and max_subgraph_density(sub)[0] >= rho:
            return False
    return True


# ---------------------------------------------------------------------------
# feasible densities and certified search


def feasible_density(r: int, c: Fraction) -> bool:
    """Densities of strictly balanced r-uniform hypergraphs: c >= 1/(r-1) or
    c = k/(1+k(r-1)) for an integer k >= 1."""
    if c >= Fraction(1, r - 1):
        return True
    denom = 1 - c * (r - 1)
    if denom <= 0:
        return True
    k = c / denom
    return k.denominator == 1 and k >= 1


def _sunflower(r: int, k: int) -> Hypergraph:
    """k edges sharing exactly one common vertex: v = 1 + k(r-1), e = k."""
    edges = []
    nxt = 2
    for _ in range(k):
        edges.append([1] + list(range(nxt, nxt + r - 1)))
        nxt += r - 1
    return hypergraph(r, 1 + k * (r - 1), edges)


def find_strictly_balanced(
    r: int, c: Fraction, v_budget: int = 12, combo_budget: int = 300_000
) -> Hypergraph:
    """A certified strictly balanced r-uniform hypergraph of density exactly c.

    Seeds known families first, then searches small vertex counts
    exhaustively.  The certificate is the exhaustive balance check plus a
    density check, re-run before returning.
    """
    c = Fraction(c)
    if c < 0:
        raise InfeasibleDensity("density must be nonnegative")
    if not feasible_density(r, c):
        raise InfeasibleDensity(f"no strictly balanced {r}-uniform hypergraph has density {c}")

    def certify(g: Hypergraph) -> Hypergraph:
        if density(g) != c or not is_strictly_balanced(g):
            raise RuntimeError("candidate failed certification")
        return g

    denom = 1 - c * (r - 1)
    if denom > 0:
        k = c / denom
        if k.denominator == 1 and k >= 1:
            return certify(_sunflower(r, int(k)))
    if c == 1:
        full = hypergraph(r, r + 1, itertools.combinations(range(1, r + 2), r))
        return certify(full)
    # incremental search over v with e = c*v integral
    for v in range(r, v_budget + 1):
        if (c * v).denominator != 1:
            continue
        e = int(c * v)
        if e < 1 or e > math.comb(v, r):
            continue
        if math.comb(math.comb(v, r), e) <= combo_budget:
            all_edges = list(itertools.combinations(range(1, v + 1), r))
            for combo in itertools.combinations(all_edges, e):
                g = hypergraph(r, v, combo)
                if is_strictly_balanced(g):
                    return certify(g)
    raise SearchBudgetExceeded(
        f"no strictly balanced ({r}, {c}) hypergraph found within v <= {v_budget}"
    )


# ---------------------------------------------------------------------------
# membership families


def in_Q(g: Hypergraph, c: Fraction) -> bool:
    """Every subgraph has e(H) <= c*v(H)."""
    return max_subgraph_density(g)[0] <= Fraction(c)


def in_S(g: Hypergraph, c: Fraction) -> bool:
    return g.e <= Fraction(c) * g.v


def in_P(g: Hypergraph, nu: Iterable[int], c: Fraction, subset_budget: int = SUBSET_BUDGET) -> bool:
    """Density constraint enforced only at subgraph sizes listed in nu."""
    c = Fraction(c)
    sizes = sorted({int(x) for x in nu if 1 <= int(x) <= g.v})
    f = None
    for size in sizes:
        bound = c * size
        if Fraction(math.comb(size, g.r)) <= bound:
            continue  # constraint vacuous at this size
        if g.e <= bound:
            continue  # total edge count already below the bound
        if math.comb(g.v, size) > subset_budget:
            raise BudgetExceeded(
                f"checking all {math.comb(g.v, size)} subsets of size {size} exceeds the budget"
            )
        if g.v <= BRUTE_CROSSCHECK_LIMIT:
            if f is None:
                f = _subset_edge_counts(g)
            for mask in range(1 << g.v):
                if mask.bit_count() == size and f[mask] > bound:
                    return False
        else:
            for subset in itertools.combinations(range(1, g.v + 1), size):
                if g.edge_count_within(frozenset(subset)) > bound:
                    return False
    return True


# ---------------------------------------------------------------------------
# blow-up construction


def _equipartition(n: int, t: int) -> list[list[int]]:
    q, rem = divmod(n, t)
    parts = []
    start = 1
    for i in range(t):
        size = q + (1 if i < rem else 0)
        parts.append(list(range(start, start + size)))
        start += size
    return parts


def _maximal_matchings(parts: list[list[int]]):
    """All maximal part-transversal matchings inside the given parts.

    Every maximal matching saturates the smallest part, so matchings are
    enumerated by pairing its vertices in order.
    """
    m = min(len(p) for p in parts)
    anchor = min(range(len(parts)), key=lambda i: (len(parts[i]), i))
    anchor_vertices = sorted(parts[anchor])[:m]
    others = [sorted(p) for i, p in enumerate(parts) if i != anchor]

    def rec(i: int, used: tuple[set, ...], acc: list[frozenset]):
        if i == m:
            yield frozenset(acc)
            return
        pools = [[x for x in p if x not in used[j]] for j, p in enumerate(others)]
        for picks in itertools.product(*pools):
            for j, x in enumerate(picks):
                used[j].add(x)
            acc.append(frozenset((anchor_vertices[i],) + picks))
            yield from rec(i + 1, used, acc)
            acc.pop()
            for j, x in enumerate(picks):
                used[j].remove(x)

    yield from rec(0, tuple(set() for _ in others), [])


def count_maximal_matchings(parts: list[list[int]]) -> int:
    m = min(len(p) for p in parts)
    total = 1
    for p in parts:
        total *= math.perm(len(p), m)
    return total // math.factorial(m)


@dataclass(frozen=True)
class BlowupResult:
    count: int
    members: tuple[Hypergraph, ...] | None
    partition: tuple[tuple[int, ...], ...]
    guaranteed_lower_bound: int  # (floor(n/t)!)^((r-1) e(H))


def blowup_members(
    h: Hypergraph, n: int, count_only: bool = False, materialize_budget: int = 5000
) -> BlowupResult:
    """Members of Q^c_n ∩ S^c_n (c = density of h) from per-edge maximal
    matchings compatible with a fixed equipartition of [n]."""
    t = h.v
    if n < t * h.r:
        raise TooSmall(f"need n >= t*r = {t * h.r}")
    parts = _equipartition(n, t)
    edge_list = sorted(sorted(e) for e in h.edges)
    per_edge_counts = [count_maximal_matchings([parts[x - 1] for x in e]) for e in edge_list]
    total = 1
    for cnt in per_edge_counts:
        total *= cnt
    lower = math.factorial(n // t) ** ((h.r - 1) * h.e)
    if count_only:
        return BlowupResult(total, None, tuple(tuple(p) for p in parts), lower)
    if total > materialize_budget:
        raise BudgetExceeded(f"materializing {total} members exceeds budget {materialize_budget}")
    per_edge_choices = [
        list(_maximal_matchings([parts[x - 1] for x in e])) for e in edge_list
    ]
    members = []
    for combo in itertools.product(*per_edge_choices):
        edges: set[frozenset[int]] = set()
        for matching in combo:
            edges |= matching
        members.append(Hypergraph(h.r, n, frozenset(edges)))
    if len({m.edges for m in members}) != total:
        raise RuntimeError("constructed members are not pairwise distinct")
    return BlowupResult(total, tuple(members), tuple(tuple(p) for p in parts), lower)


# ---------------------------------------------------------------------------
# random dense members


@dataclass(frozen=True)
class SampleCertificate:
    graph: Hypergraph
    edge_count: int
    attempts: int
    seed: int
    p_float: float
    verification: str  # "exhaustive" or "sampled:<count>"
    sub_member_log2: int  # the member certifies >= 2^edge_count members


def _edge_threshold_met(e: int, n: int, r: int, delta: Fraction) -> bool:
    """Exact check of e >= n^(-delta) * C(n, r) / 2 for rational delta."""
    a, b = delta.numerator, delta.denominator
    lhs = (2 * e) ** b * n ** a
    rhs = math.comb(n, r) ** b
    return lhs >= rhs


def _verify_p_membership(
    g: Hypergraph, k: int, c: Fraction, rng: random.Random, exhaustive_limit: int = 5, samples: int = 400
) -> tuple[bool, str]:
    """P^{(k),c} membership; exhaustive for sizes <= exhaustive_limit, sampled above."""
    c = Fraction(c)
    modes = []
    for size in range(1, min(k, g.v) + 1):
        bound = c * size
        if Fraction(math.comb(size, g.r)) <= bound or g.e <= bound:
            continue
        if size <= exhaustive_limit or math.comb(g.v, size) <= SUBSET_BUDGET:
            for subset in itertools.combinations(range(1, g.v + 1), size):
                if g.edge_count_within(frozenset(subset)) > bound:
                    return False, "exhaustive"
            modes.append("exhaustive")
        else:
            for _ in range(samples):
                subset = frozenset(rng.sample(range(1, g.v + 1), size))
                if g.edge_count_within(subset) > bound:
                    return False, f"sampled:{samples}"
            modes.append(f"sampled:{samples}")
    return True, (max(modes, key=len) if modes else "exhaustive")


def sample_dense_member(
    r: int,
    k: int,
    c: Fraction,
    n: int,
    delta: Fraction,
    seed: int,
    max_attempts: int = 2000,
) -> SampleCertificate:
    """Rejection-sample G(n, p), p = n^(-delta), until a member of P^{(k),c}_n
    with e(G) >= p*C(n,r)/2 appears; both conditions verified exactly."""
    c = Fraction(c)
    delta = Fraction(delta)
    if delta * c <= 1:
        raise ValueError("need delta > 1/c")
    if k * r > n:
        raise ValueError("need k*r <= n")
    rng = random.Random(seed)
    p = float(n) ** (-float(delta))
    for attempt in range(1, max_attempts + 1):
        edges = [
            frozenset(e)
            for e in itertools.combinations(range(1, n + 1), r)
            if rng.random() < p
        ]
        g = Hypergraph(r, n, frozenset(edges))
        if not _edge_threshold_met(g.e, n, r, delta):
            continue
        ok, mode = _verify_p_membership(g, k, c, rng)
        if ok:
            return SampleCertificate(
                graph=g,
                edge_count=g.e,
                attempts=attempt,
                seed=seed,
                p_float=p,
                verification=mode,
                sub_member_log2=g.e,
            )
    raise SampleBudgetExceeded(
        f"no qualifying member of P^{{({k}),{c}}}_{n} in {max_attempts} attempts (p = {p:.3g})"
    )


# ---------------------------------------------------------------------------
# the greedy oscillation sequence


@dataclass(frozen=True)
class OscSequence:
    """Greedy (nu, mu) prefix with mu_i = nu_{i+1} - 1 and stored certificates.

    Certified lower bounds stand in for the true counts, so each mu is an
    upper bound on the minimal index satisfying the threshold.
    """

    c: Fraction
    eps: Fraction
    r: int
    nu: tuple[int, ...]
    mu: tuple[int, ...]
    certificates: tuple[dict, ...]

    def __post_init__(self):
        if list(self.nu) != sorted(set(self.nu)):
            raise ValueError("nu must be strictly increasing")
        for i, m in enumerate(self.mu):
            if m != self.nu[i + 1] - 1:
                raise ValueError("mu must interleave as nu_{i+1} - 1")


def _threshold_met(e: int, n: int, r: int, eps: Fraction) -> bool:
    """2^e >= 2^(n^(r - eps)), i.e. e^b >= n^(rb - a) for eps = a/b."""
    a, b = eps.numerator, eps.denominator
    if e <= 0:
        return False
    return e ** b >= n ** (r * b - a)


def default_estimator(r: int, c: Fraction, eps: Fraction, seed: int, attempts: int = 8):
    """Certified lower bound log2 |P^{nu,c}_n| >= e via sample_dense_member.

    Returns a callable (nu_prefix, n) -> (e, certificate dict) or None.
    The sampler's preconditions (k*r <= n) and a deterministic
    hopelessness bound (expected edges far below the threshold) make it
    return None without drawing randomness.
    """
    delta = (Fraction(1, 1) / c + eps) / 2

    def estimate(nu_prefix: tuple[int, ...], n: int):
        k = max(nu_prefix)
        if k * r > n:
            return None
        p = float(n) ** (-float(delta))
        mean = p * math.comb(n, r)
        need = float(n) ** (r - float(eps))
        if mean + 6 * math.sqrt(mean) + 2 < need:
            return None  # certification out of reach at this n
        best = None
        for i in range(attempts):
            try:
                cert = sample_dense_member(r, k, c, n, delta, seed=seed * 100003 + n * 101 + i,
                                           max_attempts=40)
            except SampleBudgetExceeded:
                continue
            if best is None or cert.edge_count > best.edge_count:
                best = cert
        if best is None:
            return None
        return best.edge_count, {
            "n": n,
            "edges": best.edge_count,
            "attempts": best.attempts,
            "seed": best.seed,
            "verification": best.verification,
        }

    return estimate


def build_sequence(
    r: int,
    c: Fraction,
    eps: Fraction,
    steps: int,
    estimator: Callable | None = None,
    seed: int = 0,
    scan_limit: int = 600,
) -> OscSequence:
    """Greedy sequence: nu_0 = r+1; mu_k = least n > nu_k whose certified
    lower bound reaches 2^(n^(r-eps)); nu_{k+1} = mu_k + 1."""
    c = Fraction(c)
    eps = Fraction(eps)
    if c < Fraction(1, r - 1):
        raise ValueError("need c >= 1/(r-1)")
    if eps * c <= 1:
        raise ValueError("need eps > 1/c")
    if estimator is None:
        estimator = default_estimator(r, c, eps, seed)
    nu = [r + 1]
    mu: list[int] = []
    certificates: list[dict] = []
    for _ in range(steps):
        found = None
        for n in range(nu[-1] + 1, nu[-1] + 1 + scan_limit):
            result = estimator(tuple(nu), n)
            if result is None:
                continue
            e, cert = result
            if _threshold_met(e, n, r, eps):
                found = (n, cert)
                break
        if found is None:
            raise EstimatorFailed(
                f"no certified n in ({nu[-1]}, {nu[-1] + scan_limit}] reaches the threshold"
            )
        n, cert = found
        mu.append(n)
        certificates.append(cert)
        nu.append(n + 1)
    return OscSequence(c=c, eps=eps, r=r, nu=tuple(nu), mu=tuple(mu), certificates=tuple(certificates))
