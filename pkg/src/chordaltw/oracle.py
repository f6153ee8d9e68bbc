"""Brute-force enumeration oracle for the small-n class lists.

Enumerates all 2^C(n,2) labelled graphs with bitmask adjacency, keeps the
chordal ones (greedy simplicial elimination, exact) together with their
clique number and connectivity value, and filters per (t, k) on demand.
The class convention matches the chain: a graph belongs to the k-connected
class iff it has at least k vertices and no vertex cut of size < k; complete
graphs have no cuts at all.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

from .errors import ResourceError
from .graphs import ChordalGraph

_BRUTE_FORCE_LIMIT = 8


def _connected_within(adj, sub):
    start = sub & -sub
    seen = start
    frontier = start
    while frontier:
        nxt = 0
        t = frontier
        while t:
            b = t & -t
            nxt |= adj[b.bit_length() - 1] & sub
            t ^= b
        frontier = nxt & ~seen
        seen |= frontier
    return seen == sub


def _class_connectivity(adj, n):
    """Largest k with no vertex cut of size < k (complete K_n gives n)."""
    full = (1 << n) - 1
    if n == 0:
        return 0
    if not _connected_within(adj, full):
        return 0
    if all(adj[v] == full ^ (1 << v) for v in range(n)):
        return n
    for s in range(1, n - 1):
        for cut in combinations(range(n), s):
            cutmask = 0
            for v in cut:
                cutmask |= 1 << v
            sub = full ^ cutmask
            if not _connected_within(adj, sub):
                return s
    return n - 1


def _simplicial_elimination(adj, n):
    """(is_chordal, clique_number) by greedily eliminating simplicial vertices."""
    radj = list(adj)
    remaining = (1 << n) - 1
    rem = n
    cliquenum = 1 if n else 0
    while rem > 1:
        found = False
        t = remaining
        while t:
            b = t & -t
            v = b.bit_length() - 1
            t ^= b
            nb = radj[v]
            ok = True
            s = nb
            while s:
                bu = s & -s
                u = bu.bit_length() - 1
                s ^= bu
                if (nb ^ bu) & ~radj[u]:
                    ok = False
                    break
            if ok:
                deg = nb.bit_count()
                if deg + 1 > cliquenum:
                    cliquenum = deg + 1
                remaining ^= b
                rem -= 1
                s = nb
                while s:
                    bu = s & -s
                    radj[bu.bit_length() - 1] ^= b
                    s ^= bu
                radj[v] = 0
                found = True
                break
        if not found:
            return False, None
    return True, cliquenum


@lru_cache(maxsize=None)
def _chordal_catalog(n):
    """All labelled chordal graphs on n vertices: (mask, cliquenum, conn)."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    m = len(edges)
    ubit = [1 << u for u, _ in edges]
    vbit = [1 << v for _, v in edges]
    uidx = [u for u, _ in edges]
    vidx = [v for _, v in edges]
    out = []
    for mask in range(1 << m):
        adj = [0] * n
        mm = mask
        while mm:
            b = mm & -mm
            i = b.bit_length() - 1
            adj[uidx[i]] |= vbit[i]
            adj[vidx[i]] |= ubit[i]
            mm ^= b
        chordal, cliquenum = _simplicial_elimination(adj, n)
        if not chordal:
            continue
        conn = _class_connectivity(adj, n)
        out.append((mask, cliquenum, conn))
    return tuple(out)


def _mask_to_graph(mask, n):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    g = ChordalGraph(n)
    mm = mask
    while mm:
        b = mm & -mm
        u, v = edges[b.bit_length() - 1]
        g.add_edge(u, v)
        mm ^= b
    return g


def brute_force_class(t: int, k: int, n: int):
    """All labelled k-connected chordal graphs with tree-width <= t on n vertices.

    Exhaustive filter over every labelled graph; refuses n beyond 8.
    """
    if n > _BRUTE_FORCE_LIMIT:
        raise ResourceError(f"brute force limited to n <= {_BRUTE_FORCE_LIMIT}")
    if n < k or n < 0:
        return []
    return [
        _mask_to_graph(mask, n)
        for mask, cliquenum, conn in _chordal_catalog(n)
        if cliquenum <= t + 1 and conn >= k
    ]


def brute_force_count(t, k, n):
    if n > _BRUTE_FORCE_LIMIT:
        raise ResourceError(f"brute force limited to n <= {_BRUTE_FORCE_LIMIT}")
    if n < k or n < 0:
        return 0
    return sum(
        1 for _, cliquenum, conn in _chordal_catalog(n)
        if cliquenum <= t + 1 and conn >= k
    )


def clique_count_mask(mask, n, j):
    """Number of j-cliques of a mask graph (direct subset check)."""
    adj = [[False] * n for _ in range(n)]
    elist = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mm = mask
    while mm:
        b = mm & -mm
        u, v = elist[b.bit_length() - 1]
        adj[u][v] = adj[v][u] = True
        mm ^= b
    count = 0
    for sub in combinations(range(n), j):
        if all(adj[a][b] for a, b in combinations(sub, 2)):
            count += 1
    return count


def rooted_key(g: ChordalGraph):
    """Canonical identity of a rooted labelled graph.

    Root-clique slots become vertices 0..k-1 in root order; non-root
    vertices follow in label order.  Two rooted objects coincide iff their
    keys match.
    """
    k = len(g.root_clique)
    order = {v: i for i, v in enumerate(g.root_clique)}
    non_root = [v for v in range(g.n) if v not in order]
    if g.labels is not None:
        non_root.sort(key=lambda v: g.labels[v])
    for i, v in enumerate(non_root):
        order[v] = k + i
    edges = sorted(
        tuple(sorted((order[u], order[v]))) for u, v in g.edges()
    )
    return (g.n, k, tuple(edges))


def enumerate_rooted_class(t: int, k: int, n: int):
    """Canonical keys of every labelled object of the k-clique-rooted class
    with n non-root vertices (root vertices ordered, labels forgotten)."""
    if n + k > _BRUTE_FORCE_LIMIT:
        raise ResourceError("rooted enumeration beyond the brute-force limit")
    keys = set()
    for g in brute_force_class(t, k, n + k):
        cliques = [c for c in combinations(range(g.n), k)
                   if all(b in g.adj[a] for a, b in combinations(c, 2))]
        for c in cliques:
            for perm in permutations(c):
                h = g.copy()
                h.root_clique = perm
                h.labels = None
                keys.add(rooted_key(h))
    return sorted(keys)
