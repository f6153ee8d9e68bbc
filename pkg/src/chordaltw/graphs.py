"""Graph container and the chordal-graph algorithms used throughout.

Vertices are dense integer ids 0..n-1.  A graph may carry an ordered root
k-clique (tuple of vertex ids) and an optional labelling (labels[v] is the
1-based label of vertex v, or None for unlabelled root vertices).

Graphs are treated as immutable once built.
"""

from __future__ import annotations

from collections import deque
from math import comb

from .errors import DomainError


class ChordalGraph:
    __slots__ = ("n", "adj", "root_clique", "labels")

    def __init__(self, n, edges=(), root_clique=None, labels=None):
        self.n = n
        self.adj = [set() for _ in range(n)]
        for u, v in edges:
            self.add_edge(u, v)
        self.root_clique = tuple(root_clique) if root_clique is not None else None
        self.labels = list(labels) if labels is not None else None

    def add_edge(self, u, v):
        if u == v:
            raise DomainError("self-loops not allowed")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def has_edge(self, u, v):
        return v in self.adj[u]

    def edges(self):
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    def edge_count(self):
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v):
        return len(self.adj[v])

    def is_complete(self):
        return all(len(a) == self.n - 1 for a in self.adj)

    def key(self):
        """Hashable canonical identity (structure + root + labels)."""
        return (self.n, tuple(self.edges()), self.root_clique,
                tuple(self.labels) if self.labels is not None else None)

    def copy(self):
        g = ChordalGraph(self.n)
        g.adj = [set(a) for a in self.adj]
        g.root_clique = self.root_clique
        g.labels = list(self.labels) if self.labels is not None else None
        return g

    def __repr__(self):
        return (f"<ChordalGraph n={self.n} m={self.edge_count()} "
                f"root={self.root_clique}>")


# -- chordality -----------------------------------------------------------


def lex_bfs(g: ChordalGraph):
    """Lexicographic BFS visit order (partition refinement)."""
    sequence = []
    partition = [list(range(g.n))]
    while partition:
        cell = partition[0]
        v = cell.pop()
        if not cell:
            partition.pop(0)
        sequence.append(v)
        nbrs = g.adj[v]
        new_partition = []
        for cell in partition:
            inside = [u for u in cell if u in nbrs]
            outside = [u for u in cell if u not in nbrs]
            if inside:
                new_partition.append(inside)
            if outside:
                new_partition.append(outside)
        partition = new_partition
    return sequence


def perfect_elimination_ordering(g: ChordalGraph):
    """(is_chordal, peo, clique_number).

    Runs LexBFS; the reversed visit order is a perfect elimination ordering
    iff the graph is chordal, which is then verified directly.  For chordal
    graphs the clique number is 1 + the largest later-neighbourhood.
    """
    peo = list(reversed(lex_bfs(g)))
    pos = [0] * g.n
    for i, v in enumerate(peo):
        pos[v] = i
    cliquenum = 1 if g.n else 0
    for v in peo:
        later = [u for u in g.adj[v] if pos[u] > pos[v]]
        if not later:
            continue
        cliquenum = max(cliquenum, 1 + len(later))
        w = min(later, key=lambda u: pos[u])
        for u in later:
            if u != w and u not in g.adj[w]:
                return False, peo, None
    return True, peo, cliquenum


def is_chordal(g: ChordalGraph) -> bool:
    return perfect_elimination_ordering(g)[0]


def clique_number(g: ChordalGraph) -> int:
    ok, _, cn = perfect_elimination_ordering(g)
    if not ok:
        raise DomainError("clique_number via PEO requires a chordal graph")
    return cn


def clique_count(g: ChordalGraph, j: int) -> int:
    """Exact number of j-cliques of a chordal graph.

    Each j-clique is counted at its earliest vertex in a perfect elimination
    ordering: that vertex contributes C(|later neighbours|, j-1).
    """
    ok, peo, _ = perfect_elimination_ordering(g)
    if not ok:
        raise DomainError("clique_count requires a chordal graph")
    if j < 1:
        return 0
    pos = [0] * g.n
    for i, v in enumerate(peo):
        pos[v] = i
    total = 0
    for v in peo:
        later = sum(1 for u in g.adj[v] if pos[u] > pos[v])
        total += comb(later, j - 1)
    return total


# -- connectivity ---------------------------------------------------------


def is_connected(g: ChordalGraph) -> bool:
    if g.n == 0:
        return True
    seen = bytearray(g.n)
    seen[0] = 1
    stack = [0]
    count = 1
    while stack:
        v = stack.pop()
        for u in g.adj[v]:
            if not seen[u]:
                seen[u] = 1
                count += 1
                stack.append(u)
    return count == g.n


def articulation_points(g: ChordalGraph):
    """Iterative Tarjan lowpoint computation."""
    disc = [-1] * g.n
    low = [0] * g.n
    parent = [-1] * g.n
    points = set()
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        stack = [(root, iter(g.adj[root]))]
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        while stack:
            v, it = stack[-1]
            advanced = False
            for u in it:
                if disc[u] == -1:
                    parent[u] = v
                    disc[u] = low[u] = timer
                    timer += 1
                    if v == root:
                        root_children += 1
                    stack.append((u, iter(g.adj[u])))
                    advanced = True
                    break
                elif u != parent[v]:
                    low[v] = min(low[v], disc[u])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if p != root and low[v] >= disc[p]:
                        points.add(p)
        if root_children > 1:
            points.add(root)
    return points


def _dinic_vertex_flow(g, s, t, cap):
    """Max number of internally vertex-disjoint s-t paths, early exit at cap."""
    # split vertex v into v_in = 2v, v_out = 2v+1 with unit capacity
    N = 2 * g.n
    graph = [[] for _ in range(N)]

    def add(u, v, c):
        graph[u].append([v, c, len(graph[v])])
        graph[v].append([u, 0, len(graph[u]) - 1])

    for v in range(g.n):
        c = 10**9 if v in (s, t) else 1
        add(2 * v, 2 * v + 1, c)
    for u in range(g.n):
        for v in g.adj[u]:
            add(2 * u + 1, 2 * v, 10**9)
    src, sink = 2 * s + 1, 2 * t
    flow = 0
    while flow < cap:
        level = [-1] * N
        level[src] = 0
        q = deque([src])
        while q:
            v = q.popleft()
            for e in graph[v]:
                if e[1] > 0 and level[e[0]] == -1:
                    level[e[0]] = level[v] + 1
                    q.append(e[0])
        if level[sink] == -1:
            break
        it = [0] * N

        def dfs(v, f):
            if v == sink:
                return f
            while it[v] < len(graph[v]):
                e = graph[v][it[v]]
                if e[1] > 0 and level[e[0]] == level[v] + 1:
                    d = dfs(e[0], min(f, e[1]))
                    if d > 0:
                        e[1] -= d
                        graph[e[0]][e[2]][1] += d
                        return d
                it[v] += 1
            return 0

        while flow < cap:
            f = dfs(src, 10**9)
            if f == 0:
                break
            flow += f
    return flow


def is_k_connected(g: ChordalGraph, k: int) -> bool:
    """Class-convention k-connectivity: at least k vertices and no vertex
    cut of size < k.  Complete graphs K_m count as k-connected for k <= m."""
    if g.n < k:
        return False
    if k <= 0:
        return True
    if g.is_complete():
        return True
    if k == 1:
        return is_connected(g)
    if not is_connected(g):
        return False
    if k == 2:
        return not articulation_points(g)
    if k == 3:
        for v in range(g.n):
            h = _delete_vertex(g, v)
            if not is_connected(h) or articulation_points(h):
                return False
        return True
    # Even-Tarjan style: a cutset of size < k misses one of the first k vertices
    for s in range(min(k, g.n)):
        for t in range(g.n):
            if t != s and t not in g.adj[s]:
                if _dinic_vertex_flow(g, s, t, k) < k:
                    return False
    return True


def _delete_vertex(g, v):
    idx = [u if u < v else u - 1 for u in range(g.n)]
    h = ChordalGraph(g.n - 1)
    for u in range(g.n):
        if u == v:
            continue
        for w in g.adj[u]:
            if w != v and u < w:
                h.add_edge(idx[u], idx[w])
    return h


# -- distances ------------------------------------------------------------


def bfs_distances(g: ChordalGraph, source: int):
    dist = [-1] * g.n
    dist[source] = 0
    q = deque([source])
    while q:
        v = q.popleft()
        d = dist[v] + 1
        for u in g.adj[v]:
            if dist[u] == -1:
                dist[u] = d
                q.append(u)
    return dist


def distances(g: ChordalGraph, sources):
    """BFS distance table: one row (list over vertices) per source."""
    if not is_connected(g):
        raise DomainError("distance table requires a connected graph")
    return {s: bfs_distances(g, s) for s in sources}


def _double_sweep(g):
    d0 = bfs_distances(g, 0)
    a = max(range(g.n), key=lambda v: d0[v])
    da = bfs_distances(g, a)
    b = max(range(g.n), key=lambda v: da[v])
    return da[b], a, b, da


def diameter(g: ChordalGraph, method: str = "auto") -> int:
    """Graph diameter.

    "exact" sweeps BFS from every vertex.  "auto" uses the double sweep
    (exact on trees) and otherwise confirms exactly: full sweep for small
    graphs, an iFUB-style eccentricity refinement for larger ones.
    """
    if g.n == 0:
        return 0
    if not is_connected(g):
        raise DomainError("diameter requires a connected graph")
    if method == "double_sweep":
        return _double_sweep(g)[0]
    if method == "auto" and g.edge_count() == g.n - 1:
        return _double_sweep(g)[0]  # tree: double sweep is exact
    if method == "exact" or g.n <= 1024:
        return max(max(bfs_distances(g, v)) for v in range(g.n))
    # iFUB from the midpoint of a double-sweep path
    lb, a, b, da = _double_sweep(g)
    db = bfs_distances(g, b)
    mid = max(range(g.n), key=lambda v: min(da[v], db[v]) - abs(da[v] - db[v]))
    dmid = bfs_distances(g, mid)
    order = sorted(range(g.n), key=lambda v: -dmid[v])
    ub = 2 * dmid[order[0]]
    best = lb
    for v in order:
        if 2 * dmid[v] <= best:
            break
        ecc = max(bfs_distances(g, v))
        best = max(best, ecc)
    return best
