"""The generating-function chain for k-connected chordal graphs, tree-width <= t.

For fixed (t, k) the chain descends from the single (t+1)-clique class
through alternating rooting / implicit-equation / un-rooting steps,
producing for each level j the clique-rooted argument series, the rooted
class and the unrooted class.  Coefficients are exact; n! * [x1^n] of any
class series is the number of labelled members.

Levels are processed with only the still-needed clique variables tracked
symbolically (the rest specialized to 1); ``track_all=True`` keeps every
clique variable to the end, which is exponentially more expensive and only
meant for small orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from . import egf
from .egf import Egf
from .errors import ConfigurationError, RangeError
from .oracle import brute_force_class  # re-exported: part of this module's surface
from .series import MultiSeries

__all__ = [
    "GFChain",
    "ClassCounts",
    "build_chain",
    "count",
    "decoration_count",
    "brute_force_class",
    "rooted_counts_at",
    "unrooted_counts_at",
]


@dataclass
class ClassCounts:
    """Exact per-n class counts and per-(a, b) decoration counts."""

    t: int
    k: int
    unrooted: list  # unrooted[n] = |G_{t,k,n}|
    rooted: list  # rooted[n] = |G^(k)_{k,n}|, n non-root vertices
    decorations: dict  # (a, b) -> labelled SET(G_{k+1}^(k)) objects


@dataclass
class GFChain:
    """All series of the chain at fixed (t, k), truncated at ``order`` in x1."""

    t: int
    k: int
    order: int
    track_all: bool
    base: Egf  # G_{t+1}
    levels: dict  # j -> (arg R_{j+1}^(j), rooted Q_j, unrooted G_j)
    rooted_counts: list  # n! [x1^n] G_k^(k), n <= order
    unrooted_counts: list  # n! [x1^n] G_k, n <= order
    _deco: Egf = field(default=None, repr=False)

    @property
    def arg(self) -> Egf:
        """G_{k+1}^{(k)}: the exp-argument at the final level (x_k tracked for k >= 2)."""
        return self.levels[self.k][0]

    @property
    def rooted_series(self) -> Egf:
        return self.levels[self.k][1]

    @property
    def unrooted_series(self) -> Egf:
        return self.levels[self.k][2]

    def arg_univariate(self):
        """Integer EGF coefficients of G_{k+1}^{(k)} with all clique variables at 1."""
        return self.arg.univariate()

    def arg_bivariate(self):
        """Per-n {x_k exponent: int} maps of G_{k+1}^{(k)} (k >= 2 only)."""
        if self.k == 1:
            raise ConfigurationError("k = 1 tracks cliques through x1 itself")
        a = self.arg
        vi = a.vars.index(f"x{self.k}")
        out = []
        for d in a.coeffs:
            row = {}
            for key, v in d.items():
                row[key[vi]] = row.get(key[vi], 0) + v
            out.append(row)
        return out

    def count(self, n: int, rooted: bool = False) -> int:
        """Exact number of labelled class members (n total vertices, or n
        non-root vertices for the rooted class)."""
        if n < 0 or n > self.order:
            raise RangeError(f"n={n} outside truncation order {self.order}")
        return self.rooted_counts[n] if rooted else self.unrooted_counts[n]

    def decoration_count(self, a: int, b: int) -> int:
        """Number of labelled SET(G_{k+1}^{(k)}) objects with a non-root
        k-cliques and b non-root vertices."""
        if a < 0 or b < 0 or b > self.order:
            raise RangeError(f"(a,b)=({a},{b}) outside tabulated range")
        if self._deco is None:
            arg = self.arg
            if self.k >= 2:
                for v in arg.vars:
                    if v != f"x{self.k}":
                        arg = arg.specialize(v)
            else:
                for v in arg.vars:
                    arg = arg.specialize(v)
            self._deco = arg.exp(self.order)
        if self.k == 1:
            return self._deco.term(b, ()) if a == b else 0
        return self._deco.term(b, (a,))

    def class_counts(self, n_max=None, deco_max=None) -> ClassCounts:
        n_max = self.order if n_max is None else min(n_max, self.order)
        deco_max = 16 if deco_max is None else deco_max
        decos = {}
        for b in range(min(deco_max, self.order) + 1):
            amax = b if self.k == 1 else max(
                (k[0] for k in self._deco_keys(b)), default=0
            )
            for a in range(amax + 1):
                c = self.decoration_count(a, b)
                if c:
                    decos[(a, b)] = c
        return ClassCounts(
            self.t,
            self.k,
            self.unrooted_counts[: n_max + 1],
            self.rooted_counts[: n_max + 1],
            decos,
        )

    def _deco_keys(self, b):
        self.decoration_count(0, 0)
        return self._deco.coeffs[b].keys()

    def series(self, which: str, max_order=None) -> MultiSeries:
        """Exact-rational MultiSeries view of a chain series.

        ``which`` is one of "unrooted", "rooted", "arg".  Mostly useful for
        cross-checks and small-order inspection.
        """
        src = {"unrooted": self.unrooted_series,
               "rooted": self.rooted_series,
               "arg": self.arg}[which]
        max_order = src.order if max_order is None else min(max_order, src.order)
        variables = ("x1",) + src.vars
        bounds = [max_order]
        for v in src.vars:
            bounds.append(src.max_exponent(v))
        coeffs = {}
        for n in range(max_order + 1):
            for key, val in src.coeffs[n].items():
                coeffs[(n,) + key] = Fraction(val, factorial(n))
        return MultiSeries(variables, bounds, coeffs, clipped=True)


def _base_series(t, k, order, track_all):
    if track_all:
        tracked = tuple(f"x{i}" for i in range(2, t + 1))
    else:
        tracked = tuple(f"x{i}" for i in range(max(2, k), t + 1))
    s = Egf(tracked, order)
    if t + 1 <= order:
        exps = tuple(comb(t + 1, int(v[1:])) for v in tracked)
        s.coeffs[t + 1][exps] = 1
    return s


def build_chain(t: int, k: int, order: int, track_all: bool = False) -> GFChain:
    """Build the full chain for (t, k) to truncation ``order`` in x1.

    Descends j = t..k: the explicit clique monomial is rooted at a j-clique,
    the implicit equation for the j-rooted class is solved by direct
    coefficient propagation (the degree-n coefficient only needs lower
    degrees, since every attached graph carries at least one vertex), and
    the un-rooting integral produces the unrooted class for the next level.
    """
    if not (isinstance(t, int) and isinstance(k, int)) or not (1 <= k <= t):
        raise ConfigurationError(f"need 1 <= k <= t, got (t,k)=({t},{k})")
    if order < 1:
        raise ConfigurationError("order must be >= 1")
    s = _base_series(t, k, order + k, track_all)
    levels = {}
    for j in range(t, k, -1):
        r = egf.root_step(s, j)
        q = egf.solve_implicit_ordinary(r, f"x{j}", r.order)
        g = egf.unroot_step(q, j)
        levels[j] = (r, q, g)
        s = g if track_all else g.specialize(f"x{j}")
    r = egf.root_step(s, k)
    if k == 1:
        q = egf.solve_implicit_main(r, r.order)
    else:
        q = egf.solve_implicit_ordinary(r, f"x{k}", r.order)
    g = egf.unroot_step(q, k)
    levels[k] = (r, q, g)
    rooted = q.univariate()[: order + 1]
    unrooted = g.univariate()[: order + 1]
    return GFChain(t, k, order, track_all, _base_series(t, k, order + k, track_all),
                   levels, rooted, unrooted)


def count(chain: GFChain, n: int, rooted: bool = False) -> int:
    return chain.count(n, rooted)


def decoration_count(chain: GFChain, a: int, b: int) -> int:
    return chain.decoration_count(a, b)


def _arg_series_k1(t, order):
    """EGF-int coefficients of G_2^{(1)} to the given order (k = 1 chains)."""
    s = _base_series(t, 1, order + 1, False)
    for j in range(t, 1, -1):
        r = egf.root_step(s, j)
        q = egf.solve_implicit_ordinary(r, f"x{j}", r.order)
        g = egf.unroot_step(q, j)
        s = g.specialize(f"x{j}")
    return s.diff_x1().univariate()


def rooted_counts_at(t: int, k: int, ns, _arg_cache={}):
    """Exact |G^{(k)}_{k,n}| at isolated values of n.

    For k = 1 this goes through Lagrange inversion of the vertex-rooted
    implicit equation, so single large n stay affordable; other k fall back
    to a full chain build at max(ns).
    """
    ns = sorted(set(ns))
    if k == 1:
        top = ns[-1]
        key = (t, 1)
        a = _arg_cache.get(key)
        if a is None or len(a) <= top:
            a = _arg_series_k1(t, top)
            _arg_cache[key] = a
        return {n: egf.lagrange_rooted_count(a, n) for n in ns}
    chain = build_chain(t, k, ns[-1])
    return {n: chain.count(n, rooted=True) for n in ns}


def unrooted_counts_at(t: int, k: int, ns):
    """Exact |G_{t,k,n}| at isolated n (k = 1 only: g_n equals the rooted
    count at n-1 because rooting at a vertex and forgetting its label is a
    bijection)."""
    ns = sorted(set(ns))
    if k != 1:
        chain = build_chain(t, k, ns[-1])
        return {n: chain.count(n) for n in ns}
    rc = rooted_counts_at(t, 1, [n - 1 for n in ns])
    return {n: rc[n - 1] for n in ns}
