"""Dominant singularity, offspring law and derived sampling constants.

The characteristic system of the rooted-class fixed point is
``phi(x, y) = y - exp(F(x, y)) = 0`` together with ``d phi / d y = 0`` at
the singularity, where F evaluates the exp-argument series of the chain
(for k = 1 the clique variable is the vertex variable itself, so
``F(x, y) = A(x*y)``).  The singularity is bracketed by bisection on the
convergence/divergence dichotomy of the inner fixed-point iteration and
then polished by Newton on the 2x2 system: the square-root behaviour of
y(x) at the singularity makes a pure dichotomy far too coarse for the
1e-8-level criticality certificates downstream.

All certified numerics run in mpmath at a configurable precision; floats
appear only on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from math import comb, isnan, nan

import mpmath as mp
import numpy as np

from .errors import PrecisionError, RangeError
from .gfchain import GFChain

DEFAULT_DPS = 50


@dataclass
class Singularity:
    rho: float
    y: float
    rho_err: float
    y_err: float
    residual_phi: float
    residual_phi_y: float
    tail_bound: float
    rho_mp: object = field(repr=False, default=None)
    y_mp: object = field(repr=False, default=None)


@dataclass
class AnalyticConstants:
    t: int
    k: int
    rho: float = nan
    rho_err: float = nan
    y: float = nan
    y_err: float = nan
    mean_xi: float = nan
    mean_zeta: float = nan
    var_xi: float = nan
    var_zeta: float = nan
    kappa_tree: float = nan
    size_prob_constant: float = nan
    size_prob_err: float = nan
    residual_phi: float = nan
    residual_phi_y: float = nan
    tail_bound: float = nan
    rho_mp: object = field(repr=False, default=None)
    y_mp: object = field(repr=False, default=None)

    def as_dict(self):
        out = {}
        for f in fields(self):
            if f.name.endswith("_mp"):
                continue
            v = getattr(self, f.name)
            out[f.name] = v
        return out


class ArgEvaluator:
    """Numeric evaluation of G_{k+1}^{(k)} and its partials at a point.

    Terms are (vertex exponent b, clique exponent m, coefficient); for k = 1
    the two exponents coincide because 1-cliques are vertices.
    """

    def __init__(self, chain: GFChain, dps: int = DEFAULT_DPS):
        self.dps = dps
        self.order = chain.arg.order
        with mp.workdps(dps):
            terms = []
            if chain.k == 1:
                for b, c in enumerate(chain.arg_univariate()):
                    if c:
                        terms.append((b, b, mp.mpf(c) / mp.factorial(b)))
            else:
                for b, row in enumerate(chain.arg_bivariate()):
                    for m, c in row.items():
                        if c:
                            terms.append((b, m, mp.mpf(c) / mp.factorial(b)))
        self.terms = terms
        self.exact_polynomial = bool(terms) and max(t[0] for t in terms) < self.order

    def _sum(self, x, y, bw, mw):
        total = mp.mpf(0)
        for b, m, c in self.terms:
            if (bw and b == 0) or (mw and m == 0):
                continue
            f = c
            if bw:
                f *= b
            if mw:
                f *= m
            total += f * x ** (b - bw) * y ** (m - mw)
        return total

    def F(self, x, y):
        return self._sum(x, y, 0, 0)

    def Fx(self, x, y):
        return self._sum(x, y, 1, 0)

    def Fy(self, x, y):
        return self._sum(x, y, 0, 1)

    def Fxy(self, x, y):
        total = mp.mpf(0)
        for b, m, c in self.terms:
            if b >= 1 and m >= 1:
                total += c * b * m * x ** (b - 1) * y ** (m - 1)
        return total

    def Fyy(self, x, y):
        total = mp.mpf(0)
        for b, m, c in self.terms:
            if m >= 2:
                total += c * m * (m - 1) * x**b * y ** (m - 2)
        return total

    def tail_bound(self, x, y):
        """Geometric tail estimate of the truncated series at (x, y).

        Zero when every coefficient beyond the last stored degree is a true
        zero (the argument is an exact polynomial, e.g. at k = t levels fed
        by the clique monomial).
        """
        if self.exact_polynomial:
            return 0.0
        by_b = {}
        for b, m, c in self.terms:
            by_b[b] = by_b.get(b, mp.mpf(0)) + c * x**b * y**m
        degs = sorted(b for b, v in by_b.items() if v != 0)
        if not degs:
            return 0.0
        last = abs(by_b[degs[-1]])
        if len(degs) >= 2 and by_b[degs[-2]] != 0:
            r = float(last / abs(by_b[degs[-2]]))
        else:
            r = 0.99
        r = min(max(r, 0.0), 0.99)
        return float(last * r / (1 - r))


def _fixed_point(ev, x, ycap=1e9, itmax=3000, rel=None):
    """Iterate y <- exp(F(x, y)) from 1; returns (converged, y or None)."""
    rel = mp.mpf(10) ** (-(ev.dps - 10)) if rel is None else rel
    y = mp.mpf(1)
    for _ in range(itmax):
        try:
            ynew = mp.e ** ev.F(x, y)
        except OverflowError:
            return False, None
        if ynew > ycap or mp.isnan(ynew):
            return False, None
        if abs(ynew - y) <= rel * max(1, abs(ynew)):
            return True, ynew
        y = ynew
    return True, y  # slow creep near criticality counts as convergent


def find_singularity(chain: GFChain, tol: float = 1e-10,
                     dps: int = DEFAULT_DPS, polish: bool = True) -> Singularity:
    """Locate (rho_k, G_k^{(k)}(rho_k)) for the chain.

    Bisection on x over the convergence/divergence dichotomy of the inner
    fixed point gives a robust bracket (rho is the supremum of convergent
    x); the Newton polish on (phi, phi_y) then pins the point to working
    precision.  Error bounds combine the final step size, the certified
    residuals and the series-tail estimate at the solution.
    """
    ev = ArgEvaluator(chain, dps)
    with mp.workdps(dps):
        lo, hi = mp.mpf("1e-9"), mp.mpf(1)
        ok, ylo = _fixed_point(ev, lo)
        if not ok:
            raise PrecisionError("inner fixed point diverges arbitrarily close to 0")
        ok_hi, _ = _fixed_point(ev, hi)
        while ok_hi:
            hi *= 2
            if hi > 1e6:
                raise PrecisionError("no divergence detected below x = 1e6")
            ok_hi, _ = _fixed_point(ev, hi)
        bisect_target = mp.mpf(tol) if not polish else mp.mpf("1e-6")
        while hi - lo > bisect_target * max(1, lo):
            mid = (lo + hi) / 2
            ok, ymid = _fixed_point(ev, mid)
            if ok:
                lo, ylo = mid, ymid
            else:
                hi = mid
        rho, y = lo, ylo
        step = hi - lo
        if polish:
            rho, y, step = _newton_polish(ev, (lo + hi) / 2, ylo, lo, hi)
        expF = mp.e ** ev.F(rho, y)
        res_phi = abs(y - expF)
        res_phiy = abs(1 - expF * ev.Fy(rho, y))
        tail = ev.tail_bound(rho, y)
        phix = expF * ev.Fx(rho, y)
        rho_err = float(abs(step)) + (tail / float(phix) if phix > 0 else tail)
        y_err = float(abs(step)) * 10 + tail * 10  # square-root blow-up allowance
        if rho_err > tol:
            raise PrecisionError(
                f"could not certify rho to {tol:g}", achieved=rho_err
            )
        return Singularity(
            rho=float(rho), y=float(y), rho_err=rho_err, y_err=y_err,
            residual_phi=float(res_phi), residual_phi_y=float(res_phiy),
            tail_bound=tail, rho_mp=rho, y_mp=y,
        )


def _newton_polish(ev, x, y, lo, hi):
    """2D Newton on (phi, phi_y) starting inside the dichotomy bracket."""
    y = y * mp.mpf("1.0000001")
    step = hi - lo
    for _ in range(80):
        expF = mp.e ** ev.F(x, y)
        fy = ev.Fy(x, y)
        g1 = y - expF
        g2 = 1 - expF * fy
        j11 = -expF * ev.Fx(x, y)
        j12 = 1 - expF * fy
        j21 = -expF * (ev.Fx(x, y) * fy + ev.Fxy(x, y))
        j22 = -expF * (fy * fy + ev.Fyy(x, y))
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        dx = (g1 * j22 - g2 * j12) / det
        dy = (g2 * j11 - g1 * j21) / det
        x, y = x - dx, y - dy
        step = abs(dx)
        if abs(dx) < mp.mpf(10) ** (-(ev.dps - 8)) * max(1, abs(x)):
            break
    if not (lo * mp.mpf("0.9") <= x <= hi * mp.mpf("1.1")) or y <= 0:
        raise PrecisionError("Newton polish left the dichotomy bracket")
    return x, y, step


class OffspringLaw:
    """Finite (xi, zeta) table with deficit, biased versions and samplers.

    The table is renormalized (not rejection-corrected) before sampling;
    the raw probabilities and the deficit stay available for certificates.
    """

    def __init__(self, table, deficit, cutoff, mean_zeta_certified=None):
        self.table = dict(table)
        self.deficit = deficit
        self.cutoff = cutoff
        pairs = sorted(self.table)
        self.pairs = pairs
        raw = np.array([self.table[p] for p in pairs], dtype=float)
        self._raw = raw
        norm = raw / raw.sum()
        self._cum = np.cumsum(norm)
        self._a = np.array([p[0] for p in pairs], dtype=np.int64)
        self._b = np.array([p[1] for p in pairs], dtype=np.int64)
        self.mean_zeta_certified = mean_zeta_certified
        # size-biased tables (raw, per the defining identities)
        mz = mean_zeta_certified if mean_zeta_certified else self.mean_zeta()
        self.biased_root = {p: p[0] * q for p, q in self.table.items() if p[0] > 0}
        self.biased_white = {p: p[1] * q / mz for p, q in self.table.items() if p[1] > 0}
        self._cum_root = None
        self._cum_white = None
        self.diag_ratio = self._detect_diag()
        if self.diag_ratio is not None:
            zeta_marg = {}
            for (a, b), q in self.table.items():
                zeta_marg[b] = zeta_marg.get(b, 0.0) + q
            bs = sorted(zeta_marg)
            self._zeta_vals = np.array(bs, dtype=np.int64)
            zp = np.array([zeta_marg[b] for b in bs])
            self._zeta_cum = np.cumsum(zp / zp.sum())

    def _detect_diag(self):
        r = None
        for a, b in self.pairs:
            if b == 0:
                if a != 0:
                    return None
                continue
            if a % b:
                return None
            q = a // b
            if r is None:
                r = q
            elif q != r:
                return None
        return r

    # -- moments (raw table + deficit error bars) ---------------------------

    def mean_xi(self):
        return float(sum(a * q for (a, b), q in self.table.items()))

    def mean_zeta(self):
        return float(sum(b * q for (a, b), q in self.table.items()))

    def var_xi(self):
        m = self.mean_xi()
        return float(sum(a * a * q for (a, b), q in self.table.items()) - m * m)

    def var_zeta(self):
        m = self.mean_zeta()
        return float(sum(b * b * q for (a, b), q in self.table.items()) - m * m)

    def prob(self, a, b):
        return self.table.get((a, b), 0.0)

    # -- sampling ------------------------------------------------------------

    def draw_pairs(self, rng, size):
        idx = np.searchsorted(self._cum, rng.random(size), side="right")
        idx = np.minimum(idx, len(self._cum) - 1)
        return self._a[idx], self._b[idx]

    def draw_pair(self, rng):
        a, b = self.draw_pairs(rng, 1)
        return int(a[0]), int(b[0])

    def draw_zetas(self, rng, size):
        idx = np.searchsorted(self._zeta_cum, rng.random(size), side="right")
        idx = np.minimum(idx, len(self._zeta_cum) - 1)
        return self._zeta_vals[idx]

    def _biased_sampler(self, table):
        pairs = sorted(table)
        p = np.array([table[q] for q in pairs])
        return pairs, np.cumsum(p / p.sum())

    def draw_pair_biased_root(self, rng):
        if self._cum_root is None:
            self._cum_root = self._biased_sampler(self.biased_root)
        pairs, cum = self._cum_root
        i = min(np.searchsorted(cum, rng.random(), side="right"), len(pairs) - 1)
        return pairs[i]

    def draw_pair_biased_white(self, rng):
        if self._cum_white is None:
            self._cum_white = self._biased_sampler(self.biased_white)
        pairs, cum = self._cum_white
        i = min(np.searchsorted(cum, rng.random(), side="right"), len(pairs) - 1)
        return pairs[i]


def offspring_law(chain: GFChain, constants, cutoff=None, eps: float = 1e-12,
                  dps: int = DEFAULT_DPS) -> OffspringLaw:
    """Expand the offspring probability generating function into a table.

    P(xi=a, zeta=b) is the (z^a w^b) coefficient of
    exp(G_{k+1}^{(k)}(w rho, .., z y, ..)) / y.  The default cutoff is the
    smallest value with deficit below ``eps``, capped at 64; an explicitly
    requested cutoff whose deficit exceeds ``eps`` raises RangeError.
    """
    rho = getattr(constants, "rho_mp", None) or mp.mpf(constants.rho)
    yv = getattr(constants, "y_mp", None) or mp.mpf(constants.y)
    ev = ArgEvaluator(chain, dps)
    bmax = 96 if cutoff is None else max(96, cutoff + 16)
    with mp.workdps(dps):
        base = {}
        for b, m, c in ev.terms:
            if b > bmax or m > bmax:
                continue
            key = (b, m)
            base[key] = base.get(key, mp.mpf(0)) + c * rho**b * yv**m
        # exp of the bivariate polynomial, truncated at bmax in each exponent
        result = {(0, 0): mp.mpf(1)}
        power = {(0, 0): mp.mpf(1)}
        for i in range(1, bmax + 1):
            nxt = {}
            for (b1, m1), v1 in power.items():
                for (b2, m2), v2 in base.items():
                    b, m = b1 + b2, m1 + m2
                    if b > bmax or m > bmax:
                        continue
                    nxt[(b, m)] = nxt.get((b, m), mp.mpf(0)) + v1 * v2
            if not nxt:
                break
            power = {k: v / i for k, v in nxt.items()}
            for k, v in power.items():
                result[k] = result.get(k, mp.mpf(0)) + v
        probs = {}
        for (b, m), v in result.items():
            p = v / yv
            if p > 0:
                probs[(m, b)] = p  # (xi=a cliques, zeta=b vertices)
        zeta_mean = float(rho * ev.Fx(rho, yv))

        def deficit_at(c):
            return float(1 - sum(p for (a, b), p in probs.items()
                                 if a <= c and b <= c))

        if cutoff is None:
            cut = None
            for c in range(1, 65):
                if deficit_at(c) < eps:
                    cut = c
                    break
            cut = 64 if cut is None else cut
        else:
            cut = cutoff
            if deficit_at(cut) > eps:
                raise RangeError(
                    f"deficit {deficit_at(cut):.3g} above eps at cutoff {cut}; "
                    "increase the cutoff"
                )
        table = {(a, b): float(p) for (a, b), p in probs.items()
                 if a <= cut and b <= cut}
        return OffspringLaw(table, deficit_at(cut), cut,
                            mean_zeta_certified=zeta_mean)


def tree_constants(law: OffspringLaw, base: AnalyticConstants = None,
                   t=None, k=None) -> AnalyticConstants:
    """Fill the moment-derived constants from an offspring table."""
    out = AnalyticConstants(
        t=base.t if base else t, k=base.k if base else k
    )
    if base:
        for f in fields(base):
            setattr(out, f.name, getattr(base, f.name))
    out.mean_xi = law.mean_xi()
    out.mean_zeta = law.mean_zeta()
    out.var_xi = law.var_xi()
    out.var_zeta = law.var_zeta()
    out.kappa_tree = (law.var_xi() * law.mean_zeta()) ** 0.5 / 2
    return out


def size_probability_from_count(constants, n: int, rooted_count: int) -> float:
    """P(#white = n) = |G^{(k)}_{k,n}| rho^n / (n! y) from an exact count."""
    with mp.workdps(40):
        rho = getattr(constants, "rho_mp", None) or mp.mpf(constants.rho)
        yv = getattr(constants, "y_mp", None) or mp.mpf(constants.y)
        ln = mp.log(mp.mpf(rooted_count)) + n * mp.log(rho) \
            - mp.log(mp.factorial(n)) - mp.log(yv)
        return float(mp.e**ln)


def size_probability(chain: GFChain, constants, n: int) -> float:
    """Exact-coefficient probability that the unconditioned tree has n whites."""
    if n < 0 or n > chain.order:
        raise RangeError(f"n={n} beyond chain order {chain.order}")
    c = chain.count(n, rooted=True)
    if c == 0:
        return 0.0
    return size_probability_from_count(constants, n, c)


def compute_constants(chain: GFChain, tol=1e-10, dps=DEFAULT_DPS,
                      cutoff=None, eps=1e-12, size_ns=None) -> AnalyticConstants:
    """Convenience pipeline: singularity, offspring law, moments, size constant."""
    sing = find_singularity(chain, tol=tol, dps=dps)
    base = AnalyticConstants(t=chain.t, k=chain.k, rho=sing.rho,
                             rho_err=sing.rho_err, y=sing.y, y_err=sing.y_err,
                             residual_phi=sing.residual_phi,
                             residual_phi_y=sing.residual_phi_y,
                             tail_bound=sing.tail_bound,
                             rho_mp=sing.rho_mp, y_mp=sing.y_mp)
    law = offspring_law(chain, base, cutoff=cutoff, eps=eps, dps=dps)
    out = tree_constants(law, base)
    if size_ns is None:
        size_ns = [max(1, chain.order // 2), chain.order]
    vals = []
    for n in size_ns:
        c = chain.count(n, rooted=True)
        if c:
            vals.append(n**1.5 * size_probability_from_count(out, n, c))
    if vals:
        out.size_prob_constant = vals[-1]
        out.size_prob_err = abs(vals[-1] - vals[0]) if len(vals) > 1 else nan
    return out, law
