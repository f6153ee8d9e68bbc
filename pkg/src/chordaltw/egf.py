"""Integer-exact engine for the generating-function chain.

Series here are exponential in the vertex variable x1 and ordinary in any
further clique-marking variables: a :class:`Egf` stores, for each x1-degree
n, a sparse polynomial ``{exponent-tuple: int}`` whose integers are
``n! * [x1^n * vars^exps] F``.  All chain series have integer coefficients in
this normalization (they count labelled structures), which keeps the heavy
recursions in pure ``int`` arithmetic.

The module also provides the two implicit-equation solvers used by the
chain (substitution into an ordinary variable, and substitution into x1
itself for vertex-rooted classes) plus Lagrange-inversion extraction of
single high-order coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import ConsistencyError, DomainError

Key = tuple


def _exact_div(value: int, d: int) -> int:
    q, r = divmod(value, d)
    if r:
        raise ConsistencyError(f"non-exact division {value} / {d}")
    return q


class Egf:
    """EGF in x1 with integer-normalized coefficients, ordinary extra vars."""

    __slots__ = ("vars", "order", "coeffs")

    def __init__(self, vars, order, coeffs=None):
        self.vars = tuple(vars)
        self.order = order
        self.coeffs = coeffs if coeffs is not None else [dict() for _ in range(order + 1)]

    def copy(self):
        return Egf(self.vars, self.order, [dict(d) for d in self.coeffs])

    @classmethod
    def zero(cls, vars, order):
        return cls(vars, order)

    @classmethod
    def one(cls, vars, order):
        s = cls(vars, order)
        s.coeffs[0][(0,) * len(s.vars)] = 1
        return s

    def term(self, n, key):
        if n > self.order:
            return 0
        return self.coeffs[n].get(tuple(key), 0)

    def is_zero_upto(self, n):
        return all(not self.coeffs[i] for i in range(min(n, self.order) + 1))

    def valuation_ge(self, v):
        return all(not self.coeffs[i] for i in range(min(v, self.order + 1)))

    def add_inplace(self, n, key, value):
        if value == 0:
            return
        d = self.coeffs[n]
        s = d.get(key, 0) + value
        if s:
            d[key] = s
        else:
            del d[key]

    # -- ring ----------------------------------------------------------------

    def mul(self, other, order=None):
        if self.vars != other.vars:
            raise ConsistencyError("variable mismatch in Egf.mul")
        order = min(self.order, other.order) if order is None else order
        out = Egf(self.vars, order)
        for n in range(order + 1):
            acc = out.coeffs[n]
            for i in range(n + 1):
                a = self.coeffs[i] if i <= self.order else None
                b = other.coeffs[n - i] if n - i <= other.order else None
                if not a or not b:
                    continue
                c = comb(n, i)
                for ka, va in a.items():
                    w = c * va
                    for kb, vb in b.items():
                        key = tuple(x + y for x, y in zip(ka, kb))
                        s = acc.get(key, 0) + w * vb
                        if s:
                            acc[key] = s
                        else:
                            del acc[key]
        return out

    def scale_int(self, c):
        out = Egf(self.vars, self.order)
        if c:
            for n, d in enumerate(self.coeffs):
                out.coeffs[n] = {k: c * v for k, v in d.items()}
        return out

    def exp(self, order=None):
        """exp of a series with x1-valuation >= 1 (EGF differential recurrence)."""
        if self.coeffs[0]:
            raise DomainError("Egf.exp needs vanishing x1-constant part")
        order = self.order if order is None else order
        out = Egf.one(self.vars, order)
        for n in range(1, order + 1):
            acc = out.coeffs[n]
            for j in range(1, n + 1):
                dj = self.coeffs[j] if j <= self.order else None
                bm = out.coeffs[n - j]
                if not dj or not bm:
                    continue
                c = comb(n - 1, j - 1)
                for ka, va in dj.items():
                    w = c * va
                    for kb, vb in bm.items():
                        key = tuple(x + y for x, y in zip(ka, kb))
                        s = acc.get(key, 0) + w * vb
                        if s:
                            acc[key] = s
                        else:
                            del acc[key]
        return out

    # -- variable plumbing -----------------------------------------------------

    def specialize(self, name):
        """Set one ordinary variable to 1 (sum over its exponent)."""
        vi = self.vars.index(name)
        nvars = self.vars[:vi] + self.vars[vi + 1 :]
        out = Egf(nvars, self.order)
        for n, d in enumerate(self.coeffs):
            acc = out.coeffs[n]
            for k, v in d.items():
                key = k[:vi] + k[vi + 1 :]
                s = acc.get(key, 0) + v
                if s:
                    acc[key] = s
                else:
                    del acc[key]
        return out

    def univariate(self):
        """Collapse all ordinary variables; returns plain int list."""
        out = [0] * (self.order + 1)
        for n, d in enumerate(self.coeffs):
            out[n] = sum(d.values())
        return out

    def diff_x1(self):
        out = Egf(self.vars, self.order - 1)
        for n in range(self.order):
            out.coeffs[n] = dict(self.coeffs[n + 1])
        return out

    def integrate_x1(self):
        out = Egf(self.vars, self.order + 1)
        for n in range(1, self.order + 2):
            out.coeffs[n] = dict(self.coeffs[n - 1])
        return out

    def max_exponent(self, name):
        vi = self.vars.index(name)
        m = 0
        for d in self.coeffs:
            for k in d:
                if k[vi] > m:
                    m = k[vi]
        return m


def root_step(s: Egf, j: int) -> Egf:
    """Clique-rooting at level j: j! * (prod_{i<j} x_i^-C(j,i)) * d/dx_j.

    Tracked variables named "x2".."xt" get their exponents shifted; untracked
    ones are already specialized to 1 so their prefactor is a no-op.  The x1
    shift by -j folds the EGF renormalization into one exact division.
    """
    if j == 1:
        return s.diff_x1()
    vi = s.vars.index(f"x{j}")
    shifts = [comb(j, int(v[1:])) if 2 <= int(v[1:]) <= j - 1 else 0 for v in s.vars]
    out = Egf(s.vars, s.order - j)
    for n in range(out.order + 1):
        src = s.coeffs[n + j]
        denom = comb(n + j, j)
        acc = out.coeffs[n]
        for k, v in src.items():
            m = k[vi]
            if m == 0:
                continue
            key = list(k)
            key[vi] = m - 1
            for p, sh in enumerate(shifts):
                if sh:
                    key[p] -= sh
                    if key[p] < 0:
                        raise ConsistencyError("negative exponent in root_step prefactor")
            acc[tuple(key)] = _exact_div(m * v, denom)
    return out


def unroot_step(q: Egf, j: int) -> Egf:
    """Un-rooting at level j: (1/j!) * (prod_{i<j} x_i^C(j,i)) * integral dx_j."""
    if j == 1:
        return q.integrate_x1()
    vi = q.vars.index(f"x{j}")
    shifts = [comb(j, int(v[1:])) if 2 <= int(v[1:]) <= j - 1 else 0 for v in q.vars]
    out = Egf(q.vars, q.order + j)
    for n in range(q.order + 1):
        src = q.coeffs[n]
        factor = comb(n + j, j)
        acc = out.coeffs[n + j]
        for k, v in src.items():
            m = k[vi]
            key = list(k)
            key[vi] = m + 1
            for p, sh in enumerate(shifts):
                if sh:
                    key[p] += sh
            acc[tuple(key)] = _exact_div(factor * v, m + 1)
    return out


def solve_implicit_ordinary(r: Egf, name: str, order: int) -> Egf:
    """Solve Q = exp(R with x_j -> x_j*Q) by x1-degree propagation.

    Valid because every term of R has x1-degree >= 1: the degree-n
    coefficient of the right side only involves Q below degree n.
    """
    if not r.valuation_ge(1):
        raise ConsistencyError("implicit equation argument has a constant term")
    vi = r.vars.index(name)
    powers_needed = sorted({k[vi] for d in r.coeffs for k in d})
    max_m = powers_needed[-1] if powers_needed else 0
    q = Egf(r.vars, order)
    q.coeffs[0][(0,) * len(r.vars)] = 1
    # qpow[m][d] = EGF-int coefficients of Q^m at x1-degree d
    qpow = [[dict() for _ in range(order + 1)] for _ in range(max_m + 1)]
    qpow[0][0][(0,) * len(r.vars)] = 1
    d_series = [dict() for _ in range(order + 1)]

    def extend_powers(d):
        for m in range(1, max_m + 1):
            acc = qpow[m][d]
            for i in range(d + 1):
                a = q.coeffs[i]
                b = qpow[m - 1][d - i]
                if not a or not b:
                    continue
                c = comb(d, i)
                for ka, va in a.items():
                    w = c * va
                    for kb, vb in b.items():
                        key = tuple(x + y for x, y in zip(ka, kb))
                        s = acc.get(key, 0) + w * vb
                        if s:
                            acc[key] = s
                        else:
                            del acc[key]

    for n in range(1, order + 1):
        extend_powers(n - 1)
        acc = d_series[n]
        for b in range(1, min(n, r.order) + 1):
            src = r.coeffs[b]
            if not src:
                continue
            c = comb(n, b)
            for k, v in src.items():
                m = k[vi]
                w = c * v
                for kq, vq in qpow[m][n - b].items():
                    key = tuple(x + y for x, y in zip(k, kq))
                    s = acc.get(key, 0) + w * vq
                    if s:
                        acc[key] = s
                    else:
                        del acc[key]
        accq = q.coeffs[n]
        for j in range(1, n + 1):
            dj = d_series[j]
            bm = q.coeffs[n - j]
            if not dj or not bm:
                continue
            c = comb(n - 1, j - 1)
            for ka, va in dj.items():
                w = c * va
                for kb, vb in bm.items():
                    key = tuple(x + y for x, y in zip(ka, kb))
                    s = accq.get(key, 0) + w * vb
                    if s:
                        accq[key] = s
                    else:
                        del accq[key]
    return q


def solve_implicit_main(a: Egf, order: int) -> Egf:
    """Solve Y = exp(A with x1 -> x1*Y): the vertex-rooted (k=1) equation.

    Maintains u = x1*Y and the divided powers u^b/b! incrementally; memory
    and time are O(order^2)-ish per degree, cubic overall.  Use
    lagrange_rooted_count for isolated high-order coefficients instead.
    """
    if not a.valuation_ge(1):
        raise ConsistencyError("implicit equation argument has a constant term")
    nv = len(a.vars)
    zero_key = (0,) * nv
    y = Egf(a.vars, order)
    y.coeffs[0][zero_key] = 1
    u = [dict() for _ in range(order + 1)]  # u[n] = n![x^n] x1*Y
    # vpow[b][n] = n![x^n] u^b / b!
    vpow = [[dict() for _ in range(order + 1)] for _ in range(order + 1)]
    vpow[0][0][zero_key] = 1
    d_series = [dict() for _ in range(order + 1)]

    def extend(d):
        # u at degree d from Y at degree d-1
        if d >= 1:
            u[d] = {k: d * v for k, v in y.coeffs[d - 1].items()}
        for b in range(1, d + 1):
            acc = {}
            for i in range(b - 1, d):  # u^( b-1 ) has valuation b-1
                pa = vpow[b - 1][i]
                ub = u[d - i]
                if not pa or not ub:
                    continue
                c = comb(d, i)
                for ka, va in pa.items():
                    w = c * va
                    for kb, vb in ub.items():
                        key = tuple(x + y2 for x, y2 in zip(ka, kb))
                        s = acc.get(key, 0) + w * vb
                        if s:
                            acc[key] = s
                        else:
                            del acc[key]
            vpow[b][d] = {k: _exact_div(v, b) for k, v in acc.items()}

    for n in range(1, order + 1):
        extend(n)
        acc = d_series[n]
        for b in range(1, min(n, a.order) + 1):
            src = a.coeffs[b]
            if not src:
                continue
            for k, v in src.items():
                for kq, vq in vpow[b][n].items():
                    key = tuple(x + y2 for x, y2 in zip(k, kq))
                    s = acc.get(key, 0) + v * vq
                    if s:
                        acc[key] = s
                    else:
                        del acc[key]
        accq = y.coeffs[n]
        for j in range(1, n + 1):
            dj = d_series[j]
            bm = y.coeffs[n - j]
            if not dj or not bm:
                continue
            c = comb(n - 1, j - 1)
            for ka, va in dj.items():
                w = c * va
                for kb, vb in bm.items():
                    key = tuple(x + y2 for x, y2 in zip(ka, kb))
                    s = accq.get(key, 0) + w * vb
                    if s:
                        accq[key] = s
                    else:
                        del accq[key]
    return y


def exp_univariate(d: list, order: int) -> list:
    """EGF exp of an integer coefficient list with d[0] == 0."""
    if d and d[0]:
        raise DomainError("exp_univariate needs zero constant term")
    b = [0] * (order + 1)
    b[0] = 1
    for n in range(1, order + 1):
        acc = 0
        for j in range(1, min(n, len(d) - 1) + 1):
            if d[j]:
                acc += comb(n - 1, j - 1) * d[j] * b[n - j]
        b[n] = acc
    return b


def lagrange_rooted_count(a: list, n: int) -> int:
    """n![x1^n] Y for Y = exp(A(x1*Y)), via Lagrange inversion.

    Uses [x^n](x1*Y) = (1/(n+1)) [w^n] exp((n+1) A(w)); one univariate exp
    recurrence of length n, so single large-n coefficients stay affordable.
    ``a`` is the EGF-int coefficient list of A and must extend to degree n.
    """
    if n == 0:
        return 1
    if len(a) <= n:
        raise ConsistencyError("argument series too short for Lagrange extraction")
    d = [(n + 1) * c for c in a[: n + 1]]
    e = exp_univariate(d, n)
    return _exact_div(e[n], n + 1)
