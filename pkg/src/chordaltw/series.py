"""Sparse truncated multivariate power series with exact rational coefficients.

A :class:`MultiSeries` stores a finite map from exponent vectors to
``Fraction`` coefficients, together with per-variable truncation bounds
(inclusive maximum exponents).  Every operation re-truncates its result;
whenever a nonzero coefficient is discarded at the boundary the ``clipped``
flag is set so downstream callers can detect insufficient order.

Values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Union

from .errors import ConfigurationError, DomainError, PrecisionError, RangeError

Scalar = Union[int, Fraction]


class NumericEval:
    """Result of evaluating a series at a numeric point.

    ``value`` is exact (Fraction) when all bindings were rational, float
    otherwise.  ``tail_bound`` estimates the truncation error of the series
    itself via a geometric extrapolation of the last two retained degrees.
    """

    __slots__ = ("value", "tail_bound")

    def __init__(self, value, tail_bound):
        self.value = value
        self.tail_bound = tail_bound

    def __repr__(self):
        return f"NumericEval({self.value!r}, tail_bound={self.tail_bound!r})"

    def __float__(self):
        return float(self.value)


class MultiSeries:
    """Truncated power series in an ordered tuple of named variables."""

    __slots__ = ("variables", "truncation", "coefficients", "clipped")

    def __init__(self, variables, truncation, coefficients=None, clipped=False):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ConfigurationError(f"duplicate variables in {variables}")
        if isinstance(truncation, Mapping):
            truncation = tuple(truncation[v] for v in variables)
        else:
            truncation = tuple(truncation)
        if len(truncation) != len(variables):
            raise ConfigurationError("truncation must give a bound per variable")
        if any(t < 0 for t in truncation):
            raise ConfigurationError("truncation bounds must be non-negative")
        coeffs = {}
        if coefficients:
            for exps, c in coefficients.items():
                exps = tuple(exps)
                if len(exps) != len(variables):
                    raise ConfigurationError(f"exponent vector {exps} has wrong arity")
                if any(e < 0 for e in exps):
                    raise ConfigurationError(f"negative exponent in {exps}")
                c = Fraction(c)
                if c == 0:
                    continue
                if any(e > t for e, t in zip(exps, truncation)):
                    raise ConfigurationError(
                        f"exponent {exps} outside truncation {truncation}"
                    )
                coeffs[exps] = c
        self.variables = variables
        self.truncation = truncation
        self.coefficients = coeffs
        self.clipped = bool(clipped)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, variables, truncation):
        return cls(variables, truncation)

    @classmethod
    def constant(cls, variables, truncation, value):
        zero_exp = (0,) * len(tuple(variables))
        return cls(variables, truncation, {zero_exp: Fraction(value)})

    @classmethod
    def one(cls, variables, truncation):
        return cls.constant(variables, truncation, 1)

    @classmethod
    def variable(cls, variables, truncation, name):
        variables = tuple(variables)
        if name not in variables:
            raise ConfigurationError(f"{name!r} not among {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, truncation, {exps: Fraction(1)})

    @classmethod
    def monomial(cls, variables, truncation, exponents, coefficient=1):
        return cls(variables, truncation, {tuple(exponents): Fraction(coefficient)})

    # -- basics ------------------------------------------------------------

    def _same_universe(self, other):
        if self.variables != other.variables or self.truncation != other.truncation:
            raise ConfigurationError(
                "operands must share variable set and truncation: "
                f"{self.variables}/{self.truncation} vs "
                f"{other.variables}/{other.truncation}"
            )

    def _index(self, name):
        try:
            return self.variables.index(name)
        except ValueError:
            raise ConfigurationError(f"{name!r} not among {self.variables}") from None

    def is_zero(self):
        return not self.coefficients

    def constant_term(self):
        return self.coefficients.get((0,) * len(self.variables), Fraction(0))

    def coefficient(self, exponents):
        """Coefficient at an exponent vector; RangeError outside truncation.

        A zero return is a true zero: queries beyond the truncation bounds
        raise instead of returning 0.
        """
        exps = tuple(exponents)
        if len(exps) != len(self.variables):
            raise RangeError(f"exponent vector {exps} has wrong arity")
        if any(e < 0 or e > t for e, t in zip(exps, self.truncation)):
            raise RangeError(f"exponent {exps} outside truncation {self.truncation}")
        return self.coefficients.get(exps, Fraction(0))

    def terms(self):
        return sorted(self.coefficients.items())

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.truncation == other.truncation
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash(
            (self.variables, self.truncation, frozenset(self.coefficients.items()))
        )

    def __repr__(self):
        if not self.coefficients:
            body = "0"
        else:
            parts = []
            for exps, c in self.terms()[:8]:
                mono = "*".join(
                    f"{v}^{e}" if e > 1 else v
                    for v, e in zip(self.variables, exps)
                    if e
                )
                parts.append(f"{c}" + (f"*{mono}" if mono else ""))
            body = " + ".join(parts)
            if len(self.coefficients) > 8:
                body += " + ..."
        flag = ", clipped" if self.clipped else ""
        return f"<MultiSeries {body} | trunc={self.truncation}{flag}>"

    # -- ring operations ---------------------------------------------------

    def __neg__(self):
        return MultiSeries(
            self.variables,
            self.truncation,
            {e: -c for e, c in self.coefficients.items()},
            self.clipped,
        )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiSeries.constant(self.variables, self.truncation, other)
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._same_universe(other)
        coeffs = dict(self.coefficients)
        for e, c in other.coefficients.items():
            s = coeffs.get(e, Fraction(0)) + c
            if s:
                coeffs[e] = s
            else:
                coeffs.pop(e, None)
        return MultiSeries(
            self.variables, self.truncation, coeffs, self.clipped or other.clipped
        )

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiSeries.constant(self.variables, self.truncation, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return MultiSeries.zero(self.variables, self.truncation)
            return MultiSeries(
                self.variables,
                self.truncation,
                {e: c * other for e, c in self.coefficients.items()},
                self.clipped,
            )
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._same_universe(other)
        coeffs = {}
        dropped = False
        trunc = self.truncation
        for ea, ca in self.coefficients.items():
            for eb, cb in other.coefficients.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if any(x > t for x, t in zip(e, trunc)):
                    dropped = True
                    continue
                s = coeffs.get(e, Fraction(0)) + ca * cb
                if s:
                    coeffs[e] = s
                else:
                    coeffs.pop(e, None)
        return MultiSeries(
            self.variables,
            trunc,
            coeffs,
            self.clipped or other.clipped or dropped,
        )

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise DomainError("negative powers not supported")
        result = MultiSeries.one(self.variables, self.truncation)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus ----------------------------------------------------------

    def differentiate(self, name):
        """Partial derivative: c*v^m -> c*m*v^(m-1)."""
        i = self._index(name)
        coeffs = {}
        for e, c in self.coefficients.items():
            if e[i] == 0:
                continue
            ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
            coeffs[ne] = c * e[i]
        return MultiSeries(self.variables, self.truncation, coeffs, self.clipped)

    def integrate(self, name):
        """Antiderivative in one variable with zero integration constant.

        Terms whose exponent would exceed the truncation bound are dropped
        and the result is marked clipped; the retained coefficients are exact.
        """
        i = self._index(name)
        coeffs = {}
        dropped = False
        for e, c in self.coefficients.items():
            m = e[i]
            if m + 1 > self.truncation[i]:
                dropped = True
                continue
            ne = e[:i] + (m + 1,) + e[i + 1 :]
            coeffs[ne] = c / (m + 1)
        return MultiSeries(
            self.variables, self.truncation, coeffs, self.clipped or dropped
        )

    def exp(self):
        """exp of a series with zero constant term, truncated exactly.

        Computed by the differential recurrence on the total-degree grading,
        so cost is polynomial in the truncation size.
        """
        if self.constant_term() != 0:
            raise DomainError("exp requires zero constant term")
        if self.is_zero():
            return MultiSeries.one(self.variables, self.truncation)
        dmax = sum(self.truncation)
        a_by_deg = {}
        for e, c in self.coefficients.items():
            a_by_deg.setdefault(sum(e), {})[e] = c
        trunc = self.truncation
        b_by_deg = {0: {(0,) * len(self.variables): Fraction(1)}}
        for d in range(1, dmax + 1):
            acc = {}
            for e1 in range(1, d + 1):
                a_d = a_by_deg.get(e1)
                b_d = b_by_deg.get(d - e1)
                if not a_d or not b_d:
                    continue
                for ea, ca in a_d.items():
                    w = ca * e1
                    for eb, cb in b_d.items():
                        e = tuple(x + y for x, y in zip(ea, eb))
                        if any(x > t for x, t in zip(e, trunc)):
                            continue
                        s = acc.get(e, Fraction(0)) + w * cb
                        if s:
                            acc[e] = s
                        else:
                            acc.pop(e, None)
            if acc:
                b_by_deg[d] = {e: c / d for e, c in acc.items()}
        coeffs = {}
        for grp in b_by_deg.values():
            coeffs.update(grp)
        return MultiSeries(self.variables, self.truncation, coeffs, clipped=True)

    # -- substitution ------------------------------------------------------

    def substitute(self, bindings, tol=None):
        """Compose with series bindings or evaluate at a numeric point.

        With series (or exact rational) bindings for some variables the
        result is the exactly composed, re-truncated series.  Substituting a
        series with nonzero constant term is only allowed when this series is
        exact (not clipped), since a dropped tail would contribute at order
        zero.  When every variable is bound to a number the result is a
        :class:`NumericEval` carrying a geometric tail estimate; if ``tol``
        is given and the estimate exceeds it a PrecisionError is raised.
        """
        bindings = dict(bindings)
        for name in bindings:
            self._index(name)
        numeric = set(self.variables) == set(bindings) and all(
            isinstance(v, (int, float, Rational)) for v in bindings.values()
        )
        if numeric:
            return self._evaluate(bindings, tol)
        return self._compose(bindings)

    def _evaluate(self, bindings, tol):
        exact = all(isinstance(v, (int, Rational)) for v in bindings.values())
        if exact:
            point = [Fraction(bindings[v]) for v in self.variables]
        else:
            point = [float(bindings[v]) for v in self.variables]
        by_deg = {}
        for e, c in self.coefficients.items():
            term = c if exact else float(c)
            for x, m in zip(point, e):
                if m:
                    term *= x**m
            by_deg[sum(e)] = by_deg.get(sum(e), Fraction(0) if exact else 0.0) + term
        value = sum(by_deg.values()) if by_deg else (Fraction(0) if exact else 0.0)
        degs = sorted(d for d, t in by_deg.items() if t != 0)
        if len(degs) >= 2:
            last, prev = by_deg[degs[-1]], by_deg[degs[-2]]
            ratio = abs(float(last)) / abs(float(prev)) if prev else 0.99
        elif degs:
            last = by_deg[degs[-1]]
            ratio = 0.99
        else:
            last = 0.0
            ratio = 0.0
        ratio = min(max(ratio, 0.0), 0.99)
        bound = abs(float(last)) * ratio / (1.0 - ratio)
        if tol is not None and bound > tol:
            raise PrecisionError(
                f"tail estimate {bound:.3g} exceeds tolerance {tol:.3g}",
                achieved=bound,
            )
        return NumericEval(value, bound)

    def _compose(self, bindings):
        reps = {}
        universe = None
        for name, val in bindings.items():
            if isinstance(val, (int, Rational)):
                reps[name] = ("const", Fraction(val))
                continue
            if not isinstance(val, MultiSeries):
                raise ConfigurationError(
                    f"binding for {name!r} must be a series or exact rational"
                )
            if universe is None:
                universe = (val.variables, val.truncation)
            elif (val.variables, val.truncation) != universe:
                raise ConfigurationError("series bindings must share one universe")
            if val.constant_term() != 0 and self.clipped:
                raise DomainError(
                    f"binding for {name!r} has nonzero constant term but the "
                    "series is clipped (unbounded-order position)"
                )
            reps[name] = ("series", val)
        if universe is None:
            universe = (self.variables, self.truncation)
        uvars, utrunc = universe
        for v in self.variables:
            if v not in bindings and v not in uvars:
                raise ConfigurationError(
                    f"unbound variable {v!r} absent from the binding universe"
                )
        out = MultiSeries.zero(uvars, utrunc)
        pow_cache = {}

        def power(name, m):
            kind, val = reps[name]
            key = (name, m)
            if key not in pow_cache:
                if kind == "const":
                    pow_cache[key] = val**m
                else:
                    pow_cache[key] = val**m
            return pow_cache[key]

        for e, c in self.coefficients.items():
            term = MultiSeries.constant(uvars, utrunc, c)
            scalar = Fraction(1)
            for v, m in zip(self.variables, e):
                if m == 0:
                    continue
                if v in reps:
                    p = power(v, m)
                    if isinstance(p, Fraction):
                        scalar *= p
                    else:
                        term = term * p
                else:
                    term = term * MultiSeries.variable(uvars, utrunc, v) ** m
            out = out + term * scalar
        if self.clipped:
            out = MultiSeries(out.variables, out.truncation, out.coefficients, True)
        return out


def binomial(n, k):
    return math.comb(n, k)
