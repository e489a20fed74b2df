"""Iwahori-Hecke algebras C_q[W] with multi-parameters.

Coefficients are exact Fractions when every sqrt(q_s) is rational and Python
floats/complex numbers otherwise.
"""

import re
from fractions import Fraction
from math import prod

from .scalars import (
    as_fraction,
    conj,
    exact_or_float_sqrt,
    is_exact,
    is_zero,
    scalar_from_json,
    scalar_to_json,
)


class ParameterError(ValueError):
    pass


class MultiParameter:
    """Positive parameters q_s, constant on generator conjugacy classes."""

    def __init__(self, system, values, force_float=False):
        self.system = system
        if isinstance(values, dict):
            raw = [None] * system.rank
            for key, val in values.items():
                raw[system.generator(key)] = val
            if any(v is None for v in raw):
                raise ParameterError("missing parameter values")
        elif isinstance(values, (list, tuple)):
            if len(values) != system.rank:
                raise ParameterError(f"expected {system.rank} parameter values, got {len(values)}")
            raw = list(values)
        else:
            raw = [values] * system.rank
        parsed = []
        for v in raw:
            f = as_fraction(v)
            parsed.append(f if f is not None else float(v))
        if any(not (v > 0) for v in parsed):
            raise ParameterError("parameters must be positive")
        for cls in system.conjugacy_classes():
            if len({parsed[s] for s in cls}) > 1:
                raise ParameterError("parameters must be constant on conjugacy classes")
        # kept for exact region tests even when sqrt forces float arithmetic
        self.rational_values = tuple(parsed) if all(isinstance(v, Fraction) for v in parsed) else None
        roots = [exact_or_float_sqrt(v) for v in parsed]
        self.exact = not force_float and all(is_exact(r) for r in roots)
        if not self.exact:
            parsed = [float(v) for v in parsed]
            roots = [float(r) for r in roots]
        self.values = tuple(parsed)
        self.roots = tuple(roots)
        self.ps = tuple((q - 1) / r for q, r in zip(parsed, roots))

    @classmethod
    def one(cls, system):
        return cls(system, 1)

    def __eq__(self, other):
        return (
            isinstance(other, MultiParameter)
            and self.system == other.system
            and self.values == other.values
            and self.exact == other.exact
        )

    def __hash__(self):
        return hash((self.system, self.values, self.exact))

    def __repr__(self):
        vals = ", ".join(f"{g}={scalar_to_json(v)}" for g, v in zip(self.system.generators, self.values))
        return f"MultiParameter({vals})"

    def value(self, s):
        return self.values[s]

    def p(self, s):
        """p_s(q) = q_s^{-1/2} (q_s - 1)."""
        return self.ps[s]

    def root(self, s):
        return self.roots[s]

    def q_word(self, g):
        return prod((self.values[s] for s in g), start=Fraction(1) if self.exact else 1.0)

    def is_one(self):
        return all(v == 1 for v in self.values)

    def flipped(self, eps):
        """Parameter with q'_s = q_s^{eps_s}."""
        values = self.rational_values or self.values
        new = [v if e == 1 else 1 / v for v, e in zip(values, eps)]
        return MultiParameter(self.system, new, force_float=not self.exact)

    def to_float(self):
        return MultiParameter(self.system, [float(v) for v in self.values], force_float=True)

    def to_json(self):
        return {g: scalar_to_json(v) for g, v in zip(self.system.generators, self.values)}


def _coerce(param, c):
    if not param.exact and is_exact(c):
        return float(c)
    return c


def _accumulate(out, key, c):
    # plain assignment keeps Fractions off the slow int + Fraction path
    out[key] = out[key] + c if key in out else c


class HeckeElement:
    """Finitely supported element sum_w x(w) T_w of C_q[W]."""

    __slots__ = ("param", "coeffs")

    def __init__(self, param, coeffs=None):
        self.param = param
        clean = {}
        for g, c in (coeffs or {}).items():
            c = _coerce(param, c)
            if not is_zero(c):
                clean[tuple(g)] = c
        self.coeffs = clean

    @property
    def system(self):
        return self.param.system

    @classmethod
    def basis(cls, param, g, coefficient=1):
        return cls(param, {tuple(g): coefficient})

    @classmethod
    def identity(cls, param):
        return cls(param, {(): 1})

    @classmethod
    def generator(cls, param, s):
        return cls(param, {(param.system.generator(s),): 1})

    @classmethod
    def word(cls, param, word):
        return cls(param, {param.system.reduce(word): 1})

    def __repr__(self):
        return f"HeckeElement({self.format()})"

    def __iter__(self):
        return iter(sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0])))

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, g):
        return self.coeffs.get(tuple(g), 0)

    def _check(self, other):
        if self.param != other.param:
            raise ParameterError("elements live in different Hecke algebras")

    def __eq__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.param == other.param and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.param, frozenset(self.coeffs.items())))

    def distance(self, other):
        """Max-norm distance of coefficient vectors."""
        self._check(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self[g] - other[g]) for g in keys), default=0)

    def __add__(self, other):
        if not isinstance(other, HeckeElement):
            other = HeckeElement(self.param, {(): other})
        self._check(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return HeckeElement(self.param, out)

    __radd__ = __add__

    def __neg__(self):
        return HeckeElement(self.param, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return HeckeElement(self.param, {g: c * v for g, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return self.multiply(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        if is_exact(c):
            c = Fraction(c)
        return self.scale(1 / c)

    def generator_times(self, s):
        """T_s · self."""
        return HeckeElement(self.param, self._generator_times(s, self.coeffs))

    def _generator_times(self, s, coeffs):
        system, p = self.system, self.param.p(s)
        out = {}
        for w, c in coeffs.items():
            sw = system.left_mul(s, w)
            _accumulate(out, sw, c)
            if len(sw) < len(w):
                _accumulate(out, w, p * c)
        return out

    def times_generator(self, s):
        """self · T_s."""
        system, p = self.system, self.param.p(s)
        out = {}
        for w, c in self.coeffs.items():
            ws = system.right_mul(w, s)
            out[ws] = out.get(ws, 0) + c
            if len(ws) < len(w):
                out[w] = out.get(w, 0) + p * c
        return HeckeElement(self.param, out)

    def multiply(self, other):
        """Peel the first letter of each stored reduced word: T_v T_w = T_s (T_v' T_w)."""
        self._check(other)
        out = {}
        for v, c in self.coeffs.items():
            acc = other.coeffs
            for s in reversed(v):
                acc = self._generator_times(s, acc)
            for g, d in acc.items():
                _accumulate(out, g, c * d)
        return HeckeElement(self.param, out)

    def adjoint(self):
        system = self.system
        return HeckeElement(self.param, {system.inverse(g): conj(c) for g, c in self.coeffs.items()})

    def trace(self):
        return self.coeffs.get((), 0)

    def l2norm_squared(self):
        return sum((c * conj(c)).real if isinstance(c, complex) else c * c for c in self.coeffs.values())

    def l2norm(self):
        return float(self.l2norm_squared()) ** 0.5

    def chi(self, d):
        """Word length projection onto length d."""
        return HeckeElement(self.param, {g: c for g, c in self.coeffs.items() if len(g) == d})

    def degree(self):
        return max((len(g) for g in self.coeffs), default=0)

    def is_homogeneous(self, d):
        return all(len(g) == d for g in self.coeffs)

    def to_float(self):
        fparam = self.param if not self.param.exact else self.param.to_float()
        return HeckeElement(fparam, {g: complex(c) if isinstance(c, complex) else float(c) for g, c in self.coeffs.items()})

    def format(self):
        if not self.coeffs:
            return "0"
        parts = []
        for g, c in self:
            word = ",".join(self.system.generators[s] for s in g)
            text = f"({c.real!r}{c.imag:+}j)" if isinstance(c, complex) else scalar_to_json(c)
            parts.append(f"{text}*T[{word}]")
        return " + ".join(parts)

    def to_json(self):
        return {self.system.format_word(g): scalar_to_json(c) for g, c in self}

    @classmethod
    def from_json(cls, param, data):
        return cls(param, {param.system.reduce(word): scalar_from_json(c) for word, c in data.items()})


_TERM = re.compile(r"^(?P<coef>.*?)\s*\*?\s*T\[(?P<word>[^\]]*)\]$")


def _split_terms(text):
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start and text[i - 1] not in "eE*/(":
            terms.append(text[start:i])
            start = i
    terms.append(text[start:])
    out, sign = [], ""
    for t in (t.strip() for t in terms):
        if t in ("+", "-"):
            # "a + -b": fold the lone sign into the next term
            sign = "-" if (sign == "-") != (t == "-") else ""
            continue
        if t:
            if sign == "-":
                t = t[1:].strip() if t.startswith("-") else "-" + t.lstrip("+").strip()
            out.append(t)
            sign = ""
    return out


def _parse_coefficient(text):
    text = text.replace(" ", "")
    if text in ("", "+"):
        return 1
    if text == "-":
        return -1
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    frac = as_fraction(text.lstrip("+"))
    if frac is not None:
        return frac if frac.denominator != 1 else int(frac)
    try:
        return complex(text) if "j" in text else float(text)
    except ValueError:
        raise ValueError(f"bad coefficient {text!r}") from None


def parse_element(param, text):
    """Parse a literal such as ``T[s,t] + 0.5*T[] - 1/4*T[s]``."""
    system = param.system
    out = HeckeElement(param)
    text = text.strip()
    if not text or text == "0":
        return out
    for term in _split_terms(text):
        m = _TERM.match(term)
        if m:
            coef = _parse_coefficient(m.group("coef"))
            letters = [x for x in re.split(r"[,\s]+", m.group("word").strip()) if x]
            if len(letters) == 1 and letters[0] not in system.index:
                g = system.reduce(letters[0])
            else:
                g = system.reduce(tuple(system.generator(x) for x in letters))
        else:
            coef, g = _parse_coefficient(term), ()
        out = out + HeckeElement(param, {g: coef})
    return out


def _check_right_angled(system):
    if not system.right_angled:
        raise ParameterError("the map pi_{q,1} is only available for right-angled systems")


def pi_q1_word(param, g, cache=None):
    """Image of T_g^{(1)} under pi_{q,1}: product of (a_s + b_s T_s) along g."""
    _check_right_angled(param.system)
    if cache is not None and g in cache:
        return cache[g]
    acc = HeckeElement.identity(param)
    for s in reversed(g):
        q, r = param.value(s), param.root(s)
        alpha = (1 - q) / (1 + q)
        beta = 2 * r / (1 + q)
        acc = acc.scale(alpha) + acc.generator_times(s).scale(beta)
    if cache is not None:
        cache[g] = acc
    return acc


def pi_q1(x, param, cache=None):
    """Transport x in C_1[W] to C_q[W] via T_s ↦ (1-q_s)/(1+q_s) + 2 sqrt(q_s)/(1+q_s) T_s."""
    if not x.param.is_one():
        raise ParameterError("pi_{q,1} takes an element at parameter 1")
    _check_right_angled(param.system)
    cache = {} if cache is None else cache
    out = HeckeElement(param)
    for g, c in x.coeffs.items():
        out = out + pi_q1_word(param, g, cache).scale(c)
    return out


def validate_signs(system, eps):
    eps = tuple(eps[system.generators[s]] if isinstance(eps, dict) else eps[s] for s in range(system.rank))
    if any(e not in (1, -1) for e in eps):
        raise ParameterError("signs must be +1 or -1")
    for cls in system.conjugacy_classes():
        if len({eps[s] for s in cls}) > 1:
            raise ParameterError("signs must be constant on conjugacy classes")
    return eps


def sign_flip(x, eps):
    """The *-isomorphism C_q[W] -> C_q'[W], T_s ↦ eps_s T_s with q'_s = q_s^{eps_s}."""
    eps = validate_signs(x.system, eps)
    target = x.param.flipped(eps)
    return HeckeElement(target, {g: c * prod(eps[s] for s in g) for g, c in x.coeffs.items()})


def character_value(param, g):
    """chi_q(T_g) = q_g^{1/2}."""
    return prod((param.root(s) for s in g), start=Fraction(1) if param.exact else 1.0)


def character_apply(x):
    return sum((c * character_value(x.param, g) for g, c in x.coeffs.items()), start=0)
