"""Coxeter systems: normal forms, balls, conjugacy classes and type classification.

Group elements are tuples of generator indices holding the canonical normal
form (the lexicographically smallest reduced word), so equality of elements is
tuple equality and ``len`` is the word length.
"""

import json
import math
import os
from collections import deque
from pathlib import Path

import numpy as np

from .graph import SimplicialGraph

INF = math.inf
DEFAULT_WORD_CAP = 16
DEFAULT_BALL_CAP = 250_000
EIGEN_TOL = 1e-9


class CapExceeded(RuntimeError):
    """A configured resource limit was hit; not a mathematical failure."""


def ball_cap():
    value = os.environ.get("HECKLAB_MAX_BALL")
    return int(value) if value else DEFAULT_BALL_CAP


def _exponent(value):
    if value is None or value == -1 or value == INF or value == "inf":
        return INF
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, int):
        raise ValueError(f"invalid exponent {value!r}")
    return value


class CoxeterSystem:
    """Coxeter system (W, S) given by generator labels and the exponent matrix.

    Right-angled systems reduce words by cancellation plus a lex-min shuffle.
    Other systems close reduced words under braid moves and keep the least
    word of each class; elements longer than ``max_word_length`` raise
    ``CapExceeded`` there.
    """

    def __init__(self, generators, exponents, max_word_length=DEFAULT_WORD_CAP, name=None):
        self.generators = tuple(str(g) for g in generators)
        n = len(self.generators)
        if n == 0:
            raise ValueError("a Coxeter system needs at least one generator")
        if len(set(self.generators)) != n:
            raise ValueError("duplicate generator labels")
        if len(exponents) != n or any(len(row) != n for row in exponents):
            raise ValueError("exponent matrix must be square of size |S|")
        m = [[_exponent(x) for x in row] for row in exponents]
        for i in range(n):
            if m[i][i] != 1:
                raise ValueError("diagonal exponents must be 1")
            for j in range(n):
                if m[i][j] != m[j][i]:
                    raise ValueError("exponent matrix must be symmetric")
                if i != j and not (m[i][j] == INF or m[i][j] >= 2):
                    raise ValueError("off-diagonal exponents must be >= 2 or infinity")
        self.m = tuple(tuple(row) for row in m)
        self.index = {g: i for i, g in enumerate(self.generators)}
        self.max_word_length = max_word_length
        self.name = name
        self.right_angled = all(
            self.m[i][j] in (2, INF) for i in range(n) for j in range(n) if i != j
        )
        self.graph = None
        if self.right_angled:
            edges = [(i, j) for i in range(n) for j in range(i + 1, n) if self.m[i][j] == 2]
            self.graph = SimplicialGraph(self.generators, edges)
        self._closures = {}
        self._left = {}
        self._right = {}
        self._spheres = [[()]]

    # construction and serialisation

    @classmethod
    def from_graph(cls, graph, name=None):
        n = len(graph)
        m = [[1 if i == j else (2 if graph.commute(i, j) else INF) for j in range(n)] for i in range(n)]
        return cls(graph.labels, m, name=name)

    @classmethod
    def free(cls, n, name=None):
        """Free product of n copies of Z/2."""
        return cls.from_graph(SimplicialGraph.edgeless(n), name=name)

    @classmethod
    def dihedral(cls, m, labels=("s", "t")):
        return cls(labels, [[1, m], [m, 1]], name=f"dihedral-{'inf' if m == INF else m}")

    @classmethod
    def from_dict(cls, data):
        try:
            gens = data["generators"]
            exps = data["exponents"]
        except (KeyError, TypeError):
            raise ValueError("system definition needs 'generators' and 'exponents'") from None
        return cls(gens, exps, max_word_length=data.get("maxWordLength", DEFAULT_WORD_CAP), name=data.get("name"))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            data = json.load(fh)
        system = cls.from_dict(data)
        if system.name is None:
            system.name = Path(path).stem
        return system

    def to_dict(self):
        exps = [[-1 if x == INF else x for x in row] for row in self.m]
        out = {"generators": list(self.generators), "exponents": exps}
        if self.name:
            out = {"name": self.name, **out}
        return out

    def __repr__(self):
        return f"CoxeterSystem({self.name or list(self.generators)})"

    def __eq__(self, other):
        return isinstance(other, CoxeterSystem) and (self.generators, self.m) == (other.generators, other.m)

    def __hash__(self):
        return hash((self.generators, self.m))

    @property
    def rank(self):
        return len(self.generators)

    def generator(self, s):
        if isinstance(s, int):
            if not 0 <= s < self.rank:
                raise ValueError(f"generator index {s} out of range")
            return s
        try:
            return self.index[str(s)]
        except KeyError:
            raise ValueError(f"unknown generator {s!r}") from None

    def parse_word(self, text):
        """Parse ``"st"``, ``"s t"`` or ``"s,t"``; multi-character labels need separators."""
        if isinstance(text, (tuple, list)):
            return tuple(self.generator(x) for x in text)
        text = text.strip()
        if text in ("", "e", "1") and "e" not in self.index:
            return ()
        if "," in text or " " in text or "." in text:
            parts = [p for p in text.replace(",", " ").replace(".", " ").split() if p]
        else:
            parts = list(text)
        return tuple(self.generator(p) for p in parts)

    def format_word(self, g):
        if all(len(x) == 1 for x in self.generators):
            return "".join(self.generators[i] for i in g)
        return ".".join(self.generators[i] for i in g)

    # word problem

    def _braid_neighbours(self, word):
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if a == b:
                continue
            m = self.m[a][b]
            if m == INF or i + m > len(word):
                continue
            if all(word[i + j] == (a if j % 2 == 0 else b) for j in range(m)):
                swapped = tuple(b if j % 2 == 0 else a for j in range(m))
                yield word[:i] + swapped + word[i + m :]

    def _closure(self, word):
        """All reduced words of the element of the reduced word ``word``."""
        word = tuple(word)
        if len(word) > self.max_word_length:
            raise CapExceeded(f"word length {len(word)} exceeds cap {self.max_word_length}")
        seen = {word}
        queue = deque([word])
        while queue:
            w = queue.popleft()
            for nxt in self._braid_neighbours(w):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        closed = frozenset(seen)
        self._closures[min(closed)] = closed
        return closed

    def _reduced_words(self, g):
        closed = self._closures.get(g)
        return closed if closed is not None else self._closure(g)

    def _general_right(self, g, s):
        words = self._reduced_words(g)
        shorter = next((w for w in words if w and w[-1] == s), None)
        if shorter is not None:
            return min(self._closure(shorter[:-1]))
        return min(self._closure(g + (s,)))

    def _general_left(self, s, g):
        words = self._reduced_words(g)
        shorter = next((w for w in words if w and w[0] == s), None)
        if shorter is not None:
            return min(self._closure(shorter[1:]))
        return min(self._closure((s,) + g))

    def right_mul(self, g, s):
        """Normal form of g·s for a normal form g and generator index s."""
        key = (g, s)
        out = self._right.get(key)
        if out is None:
            if self.right_angled:
                out = self.graph.normal_form(g + (s,))
            else:
                out = self._general_right(g, s)
            self._right[key] = out
        return out

    def left_mul(self, s, g):
        """Normal form of s·g for a normal form g and generator index s."""
        key = (s, g)
        out = self._left.get(key)
        if out is None:
            if self.right_angled:
                out = self.graph.normal_form((s,) + g)
            else:
                out = self._general_left(s, g)
            self._left[key] = out
        return out

    def reduce(self, word):
        """Canonical normal form of the element represented by ``word``."""
        word = self.parse_word(word) if isinstance(word, str) else tuple(self.generator(x) for x in word)
        if self.right_angled:
            return self.graph.normal_form(word)
        g = ()
        for s in word:
            g = self.right_mul(g, s)
        return g

    def multiply(self, g, h):
        if self.right_angled:
            return self.graph.normal_form(g + h)
        for s in h:
            g = self.right_mul(g, s)
        return g

    def inverse(self, g):
        return self.reduce(tuple(reversed(g)))

    def length(self, g):
        return len(g)

    def starts_with(self, g, s):
        return len(self.left_mul(s, g)) < len(g)

    def ends_with(self, g, s):
        return len(self.right_mul(g, s)) < len(g)

    def left_descents(self, g):
        return frozenset(s for s in range(self.rank) if self.starts_with(g, s))

    def right_descents(self, g):
        return frozenset(s for s in range(self.rank) if self.ends_with(g, s))

    def reduced_words(self, g):
        """All reduced words of g (right-angled: all shuffles)."""
        if not self.right_angled:
            return self._reduced_words(g)
        out = {tuple(g)}
        queue = deque(out)
        while queue:
            w = queue.popleft()
            for i in range(len(w) - 1):
                if self.graph.commute(w[i], w[i + 1]):
                    nxt = w[:i] + (w[i + 1], w[i]) + w[i + 2 :]
                    if nxt not in out:
                        out.add(nxt)
                        queue.append(nxt)
        return frozenset(out)

    # balls and growth

    def ball(self, n):
        """Elements of length <= n sorted by (length, lex)."""
        if n < 0:
            raise ValueError("radius must be non-negative")
        cap = ball_cap()
        total = sum(len(sp) for sp in self._spheres)
        while len(self._spheres) <= n:
            last = self._spheres[-1]
            nxt = set()
            for g in last:
                for s in range(self.rank):
                    h = self.right_mul(g, s)
                    if len(h) > len(g):
                        nxt.add(h)
            total += len(nxt)
            if total > cap:
                raise CapExceeded(f"ball of radius {len(self._spheres)} exceeds cap {cap}")
            self._spheres.append(sorted(nxt))
        return [g for sp in self._spheres[: n + 1] for g in sp]

    def sphere(self, n):
        self.ball(n)
        return list(self._spheres[n])

    def sphere_sizes(self, n):
        self.ball(n)
        return [len(sp) for sp in self._spheres[: n + 1]]

    # conjugacy and types

    def conjugacy_classes(self):
        """Generator classes: components of the graph of odd exponents."""
        parent = list(range(self.rank))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                mij = self.m[i][j]
                if mij != INF and mij % 2 == 1:
                    parent[find(i)] = find(j)
        groups = {}
        for i in range(self.rank):
            groups.setdefault(find(i), []).append(i)
        return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])

    def class_representative(self):
        """Map each generator to the least generator of its conjugacy class."""
        rep = {}
        for cls in self.conjugacy_classes():
            for s in cls:
                rep[s] = cls[0]
        return rep

    def multidegree(self, g):
        """Exponent vector of q_g, counted on class representatives."""
        rep = self.class_representative()
        out = [0] * self.rank
        for s in g:
            out[rep[s]] += 1
        return tuple(out)

    def diagram_components(self):
        """Components of the Coxeter diagram (edges where m >= 3)."""
        seen = set()
        comps = []
        for start in range(self.rank):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in range(self.rank):
                    if w not in seen and w != v and self.m[v][w] != 2:
                        seen.add(w)
                        stack.append(w)
            comps.append(tuple(sorted(comp)))
        return comps

    def is_irreducible(self):
        return len(self.diagram_components()) == 1

    def gram_matrix(self, component=None):
        comp = tuple(range(self.rank)) if component is None else tuple(component)
        B = np.empty((len(comp), len(comp)))
        for a, i in enumerate(comp):
            for b, j in enumerate(comp):
                mij = self.m[i][j]
                B[a, b] = -1.0 if mij == INF else -math.cos(math.pi / mij)
        return B

    def classify_type(self):
        """Per diagram component: 'spherical', 'affine' or 'non-affine'."""
        out = []
        for comp in self.diagram_components():
            eig = np.linalg.eigvalsh(self.gram_matrix(comp))
            if eig.min() > EIGEN_TOL:
                kind = "spherical"
            elif eig.min() > -EIGEN_TOL:
                kind = "affine"
            else:
                kind = "non-affine"
            out.append(ComponentType(comp, kind, tuple(float(x) for x in eig)))
        return out

    def is_nuclear(self):
        return all(c.kind in ("spherical", "affine") for c in self.classify_type())


class ComponentType:
    def __init__(self, generators, kind, eigenvalues):
        self.generators = generators
        self.kind = kind
        self.eigenvalues = eigenvalues

    def __repr__(self):
        return f"ComponentType({self.generators}, {self.kind!r})"


def builtin_systems():
    """Small named systems used by tests and the CLI."""
    return {
        "dihedral-inf": CoxeterSystem.dihedral(INF),
        "free3": CoxeterSystem.free(3, name="free3"),
        "pentagon": CoxeterSystem.from_graph(SimplicialGraph.cycle(5), name="pentagon"),
        "a2": CoxeterSystem(("s", "t"), [[1, 3], [3, 1]], name="a2"),
        "k5f": CoxeterSystem.from_graph(SimplicialGraph.k5_plus_f(), name="k5f"),
    }
