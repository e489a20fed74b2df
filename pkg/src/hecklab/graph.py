"""Simplicial graphs, shuffle normal forms and the clique index data.

Letters are vertex indices; the lexicographic order on words is the order of
the vertex list. Words over a graph are read as elements of the right-angled
Coxeter group whose commuting pairs are the edges.
"""

from dataclasses import dataclass
from itertools import combinations


class SimplicialGraph:
    """Finite graph without loops; edges mark commuting vertices."""

    def __init__(self, labels, edges=()):
        self.labels = tuple(str(x) for x in labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate vertex labels")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        adj = [0] * len(self.labels)
        for a, b in edges:
            i, j = self._vertex(a), self._vertex(b)
            if i == j:
                raise ValueError("loops are not allowed")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        self.adj = tuple(adj)
        self._cliques = None

    def _vertex(self, v):
        if isinstance(v, int):
            if not 0 <= v < len(self.labels):
                raise ValueError(f"vertex {v} out of range")
            return v
        try:
            return self.index[str(v)]
        except KeyError:
            raise ValueError(f"unknown vertex {v!r}") from None

    @classmethod
    def edgeless(cls, labels):
        if isinstance(labels, int):
            labels = [chr(ord("a") + i) for i in range(labels)]
        return cls(labels)

    @classmethod
    def cycle(cls, labels):
        if isinstance(labels, int):
            labels = [chr(ord("a") + i) for i in range(labels)]
        n = len(labels)
        return cls(labels, [(labels[i], labels[(i + 1) % n]) for i in range(n)])

    @classmethod
    def complete(cls, labels):
        return cls(labels, combinations(labels, 2))

    @classmethod
    def k5_plus_f(cls):
        """Complete graph on a..e plus a vertex f joined to d and e."""
        edges = list(combinations("abcde", 2)) + [("d", "f"), ("e", "f")]
        return cls("abcdef", edges)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, SimplicialGraph) and (self.labels, self.adj) == (
            other.labels,
            other.adj,
        )

    def __hash__(self):
        return hash((self.labels, self.adj))

    def __repr__(self):
        return f"SimplicialGraph({list(self.labels)}, edges={self.edges()})"

    def edges(self):
        return [
            (self.labels[i], self.labels[j])
            for i in range(len(self))
            for j in range(i + 1, len(self))
            if self.adj[i] >> j & 1
        ]

    def commute(self, a, b):
        return bool(self.adj[a] >> b & 1)

    def edgeless_version(self):
        return SimplicialGraph(self.labels)

    def vertex_set(self, vertices):
        return frozenset(self._vertex(v) for v in vertices)

    # cliques, links and Comm

    def link(self, vertices):
        """Common neighbours of ``vertices``; the link of the empty set is everything."""
        mask = (1 << len(self)) - 1
        for v in vertices:
            mask &= self.adj[self._vertex(v)]
        return frozenset(i for i in range(len(self)) if mask >> i & 1)

    def is_clique(self, vertices):
        vs = sorted(self.vertex_set(vertices))
        return all(self.commute(a, b) for a, b in combinations(vs, 2))

    def cliques(self):
        """All cliques including the empty one, grouped by size."""
        if self._cliques is None:
            found = []

            def grow(current, candidates):
                found.append(frozenset(current))
                for v in sorted(candidates):
                    grow(current + [v], {c for c in candidates if c > v and self.commute(v, c)})

            grow([], set(range(len(self))))
            grouped = {}
            for c in sorted(found, key=lambda c: (len(c), sorted(c))):
                grouped.setdefault(len(c), []).append(c)
            self._cliques = grouped
        return self._cliques

    def all_cliques(self):
        return [c for size in sorted(self.cliques()) for c in self.cliques()[size]]

    def clique_count(self):
        return len(self.all_cliques())

    def comm(self, gamma0):
        """Ordered pairs of disjoint cliques inside Link(gamma0)."""
        gamma0 = self.vertex_set(gamma0)
        if not self.is_clique(gamma0):
            raise ValueError("Gamma_0 is not a clique")
        link = self.link(gamma0)
        inside = [c for c in self.all_cliques() if c <= link]
        return [(c1, c2) for c1 in inside for c2 in inside if not c1 & c2]

    # words

    def parse_word(self, word):
        if isinstance(word, str):
            word = word.replace(",", " ").split() if (" " in word or "," in word) else list(word)
        return tuple(self._vertex(x) for x in word)

    def format_word(self, word):
        if all(len(lab) == 1 for lab in self.labels):
            return "".join(self.labels[i] for i in word)
        return ".".join(self.labels[i] for i in word)

    def shuffle_order(self, letters):
        """Positions of ``letters`` listed in lexicographically minimal shuffle order.

        Only commuting neighbours are ever exchanged, so equal letters keep their
        relative order.
        """
        adj = self.adj
        remaining = list(range(len(letters)))
        out = []
        while remaining:
            best = None
            seen = 0
            for i, p in enumerate(remaining):
                a = letters[p]
                if seen & ~adj[a] == 0 and (best is None or a < letters[remaining[best]]):
                    best = i
                seen |= 1 << a
            out.append(remaining.pop(best))
        return out

    def reduce_word(self, word):
        """Cancel letters until reduced; the result is shuffle-equivalent but not sorted."""
        adj = self.adj
        out = []
        for s in word:
            cancelled = False
            for j in range(len(out) - 1, -1, -1):
                if out[j] == s:
                    del out[j]
                    cancelled = True
                    break
                if not adj[out[j]] >> s & 1:
                    break
            if not cancelled:
                out.append(s)
        return out

    def normal_form(self, word):
        red = self.reduce_word(word)
        return tuple(red[p] for p in self.shuffle_order(red))

    def normal_form_items(self, items):
        """Lex-min shuffle of ``(letter, payload)`` pairs of a reduced word."""
        letters = [it[0] for it in items]
        return tuple(items[p] for p in self.shuffle_order(letters))

    def is_reduced(self, word):
        return len(self.reduce_word(word)) == len(word)

    def front_position(self, word, v):
        """Position of the letter ``v`` that can be shuffled to the front, or -1."""
        blockers = ~self.adj[v]
        seen = 0
        for i, a in enumerate(word):
            if seen & blockers:
                return -1
            if a == v:
                return i
            seen |= 1 << a
        return -1

    def back_position(self, word, v):
        blockers = ~self.adj[v]
        seen = 0
        for i in range(len(word) - 1, -1, -1):
            a = word[i]
            if seen & blockers:
                return -1
            if a == v:
                return i
            seen |= 1 << a
        return -1

    def first_letters(self, word):
        """Letters the (reduced) word starts with."""
        return frozenset(a for a in set(word) if self.front_position(word, a) >= 0)

    def last_letters(self, word):
        return frozenset(a for a in set(word) if self.back_position(word, a) >= 0)


@dataclass(frozen=True, order=True)
class SummandIndex:
    """Index data (l, k, Gamma_0, Gamma_1, Gamma_2) of one summand.

    ``left`` is Gamma_1, the letters the creation part ends with; ``right`` is
    Gamma_2, the letters the annihilation part starts with.
    """

    l: int
    k: int
    clique: frozenset
    left: frozenset
    right: frozenset

    def key(self):
        return (self.l, self.k, sorted(self.clique), sorted(self.left), sorted(self.right))

    def describe(self, graph):
        def name(c):
            return "{" + ",".join(graph.labels[i] for i in sorted(c)) + "}"

        return f"l={self.l},k={self.k},G0={name(self.clique)},G1={name(self.left)},G2={name(self.right)}"


def summand_indices(graph, d):
    """Every valid index for words of length d, in a fixed order."""
    out = []
    for l in range(d + 1):
        for clique in graph.cliques().get(l, []):
            pairs = graph.comm(clique)
            for k in range(d - l + 1):
                for g1, g2 in pairs:
                    out.append(SummandIndex(l, k, clique, g1, g2))
    return out


def _is_ideal(mask, preds, positions):
    return all(preds[p] & ~mask == 0 for p in positions)


def _heap_preds(graph, word):
    preds = []
    for j, b in enumerate(word):
        m = 0
        for i in range(j):
            if not graph.commute(word[i], b):
                m |= 1 << i
        preds.append(m)
    return preds


def heap_splits(graph, word, k, clique):
    """Split a reduced word into prefix (size k), clique part and rest.

    Yields position tuples (prefix, middle, rest) where the prefix and
    prefix+middle are order ideals of the word's heap and the middle letters
    are exactly ``clique``.
    """
    d = len(word)
    preds = _heap_preds(graph, word)
    clique = sorted(clique)
    for prefix in combinations(range(d), k):
        pmask = sum(1 << p for p in prefix)
        if not _is_ideal(pmask, preds, prefix):
            continue
        middle = []
        for a in clique:
            pos = next((p for p in range(d) if not pmask >> p & 1 and word[p] == a), None)
            if pos is None:
                break
            middle.append(pos)
        if len(middle) != len(clique):
            continue
        mmask = pmask | sum(1 << p for p in middle)
        if not _is_ideal(mmask, preds, middle):
            continue
        rest = tuple(p for p in range(d) if not mmask >> p & 1)
        yield prefix, tuple(middle), rest


def _sub(word, positions):
    return [word[p] for p in positions]


def _ordered(graph, word, positions):
    positions = list(positions)
    return [positions[i] for i in graph.shuffle_order(_sub(word, positions))]


def _ordered_reversed(graph, word, positions):
    # order whose reversal is the lex-min form of the reversed segment
    rev = list(reversed(positions))
    return list(reversed(_ordered(graph, word, rev)))


def _unique(solutions, what):
    if len(solutions) > 1:
        raise RuntimeError(f"{what} is not unique: {solutions}")
    return solutions[0] if solutions else None


def sigma_permutation(graph, word, idx):
    """The permutation (as a tuple of positions) for a summand index, or None."""
    if idx.k + idx.l > len(word):
        return None
    link = graph.link(idx.clique)
    found = []
    for prefix, middle, rest in heap_splits(graph, word, idx.k, idx.clique):
        if graph.last_letters(_sub(word, prefix)) & link != idx.left:
            continue
        if graph.first_letters(_sub(word, rest)) & link != idx.right:
            continue
        order = _ordered(graph, word, prefix) + sorted(middle, key=lambda p: word[p])
        found.append(tuple(order + _ordered(graph, word, rest)))
    return _unique(found, "sigma")


def sigma_q(graph, word, l, k, clique, ends, avoid):
    """Permutation for the partial isometry Q.

    The prefix of size k ends with exactly the letters ``ends`` inside the link
    of the clique, the rest starts with no letter of ``avoid``, and the prefix
    is listed so that its reversal is a lex-min word.
    """
    if len(clique) != l or k + l > len(word):
        return None
    link = graph.link(clique)
    found = []
    for prefix, middle, rest in heap_splits(graph, word, k, clique):
        if graph.last_letters(_sub(word, prefix)) & link != ends:
            continue
        if graph.first_letters(_sub(word, rest)) & avoid:
            continue
        order = _ordered_reversed(graph, word, prefix) + sorted(middle, key=lambda p: word[p])
        found.append(tuple(order + _ordered(graph, word, rest)))
    return _unique(found, "sigma_Q")


def sigma_r(graph, word, l, k, clique, ends):
    """Permutation for the partial isometry R (conditions on the prefix only)."""
    if len(clique) != l or k + l > len(word):
        return None
    link = graph.link(clique)
    found = []
    for prefix, middle, rest in heap_splits(graph, word, k, clique):
        if graph.last_letters(_sub(word, prefix)) & link != ends:
            continue
        order = _ordered(graph, word, prefix) + sorted(middle, key=lambda p: word[p])
        found.append(tuple(order + _ordered(graph, word, rest)))
    return _unique(found, "sigma_R")


def existing_indices(graph, word):
    """Indices whose permutation exists for ``word``, with the permutation.

    Enumerates heap splits directly instead of scanning every index.
    """
    found = {}
    for l in range(len(word) + 1):
        for clique in graph.cliques().get(l, []):
            link = graph.link(clique)
            for k in range(len(word) - l + 1):
                for prefix, middle, rest in heap_splits(graph, word, k, clique):
                    left = graph.last_letters(_sub(word, prefix)) & link
                    right = graph.first_letters(_sub(word, rest)) & link
                    if left & right:
                        continue
                    idx = SummandIndex(l, k, clique, left, right)
                    order = _ordered(graph, word, prefix) + sorted(middle, key=lambda p: word[p])
                    sigma = tuple(order + _ordered(graph, word, rest))
                    if idx in found and found[idx] != sigma:
                        raise RuntimeError(f"sigma is not unique for {idx}")
                    found[idx] = sigma
    return sorted(found.items(), key=lambda item: item[0].key())
