"""Reference implementations that share no code path with the library.

Group elements are identified through the geometric (Tits) representation,
lengths through BFS on matrices, and sigma permutations by enumerating every
linear extension of a word's heap.
"""

import math
from fractions import Fraction
from itertools import permutations

import numpy as np


class TitsGroup:
    """Coxeter group realised by reflections sigma_s(x) = x - 2 B(x, e_s) e_s."""

    def __init__(self, exponents):
        m = [[math.inf if x == -1 else x for x in row] for row in exponents]
        self.rank = len(m)
        B = np.array([[-1.0 if m[i][j] == math.inf else -math.cos(math.pi / m[i][j]) for j in range(self.rank)] for i in range(self.rank)])
        self.gens = []
        for s in range(self.rank):
            M = np.eye(self.rank)
            M[s, :] -= 2 * B[s, :]
            self.gens.append(M)

    def matrix(self, word):
        M = np.eye(self.rank)
        for s in word:
            M = M @ self.gens[s]
        return M

    @staticmethod
    def key(M):
        return tuple(np.round(M, 8).ravel() + 0.0)

    def lengths(self, radius):
        """{matrix key: length} for every element of length <= radius."""
        start = self.key(np.eye(self.rank))
        seen = {start: 0}
        frontier = [np.eye(self.rank)]
        for n in range(1, radius + 1):
            nxt = []
            for M in frontier:
                for G in self.gens:
                    P = M @ G
                    k = self.key(P)
                    if k not in seen:
                        seen[k] = n
                        nxt.append(P)
            frontier = nxt
        return seen

    def length(self, word, table):
        return table[self.key(self.matrix(word))]


def conjugacy_oracle(system, radius):
    """Generator classes found by searching g s g^{-1} over a ball."""
    tits = TitsGroup(system.to_dict()["exponents"])
    elems = [tits.matrix(g) for g in system.ball(radius)]
    keys = [tits.key(G) for G in tits.gens]
    parent = list(range(system.rank))
    for s in range(system.rank):
        for M in elems:
            k = tits.key(M @ tits.gens[s] @ np.linalg.inv(M))
            if k in keys:
                t = keys.index(k)
                a, b = parent[s], parent[t]
                parent = [a if p == b else p for p in parent]
    groups = {}
    for s, p in enumerate(parent):
        groups.setdefault(p, []).append(s)
    return sorted(tuple(g) for g in groups.values())


def linear_extensions(graph, word):
    """Position orders obtained by commuting adjacent letters only."""
    d = len(word)
    out = []
    for perm in permutations(range(d)):
        pos = {p: i for i, p in enumerate(perm)}
        ok = True
        for i in range(d):
            for j in range(i + 1, d):
                if not graph.commute(word[i], word[j]) and pos[i] > pos[j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(perm)
    return out


def lexmin_brute(graph, letters):
    letters = list(letters)
    return min(tuple(letters[p] for p in perm) for perm in linear_extensions(graph, letters))


def _first_set(graph, letters):
    return {letters[p[0]] for p in linear_extensions(graph, letters)} if letters else set()


def _last_set(graph, letters):
    return {letters[p[-1]] for p in linear_extensions(graph, letters)} if letters else set()


def sigma_table(graph, word):
    """{(l, k, clique, left, right): set of sigma} by direct enumeration of the conditions."""
    d = len(word)
    found = {}
    for perm in linear_extensions(graph, word):
        for k in range(d + 1):
            for l in range(d - k + 1):
                prefix = [word[p] for p in perm[:k]]
                middle = [word[p] for p in perm[k : k + l]]
                rest = [word[p] for p in perm[k + l :]]
                clique = frozenset(middle)
                if len(clique) != l or not graph.is_clique(clique):
                    continue
                if tuple(prefix) != lexmin_brute(graph, prefix) or tuple(rest) != lexmin_brute(graph, rest):
                    continue
                if tuple(middle) != tuple(sorted(middle)):
                    continue
                link = set(graph.link(clique))
                # |prefix s| < |prefix| iff s can be moved to the end of prefix
                left = frozenset(_last_set(graph, prefix) & link)
                right = frozenset(_first_set(graph, rest) & link)
                if left & right or not graph.is_clique(left) or not graph.is_clique(right):
                    continue
                found.setdefault((l, k, clique, left, right), set()).add(tuple(perm))
    return found


def sigma_q_brute(graph, word, l, k, clique, ends, avoid):
    """All sigma_Q candidates: prefix reversal and the other segments lex-min."""
    link = set(graph.link(clique))
    out = set()
    for perm in linear_extensions(graph, word):
        prefix = [word[p] for p in perm[:k]]
        middle = [word[p] for p in perm[k : k + l]]
        rest = [word[p] for p in perm[k + l :]]
        if len(middle) != l or frozenset(middle) != clique or tuple(middle) != tuple(sorted(middle)):
            continue
        if tuple(reversed(prefix)) != lexmin_brute(graph, list(reversed(prefix))):
            continue
        if tuple(rest) != lexmin_brute(graph, rest):
            continue
        if frozenset(_last_set(graph, prefix) & link) != ends:
            continue
        if _first_set(graph, rest) & set(avoid):
            continue
        out.add(tuple(perm))
    return out


def series_quotient(num, den, n):
    """Power series num/den to n terms with exact arithmetic."""
    num = [Fraction(x) for x in num] + [Fraction(0)] * n
    out = []
    for i in range(n):
        acc = num[i] - sum(den[j] * out[i - j] for j in range(1, min(i, len(den) - 1) + 1))
        out.append(acc / den[0])
    return out


class HeckeOracle:
    """T_s acting on l2(W) with elements stored as Tits matrices."""

    def __init__(self, system, ps, radius):
        self.tits = TitsGroup(system.to_dict()["exponents"])
        self.table = self.tits.lengths(radius)
        self.ps = ps

    def key(self, word):
        return self.tits.key(self.tits.matrix(word))

    def apply_word(self, u, vec):
        """T_u applied to a vector {(key, matrix): coeff}, letters right to left."""
        for s in reversed(u):
            out = {}
            for k, (M, c) in vec.items():
                S = self.tits.gens[s] @ M
                sk = self.tits.key(S)
                prev = out.get(sk, (S, 0))
                out[sk] = (S, prev[1] + c)
                if self.table[sk] < self.table[k]:
                    prev = out.get(k, (M, 0))
                    out[k] = (M, prev[1] + self.ps[s] * c)
            vec = out
        return vec

    def product(self, u, v):
        M = self.tits.matrix(v)
        vec = self.apply_word(u, {self.tits.key(M): (M, 1)})
        return {k: c for k, (_, c) in vec.items() if c != 0}
