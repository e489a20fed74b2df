"""Growth series: BFS counts and the closed form for free products of abelian groups."""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .coxeter import CoxeterSystem
from .graph import SimplicialGraph


class DivergenceError(ArithmeticError):
    """The growth series diverges at the requested point."""


@dataclass
class GrowthSeries:
    """Coefficients of the multivariate growth series up to ``max_degree``.

    Keys are exponent vectors over the generators (counted on conjugacy class
    representatives); values are element counts.
    """

    max_degree: int
    coefficients: dict = field(default_factory=dict)

    def single(self):
        out = [0] * (self.max_degree + 1)
        for alpha, count in self.coefficients.items():
            out[sum(alpha)] += count
        return out


def growth_coefficients(system, max_degree):
    series = GrowthSeries(max_degree)
    for g in system.ball(max_degree):
        alpha = system.multidegree(g)
        series.coefficients[alpha] = series.coefficients.get(alpha, 0) + 1
    return series


def rational_series(numerator, denominator, n_terms):
    """Taylor coefficients of numerator/denominator (integer polynomials, den[0] = ±1)."""
    den0 = denominator[0]
    out = []
    for n in range(n_terms):
        acc = Fraction(numerator[n]) if n < len(numerator) else Fraction(0)
        for j in range(1, min(n, len(denominator) - 1) + 1):
            acc -= denominator[j] * out[n - j]
        out.append(acc / den0)
    return [int(x) if x.denominator == 1 else x for x in out]


def estimate_radius(coefficients):
    """Heuristic radius of convergence from the last ratio of coefficients."""
    tail = [c for c in coefficients if c]
    if len(tail) < 2:
        return float("inf")
    return tail[-2] / tail[-1]


class FreeAbelianProductGrowth:
    """Closed form for W = Z_2^{k_1} * ... * Z_2^{k_l}.

    W(z) = (sum_m prod_i (1 + z_i^(m))^{-1} - (l - 1))^{-1}; variables are ordered
    block by block.
    """

    def __init__(self, blocks):
        blocks = [int(k) for k in blocks]
        if not blocks or any(k < 1 for k in blocks):
            raise ValueError("need l >= 1 blocks of size >= 1")
        self.blocks = tuple(blocks)
        self.l = len(blocks)
        self.nvars = sum(blocks)
        spans, start = [], 0
        for k in blocks:
            spans.append(range(start, start + k))
            start += k
        self.spans = tuple(spans)

    def _vector(self, z):
        if isinstance(z, (int, float, Fraction)):
            return [z] * self.nvars
        z = list(z)
        if len(z) != self.nvars:
            raise ValueError(f"expected {self.nvars} variables")
        return z

    def denominator(self, z):
        z = [Fraction(x) if isinstance(x, int) else x for x in self._vector(z)]
        total = 0
        for span in self.spans:
            term = 1
            for i in span:
                term = term / (1 + z[i])
            total += term
        return total - (self.l - 1)

    def evaluate(self, z):
        den = self.denominator(z)
        if den <= 0:
            raise DivergenceError("denominator is not positive: the series diverges")
        return 1 / den

    def in_omega(self, z):
        z = self._vector(z)
        if any(x < 0 or x > 1 for x in z):
            return False
        return self.denominator(z) > 0

    def taylor(self, max_degree):
        """Taylor coefficients {exponent vector: int} up to total degree max_degree.

        Uses W * A = 1 where A_beta = (-1)^{|beta|} for beta != 0 supported on one
        block.
        """
        coeffs = {}
        monomials = sorted(
            (a for a in product(range(max_degree + 1), repeat=self.nvars) if sum(a) <= max_degree),
            key=lambda a: (sum(a), a),
        )
        for alpha in monomials:
            if sum(alpha) == 0:
                coeffs[alpha] = 1
                continue
            acc = 0
            for span in self.spans:
                ranges = [range(alpha[i] + 1) for i in span]
                for beta in product(*ranges):
                    if not any(beta):
                        continue
                    rest = list(alpha)
                    for i, b in zip(span, beta):
                        rest[i] -= b
                    sign = -1 if sum(beta) % 2 else 1
                    acc -= sign * coeffs.get(tuple(rest), 0)
            coeffs[alpha] = acc
        return {a: c for a, c in coeffs.items() if c}

    def single_taylor(self, max_degree):
        out = [0] * (max_degree + 1)
        for alpha, c in self.taylor(max_degree).items():
            out[sum(alpha)] += c
        return out

    def system(self, labels=None):
        """The right-angled Coxeter system realising this free product."""
        if labels is None:
            labels = [f"s{m}_{i}" for m, k in enumerate(self.blocks) for i in range(k)]
        edges = []
        for span in self.spans:
            for a in span:
                for b in span:
                    if a < b:
                        edges.append((labels[a], labels[b]))
        return CoxeterSystem.from_graph(SimplicialGraph(labels, edges))


def free_abelian_blocks(system):
    """Blocks (generator index tuples) if the commuting graph is a disjoint union of cliques."""
    if not system.right_angled:
        return None
    graph = system.graph
    seen, blocks = set(), []
    for v in range(system.rank):
        if v in seen:
            continue
        block = tuple(sorted({v} | set(graph.link([v]))))
        for a in block:
            for b in block:
                if a != b and not graph.commute(a, b):
                    return None
            if set(graph.link([a])) | {a} != set(block):
                return None
        seen.update(block)
        blocks.append(block)
    return blocks
