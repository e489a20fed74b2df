"""Truncated representations: l2(W), graph and free Fock spaces, norm estimates.

Truncation drops every target outside the basis. Entries (u, v) with
|u|, |v| <= n - m of an m-factor product agree with the untruncated operator.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import scipy.sparse as sp

from .coxeter import CapExceeded, CoxeterSystem, ball_cap
from .hecke import HeckeElement
from .scalars import exact_or_float_sqrt, is_exact, is_zero, scalar_to_json


class SparseOperator:
    """Sparse matrix with exact or float entries; duplicate entries are summed."""

    def __init__(self, shape, entries=None):
        self.shape = (int(shape[0]), int(shape[1]))
        data = {}
        if entries is not None:
            items = entries.items() if isinstance(entries, dict) else ((rc[:2], rc[2]) for rc in entries)
            for (r, c), v in items:
                if not (0 <= r < self.shape[0] and 0 <= c < self.shape[1]):
                    raise IndexError(f"entry ({r}, {c}) outside shape {self.shape}")
                data[(r, c)] = data[(r, c)] + v if (r, c) in data else v
        self.data = {rc: v for rc, v in data.items() if not is_zero(v)}
        self._cols = None

    @classmethod
    def identity(cls, n):
        return cls((n, n), {(i, i): 1 for i in range(n)})

    @classmethod
    def diagonal(cls, values):
        return cls((len(values), len(values)), {(i, i): v for i, v in enumerate(values)})

    @classmethod
    def from_columns(cls, shape, columns):
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                entries[(r, c)] = v
        return cls(shape, entries)

    @property
    def entries(self):
        return [(r, c, v) for (r, c), v in sorted(self.data.items())]

    @property
    def exact(self):
        return all(is_exact(v) for v in self.data.values())

    def __repr__(self):
        return f"SparseOperator(shape={self.shape}, nnz={len(self.data)})"

    def columns(self):
        if self._cols is None:
            cols = {}
            for (r, c), v in self.data.items():
                cols.setdefault(c, []).append((r, v))
            self._cols = cols
        return self._cols

    def __matmul__(self, other):
        if self.shape[1] != other.shape[0]:
            raise ValueError("shape mismatch")
        acols = self.columns()
        out = {}
        for (k, j), b in other.data.items():
            for i, a in acols.get(k, ()):
                rc = (i, j)
                out[rc] = out[rc] + a * b if rc in out else a * b
        return SparseOperator((self.shape[0], other.shape[1]), out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self.data)
        for rc, v in other.data.items():
            out[rc] = out[rc] + v if rc in out else v
        return SparseOperator(self.shape, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return SparseOperator(self.shape, {rc: c * v for rc, v in self.data.items()})

    def adjoint(self):
        return SparseOperator(
            (self.shape[1], self.shape[0]),
            {(c, r): (v.conjugate() if isinstance(v, complex) else v) for (r, c), v in self.data.items()},
        )

    def get(self, r, c):
        return self.data.get((r, c), 0)

    def max_abs_diff(self, other, rows=None, cols=None):
        keys = set(self.data) | set(other.data)
        if rows is not None:
            rows = set(rows)
            keys = {k for k in keys if k[0] in rows}
        if cols is not None:
            cols = set(cols)
            keys = {k for k in keys if k[1] in cols}
        return max((abs(self.get(*k) - other.get(*k)) for k in keys), default=0)

    def to_scipy(self):
        if not self.data:
            return sp.csr_matrix(self.shape, dtype=float)
        rows, cols, vals = zip(*((r, c, v) for (r, c), v in self.data.items()))
        dtype = complex if any(isinstance(v, complex) for v in vals) else float
        return sp.csr_matrix((np.array(vals, dtype=dtype), (rows, cols)), shape=self.shape)

    def to_dense(self):
        return self.to_scipy().toarray()

    def to_matrix_market(self):
        field = "complex" if any(isinstance(v, complex) for v in self.data.values()) else "real"
        lines = [f"%%MatrixMarket matrix coordinate {field} general", f"{self.shape[0]} {self.shape[1]} {len(self.data)}"]
        for r, c, v in self.entries:
            if field == "complex":
                v = complex(v)
                lines.append(f"{r + 1} {c + 1} {v.real!r} {v.imag!r}")
            else:
                lines.append(f"{r + 1} {c + 1} {float(v)!r}")
        return "\n".join(lines) + "\n"


class BallBasis:
    """Basis {delta_w : |w| <= n} of l2(W) in (length, lex) order."""

    def __init__(self, system, n):
        self.system = system
        self.radius = n
        self.elements = system.ball(n)
        self.index = {g: i for i, g in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def window(self, m):
        """Indices of elements with |w| <= n - m."""
        return [i for i, g in enumerate(self.elements) if len(g) <= self.radius - m]


def hecke_generator_matrix(s, basis, param):
    """Truncated matrix of T_s on l2(W)."""
    system, index, p = basis.system, basis.index, param.p(s)
    entries = {}
    for j, w in enumerate(basis.elements):
        sw = system.left_mul(s, w)
        i = index.get(sw)
        if i is not None:
            entries[(i, j)] = 1
        if len(sw) < len(w):
            entries[(j, j)] = entries.get((j, j), 0) + p
    return SparseOperator((len(basis), len(basis)), entries)


def projection_ps(s, basis):
    """Diagonal projection onto span{delta_w : |s w| < |w|}."""
    system = basis.system
    return SparseOperator.diagonal([1 if system.starts_with(w, s) else 0 for w in basis.elements])


class L2Representation:
    """Generator matrices of C_q[W] on a ball, built once and reused."""

    def __init__(self, basis, param):
        self.basis = basis
        self.param = param
        self.generators = [hecke_generator_matrix(s, basis, param) for s in range(param.system.rank)]
        self._words = {(): SparseOperator.identity(len(basis))}

    def word_matrix(self, g):
        out = self._words.get(g)
        if out is None:
            out = self.generators[g[0]] @ self.word_matrix(g[1:])
            self._words[g] = out
        return out

    def represent(self, x):
        """Product of generator matrices per normal form, extended linearly."""
        if x.degree() > self.basis.radius:
            raise ValueError("element degree exceeds the basis radius")
        out = {}
        for g, c in x:
            for rc, v in self.word_matrix(g).data.items():
                out[rc] = out[rc] + c * v if rc in out else c * v
        return SparseOperator((len(self.basis), len(self.basis)), out)


def represent_element(x, basis):
    return L2Representation(basis, x.param).represent(x)


def compress_element(x, basis):
    """Exact compression P_n x P_n: column v holds the coefficients of x·T_v inside the ball."""
    cols = []
    for v in basis.elements:
        prod_ = x * HeckeElement.basis(x.param, v)
        cols.append({basis.index[g]: c for g, c in prod_.coeffs.items() if g in basis.index})
    return SparseOperator.from_columns((len(basis), len(basis)), cols)


def element_vector(x, basis):
    """Coefficients of x delta_e = x as a dense vector on the basis."""
    vec = np.zeros(len(basis), dtype=complex)
    for g, c in x.coeffs.items():
        if g in basis.index:
            vec[basis.index[g]] = complex(c)
    return vec


@dataclass
class NormEstimate:
    estimate: float
    iterations: int
    converged: bool
    vector: object = None

    def report(self, op_name, n):
        return {"op": op_name, "n": n, "estimate": self.estimate, "iterations": self.iterations, "converged": self.converged}


def norm_lower_bound(op, tol=1e-10, max_iter=10000, seed=0, start=None):
    """Power iteration on op* op; the Rayleigh quotient is always a lower bound.

    ``start`` may be a vector from a smaller truncation (padded with zeros); the
    Rayleigh quotient then never decreases, which keeps estimates monotone in n.
    """
    A = op.to_scipy() if isinstance(op, SparseOperator) else sp.csr_matrix(op)
    n = A.shape[1]
    if n == 0 or A.nnz == 0:
        return NormEstimate(0.0, 0, True, np.zeros(n))
    AH = A.conj().T.tocsr()
    if start is None:
        v = np.random.default_rng(seed).standard_normal(n).astype(A.dtype if A.dtype == complex else float)
    else:
        v = np.zeros(n, dtype=complex if np.iscomplexobj(start) or A.dtype == complex else float)
        v[: len(start)] = start
    v /= np.linalg.norm(v)
    lam = 0.0
    for it in range(1, max_iter + 1):
        Av = A @ v
        rq = float(np.vdot(Av, Av).real)
        w = AH @ Av
        nw = np.linalg.norm(w)
        if nw == 0:
            return NormEstimate(float(np.sqrt(max(rq, 0.0))), it, True, v)
        converged = abs(rq - lam) <= tol * max(rq, 1e-300)
        lam = max(lam, rq)
        if converged:
            return NormEstimate(float(np.sqrt(lam)), it, True, v)
        v = w / nw
    return NormEstimate(float(np.sqrt(lam)), max_iter, False, v)


# graph and free Fock spaces


class AbelianVertexAlgebra:
    """C(X) for a finite set X with a faithful state given by point weights.

    ``frame`` is an orthonormal basis of L2(X, mu) whose first vector is the
    constant function; the others span the mean-zero part.
    """

    def __init__(self, weights, frame=None):
        weights = tuple(weights)
        if len(weights) < 2:
            raise ValueError("need at least two points")
        if any(not (w > 0) for w in weights):
            raise ValueError("weights must be positive")
        total = sum(weights)
        if (is_exact(total) and total != 1) or abs(total - 1) > 1e-12:
            raise ValueError("weights must sum to 1")
        self.weights = weights
        self.frame = tuple(tuple(f) for f in (frame or self._gram_schmidt()))
        self._matrices = {}

    @property
    def point_count(self):
        return len(self.weights)

    @property
    def reduced_dim(self):
        return len(self.weights) - 1

    @classmethod
    def hecke(cls, q):
        """C*_q(W_s) as functions on the spectrum {sqrt(q), -1/sqrt(q)} of T_s."""
        q = Fraction(q) if is_exact(q) else q
        r = exact_or_float_sqrt(q)
        if not is_exact(r):
            q = float(q)
        weights = (1 / (1 + q), q / (1 + q))
        return cls(weights, frame=[(1, 1), (r, -1 / r)])

    @staticmethod
    def hecke_generator(q):
        r = exact_or_float_sqrt(Fraction(q) if is_exact(q) else q)
        return (r, -1 / r)

    def inner(self, f, g):
        return sum(w * a * b for w, a, b in zip(self.weights, f, g))

    def _gram_schmidt(self):
        k = len(self.weights)
        vectors = [tuple(1 if i == j else 0 for i in range(k)) for j in range(1, k)]
        frame = [tuple([1] * k)]
        for v in vectors:
            for f in frame:
                c = self.inner(v, f)
                v = tuple(a - c * b for a, b in zip(v, f))
            r = exact_or_float_sqrt(self.inner(v, v))
            frame.append(tuple(a / r for a in v))
        return frame

    def state(self, a):
        return self.inner(a, [1] * len(a))

    def matrix(self, a):
        """Matrix of multiplication by a in the frame: A[i][j] = <a f_j, f_i>."""
        a = tuple(a)
        out = self._matrices.get(a)
        if out is None:
            out = tuple(
                tuple(sum(w * x * fj * fi for w, x, fj, fi in zip(self.weights, a, self.frame[j], self.frame[i])) for j in range(self.point_count))
                for i in range(self.point_count)
            )
            self._matrices[a] = out
        return out


class FockSpace:
    """Graph product Fock space of abelian vertex algebras.

    Basis keys are tuples of (letter, index) pairs, letters in lex-min shuffle
    order and indices in 1..dim-1 naming frame vectors of the mean-zero part.
    On the edgeless graph this is the free product Fock space.
    """

    def __init__(self, graph, algebras):
        if len(algebras) != len(graph):
            raise ValueError("one vertex algebra per vertex")
        self.graph = graph
        self.algebras = tuple(algebras)
        self.system = CoxeterSystem.from_graph(graph)

    @classmethod
    def hecke(cls, graph, param):
        return cls(graph, [AbelianVertexAlgebra.hecke(param.value(s)) for s in range(len(graph))])

    def free(self):
        return FockSpace(self.graph.edgeless_version(), self.algebras)

    @property
    def is_free(self):
        return not any(self.graph.adj)

    def basis(self, n):
        keys = []
        for g in self.system.ball(n):
            ranges = [range(1, self.algebras[v].point_count) for v in g]
            for idx in product(*ranges):
                keys.append(tuple(zip(g, idx)))
            if len(keys) > ball_cap():
                raise CapExceeded(f"Fock basis of radius {n} exceeds cap {ball_cap()}")
        return keys

    def matrix(self, v, a):
        return self.algebras[v].matrix(a)

    def normalize(self, items):
        return self.graph.normal_form_items(tuple(items))

    def front(self, key, v):
        return self.graph.front_position([x for x, _ in key], v)

    def act_key(self, v, a, key):
        """Vertex element a in A_v acting on one basis vector."""
        A = self.matrix(v, a)
        dim = len(A)
        out = {}
        pos = self.front(key, v)
        if pos < 0:
            for i in range(1, dim):
                if A[i][0]:
                    k = self.normalize(((v, i),) + key)
                    out[k] = out.get(k, 0) + A[i][0]
            if A[0][0]:
                out[key] = out.get(key, 0) + A[0][0]
        else:
            j = key[pos][1]
            rest = key[:pos] + key[pos + 1 :]
            for i in range(1, dim):
                if A[i][j]:
                    k = self.normalize(((v, i),) + rest)
                    out[k] = out.get(k, 0) + A[i][j]
            if A[0][j]:
                k = self.normalize(rest)
                out[k] = out.get(k, 0) + A[0][j]
        return out

    def act(self, v, a, vec):
        out = {}
        for key, c in vec.items():
            for k, d in self.act_key(v, a, key).items():
                out[k] = out.get(k, 0) + c * d
        return {k: c for k, c in out.items() if not is_zero(c)}

    def project(self, v, vec, perp=False):
        """P_v (or its complement) on a vector: keep words starting with v."""
        return {k: c for k, c in vec.items() if (self.front(k, v) >= 0) != perp}

    def project_clique(self, clique_word, vec):
        """P^f onto words whose first letters are exactly ``clique_word`` (free space)."""
        l = len(clique_word)
        return {k: c for k, c in vec.items() if tuple(x for x, _ in k[:l]) == tuple(clique_word)}

    def diag(self, clique_word, elements, vec):
        """Diag(a_1..a_l): b_1..b_l b_rest ↦ (a_1 b_1)°..(a_l b_l)° b_rest (free space)."""
        mats = [self.matrix(v, a) for v, a in zip(clique_word, elements)]
        return self.diag_matrices(clique_word, mats, vec)

    def diag_matrices(self, clique_word, mats, vec):
        """Diag with each a_i given by its frame matrix; words shorter than l are killed."""
        l = len(clique_word)
        out = {}
        for key, c in vec.items():
            if len(key) < l or tuple(x for x, _ in key[:l]) != tuple(clique_word):
                continue
            factors = []
            for (v, j), A in zip(key[:l], mats):
                factors.append([((v, i), A[i][j]) for i in range(1, len(A)) if A[i][j]])
            for combo in product(*factors):
                coef = c
                for _, x in combo:
                    coef = coef * x
                k = tuple(item for item, _ in combo) + key[l:]
                out[k] = out.get(k, 0) + coef
        return {k: c for k, c in out.items() if not is_zero(c)}

    def operator_matrix(self, fn, basis_cols, basis_rows=None):
        """Truncated matrix of a vector map: targets outside ``basis_rows`` are dropped."""
        basis_rows = basis_cols if basis_rows is None else basis_rows
        rindex = {k: i for i, k in enumerate(basis_rows)}
        cols = []
        for key in basis_cols:
            image = fn({key: 1})
            cols.append({rindex[k]: c for k, c in image.items() if k in rindex})
        return SparseOperator.from_columns((len(basis_rows), len(basis_cols)), cols)

    def vertex_operator_matrix(self, v, a, basis):
        return self.operator_matrix(lambda vec: self.act(v, a, vec), basis)

    def projection_matrix(self, v, basis):
        return SparseOperator.diagonal([1 if self.front(k, v) >= 0 else 0 for k in basis])


def graph_fock_bases(graph, algebras, n):
    space = FockSpace(graph, algebras)
    return space, space.basis(n), space.free().basis(n)


def projection_clique_free(clique_word, free_basis):
    l = len(clique_word)
    return SparseOperator.diagonal([1 if tuple(x for x, _ in k[:l]) == tuple(clique_word) else 0 for k in free_basis])


def diag_operator(space, clique, elements, free_basis):
    """Matrix of Diag(a_1..a_l) on a free Fock basis; ``clique`` is a vertex set."""
    if not space.graph.is_clique(clique):
        raise ValueError("Gamma_0 is not a clique")
    word = sorted(clique)
    free = space if space.is_free else space.free()
    return free.operator_matrix(lambda vec: free.diag(word, elements, vec), free_basis)


def key_word(key):
    return tuple(x for x, _ in key)


def format_key(space, key):
    return " ".join(f"{space.graph.labels[v]}{i}" for v, i in key) or "Omega"


def vector_to_json(space, vec):
    return {format_key(space, k): scalar_to_json(c) for k, c in sorted(vec.items(), key=lambda kv: (len(kv[0]), kv[0]))}
