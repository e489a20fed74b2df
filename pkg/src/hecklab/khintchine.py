"""Creation/diagonal/annihilation decomposition of reduced operators, X_d and j_d.

Operators act on sparse vectors (dicts from basis keys to scalars) of a graph
Fock space without truncation, so checking them on the basis vectors of
length <= n - d gives exactly the exact-window entries of the truncated
matrices.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from .fock import AbelianVertexAlgebra, BallBasis, FockSpace, SparseOperator, compress_element, norm_lower_bound
from .graph import existing_indices, sigma_permutation, sigma_q, sigma_r, summand_indices
from .hecke import HeckeElement
from .scalars import conj, is_exact, is_zero, scalar_to_json


@dataclass(frozen=True)
class ReducedOperator:
    """a_1 ⋯ a_d with a_i a mean-zero function on the points of vertex letters[i]."""

    letters: tuple
    elements: tuple

    def __len__(self):
        return len(self.letters)


def reduced_operator(space, letters, elements):
    letters = tuple(letters)
    if not space.graph.is_reduced(letters):
        raise ValueError("letters must form a reduced word")
    for v, a in zip(letters, elements):
        phi = space.algebras[v].state(a)
        if not is_zero(phi) if is_exact(phi) else abs(phi) > 1e-12:
            raise ValueError("vertex elements must have state zero")
    return ReducedOperator(letters, tuple(tuple(a) for a in elements))


def hecke_operator(space, param, word):
    """T_w = T_{w_1} ⋯ T_{w_d} as reduced operator data on the graph Fock space."""
    word = tuple(word)
    return reduced_operator(space, word, [AbelianVertexAlgebra.hecke_generator(param.value(s)) for s in word])


def _add(out, vec, c=1):
    for k, v in vec.items():
        out[k] = out.get(k, 0) + c * v


def _prune(vec):
    return {k: v for k, v in vec.items() if not is_zero(v)}


def apply_product(space, op, vec):
    for v, a in zip(reversed(op.letters), reversed(op.elements)):
        vec = space.act(v, a, vec)
    return vec


def apply_summand(space, op, idx, sigma, vec):
    """(P a P⊥)^k (P a P)^l (P⊥ a P)^rest in the order sigma, applied to vec."""
    d = len(op)
    for i in range(d - 1, -1, -1):
        j = sigma[i]
        v, a = op.letters[j], op.elements[j]
        creation = i < idx.k
        diagonal = idx.k <= i < idx.k + idx.l
        vec = space.project(v, vec, perp=creation)
        vec = space.act(v, a, vec)
        vec = space.project(v, vec, perp=not (creation or diagonal))
        if not vec:
            break
    return vec


def decompose_summand(space, op, idx, basis):
    """Truncated matrix of one summand on ``basis``; zero when sigma is absent."""
    sigma = sigma_permutation(space.graph, op.letters, idx)
    if sigma is None:
        return SparseOperator((len(basis), len(basis)))
    return space.operator_matrix(lambda vec: apply_summand(space, op, idx, sigma, vec), basis)


def window_keys(space, n, d):
    return space.basis(max(n - d, 0))


def _max_error(a, b):
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), default=0)


def verify_decomposition(space, op, n):
    """Max error of sum of summands minus the product on the window |v| <= n - d."""
    terms = existing_indices(space.graph, op.letters)
    err = 0
    for key in window_keys(space, n, len(op)):
        total = {}
        for idx, sigma in terms:
            _add(total, apply_summand(space, op, idx, sigma, {key: 1}))
        err = max(err, _max_error(_prune(total), apply_product(space, op, {key: 1})))
    return err


# X_d and j_d


@dataclass
class XdElement:
    """Element of X_d: per index a block {(row, col, diag): coefficient}.

    ``row`` lists the creation letters with frame indices, ``col`` the
    annihilation letters. ``diag`` is () when the clique part is a multiple of
    P^f_{Gamma_0}, otherwise the frame matrices of the diagonal factors.
    """

    d: int
    blocks: dict = field(default_factory=dict)

    def add_entry(self, idx, key, c):
        block = self.blocks.setdefault(idx, {})
        block[key] = block.get(key, 0) + c
        if is_zero(block[key]):
            del block[key]
            if not block:
                del self.blocks[idx]

    def __add__(self, other):
        if self.d != other.d:
            raise ValueError("degree mismatch")
        out = XdElement(self.d, {i: dict(b) for i, b in self.blocks.items()})
        for idx, block in other.blocks.items():
            for key, c in block.items():
                out.add_entry(idx, key, c)
        return out

    def scale(self, c):
        out = XdElement(self.d)
        for idx, block in self.blocks.items():
            for key, v in block.items():
                out.add_entry(idx, key, c * v)
        return out

    def project(self, idx):
        return XdElement(self.d, {idx: dict(self.blocks[idx])} if idx in self.blocks else {})

    def is_scalar(self):
        return all(key[2] == () for block in self.blocks.values() for key in block)

    def block_matrix(self, idx):
        """(row keys, column keys, dense matrix) of a scalar block in (length, lex) order."""
        block = self.blocks.get(idx, {})
        if any(key[2] != () for key in block):
            raise ValueError("block carries non-scalar diagonal data")
        rows = sorted({key[0] for key in block})
        cols = sorted({key[1] for key in block})
        M = np.zeros((max(len(rows), 1), max(len(cols), 1)), dtype=complex)
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: i for i, c in enumerate(cols)}
        for (r, c, _), v in block.items():
            M[rpos[r], cpos[c]] = complex(v)
        return rows, cols, M


def _frame_creation(A):
    return [(i, A[i][0]) for i in range(1, len(A)) if A[i][0]]


def _frame_annihilation(A):
    return [(j, A[0][j]) for j in range(1, len(A)) if A[0][j]]


def jd_operator(space, op):
    """j_d of the elementary tensor a_1 ⊗ ⋯ ⊗ a_d."""
    out = XdElement(len(op))
    mats = [space.matrix(v, a) for v, a in zip(op.letters, op.elements)]
    for idx, sigma in existing_indices(space.graph, op.letters):
        k, l = idx.k, idx.l
        creation = [sigma[i] for i in range(k)]
        middle = [sigma[i] for i in range(k, k + l)]
        annihilation = [sigma[i] for i in range(k + l, len(op))]
        rows = [((), 1)]
        for j in creation:
            rows = [(r + ((op.letters[j], i),), c * x) for r, c in rows for i, x in _frame_creation(mats[j])]
        cols = [((), 1)]
        for j in annihilation:
            cols = [(r + ((op.letters[j], i),), c * x) for r, c in cols for i, x in _frame_annihilation(mats[j])]
        if all(len(mats[j]) == 2 for j in middle):
            diag, dscale = (), prod((mats[j][1][1] for j in middle), start=1)
        else:
            diag, dscale = tuple(mats[j] for j in middle), 1
        if is_zero(dscale):
            continue
        for r, cr in rows:
            for c, cc in cols:
                out.add_entry(idx, (r, c, diag), cr * cc * dscale)
    return out


def jd(x, space):
    """j_d of a homogeneous Hecke element of degree d on the graph of a right-angled system."""
    d = x.degree()
    if not x.is_homogeneous(d):
        raise ValueError("x is not homogeneous")
    out = XdElement(d)
    for g, c in x.coeffs.items():
        out = out + jd_operator(space, hecke_operator(space, x.param, g)).scale(c)
    return out


def xd_inner(xi, eta):
    """sum over blocks of Tr(eta* xi)."""
    if xi.d != eta.d:
        raise ValueError("degree mismatch")
    if not (xi.is_scalar() and eta.is_scalar()):
        raise ValueError("inner product needs scalar diagonal parts")
    total = 0
    for idx, block in xi.blocks.items():
        other = eta.blocks.get(idx)
        if not other:
            continue
        for key, v in block.items():
            w = other.get(key)
            if w is not None:
                total += v * conj(w)
    return total


def xd_norm_2(xi):
    val = xd_inner(xi, xi)
    return float(val.real if isinstance(val, complex) else val) ** 0.5


def xd_operator_norm(xi):
    """Max over blocks of the spectral norm."""
    return max((float(np.linalg.norm(xi.block_matrix(idx)[2], 2)) for idx in xi.blocks), default=0.0)


# free product side: pi^f, Q and R


def apply_block(free, idx, block, vec):
    """pi^f of one block: creation · Diag · annihilation on free Fock vectors."""
    clique_word = sorted(idx.clique)
    out = {}
    for (row, col, diag), c in block.items():
        m = len(col)
        part = {}
        target = tuple(reversed(col))
        for key, val in vec.items():
            if key[:m] == target:
                part[key[m:]] = part.get(key[m:], 0) + val
        if not part:
            continue
        if diag == ():
            part = free.project_clique(clique_word, part)
        else:
            part = free.diag_matrices(clique_word, diag, part)
        for item in reversed(row):
            part = {((item,) + key): val for key, val in part.items() if not key or key[0][0] != item[0]}
        _add(out, part, c)
    return _prune(out)


def q_map(space, idx, d, vec):
    """Q_{l, d-l-k, Gamma_0, Gamma_2, Gamma_1} from the graph to the free Fock space."""
    graph = space.graph
    kq = d - idx.l - idx.k
    out = {}
    for key, c in vec.items():
        word = tuple(x for x, _ in key)
        sigma = sigma_q(graph, word, idx.l, kq, idx.clique, idx.right, idx.left)
        if sigma is not None:
            fkey = tuple(key[p] for p in sigma)
            out[fkey] = out.get(fkey, 0) + c
    return out


def r_map(space, l, k, clique, ends, vec):
    """R_{l,k,Gamma_0,Gamma_1} from the graph to the free Fock space."""
    out = {}
    for key, c in vec.items():
        word = tuple(x for x, _ in key)
        sigma = sigma_r(space.graph, word, l, k, clique, ends)
        if sigma is not None:
            fkey = tuple(key[p] for p in sigma)
            out[fkey] = out.get(fkey, 0) + c
    return out


def r_adjoint(space, idx, vec):
    """R*_{l,k,Gamma_0,Gamma_1}: a free word comes back only if R sends its graph form to it."""
    graph = space.graph
    out = {}
    for fkey, c in vec.items():
        letters = [x for x, _ in fkey]
        if not graph.is_reduced(letters):
            continue
        gkey = space.normalize(fkey)
        sigma = sigma_r(graph, tuple(x for x, _ in gkey), idx.l, idx.k, idx.clique, idx.left)
        if sigma is not None and tuple(gkey[p] for p in sigma) == fkey:
            out[gkey] = out.get(gkey, 0) + c
    return out


def q_matrix(space, idx, d, graph_basis, free_basis):
    findex = {k: i for i, k in enumerate(free_basis)}
    cols = []
    for key in graph_basis:
        image = q_map(space, idx, d, {key: 1})
        cols.append({findex[k]: c for k, c in image.items() if k in findex})
    return SparseOperator.from_columns((len(free_basis), len(graph_basis)), cols)


def r_matrix(space, l, k, clique, ends, graph_basis, free_basis):
    findex = {key: i for i, key in enumerate(free_basis)}
    cols = []
    for key in graph_basis:
        image = r_map(space, l, k, clique, ends, {key: 1})
        cols.append({findex[f]: c for f, c in image.items() if f in findex})
    return SparseOperator.from_columns((len(free_basis), len(graph_basis)), cols)


def intertwiner_lhs(space, free, idx, block, d, vec):
    return r_adjoint(space, idx, apply_block(free, idx, block, q_map(space, idx, d, vec)))


def intertwiner_check(space, op, idx, n, xd=None):
    """Max error of R* pi^f(j_d(x)_idx) Q against the summand on the window."""
    free = space.free()
    xd = jd_operator(space, op) if xd is None else xd
    block = xd.blocks.get(idx, {})
    sigma = sigma_permutation(space.graph, op.letters, idx)
    err = 0
    for key in window_keys(space, n, len(op)):
        lhs = intertwiner_lhs(space, free, idx, block, len(op), {key: 1})
        rhs = apply_summand(space, op, idx, sigma, {key: 1}) if sigma is not None else {}
        err = max(err, _max_error(lhs, rhs))
    return err


def reconstruction_check(space, op, n, xd=None):
    """Max error of sum_idx R* pi^f(j_d(x)_idx) Q against a_1 ⋯ a_d on the window."""
    free = space.free()
    xd = jd_operator(space, op) if xd is None else xd
    err = 0
    for key in window_keys(space, n, len(op)):
        total = {}
        for idx, block in xd.blocks.items():
            _add(total, intertwiner_lhs(space, free, idx, block, len(op), {key: 1}))
        err = max(err, _max_error(_prune(total), apply_product(space, op, {key: 1})))
    return err


def orthogonality_errors(space, param, words):
    """Max deviation of <p_idx j_d(T_v), j_d(T_w)> from delta(v, w) prod p_s^2."""
    images = {w: jd_operator(space, hecke_operator(space, param, w)) for w in words}
    err = 0
    for v in words:
        xv = images[v]
        for idx in xv.blocks:
            expected = prod((param.p(s) ** 2 for s in idx.clique), start=1)
            piece = xv.project(idx)
            for w in words:
                got = xd_inner(piece, images[w])
                want = expected if v == w else 0
                err = max(err, abs(got - want))
    return err


def block_count_bound(graph, d):
    return graph.clique_count() ** 3 * (d + 1)


# Haagerup experiment


def haagerup_constant(graph, param, d):
    """d (#Cliq)^3 prod_s p_s(q), signed as written and in absolute value."""
    signed = d * graph.clique_count() ** 3 * prod((param.p(s) for s in range(param.system.rank)), start=1)
    return signed, abs(signed)


class HaagerupSampler:
    """Compressions of the degree-d basis words on ball n, reused across samples."""

    def __init__(self, system, param, d, n):
        self.system, self.param, self.d, self.n = system, param, d, n
        self.basis = BallBasis(system, n)
        self.words = system.sphere(d)
        self.mats = [compress_element(HeckeElement.basis(param, w), self.basis).to_scipy().astype(complex) for w in self.words]

    def sample(self, seed, index):
        rng = np.random.default_rng([seed, self.d, index])
        coeffs = (rng.standard_normal(len(self.words)) + 1j * rng.standard_normal(len(self.words))) / np.sqrt(2)
        M = sum((c * m for c, m in zip(coeffs, self.mats)), start=0 * self.mats[0])
        est = norm_lower_bound(M, seed=seed)
        l2 = float(np.linalg.norm(coeffs))
        return {"index": index, "ratio": est.estimate / l2, "converged": est.converged, "iterations": est.iterations}


_SAMPLERS = {}


def _run_sample(args):
    system, param, d, n, seed, index = args
    key = (system, param, d, n)
    if key not in _SAMPLERS:
        _SAMPLERS[key] = HaagerupSampler(system, param, d, n)
    return _SAMPLERS[key].sample(seed, index)


def haagerup_experiment(system, param, d, samples, n=8, seed=0, jobs=1):
    """Empirical ratios ||x|| / ||x||_2 for random x of length d against d (#Cliq)^3 prod p_s."""
    if not system.right_angled:
        raise ValueError("the Haagerup experiment needs a right-angled system")
    signed, constant = haagerup_constant(system.graph, param, d)
    if d == 0:
        results = [{"index": i, "ratio": 1.0, "converged": True, "iterations": 0} for i in range(samples)]
    else:
        args = [(system, param, d, n, seed, i) for i in range(samples)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_sample, args))
        else:
            results = [_run_sample(a) for a in args]
    degenerate = constant == 0
    flagged = [r for r in results if r["ratio"] > float(constant)]
    return {
        "system": system.name or list(system.generators),
        "q": param.to_json(),
        "d": d,
        "n": n,
        "samples": samples,
        "empiricalMaxRatio": max((r["ratio"] for r in results), default=0.0),
        "paperConstant": scalar_to_json(constant),
        "paperConstantSigned": scalar_to_json(signed),
        "flaggedSamples": [r["index"] for r in flagged],
        "degenerateConstant": degenerate,
        "openQuestion": (
            "constant vanishes when some q_s = 1; flagged samples are not failures" if degenerate else None
        ),
        "ratios": [r["ratio"] for r in results],
    }


def ratios_csv(report):
    lines = ["index,ratio"]
    lines += [f"{i},{r!r}" for i, r in enumerate(report["ratios"])]
    return "\n".join(lines) + "\n"


def verify_suite(space, param, max_d, n_extra=2):
    """Decomposition, intertwiner and reconstruction over all words of length 1..max_d."""
    system = space.system
    out = {"decomposition": 0, "intertwiner": 0, "reconstruction": 0, "words": 0}
    for d in range(1, max_d + 1):
        n = d + n_extra
        for w in system.sphere(d):
            op = hecke_operator(space, param, w)
            xd = jd_operator(space, op)
            out["words"] += 1
            out["decomposition"] = max(out["decomposition"], verify_decomposition(space, op, n))
            for idx in xd.blocks:
                out["intertwiner"] = max(out["intertwiner"], intertwiner_check(space, op, idx, n, xd))
            out["reconstruction"] = max(out["reconstruction"], reconstruction_check(space, op, n, xd))
    return out


__all__ = [
    "ReducedOperator",
    "XdElement",
    "apply_block",
    "apply_product",
    "apply_summand",
    "block_count_bound",
    "decompose_summand",
    "haagerup_experiment",
    "hecke_operator",
    "intertwiner_check",
    "jd",
    "jd_operator",
    "orthogonality_errors",
    "haagerup_constant",
    "q_map",
    "q_matrix",
    "r_adjoint",
    "r_map",
    "r_matrix",
    "ratios_csv",
    "reconstruction_check",
    "reduced_operator",
    "summand_indices",
    "verify_decomposition",
    "verify_suite",
    "xd_inner",
    "xd_norm_2",
    "xd_operator_norm",
]
