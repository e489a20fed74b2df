"""Simplicity and nuclearity verdicts, character certificates and Powers averaging."""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count

import numpy as np

from .coxeter import CapExceeded, ball_cap
from .fock import BallBasis, SparseOperator, norm_lower_bound
from .growth import FreeAbelianProductGrowth, estimate_radius, free_abelian_blocks, growth_coefficients
from .hecke import HeckeElement, MultiParameter, ParameterError, character_apply, pi_q1_word
from .scalars import scalar_to_json

SIMPLE = "simple+uniqueTrace"
NOT_SIMPLE = "notSimple"
UNKNOWN = "unknown"

NEIGHBORHOOD_STATEMENT = (
    "an open neighbourhood of q = 1 exists on which the algebra is simple with unique trace; "
    "its radius is not computable from the available results"
)
CONJECTURE_FLAG = "open: whether simplicity holds exactly outside the closure of the symmetrised growth region"
COMPRESSION_CAVEAT = "lower bound (compression)"


@dataclass
class SimplicityVerdict:
    verdict: str
    family: str
    q: dict
    region_value: object = None
    threshold: object = None
    certificate: dict = None
    evidence: dict = field(default_factory=dict)

    def to_json(self):
        out = {"family": self.family, "q": self.q, "verdict": self.verdict}
        out["regionValue"] = None if self.region_value is None else scalar_to_json(self.region_value)
        out["threshold"] = None if self.threshold is None else scalar_to_json(self.threshold)
        if self.certificate is not None:
            out["certificate"] = self.certificate
        out["evidence"] = self.evidence
        return out


def epsilon_normalize(param):
    """Signs eps_s = +1 if q_s <= 1 else -1 and the parameter q_s^{eps_s} <= 1."""
    eps = tuple(1 if v <= 1 else -1 for v in (param.rational_values or param.values))
    for cls in param.system.conjugacy_classes():
        if len({eps[s] for s in cls}) > 1:
            raise ParameterError("sign assignment is not constant on a conjugacy class")
    return eps, param.flipped(eps)


def region_value(blocks, qhat):
    """sum_m prod_{i in block m} (1 + qhat_i)^{-1} with qhat listed block by block."""
    total, pos = 0, 0
    for k in blocks:
        term = 1
        for i in range(pos, pos + k):
            term = term / (1 + qhat[i])
        total += term
        pos += k
    return total


def character_certificate(param, pairs=1000, seed=0, radius=2):
    """Check chi_q(xy) = chi_q(x) chi_q(y) on random pairs supported in a ball."""
    elements = param.system.ball(radius)
    rng = np.random.default_rng(seed)
    worst_abs, worst_rel = 0.0, 0.0
    for _ in range(pairs):
        cx = rng.standard_normal(len(elements))
        cy = rng.standard_normal(len(elements))
        x = HeckeElement(param, {g: float(c) for g, c in zip(elements, cx)})
        y = HeckeElement(param, {g: float(c) for g, c in zip(elements, cy)})
        lhs = character_apply(x * y)
        rhs = character_apply(x) * character_apply(y)
        err = abs(lhs - rhs)
        worst_abs = max(worst_abs, float(err))
        worst_rel = max(worst_rel, float(err) / max(1.0, float(abs(rhs))))
    return {
        "q": param.to_json(),
        "pairs": pairs,
        "seed": seed,
        "radius": radius,
        "maxResidual": worst_abs,
        "maxRelativeResidual": worst_rel,
        "note": "algebraic multiplicativity only; boundedness is not re-proved",
    }


def _certificate(param, pairs=50):
    report = character_certificate(param, pairs=pairs)
    return {"q": report["q"], "maxResidual": report["maxResidual"], "pairs": pairs}


def classify_free_abelian_product(blocks, q, system=None, certify=True):
    """Verdict for Z_2^{k_1} * ... * Z_2^{k_l}; q is a MultiParameter or block-ordered values."""
    blocks = tuple(int(k) for k in blocks)
    growth = FreeAbelianProductGrowth(blocks)
    if isinstance(q, MultiParameter):
        param = q
    else:
        system = system or growth.system()
        param = MultiParameter(system, q)
    qjson = param.to_json()
    if len(blocks) < 2:
        return SimplicityVerdict(UNKNOWN, "freeAbelianProduct", qjson, evidence={"reason": "need l >= 2 free factors"})
    eps, normalized = epsilon_normalize(param)
    qhat = list(normalized.rational_values or normalized.values)
    value = region_value(blocks, qhat)
    threshold = len(blocks) - 1
    evidence = {
        "blocks": list(blocks),
        "epsilon": list(eps),
        "normalizedQ": [scalar_to_json(v) for v in qhat],
        "inClosure": value >= threshold,
    }
    if value >= threshold:
        cert = _certificate(param) if certify else {"q": qjson}
        return SimplicityVerdict(NOT_SIMPLE, "freeAbelianProduct", qjson, value, threshold, cert, evidence)
    return SimplicityVerdict(SIMPLE, "freeAbelianProduct", qjson, value, threshold, None, evidence)


def nuclearity(system):
    types = system.classify_type()
    return {
        "components": [
            {
                "generators": [system.generators[s] for s in c.generators],
                "type": c.kind,
                "gramEigenvalues": [round(e, 12) for e in c.eigenvalues],
            }
            for c in types
        ],
        "nuclear": all(c.kind in ("spherical", "affine") for c in types),
    }


def classify_spherical_affine(system, param, certify=True):
    """Any spherical or affine component yields a character, hence not simple."""
    nuc = nuclearity(system)
    finite_or_affine = [c for c in nuc["components"] if c["type"] in ("spherical", "affine")]
    evidence = {"nuclearity": nuc}
    qjson = param.to_json()
    if finite_or_affine:
        evidence["witnessComponent"] = finite_or_affine[0]["generators"]
        cert = _certificate(param) if certify else {"q": qjson}
        return SimplicityVerdict(NOT_SIMPLE, "sphericalOrAffine", qjson, certificate=cert, evidence=evidence)
    evidence["reason"] = "no spherical or affine component"
    return SimplicityVerdict(UNKNOWN, "sphericalOrAffine", qjson, evidence=evidence)


def _radius_estimate(system, degree=8):
    try:
        coeffs = growth_coefficients(system, degree).single()
    except CapExceeded:
        return None
    return {"value": estimate_radius(coeffs), "label": "heuristic", "degree": degree}


def classify(system, param, certify=True):
    """Dispatch to the family whose criterion applies."""
    if any(c.kind in ("spherical", "affine") for c in system.classify_type()):
        return classify_spherical_affine(system, param, certify)
    blocks = free_abelian_blocks(system)
    if blocks is not None and len(blocks) >= 2:
        order = [s for b in blocks for s in b]
        values = [(param.rational_values or param.values)[s] for s in order]
        verdict = classify_free_abelian_product([len(b) for b in blocks], values, certify=False)
        verdict.q = param.to_json()
        verdict.evidence["blockGenerators"] = [[system.generators[s] for s in b] for b in blocks]
        if verdict.verdict == NOT_SIMPLE:
            verdict.certificate = _certificate(param) if certify else {"q": param.to_json()}
        return verdict
    qjson = param.to_json()
    if system.right_angled and system.is_irreducible() and system.rank >= 3:
        evidence = {"neighborhood": NEIGHBORHOOD_STATEMENT, "conjecture": CONJECTURE_FLAG}
        evidence["radius"] = _radius_estimate(system)
        if param.is_one():
            evidence["reason"] = "q = 1 lies in the neighbourhood"
            return SimplicityVerdict(SIMPLE, "generalRightAngled", qjson, evidence=evidence)
        return SimplicityVerdict(UNKNOWN, "generalRightAngled", qjson, evidence=evidence)
    evidence = {"reason": "no applicable criterion", "conjecture": CONJECTURE_FLAG}
    return SimplicityVerdict(UNKNOWN, "general", qjson, evidence=evidence)


# Powers elements and averaging


@dataclass
class PowersElements:
    s: int
    chain: tuple
    w1: tuple
    w2: tuple
    w3: tuple
    validated_radius: int
    system: object = None

    @property
    def t0(self):
        return self.chain[0]

    def in_d(self, g):
        return self.system.starts_with(g, self.t0)

    def words(self):
        return (self.w1, self.w2, self.w3)

    def to_json(self):
        fmt = self.system.format_word
        return {
            "s": self.system.generators[self.s],
            "chain": [self.system.generators[t] for t in self.chain],
            "w1": fmt(self.w1),
            "w2": fmt(self.w2),
            "w3": fmt(self.w3),
            "D": f"words with left descent {self.system.generators[self.t0]}",
            "validatedRadius": self.validated_radius,
        }


def _chains(system):
    """Candidate (s, t_0..t_n) ordered by n, then by the tuple (t_0, s, t_1, ...)."""
    m = system.m
    free = [[b for b in range(system.rank) if b != a and m[a][b] == float("inf")] for a in range(system.rank)]
    everything = set(range(system.rank))
    for n in count(1):
        if n > 2 * system.rank:
            return
        found = []
        for t0 in range(system.rank):
            for s in free[t0]:
                stack = [(t0,)]
                while stack:
                    chain = stack.pop()
                    if len(chain) == n + 1:
                        if {s, *chain} == everything:
                            found.append((s, chain))
                        continue
                    for t in free[chain[-1]]:
                        if len(chain) == 1 and t == s:
                            continue
                        stack.append(chain + (t,))
        if found:
            yield from sorted(found, key=lambda sc: (sc[1][0], sc[0]) + sc[1][1:])


def validate_powers(system, elements, radius):
    """Check the covering and disjointness conditions on every element of the ball."""
    w1, w2, w3 = elements.words()

    def conj(g, h):
        return system.multiply(system.multiply(system.inverse(h), g), h)

    failures = []
    for g in system.ball(radius):
        if not g:
            continue
        in_d = elements.in_d(g)
        # g in h D h^{-1} iff h^{-1} g h in D
        if not (in_d or elements.in_d(conj(g, w1))):
            failures.append(("cover", g))
        a, b = elements.in_d(conj(g, w2)), elements.in_d(conj(g, w3))
        if (in_d and a) or (in_d and b) or (a and b):
            failures.append(("disjoint", g))
    return failures


def _validation_radius(system, target, budget=None):
    budget = min(budget or 20_000, ball_cap())
    radius = 0
    while radius < target:
        sizes = system.sphere_sizes(radius)
        nxt = sizes[-1] * max(1, system.rank - 1)
        if sum(sizes) + nxt > budget:
            break
        radius += 1
    return radius


def find_powers_elements(system, radius=None):
    """Elements w1 = t0..tn..t0, w2 = s, w3 = t1 and D = words starting with t0."""
    if not system.right_angled:
        raise ValueError("system is not right-angled")
    if not system.is_irreducible():
        raise ValueError("system is not irreducible")
    if system.rank < 3:
        raise ValueError("need at least three generators")
    for s, chain in _chains(system):
        w1 = system.reduce(chain + chain[-2::-1])
        if len(w1) != 2 * len(chain) - 1:
            continue
        target = 2 * len(w1) + 2 if radius is None else radius
        r = _validation_radius(system, target) if radius is None else radius
        candidate = PowersElements(s, chain, w1, (s,), (chain[1],), r, system)
        if not validate_powers(system, candidate, r):
            return candidate
    raise ValueError("no chain satisfying the conditions was found")


def deformed_averaging(x, elements, cache=None):
    """(1/|F|) sum_{w in F} U_{w^{-1}} x U_w with U = pi_{q,1}(T_w) and F = {e, w1, w2, w3}."""
    param = x.param
    system = param.system
    cache = {} if cache is None else cache
    words = ((),) + elements.words()
    out = HeckeElement(param)
    for w in words:
        left = pi_q1_word(param, system.inverse(w), cache)
        right = pi_q1_word(param, w, cache)
        out = out + left * x * right
    return out.scale(Fraction(1, len(words)) if param.exact else 1 / len(words))


def averaging_matrix(param, elements, n, cache=None):
    """Compression of the averaging operator to span{delta_w : 1 <= |w| <= n}."""
    basis = BallBasis(param.system, n)
    inner = basis.elements[1:]
    index = {g: i for i, g in enumerate(inner)}
    cache = {} if cache is None else cache
    cols = []
    for g in inner:
        image = deformed_averaging(HeckeElement.basis(param, g), elements, cache)
        cols.append({index[h]: c for h, c in image.coeffs.items() if h in index})
    return SparseOperator.from_columns((len(inner), len(inner)), cols)


def averaging_norm_estimates(param, elements, radii, seed=0):
    """Warm-started power iteration over increasing radii; each value is a lower bound."""
    cache, start, out = {}, None, []
    for n in sorted(radii):
        est = norm_lower_bound(averaging_matrix(param, elements, n, cache), seed=seed, start=start)
        start = est.vector
        if out and est.estimate < out[-1]["estimate"]:
            est.estimate = out[-1]["estimate"]
        out.append({"n": n, "estimate": est.estimate, "iterations": est.iterations, "converged": est.converged, "kind": COMPRESSION_CAVEAT})
    return out


def averaging_norm_estimate(param, elements, n, seed=0):
    return averaging_norm_estimates(param, elements, range(1, n + 1), seed)[-1]


def powers_decay(x, elements, L):
    """||Phi_q^l(x) - tau(x)||_2 for l = 1..L."""
    tau = x.trace()
    cache, out, y = {}, [], x
    for _ in range(L):
        y = deformed_averaging(y, elements, cache)
        out.append(float((y - tau).l2norm()))
    return out


def powers_decay_experiment(x, elements, L, n, seed=0):
    return {
        "q": x.param.to_json(),
        "x": x.to_json(),
        "powers": elements.to_json(),
        "L": L,
        "decay": powers_decay(x, elements, L),
        "normEstimate": averaging_norm_estimate(x.param, elements, n, seed) if n > 0 else None,
        "caveat": COMPRESSION_CAVEAT,
    }


def _conjugate_group(system, coeffs, g):
    ginv = system.inverse(g)
    out = {}
    for h, c in coeffs.items():
        k = system.multiply(system.multiply(ginv, h), g)
        out[k] = out.get(k, 0) + c
    return out


def _l2(vec):
    return float(np.sqrt(sum(abs(c) ** 2 for c in vec.values())))


def _diff(a, b):
    keys = set(a) | set(b)
    return {k: a.get(k, 0) - b.get(k, 0) for k in keys}


def ching_ratio(system, coeffs, group_elements):
    """||x - tau(x)||_2 / (14 max_i ||x - g_i^{-1} x g_i||_2); None when both sides vanish."""
    centred = dict(coeffs)
    centred.pop((), None)
    lhs = _l2(centred)
    rhs = 14 * max(_l2(_diff(coeffs, _conjugate_group(system, coeffs, g))) for g in group_elements)
    if rhs == 0:
        return None if lhs == 0 else float("inf")
    return lhs / rhs


def ching_inequality_test(system, samples=1000, radius=4, seed=0, elements=None):
    """Ratios for Gaussian group-algebra elements on a ball; all must be <= 1."""
    elements = elements or find_powers_elements(system)
    ball = system.ball(radius)
    rng = np.random.default_rng(seed)
    ratios, skipped = [], 0
    for _ in range(samples):
        vals = rng.standard_normal(len(ball)) + 1j * rng.standard_normal(len(ball))
        r = ching_ratio(system, dict(zip(ball, vals)), elements.words())
        if r is None:
            skipped += 1
        else:
            ratios.append(r)
    return {
        "samples": samples,
        "radius": radius,
        "seed": seed,
        "maxRatio": max(ratios, default=0.0),
        "skipped": skipped,
        "passed": all(r <= 1 for r in ratios),
    }


def parallelogram_residual(vectors):
    """| ||sum xi||^2 + sum_{i<j} ||xi - xj||^2 - (n+1) sum ||xi||^2 |."""
    xs = [np.asarray(v) for v in vectors]
    total = np.linalg.norm(sum(xs)) ** 2
    pairs = sum(np.linalg.norm(xs[i] - xs[j]) ** 2 for i in range(len(xs)) for j in range(i + 1, len(xs)))
    rhs = len(xs) * sum(np.linalg.norm(x) ** 2 for x in xs)
    return float(abs(total + pairs - rhs))


def parallelogram_identity_test(tuples=100, size=4, dim=16, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(tuples):
        vecs = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
        worst = max(worst, parallelogram_residual(vecs))
    return worst


def grid_scan(system, qs, certify=False):
    """(q, verdict, regionValue) rows for single-parameter scans."""
    rows = []
    for q in qs:
        verdict = classify(system, MultiParameter(system, q), certify=certify)
        rows.append((q, verdict.verdict, verdict.region_value))
    return rows


def grid_csv(rows):
    lines = ["q,verdict,regionValue"]
    for q, verdict, value in rows:
        lines.append(f"{scalar_to_json(q)},{verdict},{'' if value is None else float(value)!r}")
    return "\n".join(lines) + "\n"


__all__ = [
    "COMPRESSION_CAVEAT",
    "NOT_SIMPLE",
    "SIMPLE",
    "UNKNOWN",
    "PowersElements",
    "SimplicityVerdict",
    "averaging_matrix",
    "averaging_norm_estimate",
    "averaging_norm_estimates",
    "character_certificate",
    "ching_inequality_test",
    "ching_ratio",
    "classify",
    "classify_free_abelian_product",
    "classify_spherical_affine",
    "deformed_averaging",
    "epsilon_normalize",
    "find_powers_elements",
    "grid_csv",
    "grid_scan",
    "nuclearity",
    "parallelogram_identity_test",
    "parallelogram_residual",
    "powers_decay",
    "powers_decay_experiment",
    "region_value",
    "validate_powers",
]
