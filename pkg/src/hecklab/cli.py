"""Command line front door: ``hecklab <command> --system FILE [options]``.

Exit status 0 on success, 2 when an exact identity check fails, 3 on
configuration errors (including enumeration caps).
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .coxeter import CapExceeded, CoxeterSystem, builtin_systems
from .fock import BallBasis, FockSpace, compress_element, norm_lower_bound
from .growth import FreeAbelianProductGrowth, free_abelian_blocks, growth_coefficients
from .hecke import HeckeElement, MultiParameter, ParameterError, parse_element
from .khintchine import haagerup_experiment, orthogonality_errors, ratios_csv, verify_suite
from .scalars import scalar_to_json
from . import structure

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 2, 3
COMMANDS = (
    "info",
    "ball",
    "growth",
    "hecke-mul",
    "norm",
    "haagerup",
    "khintchine-verify",
    "simplicity",
    "nuclearity",
    "powers",
    "ching",
)


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def build_parser():
    p = _Parser(prog="hecklab", description="Hecke algebras of Coxeter systems: identities and experiments.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("elements", nargs="*", help="element literals, e.g. 'T[a,b] + 1/2*T[]'")
    p.add_argument("--system", required=True, help="system JSON file or a built-in name")
    p.add_argument("--q", default="1", help="scalar or comma separated per-generator values")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--csv", default=None, help="CSV side output (haagerup ratios, simplicity grid)")
    p.add_argument("--grid", default=None, help="simplicity scan start:stop:step, rationals allowed")
    p.add_argument("--L", type=int, default=6, help="averaging iterations for powers")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--exact", action="store_true", help="refuse to fall back to floating point")
    return p


def load_system(spec):
    builtins = builtin_systems()
    if spec in builtins:
        return builtins[spec]
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"no system file {spec!r} and no built-in of that name ({', '.join(builtins)})")
    try:
        return CoxeterSystem.load(path)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed system file: {exc}") from exc


def parse_q(system, text, exact=False):
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    values = []
    for part in parts:
        try:
            values.append(Fraction(part))
        except (ValueError, ZeroDivisionError):
            try:
                values.append(float(part))
            except ValueError as exc:
                raise ConfigError(f"bad parameter value {part!r}") from exc
    if not values:
        raise ConfigError("empty parameter")
    try:
        param = MultiParameter(system, values[0] if len(values) == 1 else values)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    if exact and not param.exact:
        raise ConfigError("--exact needs rational square roots of every q_s")
    return param


def parse_grid(text):
    try:
        start, stop, step = (Fraction(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError("grid must be start:stop:step") from exc
    if step <= 0 or start <= 0:
        raise ConfigError("grid needs positive start and step")
    out, q = [], start
    while q <= stop:
        out.append(q)
        q += step
    return out


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _elements(param, texts):
    try:
        return [parse_element(param, t) for t in texts]
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad element literal: {exc}") from exc


# commands return (report dict, ok flag)


def cmd_info(system, param, args):
    nuc = structure.nuclearity(system)
    out = {
        "generators": list(system.generators),
        "exponents": system.to_dict()["exponents"],
        "rightAngled": system.right_angled,
        "conjugacyClasses": [[system.generators[s] for s in c] for c in system.conjugacy_classes()],
        "irreducible": system.is_irreducible(),
        "components": nuc["components"],
        "type": nuc["components"][0]["type"] if len(nuc["components"]) == 1 else "reducible",
        "nuclear": nuc["nuclear"],
        "sphereSizes": system.sphere_sizes(args.n if args.n is not None else 4),
    }
    if system.right_angled:
        out["cliqueCount"] = system.graph.clique_count()
    return out, True


def cmd_ball(system, param, args):
    n = args.n if args.n is not None else 3
    ball = system.ball(n)
    return {"n": n, "size": len(ball), "elements": [system.format_word(g) or "e" for g in ball]}, True


def cmd_growth(system, param, args):
    n = args.n if args.n is not None else 8
    series = growth_coefficients(system, n)
    out = {"maxDegree": n, "coefficients": series.single()}
    ok = True
    blocks = free_abelian_blocks(system)
    if blocks is not None:
        closed = FreeAbelianProductGrowth([len(b) for b in blocks])
        taylor = closed.single_taylor(n)
        ok = taylor == out["coefficients"]
        out["closedForm"] = {"blocks": [[system.generators[s] for s in b] for b in blocks], "taylor": taylor, "match": ok}
    out["multivariate"] = [
        {"exponent": list(alpha), "count": c}
        for alpha, c in sorted(series.coefficients.items(), key=lambda kv: (sum(kv[0]), kv[0]))
    ]
    return out, ok


def cmd_hecke_mul(system, param, args):
    if not args.elements:
        raise ConfigError("hecke-mul needs at least one element literal")
    factors = _elements(param, args.elements)
    result = factors[0]
    for f in factors[1:]:
        result = result * f
    return {"factors": [f.to_json() for f in factors], "product": result.to_json(), "text": result.format()}, True


def cmd_norm(system, param, args):
    if len(args.elements) != 1:
        raise ConfigError("norm needs exactly one element literal")
    (x,) = _elements(param, args.elements)
    n = args.n if args.n is not None else 8
    est = norm_lower_bound(compress_element(x, BallBasis(system, n)), seed=args.seed)
    out = est.report(x.format(), n)
    out["l2norm"] = x.l2norm()
    out["kind"] = structure.COMPRESSION_CAVEAT
    return out, True


def cmd_haagerup(system, param, args):
    d = args.d if args.d is not None else 2
    samples = args.samples if args.samples is not None else 50
    n = args.n if args.n is not None else 8
    report = haagerup_experiment(system, param, d, samples, n=n, seed=args.seed, jobs=args.jobs)
    if args.csv:
        Path(args.csv).write_text(ratios_csv(report))
    report = {k: v for k, v in report.items() if k != "ratios"}
    return report, True


def cmd_khintchine_verify(system, param, args):
    if not system.right_angled:
        raise ConfigError("khintchine-verify needs a right-angled system")
    d = args.d if args.d is not None else 3
    n = args.n if args.n is not None else d + 2
    space = FockSpace.hecke(system.graph, param)
    suite = verify_suite(space, param, d, n_extra=max(n - d, 0))
    orth = 0
    for length in range(1, d + 1):
        orth = max(orth, orthogonality_errors(space, param, system.sphere(length)))
    tol = 0 if param.exact else 1e-10
    errors = {
        "decomposition": suite["decomposition"],
        "intertwiner": suite["intertwiner"],
        "reconstruction": suite["reconstruction"],
        "orthogonality": orth,
    }
    ok = all(e <= tol for e in errors.values())
    out = {
        "d": d,
        "n": n,
        "words": suite["words"],
        "mode": "rational" if param.exact else "float",
        "maxErrors": {k: scalar_to_json(v) for k, v in errors.items()},
        "maxError": scalar_to_json(max(errors.values())),
        "passed": ok,
    }
    return out, ok


def cmd_simplicity(system, param, args):
    verdict = structure.classify(system, param)
    out = verdict.to_json()
    if args.grid:
        rows = structure.grid_scan(system, parse_grid(args.grid))
        out["grid"] = [{"q": scalar_to_json(q), "verdict": v, "regionValue": None if r is None else scalar_to_json(r)} for q, v, r in rows]
        if args.csv:
            Path(args.csv).write_text(structure.grid_csv(rows))
    return out, True


def cmd_nuclearity(system, param, args):
    return structure.nuclearity(system), True


def cmd_powers(system, param, args):
    try:
        elements = structure.find_powers_elements(system)
    except ValueError as exc:
        raise ConfigError(f"powers elements: {exc}") from exc
    if args.elements:
        (x,) = _elements(param, args.elements[:1])
    else:
        x = HeckeElement.basis(param, (0,))
    n = args.n if args.n is not None else 8
    print(f"norm estimate: {structure.COMPRESSION_CAVEAT}", file=sys.stderr)
    return structure.powers_decay_experiment(x, elements, args.L, n, seed=args.seed), True


def cmd_ching(system, param, args):
    samples = args.samples if args.samples is not None else 1000
    n = args.n if args.n is not None else 4
    try:
        report = structure.ching_inequality_test(system, samples, n, args.seed)
    except ValueError as exc:
        raise ConfigError(f"powers elements: {exc}") from exc
    report["parallelogramResidual"] = structure.parallelogram_identity_test(seed=args.seed)
    return report, report["passed"] and report["parallelogramResidual"] < 1e-10


HANDLERS = {
    "info": cmd_info,
    "ball": cmd_ball,
    "growth": cmd_growth,
    "hecke-mul": cmd_hecke_mul,
    "norm": cmd_norm,
    "haagerup": cmd_haagerup,
    "khintchine-verify": cmd_khintchine_verify,
    "simplicity": cmd_simplicity,
    "nuclearity": cmd_nuclearity,
    "powers": cmd_powers,
    "ching": cmd_ching,
}


def run(args):
    system = load_system(args.system)
    param = parse_q(system, args.q, args.exact)
    config = {
        "command": args.command,
        "system": system.to_dict(),
        "q": param.to_json(),
        "elements": args.elements,
        "d": args.d,
        "n": args.n,
        "samples": args.samples,
        "seed": args.seed,
        "grid": args.grid,
        "L": args.L if args.command == "powers" else None,
        "exact": args.exact,
    }
    result, ok = HANDLERS[args.command](system, param, args)
    report = {"command": args.command, "version": __version__, "configHash": config_hash(config), "system": system.name}
    report["result"] = result
    report["status"] = "ok" if ok else "verification-failed"
    return report, ok


def main(argv=None):
    # element literals may follow the options
    args = build_parser().parse_intermixed_args(argv)
    try:
        report, ok = run(args)
    except (ConfigError, CapExceeded, ParameterError) as exc:
        print(f"hecklab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
