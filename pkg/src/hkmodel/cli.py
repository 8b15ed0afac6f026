"""Command-line front end: build models and run verification suites.

Every command writes one JSON document (sorted keys) to ``--out`` or stdout.
Exit codes: 0 all assertions pass, 1 some assertion failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import exactlin as el
from . import hodge, lefschetz, quatmodel
from .quadspace import QuadraticSpace, decompose_isometry, random_isometry, reflection
from .verbitsky import build_model, fujiki_constant_closed_form, fujiki_verify

log = logging.getLogger("hkmodel")

SUITES = ("build", "fujiki", "gtot", "so41", "transport", "spinor")
# above this dimension a run takes minutes; require --allow-large
LARGE_D = 12


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suite: str
    gram: list[list[Fraction]] | None = None
    source: str | None = None  # preset name or file path, echoed in reports
    n: int = 1
    seed: int = 0
    out: str | None = None
    allow_large: bool = False
    cases: int = 25
    plane: dict | None = None
    plane2: dict | None = None
    phi: list[list[str]] | None = None
    wall_time: bool = True
    extra: dict = field(default_factory=dict)

    def space(self) -> QuadraticSpace:
        if self.gram is None:
            raise ConfigError(f"suite {self.suite!r} needs --gram or --preset")
        return QuadraticSpace.from_rows(self.gram)

    def echo(self) -> dict:
        out = {"n": self.n, "seed": self.seed, "source": self.source}
        if self.gram is not None:
            out["gram"] = [[el.format_rational(x) for x in row] for row in self.gram]
        for key in ("plane", "plane2", "phi"):
            if getattr(self, key) is not None:
                out[key] = _canonical(getattr(self, key))
        return out


def _canonical(obj):
    """Same nesting with every rational written as a canonical 'p/q' string."""
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_canonical(v) for v in obj]
    return el.format_rational(el.as_fraction(obj))


def preset_names() -> list[str]:
    root = resources.files("hkmodel") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> list[list[Fraction]]:
    path = resources.files("hkmodel") / "presets" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return _parse_gram(json.loads(path.read_text()), name)


def _read_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{path}: no such file")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _parse_gram(data, where: str) -> list[list[Fraction]]:
    rows = data.get("gram") if isinstance(data, dict) else data
    if not isinstance(rows, list) or not rows:
        raise ConfigError(f"{where}: expected a 'gram' list of rows")
    try:
        gram = [[el.as_fraction(x) for x in row] for row in rows]
        QuadraticSpace.from_rows(gram)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: invalid gram: {exc}") from None
    return gram


def _check_rationals(obj, where: str) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_rationals(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_rationals(v, f"{where}[{i}]")
    else:
        try:
            el.as_fraction(obj)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}: {exc}") from None


def make_config(suite: str, gram_file=None, preset=None, n=1, seed=0, out=None,
                allow_large=False, **extra) -> SuiteConfig:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    if gram_file and preset:
        raise ConfigError("give either a gram file or a preset, not both")
    gram = source = None
    if preset:
        gram, source = load_preset(preset), preset
    elif gram_file:
        gram, source = _parse_gram(_read_json(gram_file), gram_file), Path(gram_file).name
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"n must be a positive integer, got {n!r}")
    if suite == "so41" and n > quatmodel.MAX_N:
        raise ConfigError(f"so41 supports n <= {quatmodel.MAX_N}")
    cfg = SuiteConfig(suite, gram, source, n, int(seed), out, bool(allow_large))
    for key in ("plane", "plane2", "phi"):
        if extra.get(key) is not None:
            _check_rationals(extra[key], key)
            setattr(cfg, key, extra.pop(key))
        else:
            extra.pop(key, None)
    if extra.get("cases") is not None:
        cfg.cases = int(extra.pop("cases"))
    if extra.get("wall_time") is not None:
        cfg.wall_time = bool(extra.pop("wall_time"))
    cfg.extra = {k: v for k, v in extra.items() if v is not None}
    if suite != "so41" and gram is None:
        raise ConfigError(f"suite {suite!r} needs a gram matrix (--gram or --preset)")
    if gram is not None and len(gram) > LARGE_D and not cfg.allow_large:
        raise ConfigError(f"dim V = {len(gram)} > {LARGE_D} needs --allow-large "
                          "(expected runtime: several minutes)")
    return cfg


def load_config(path: str) -> SuiteConfig:
    """Read a JSON suite config: ``{"suite", "preset" | "gram_file" | "gram", "n", "seed", ...}``."""
    data = _read_json(path)
    if not isinstance(data, dict) or "suite" not in data:
        raise ConfigError(f"{path}: expected an object with a 'suite' key")
    data = dict(data)
    inline = data.pop("gram", None)
    gram_file = data.pop("gram_file", None)
    if gram_file is not None and not Path(gram_file).is_absolute():
        gram_file = str(Path(path).parent / gram_file)
    cfg = make_config(data.pop("suite"), gram_file, data.pop("preset", None), **data)
    if inline is not None:
        if cfg.gram is not None:
            raise ConfigError(f"{path}: give only one of gram, gram_file, preset")
        cfg.gram, cfg.source = _parse_gram({"gram": inline}, path), "inline"
        if len(cfg.gram) > LARGE_D and not cfg.allow_large:
            raise ConfigError(f"dim V = {len(cfg.gram)} > {LARGE_D} needs allow_large")
    return cfg


# ---------- suites ----------


def suite_build(cfg: SuiteConfig) -> tuple[dict, dict]:
    model = build_model(cfg.space(), cfg.n)
    manifest = model.manifest()
    manifest["content_hash"] = model.content_hash()
    return manifest, {}


def suite_fujiki(cfg: SuiteConfig) -> tuple[dict, dict]:
    model = build_model(cfg.space(), cfg.n)
    rep = fujiki_verify(model)
    expected = fujiki_constant_closed_form(model.d, model.n)
    results = rep.to_json()
    results["C_closed_form"] = el.format_rational(expected)
    results["content_hash"] = model.content_hash()
    results["dims"] = model.dims
    checks = {"top_power": rep.top_power, "one_polarized": rep.one_polarized, "orthogonal_pair": rep.orthogonal_pair,
              "C_matches_closed_form": rep.C_n == expected}
    return results, checks


def suite_gtot(cfg: SuiteConfig) -> tuple[dict, dict]:
    model = build_model(cfg.space(), cfg.n)
    classes = lefschetz.lefschetz_spanning_set(model)
    theta = lefschetz.grading_operator(model)
    sl2_ok, unique = True, True
    duals = []
    small = model.d <= LARGE_D
    for h in classes:
        lam = lefschetz.dual_lefschetz(model, h)
        duals.append(lam)
        if small:
            sl2_ok &= lefschetz.sl2_relations_hold(lefschetz.lefschetz_operator(model, h), theta, lam)
    if small:
        # the independent linear-system route on the first class
        alt, nullity = lefschetz.sl2_completion_system(model, classes[0])
        unique = nullity == 0 and alt == duals[0]
    gens = lefschetz.gtot_generators(model, classes)
    basis = lefschetz.lie_closure(model, gens)
    rep = lefschetz.verify_gtot_structure(basis, model, duals, killing=small)
    results = rep.to_json()
    results["dims"] = model.dims
    results["content_hash"] = model.content_hash()
    results["lefschetz_classes"] = len(classes)
    checks = {"dimension": rep.dim == rep.expected_dim,
              "grading": rep.grading_dims == rep.expected_grading,
              "commuting_duals": rep.commuting_duals,
              "duals_in_span": rep.duals_in_span,
              "derivations_in_degree_0": rep.derivation_check,
              "abelian_extremes": rep.abelian_extremes,
              "restriction_to_H2": rep.restriction_check,
              "structure": rep.passed}
    if small:
        checks["sl2_relations"] = sl2_ok
        checks["sl2_unique"] = unique
    return results, checks


def suite_so41(cfg: SuiteConfig) -> tuple[dict, dict]:
    ops = quatmodel.exterior_operators(quatmodel.build_quaternion_model(cfg.n))
    rep = quatmodel.verify_so41(ops)
    results = rep.to_json()
    results["weil_square_eigenvalues"] = quatmodel.weil_square_eigen_check(ops)
    checks = dict(rep.identities)
    checks["closure_dim_10"] = rep.closure_dim == 10
    checks["killing_4_6"] = rep.killing == [4, 6, 0]
    checks["weil_square_eigenvalues"] = results["weil_square_eigenvalues"]
    return results, checks


def _transport_case(model, phi, p1, p2) -> dict:
    out = hodge.transport_verify(model, phi, p1, p2).to_json()
    out["P1"] = p1.to_json()
    out["P2"] = p2.to_json()
    return out


def suite_transport(cfg: SuiteConfig) -> tuple[dict, dict]:
    space = cfg.space()
    model = build_model(space, cfg.n)
    rng = random.Random(cfg.seed)
    checks: dict[str, bool] = {}
    results: dict = {"content_hash": model.content_hash(), "dims": model.dims}

    if cfg.plane is not None:
        # explicit input: one case, precondition failure is a hard error
        p1 = hodge.HodgePlane.from_json(cfg.plane)
        p2 = hodge.HodgePlane.from_json(cfg.plane2) if cfg.plane2 else p1
        phi = el.to_matrix(cfg.phi) if cfg.phi else el.identity(space.d)
        case = _transport_case(model, phi, p1, p2)
        results["cases"] = [case]
        checks["transport"] = case["transport"] == "pass"
        return results, checks

    planes = hodge.find_cm_planes(space)
    if not planes:
        raise ConfigError("no CM plane with small integer coordinates; pass --plane")
    p0 = planes[0]
    ident = _transport_case(model, el.identity(space.d), p0, p0)
    checks["identity_transport"] = ident["transport"] == "pass" and ident["verdict"] == hodge.J_CERTIFIED
    checks["weil_structure"] = all(hodge.weil_structure_ok(space, hodge.weil_derivation(space, p))
                                   for p in planes)
    checks["swapped_orientation_rejected"] = not hodge.is_hodge_isometry(
        space, el.identity(space.d), p0, p0.swapped())

    cases = []
    for _ in range(cfg.cases):
        w = random_isometry(space, rng)
        p1 = rng.choice(planes)
        cases.append(_transport_case(model, w.phi, p1, p1.image(w.phi)))
    checks["seeded_transport"] = all(c["transport"] == "pass" for c in cases)
    results["identity_case"] = ident
    results["cases"] = cases
    results["verdict_counts"] = {v: sum(c["verdict"] == v for c in cases)
                                 for v in (hodge.J_CERTIFIED, hodge.JPLUS_CERTIFIED, hodge.UNKNOWN)}
    return results, checks


def suite_spinor(cfg: SuiteConfig) -> tuple[dict, dict]:
    space = cfg.space()
    rng = random.Random(cfg.seed)
    d = space.d
    mult = refl = products = True
    pairs = []
    for _ in range(cfg.cases * 4):
        a, b = random_isometry(space, rng), random_isometry(space, rng)
        ab = decompose_isometry(space, el.matmul(a.phi, b.phi))
        ok = ab.spinor_norm == a.spinor_norm * b.spinor_norm and ab.det == a.det * b.det
        mult &= ok
        products &= ab.product(space) == ab.phi
        pairs.append([str(a.spinor_norm), str(b.spinor_norm), str(ab.spinor_norm)])
        v = a.reflections[0]
        tv = decompose_isometry(space, reflection(space, v))
        refl &= tv.spinor_norm == el.squarefree_class(space.q(v))
    minus = hodge.certify_membership(space, el.scale(-1, el.identity(d)))
    results = {"pairs_checked": len(pairs), "pairs": pairs, "minus_identity": minus.to_json()}
    checks = {"multiplicative": mult, "reflection_class": refl, "witness_products": products}
    return results, checks


RUNNERS = {
    "build": suite_build,
    "fujiki": suite_fujiki,
    "gtot": suite_gtot,
    "so41": suite_so41,
    "transport": suite_transport,
    "spinor": suite_spinor,
}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def run_suite(cfg: SuiteConfig) -> tuple[dict, int]:
    """Run one suite; returns (report, exit code)."""
    start = time.perf_counter()
    results, checks = RUNNERS[cfg.suite](cfg)
    if cfg.suite == "build":
        return results, 0
    failed = sorted(k for k, ok in checks.items() if not ok)
    report = {
        "suite": cfg.suite,
        "inputs": cfg.echo(),
        "assertions": {k: bool(v) for k, v in checks.items()},
        "failed": failed,
        "passed": not failed,
        "results": results,
    }
    if cfg.wall_time:
        report["wall_time"] = round(time.perf_counter() - start, 3)
    return report, 0 if not failed else 1


def emit_model(cfg: SuiteConfig) -> str:
    """Manifest text for ``cfg``; also written to ``cfg.out`` if set."""
    manifest, _ = suite_build(cfg)
    text = dumps(manifest)
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text


def reload_manifest(path: str) -> str:
    """Rebuild from a manifest's own gram and n and re-emit it."""
    data = _read_json(path)
    cfg = SuiteConfig("build", _parse_gram(data, path), path, int(data["n"]))
    return dumps(suite_build(cfg)[0])


# ---------- argument parsing ----------


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gram", metavar="FILE", help="JSON file with a 'gram' matrix of p/q strings")
    src.add_argument("--preset", metavar="NAME", help="bundled gram matrix")
    p.add_argument("--n", type=int, default=1, help="half the complex dimension")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--allow-large", action="store_true", help="permit dim V > 12 (minutes)")
    p.add_argument("--config", metavar="FILE", help="JSON suite config; overrides other flags")
    p.add_argument("--no-wall-time", action="store_true", help="omit timing for byte-exact diffs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hkmodel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a model and write its manifest")
    _add_common(b)
    b.add_argument("--reload", metavar="MANIFEST", help="rebuild from an existing manifest")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=[s for s in SUITES if s != "build"])
    _add_common(v)
    v.add_argument("--cases", type=int, default=25, help="seeded cases for transport and spinor")
    v.add_argument("--plane", metavar="JSON", help='P1 as {"x": [...], "y": [...]}')
    v.add_argument("--plane2", metavar="JSON", help="P2, defaults to P1")
    v.add_argument("--phi", metavar="JSON", help="isometry matrix, defaults to the identity")

    sub.add_parser("presets", help="list bundled gram matrices")
    return parser


def _json_arg(text: str | None, name: str):
    if text is None:
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--{name}: {exc.msg} at column {exc.colno}") from None


def _config_from_args(args) -> SuiteConfig:
    if args.config:
        cfg = load_config(args.config)
        if args.out:
            cfg.out = args.out
    else:
        suite = "build" if args.command == "build" else args.suite
        extra = {}
        if args.command == "verify":
            extra = {"cases": args.cases, "plane": _json_arg(args.plane, "plane"),
                     "plane2": _json_arg(args.plane2, "plane2"), "phi": _json_arg(args.phi, "phi")}
        cfg = make_config(suite, args.gram, args.preset, args.n, args.seed, args.out,
                          args.allow_large, **extra)
    if args.no_wall_time:
        cfg.wall_time = False
    return cfg


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "presets":
        for name in preset_names():
            sys.stdout.write(name + "\n")
        return 0
    try:
        if args.command == "build" and args.reload:
            _write(reload_manifest(args.reload), args.out)
            return 0
        cfg = _config_from_args(args)
        if cfg.suite == "build":
            text = emit_model(cfg)
            if not cfg.out:
                sys.stdout.write(text)
            return 0
        report, code = run_suite(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        # invalid mathematical input, e.g. a non-isometry or a degenerate plane
        sys.stderr.write(f"error: {exc}\n")
        return 2
    _write(dumps(report), cfg.out)
    for name in report["failed"]:
        sys.stderr.write(f"FAILED: {name}\n")
    log.info("suite %s finished with exit code %d", cfg.suite, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
