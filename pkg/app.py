# ============================================================================
# FILE: app.py - COMMAND LINE ENTRY POINT
# ============================================================================
import argparse
import logging
import os
import re
import sys
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from algebra.conformal import (
    ConformalContext,
    apply_translation,
    embed,
    embed_points,
)
from algebra.multivector import TAU, as_multivectors
from arrays.point_arrays import (
    SeedPolytope,
    TranslationSpec,
    affine_orbit,
    affine_orbit_conformal,
    degeneracy_report,
    distinguished_lengths,
    regular_polygon,
    root_polytope,
    translation_sweep,
)
from coxeter.coxeter_plane import (
    axis_roots,
    describe_coxeter_element,
    plane_orbit_decomposition,
    project_to_plane,
    rotational_symmetry_order,
)
from coxeter.group_verifier import GroupVerifier
from coxeter.root_systems import GroupId, RootSystem, build_root_system, is_closed, parse_group_id
from coxeter.spinor_induction import induce_planar_root_system, induce_root_system
from coxeter.versor_groups import (
    OrthogonalGroup,
    VersorGroup,
    generate_pin_group,
    generate_spin_group,
    multiplication_table,
    odd_decomposition,
    realize_orthogonal,
)
from utils.errors import ParseError, VersorEngineError
from utils.exporters import ResultExporter
from utils.point_set import max_set_deviation
from utils.settings import EngineSettings, load_settings

logger = logging.getLogger("app")


CHECK_LIMIT = 1e-9

_SCALAR = re.compile(
    r"^(?P<sign>[+-]?)(?:(?P<num>\d+(?:\.\d*)?(?:e[+-]?\d+)?|\.\d+(?:e[+-]?\d+)?)"
    r"(?:\*(?P<tau>tau))?|(?P<inv>1/tau)|(?P<bare>tau))$",
    re.IGNORECASE,
)


# ========== LITERALS ==========

def parse_scalar(text: str) -> float:
    """Decimal, ``tau``, ``1/tau`` or ``<decimal>*tau``"""
    match = _SCALAR.match(text.strip())
    if not match:
        raise ParseError(f"malformed number {text!r}")
    sign = -1.0 if match.group("sign") == "-" else 1.0
    if match.group("bare"):
        return sign * TAU
    if match.group("inv"):
        return sign / TAU
    value = float(match.group("num"))
    if match.group("tau"):
        value *= TAU
    return sign * value


def parse_vector(text: str) -> np.ndarray:
    """Comma separated scalars, e.g. ``1,0`` or ``tau,1,0``"""
    parts = [p for p in text.split(",")]
    if not parts or any(not p.strip() for p in parts):
        raise ParseError(f"malformed vector literal {text!r}")
    return np.array([parse_scalar(p) for p in parts])


def parse_indices(text: str) -> List[int]:
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise ParseError(f"malformed index list {text!r}") from None


# ========== ARGUMENTS ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default=None, help="A1A1A1, A3, B3, H3, H2 or I2:n")
    common.add_argument("--n", type=int, default=None, help="order for a bare I2")
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--lambda", dest="lam", type=float, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    chirality = argparse.ArgumentParser(add_help=False)
    mode = chirality.add_mutually_exclusive_group()
    mode.add_argument("--chiral", dest="full", action="store_false", default=False)
    mode.add_argument("--full", dest="full", action="store_true")

    translation = argparse.ArgumentParser(add_help=False)
    translation.add_argument("--translate", default=None, help="direction x,y[,z] (default e1)")
    translation.add_argument("--seed", default=None, help="pentagon, polygon:N or roots")
    translation.add_argument("--include-seed", action="store_true")

    parser = argparse.ArgumentParser(
        prog="versor-engine",
        description="Coxeter groups, versor groups and point arrays in geometric algebra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("roots", parents=[common], help="full root system")
    sub.add_parser("cartan", parents=[common], help="Cartan matrix")

    group = sub.add_parser("group", parents=[common, chirality], help="versor group")
    group.add_argument("--exhaustive", action="store_true")
    group.add_argument("--multiplication-table", action="store_true")

    binary = sub.add_parser("binary", parents=[common], help="binary polyhedral group")
    binary.add_argument("--exhaustive", action="store_true")

    induce = sub.add_parser("induce", parents=[common], help="4D root system from spinors")
    induce.add_argument("--experimental-planar", action="store_true")

    coxeter = sub.add_parser("coxeter", parents=[common], help="Coxeter element")
    coxeter.add_argument("--permutation", default=None, help="order of simple roots, e.g. 2,0,1")
    coxeter.add_argument("--vector", default=None, help="orbit of x,y,z under w")

    sub.add_parser("project", parents=[common], help="roots on the Coxeter plane")

    array = sub.add_parser("array", parents=[common, chirality, translation], help="point array")
    array.add_argument("--length", default=None)
    array.add_argument("--raw", action="store_true", help="add conformal multivectors")

    sweep = sub.add_parser("sweep", parents=[common, chirality, translation], help="length sweep")
    sweep.add_argument("--lengths", default="0.5,1,tau,2")
    sweep.add_argument("--workers", type=int, default=1)

    check = sub.add_parser("conformal-check", parents=[common, chirality, translation],
                           help="3D against conformal pipeline")
    check.add_argument("--lengths", default="1,tau,1/tau")
    check.add_argument("--samples", type=int, default=100)
    return parser


# ========== PIPELINES ==========

DEFAULT_GROUP = "H3"
DEFAULT_ARRAY_GROUP = "I2:5"


def _root_system(args, settings: EngineSettings) -> Tuple[GroupId, RootSystem]:
    fallback = DEFAULT_ARRAY_GROUP if args.command == "conformal-check" else DEFAULT_GROUP
    group = parse_group_id(args.group or fallback, args.n)
    return group, build_root_system(group, settings.tolerance, settings.closure_limit)


def _versor_group(rs: RootSystem, full: bool, settings: EngineSettings) -> VersorGroup:
    if full:
        return generate_pin_group(rs, settings.tolerance, settings.closure_limit, settings.hash_scale)
    return generate_spin_group(rs, settings.tolerance, settings.closure_limit, settings.hash_scale)


def _seed(args, rs: RootSystem) -> SeedPolytope:
    choice = args.seed or ("pentagon" if rs.sig.dimension == 2 else "roots")
    if choice == "pentagon":
        return regular_polygon(5)
    if choice.startswith("polygon:"):
        try:
            return regular_polygon(int(choice.split(":", 1)[1]))
        except ValueError as exc:
            raise ParseError(f"bad seed {choice!r}: {exc}") from None
    if choice == "roots":
        return root_polytope(rs)
    raise ParseError(f"unknown seed {choice!r}")


def _translation(args, dimension: int, length: Optional[float] = None) -> TranslationSpec:
    if args.translate is None:
        vector = np.eye(dimension)[0]
    else:
        vector = parse_vector(args.translate)
    if length is None:
        length = float(np.linalg.norm(vector))
    try:
        return TranslationSpec(direction=vector.tolist(), length=length)
    except ValidationError as exc:
        raise ParseError(" ".join(str(exc).split())) from None


def cmd_roots(args, settings, exporter) -> Tuple[Dict, pd.DataFrame]:
    _, rs = _root_system(args, settings)
    return exporter.root_system_record(rs), exporter.root_system_frame(rs)


def cmd_cartan(args, settings, exporter):
    group, rs = _root_system(args, settings)
    matrix = rs.cartan_matrix()
    return exporter.cartan_record(group.label, matrix), exporter.cartan_frame(matrix)


def cmd_group(args, settings, exporter):
    _, rs = _root_system(args, settings)
    vg = _versor_group(rs, args.full, settings)
    og = realize_orthogonal(vg, settings.tolerance)
    report = GroupVerifier(vg, settings.tolerance, settings.associativity_samples,
                           settings.random_seed).verify(args.exhaustive)
    realized = {"chirality": og.chirality, "order": len(og),
                "decomposition": odd_decomposition(og, settings.tolerance)}
    record = exporter.group_record(vg, report, realized)
    if args.multiplication_table:
        table = multiplication_table(vg, settings.tolerance)
        record["multiplication_table"] = table
        return record, exporter.multiplication_table_frame(table)
    return record, exporter.group_frame(vg)


def cmd_binary(args, settings, exporter):
    _, rs = _root_system(args, settings)
    vg = _versor_group(rs, False, settings)
    report = GroupVerifier(vg, settings.tolerance, settings.associativity_samples,
                           settings.random_seed).verify(args.exhaustive)
    spectrum = report["order_spectrum"] or {}
    frame = pd.DataFrame([(int(k), v) for k, v in spectrum.items()], columns=["order", "count"])
    return exporter.binary_record(report), frame


def cmd_induce(args, settings, exporter):
    _, rs = _root_system(args, settings)
    vg = _versor_group(rs, False, settings)
    if args.experimental_planar:
        induced = induce_planar_root_system(vg, experimental=True, tol=settings.tolerance)
    else:
        induced = induce_root_system(vg, settings.tolerance)
    return exporter.root_system4_record(induced), exporter.root_system4_frame(induced)


def cmd_coxeter(args, settings, exporter):
    group, rs = _root_system(args, settings)
    order = parse_indices(args.permutation) if args.permutation else None
    descriptor = describe_coxeter_element(rs.simple_roots, order, settings.coxeter_bound,
                                          settings.tolerance)
    axis = axis_roots(descriptor, settings.tolerance)
    orbit = None
    if args.vector:
        vector = parse_vector(args.vector)
        if vector.shape[0] != rs.sig.dimension:
            raise ParseError(f"--vector needs {rs.sig.dimension} components")
        orbit = plane_orbit_decomposition(descriptor.versor, vector, descriptor.plane,
                                          settings.tolerance, settings.coxeter_bound)
    axis_info = {"count": len(axis), "closed": is_closed(axis, settings.tolerance), "roots": axis}
    record = exporter.coxeter_record(group.label, descriptor, orbit, axis_info)
    rows = orbit["points"] if orbit else axis
    return record, pd.DataFrame(rows, columns=["x", "y", "z"][: rows.shape[1]])


def cmd_project(args, settings, exporter):
    group, rs = _root_system(args, settings)
    descriptor = describe_coxeter_element(rs.simple_roots, None, settings.coxeter_bound,
                                          settings.tolerance)
    coords = project_to_plane(rs.roots, descriptor.plane)
    symmetry = rotational_symmetry_order(coords)
    return (exporter.projection_record(group.label, coords, symmetry),
            exporter.projection_frame(coords))


def _array_setup(args, settings) -> Tuple[GroupId, RootSystem, VersorGroup, OrthogonalGroup, SeedPolytope]:
    group, rs = _root_system(args, settings)
    vg = _versor_group(rs, args.full, settings)
    og = realize_orthogonal(vg, settings.tolerance)
    return group, rs, vg, og, _seed(args, rs)


def cmd_array(args, settings, exporter):
    group, rs, vg, og, seed = _array_setup(args, settings)
    length = parse_scalar(args.length) if args.length is not None else None
    spec = _translation(args, seed.dimension, length)
    arr = affine_orbit(seed, og, spec, args.include_seed, settings.tolerance)
    meta = {"group": group.label, "chirality": og.chirality, "seed": seed.name,
            "translation": spec.vector, "length": spec.length}
    raw = None
    if args.raw:
        ctx = ConformalContext(lam=settings.lam)
        raw = as_multivectors(embed_points(arr.points, ctx), ctx.sig)
    record = exporter.point_array_record(arr, degeneracy_report(arr), meta, raw)
    return record, exporter.point_array_frame(arr)


def cmd_sweep(args, settings, exporter):
    group, rs, vg, og, seed = _array_setup(args, settings)
    lengths = parse_vector(args.lengths).tolist()
    direction = _translation(args, seed.dimension, 1.0).direction
    try:
        sweep = translation_sweep(seed, og, direction, lengths, args.include_seed,
                                  settings.tolerance, args.workers)
    except ValidationError as exc:
        raise ParseError(" ".join(str(exc).split())) from None
    generic = len(og) * len(seed) + (len(seed) if args.include_seed else 0)
    meta = {"group": group.label, "chirality": og.chirality, "seed": seed.name,
            "direction": direction, "generic": generic}
    record = exporter.sweep_record(sweep, distinguished_lengths(sweep, generic), meta)
    return record, exporter.sweep_frame(sweep)


def conformal_check(args, settings) -> Dict:
    """Compare the 3D and conformal pipelines and the translation rotor identity"""
    group, rs, vg, og, seed = _array_setup(args, settings)
    ctx = ConformalContext(lam=settings.lam)
    cases = []
    for length in parse_vector(args.lengths).tolist():
        spec = _translation(args, seed.dimension, length)
        plain = affine_orbit(seed, og, spec, args.include_seed, settings.tolerance)
        conformal = affine_orbit_conformal(seed, vg, spec, ctx, og, args.include_seed,
                                           settings.tolerance)
        cases.append({
            "length": length,
            "points_3d": len(plain),
            "points_conformal": len(conformal),
            "deviation": max_set_deviation(plain.points, conformal.points),
        })

    rng = np.random.default_rng(settings.random_seed)
    translation_deviation = 0.0
    null_deviation = 0.0
    for _ in range(args.samples):
        x, a = rng.normal(size=3), rng.normal(size=3)
        moved = apply_translation(embed(x, ctx), a, ctx)
        target = embed(x + a, ctx)
        translation_deviation = max(translation_deviation,
                                    float(np.max(np.abs(moved.X.coeffs - target.X.coeffs))))
        null_deviation = max(null_deviation, abs((moved.X * moved.X).scalar_part))

    worst = max([c["deviation"] for c in cases] + [translation_deviation, null_deviation])
    passed = worst < CHECK_LIMIT and all(c["points_3d"] == c["points_conformal"] for c in cases)
    return {
        "group": group.label,
        "chirality": og.chirality,
        "lambda": ctx.lam,
        "cases": cases,
        "translation_deviation": translation_deviation,
        "null_deviation": null_deviation,
        "max_deviation": worst,
        "passed": passed,
    }


def cmd_conformal_check(args, settings, exporter):
    report = conformal_check(args, settings)
    return report, pd.DataFrame(report["cases"])


HANDLERS = {
    "roots": cmd_roots,
    "cartan": cmd_cartan,
    "group": cmd_group,
    "binary": cmd_binary,
    "induce": cmd_induce,
    "coxeter": cmd_coxeter,
    "project": cmd_project,
    "array": cmd_array,
    "sweep": cmd_sweep,
    "conformal-check": cmd_conformal_check,
}


# ========== ENTRY POINT ==========

def _error(exc: BaseException) -> str:
    message = " ".join(str(exc).split())
    return f"error: {type(exc).__name__}: {message}"


def initialize_engine(args) -> Tuple[EngineSettings, ResultExporter]:
    """Settings from the environment and flags, plus logging on stderr"""
    settings = load_settings(tolerance=args.tolerance, lam=args.lam)
    level = settings.log_level
    if args.verbose == 1:
        level = "INFO"
    elif args.verbose > 1:
        level = "DEBUG"
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format="%(levelname)s %(name)s: %(message)s")
    return settings, ResultExporter(settings.float_format)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        settings, exporter = initialize_engine(args)
    except ValidationError as exc:
        sys.stderr.write(_error(exc) + "\n")
        return 2

    try:
        record, frame = HANDLERS[args.command](args, settings, exporter)
        exporter.write(exporter.render(record, frame, args.format), args.out)
    except (VersorEngineError, OSError) as exc:
        sys.stderr.write(_error(exc) + "\n")
        return 1

    if args.command == "conformal-check" and not record["passed"]:
        sys.stderr.write(f"error: ConformalCheckFailed: max deviation {record['max_deviation']!r}\n")
        return 1
    logger.info("✅ %s finished", args.command)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
