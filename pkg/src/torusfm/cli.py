"""Command-line front end.

Exit codes: 0 success, 1 I/O or schema error, 2 validation failure,
3 numerical failure (snapping, non-commuting input, sampling, ...).

Input files
-----------
presentation  {"d": 1, "generators": [{"name": "t", "matrix": [[-1]]}],
               "relators": ["t^2"]}
rep           {"lattice_images": [M, ...], "base_images": [M, ...], "tol": 1e-9,
               "presentation": {...}}        (presentation optional)
spectral      {"n": 2, "components": [{"orbit": [["1/3"], ["2/3"]], "base_index": 0,
               "k": 1, "eta": {"t^2": M}}], "presentation": {...}}
family        {"samples": [{"b": 0.0, "lattice_images": [M, ...]}, ...]}

M is a row-major matrix of [re, im] pairs.  Words (relators, eta keys) read
``a(1,0) t^2 s^-1``: optional lattice part, then base letters; ``1`` is
the identity.  The presentation comes from ``--presentation FILE``,
``--preset NAME`` or the ``presentation`` field of the input, in that order.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import presets
from .errors import NumericalFailure, TorusFMError, ValidationError
from .fm_transform import (
    DEFAULT_QMAX,
    PHASE_TOL,
    SNAP_TOL,
    decompose,
    eta_irreducible,
    forward_transform,
    inverse_transform,
)
from .group_model import validate_presentation
from .repvar_atlas import atlas_jsonl, atlas_summary_csv, build_atlas, sample_representation
from .serialize import (
    SchemaError,
    atlas_entry_from_json,
    component_to_json,
    dumps,
    family_from_json,
    presentation_from_json,
    rep_from_json,
    rep_to_json,
    spectral_from_json,
    spectral_to_json,
    write_atomic,
)
from .spectral_family import check_semicontinuity, spectral_flow
from .unitary_rep import (
    UnitaryRep,
    are_equivalent,
    intertwiner_space_dim,
    validate_rep,
)

log = logging.getLogger("torusfm")

WORKERS_ENV = "TORUSFM_WORKERS"


class Failed(Exception):
    """Carry an exit code out of a subcommand after the result was written."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(args, text: str) -> None:
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _presentation(args, data: dict | None = None):
    if getattr(args, "presentation", None):
        p = presentation_from_json(_load_json(args.presentation))
    elif getattr(args, "preset", None):
        p = presets.PRESETS[args.preset]()
    elif data is not None and "presentation" in data:
        p = presentation_from_json(data["presentation"])
    else:
        raise SchemaError("no presentation: pass --presentation, --preset or embed one in the input")
    report = validate_presentation(p)
    if not report.valid:
        raise ValidationError("; ".join(report.failures))
    return p


def _load_rep(args, path: str):
    data = _load_json(path)
    rep = rep_from_json(data)
    if args.tol is not None:
        rep = UnitaryRep(rep.lattice_images, rep.base_images, args.tol)
    return rep, _presentation(args, data)


def _require_valid(rep, p) -> None:
    report = validate_rep(rep, p)
    if not report.valid:
        raise ValidationError("invalid representation: " + "; ".join(report.failures))


def _transform_kwargs(args) -> dict:
    return dict(qmax=args.qmax, tol=args.snap_tol, phase_tol=args.phase_tol, workers=args.workers)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> None:
    rep, p = _load_rep(args, args.input)
    report = validate_rep(rep, p)
    _emit(args, dumps(report.to_json()))
    if not report.valid:
        raise Failed(2, "; ".join(report.failures))


def cmd_transform(args) -> None:
    rep, p = _load_rep(args, args.input)
    _require_valid(rep, p)
    s = forward_transform(rep, p, **_transform_kwargs(args))
    _emit(args, dumps(spectral_to_json(s, p)))


def cmd_invert(args) -> None:
    data = _load_json(args.input)
    p = _presentation(args, data)
    s = spectral_from_json(data, p)
    rep = inverse_transform(s, p, tol=args.tol or 1e-9, workers=args.workers)
    _emit(args, dumps(rep_to_json(rep, p)))


def cmd_roundtrip(args) -> None:
    rep, p = _load_rep(args, args.input)
    _require_valid(rep, p)
    s = forward_transform(rep, p, **_transform_kwargs(args))
    back = inverse_transform(s, p, tol=rep.tol)
    result = {
        "equivalent": are_equivalent(rep, back),
        "hom_dim": intertwiner_space_dim(rep, back),
        "end_dim_input": intertwiner_space_dim(rep, rep),
        "end_dim_roundtrip": intertwiner_space_dim(back, back),
        "residuals": validate_rep(back, p).residuals,
    }
    _emit(args, dumps(result))
    if not result["equivalent"]:
        raise Failed(2, "round trip is not equivalent to the input")


def cmd_irreducible(args) -> None:
    rep, p = _load_rep(args, args.input)
    _require_valid(rep, p)
    dim = intertwiner_space_dim(rep, rep)
    _emit(args, dumps({"irreducible": dim == 1, "commutant_dim": dim}))


def cmd_equivalent(args) -> None:
    rep1, p = _load_rep(args, args.input)
    rep2, _ = _load_rep(args, args.other)
    _require_valid(rep1, p)
    _require_valid(rep2, p)
    _emit(args, dumps({
        "equivalent": rep1.n == rep2.n and are_equivalent(rep1, rep2),
        "hom_dim": intertwiner_space_dim(rep1, rep2),
        "end_dims": [intertwiner_space_dim(rep1, rep1), intertwiner_space_dim(rep2, rep2)],
    }))


def cmd_decompose(args) -> None:
    rep, p = _load_rep(args, args.input)
    _require_valid(rep, p)
    parts = decompose(rep, p, qmax=args.qmax, tol=args.snap_tol, seed=args.seed)
    out = []
    for c, mult in parts:
        entry = component_to_json(c, p)
        entry.update(multiplicity=mult, ell=c.ell, eta_irreducible=eta_irreducible(c))
        out.append(entry)
    _emit(args, dumps({"n": rep.n, "seed": args.seed, "components": out,
                       "mass": sum(c.ell * c.k * m for c, m in parts)}))


def cmd_atlas(args) -> None:
    p = _presentation(args)
    entries = build_atlas(p, args.n, args.q)
    _emit(args, atlas_jsonl(entries))
    if args.csv:
        write_atomic(args.csv, atlas_summary_csv(entries))


def cmd_sample(args) -> None:
    p = _presentation(args)
    if args.atlas:
        with open(args.atlas) as fh:
            lines = [ln for ln in fh if ln.strip()]
        entry = atlas_entry_from_json(json.loads(lines[args.index]), p)
    else:
        if args.n is None or args.q is None:
            raise SchemaError("sample needs --atlas FILE or both --n and --q")
        entry = build_atlas(p, args.n, args.q)[args.index]
    rep = sample_representation(entry, seed=args.seed)
    out = rep_to_json(rep, p)
    out["seed"] = args.seed
    out["orbit"] = [pt.to_json() for pt in entry.orbit.points]
    _emit(args, dumps(out))


def cmd_flow(args) -> None:
    family = family_from_json(_load_json(args.input))
    flow = spectral_flow(family, tol=args.tol or 1e-9, phase_tol=args.phase_tol)
    report = check_semicontinuity(flow, flow.n)
    _emit(args, flow.to_csv())
    result = dumps({"counting": flow.counting, **report.to_json()})
    if args.report:
        write_atomic(args.report, result)
    else:
        sys.stderr.write(result)
    if not report.passed:
        raise Failed(2, "semicontinuity check failed")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusfm", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     epilog=__doc__.split("\n", 2)[2])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--presentation", help="presentation JSON file")
    common.add_argument("--preset", choices=sorted(presets.PRESETS))
    common.add_argument("--tol", type=float, default=None, help="unitarity/covariance tolerance")
    common.add_argument("--phase-tol", type=float, default=PHASE_TOL)
    common.add_argument("--snap-tol", type=float, default=SNAP_TOL)
    common.add_argument("--qmax", type=int, default=DEFAULT_QMAX)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=int(os.environ.get(WORKERS_ENV, "1")))
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help, inputs=("input",)):
        sp = sub.add_parser(name, parents=[common], help=help)
        for i in inputs:
            sp.add_argument(i)
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "check a representation against its presentation")
    add("transform", cmd_transform, "representation -> spectral data")
    add("invert", cmd_invert, "spectral data -> representation")
    add("roundtrip", cmd_roundtrip, "transform, invert and compare")
    add("irreducible", cmd_irreducible, "commutant dimension test")
    add("equivalent", cmd_equivalent, "equivalence of two representations", ("input", "other"))
    add("decompose", cmd_decompose, "irreducible constituents with multiplicities")
    sp = add("atlas", cmd_atlas, "orbit atlas as JSON lines", ())
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--csv", help="also write a per-stratum CSV summary")
    sp = add("sample", cmd_sample, "random representation from an atlas entry", ())
    sp.add_argument("--atlas", help="atlas JSON-lines file")
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int)
    sp = add("flow", cmd_flow, "spectral flow of a sampled family (CSV)")
    sp.add_argument("--report", help="write the semicontinuity report here (default: stderr)")
    return parser


def _check_config(args) -> None:
    for name in ("tol", "phase_tol", "snap_tol"):
        val = getattr(args, name)
        if val is not None and val <= 0:
            raise SchemaError(f"--{name.replace('_', '-')} must be positive")
    if args.qmax < 1:
        raise SchemaError("--qmax must be >= 1")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        _check_config(args)
        args.func(args)
    except Failed as exc:
        log.error("%s", exc)
        return exc.code
    except NumericalFailure as exc:
        log.error("numerical failure: %s: %s", type(exc).__name__, exc)
        return 3
    except TorusFMError as exc:
        log.error("validation failure: %s: %s", type(exc).__name__, exc)
        return 2
    except (ValueError, OSError, KeyError, IndexError) as exc:
        # SchemaError and json.JSONDecodeError are ValueErrors
        log.error("input error: %s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
