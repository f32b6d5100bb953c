"""Batch front-end: parse fan/calibration/LVMB files, dispatch operations,
emit JSON reports on stdout.

Exit codes: 0 on Valid/true, 1 on Invalid/false, 2 on input error,
3 on Indeterminate.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import atlas as atlas_mod
from . import gale_lvmb as gl
from . import lattice_fan as lf
from . import moduli
from .calibration import (CalibratedFan, standardize_calibration,
                          trivial_calibration)
from .errors import Indeterminate, InputError, QtoricError
from .io import (SCHEMA, FanFile, fan_to_json, load_fan_file,
                 load_morphism_file, parse_scalar)
from .linalg import Matrix
from .morphism import (CalMorphism, check_cal_morphism, check_fan_iso,
                       check_fan_morphism, find_cal_morphism)
from .scalars import Parameter, Scalar, Witness

Q = Fraction

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_INDETERMINATE = 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


_SQRT_RE = re.compile(r"sqrt:(\d+(?:/\d+)?)")


def _cli_scalar(text: str, params: dict, witness_vals: dict) -> Scalar:
    """Parse a command-line scalar; sqrt:D literals declare quadratic
    parameters on the fly (positive root at the witness)."""
    def sub(mt):
        d = Q(mt.group(1))
        name = f"sqrt{d.numerator}_{d.denominator}"
        if name not in params:
            p = Parameter(name, "quadratic", d)
            params[name] = p
            witness_vals[p] = Q(1)
        return name

    return parse_scalar(_SQRT_RE.sub(sub, text), params)


def _need(ff: FanFile, attr, what):
    val = getattr(ff, attr)
    if val is None:
        raise InputError(f"input file lacks {what}")
    return val


def _calibrated(ff: FanFile) -> CalibratedFan:
    fan = _need(ff, "fan", "a fan")
    if ff.cal is not None:
        return CalibratedFan(fan, ff.cal)
    return trivial_calibration(fan)


# ---------------------------------------------------------------------------
# per-command handlers: return (payload, exit_code)
# ---------------------------------------------------------------------------

def cmd_validate(ff: FanFile, args):
    rep = lf.validate_fan(_need(ff, "fan", "a fan"), ff.witness)
    return rep.to_json(), EXIT_TRUE if rep.valid else EXIT_FALSE


def cmd_properties(ff: FanFile, args):
    props = lf.fan_properties(_need(ff, "fan", "a fan"), ff.witness)
    return props.to_json(), EXIT_TRUE


def cmd_comb_type(ff: FanFile, args):
    return lf.comb_type(_need(ff, "fan", "a fan")).to_json(), EXIT_TRUE


def cmd_standardize(ff: FanFile, args):
    fan = _need(ff, "fan", "a fan")
    if ff.cal is not None:
        std, (L, H, s) = standardize_calibration(CalibratedFan(fan, ff.cal))
        payload = fan_to_json(ff.params, ff.raw.get("witness", {}),
                              std.fan, std.cal)
        payload["transform"] = {
            "L": [[str(x) for x in r] for r in L.rows],
            "H": [[int(x.as_fraction()) for x in r] for r in H.rows],
            "s": {str(k): v for k, v in s.items()}}
    else:
        std, L = lf.standardize_fan(fan)
        payload = fan_to_json(ff.params, ff.raw.get("witness", {}), std)
        payload["transform"] = {"L": [[str(x) for x in r] for r in L.rows]}
    return payload, EXIT_TRUE


def cmd_atlas(ff: FanFile, args):
    fan = _need(ff, "fan", "a fan")
    target = CalibratedFan(fan, ff.cal) if ff.cal is not None else fan
    rep = atlas_mod.atlas_report(target, cone_orders=ff.cone_orders())
    return rep, EXIT_TRUE


def cmd_irrelevant(ff: FanFile, args):
    fan = _need(ff, "fan", "a fan")
    target = CalibratedFan(fan, ff.cal) if ff.cal is not None else fan
    return atlas_mod.build_irrelevant(target).to_json(), EXIT_TRUE


def cmd_gale(ff: FanFile, args):
    cf = _calibrated(ff)
    if args.affine:
        images = list(cf.cal.images)
        extra = [Scalar.zero()] * cf.cal.d
        for v in images:
            extra = [e - x for e, x in zip(extra, v)]
        mode = "tail" if args.tail else "pivot"
        data = gl.gale_affine(images + [tuple(extra)], normalization=mode)
    else:
        data = gl.gale_linear(cf.cal)
    return data.to_json(), EXIT_TRUE


def cmd_lvmb_build(ff: FanFile, args):
    datum = gl.build_lvmb(_calibrated(ff))
    payload = datum.to_json()
    payload["indispensable"] = datum.indispensable()
    return payload, EXIT_TRUE


def cmd_lvmb_check(ff: FanFile, args):
    datum = _need(ff, "lvmb", "an lvmb block")
    res = gl.check_lvmb(datum, ff.witness)
    payload = res.to_json()
    payload["indispensable"] = datum.indispensable()
    return payload, EXIT_TRUE if res.ok else EXIT_FALSE


def cmd_lvm_check(ff: FanFile, args):
    datum = _need(ff, "lvmb", "an lvmb block")
    res = gl.check_lvm(datum.points, datum.m, ff.witness)
    ok = res["siegel"] and res["weak_hyperbolic"]
    payload = {"siegel": res["siegel"],
               "weak_hyperbolic": res["weak_hyperbolic"],
               "E": sorted(sorted(e) for e in res["E"])}
    return payload, EXIT_TRUE if ok else EXIT_FALSE


def cmd_polytope(ff: FanFile, args):
    datum = _need(ff, "lvmb", "an lvmb block")
    return gl.polytope_faces(datum, ff.witness).to_json(), EXIT_TRUE


def cmd_kh_check(ff: FanFile, args):
    datum = _need(ff, "lvmb", "an lvmb block")
    verdict = gl.condition_KH(datum.points)
    return {"condition": verdict}, EXIT_TRUE


def cmd_lvmb_to_fan(ff: FanFile, args):
    datum = _need(ff, "lvmb", "an lvmb block")
    cf = gl.lvmb_to_fan(datum)
    payload = fan_to_json(ff.params, ff.raw.get("witness", {}),
                          cf.fan, cf.cal)
    return payload, EXIT_TRUE


# -- two-file commands -------------------------------------------------------

def cmd_comb_equiv(args):
    ff1 = load_fan_file(_read(args.files[0]))
    ff2 = load_fan_file(_read(args.files[1]))
    D1 = lf.comb_type(_need(ff1, "fan", "a fan"))
    D2 = lf.comb_type(_need(ff2, "fan", "a fan"))
    perm = lf.comb_equivalent(D1, D2)
    if perm is None:
        return {"equivalent": False}, EXIT_FALSE
    return {"equivalent": True,
            "permutation": {str(k): v for k, v in sorted(perm.items())}}, \
        EXIT_TRUE


def cmd_morphism_check(args):
    ff1 = load_fan_file(_read(args.files[0]))
    ff2 = load_fan_file(_read(args.files[1]))
    params = dict(ff1.params)
    params.update(ff2.params)
    L, _, _ = load_morphism_file(_read(args.morphism), params)
    if L is None:
        raise InputError("morphism file lacks L")
    w = _merge_witness(ff1, ff2)
    if args.iso:
        res = check_fan_iso(L, ff1.fan, ff2.fan, w)
    else:
        res = check_fan_morphism(L, ff1.fan, ff2.fan, w)
    return res.to_json(), EXIT_TRUE if res.ok else EXIT_FALSE


def cmd_cal_morphism_check(args):
    ff1 = load_fan_file(_read(args.files[0]))
    ff2 = load_fan_file(_read(args.files[1]))
    cf1, cf2 = _calibrated(ff1), _calibrated(ff2)
    w = _merge_witness(ff1, ff2)
    params = dict(ff1.params)
    params.update(ff2.params)
    if args.search:
        L = None
        if args.morphism:
            L, _, _ = load_morphism_file(_read(args.morphism), params)
        m = find_cal_morphism(cf1, cf2, w, L=L)
        if m is None:
            return {"found": False}, EXIT_FALSE
        return {"found": True, "morphism": m.to_json()}, EXIT_TRUE
    if not args.morphism:
        raise InputError("cal-morphism-check needs --morphism or --search")
    L, H, s = load_morphism_file(_read(args.morphism), params)
    if L is None or H is None:
        raise InputError("morphism file must carry L and H")
    res = check_cal_morphism(CalMorphism(L, H, s), cf1, cf2, w)
    return res.to_json(), EXIT_TRUE if res.ok else EXIT_FALSE


def _merge_witness(ff1: FanFile, ff2: FanFile) -> Witness:
    vals = {}
    for ff in (ff1, ff2):
        for name, (p, v) in ff.witness.values.items():
            if p.kind == "quadratic":
                vals[p] = Q(v)
            else:
                vals[p] = v
    return Witness(vals, precision=ff1.witness.precision,
                   cap=ff1.witness.cap)


# -- moduli commands ----------------------------------------------------------

def cmd_moduli_act(args):
    params, wvals = {}, {}
    hbar = Matrix([[_cli_scalar(x, params, wvals) for x in r]
                   for r in json.loads(args.hbar)])
    H = Matrix([[Scalar.from_fraction(Q(str(x))) for x in r]
                for r in json.loads(args.H)])
    out = moduli.torus_act(hbar, H)
    return {"hbar": [[str(x) for x in r] for r in out.rows]}, EXIT_TRUE


def cmd_moduli_equiv_2d(args):
    params, wvals = {}, {}
    a = _cli_scalar(args.a, params, wvals)
    b = _cli_scalar(args.b, params, wvals)
    H = moduli.torus_equiv_2d(a, b)
    if H is None:
        return {"equivalent": False}, EXIT_FALSE
    check = moduli.act_2d_quad(moduli.scalar_to_quad(a), H)
    verified = check.equals_value(moduli.scalar_to_quad(b))
    return {"equivalent": True,
            "H": [[str(x) for x in r] for r in H.rows],
            "verified": verified}, EXIT_TRUE


def cmd_p2_orbit(args):
    params, wvals = {}, {}
    a = _cli_scalar(args.a, params, wvals)
    b = _cli_scalar(args.b, params, wvals)
    w = Witness(wvals, precision=args.precision, cap=args.precision_cap)
    rep = moduli.p2_orbit(a, b, w)
    return rep.to_json(), EXIT_TRUE


def cmd_wps_weights(args):
    alpha, beta, gamma = moduli.wps_weights(Q(args.a), Q(args.b))
    return {"weights": [alpha, beta, gamma]}, EXIT_TRUE


def cmd_hopf_equiv(args):
    params, wvals = {}, {}

    def pair(text):
        vals = [_cli_scalar(x, params, wvals) for x in json.loads(text)]
        if len(vals) != 4:
            raise InputError("a Hopf pair needs 4 reals: re3, im3, re4, im4")
        return ((vals[0], vals[1]), (vals[2], vals[3]))

    p1 = pair(args.pair1)
    p2 = pair(args.pair2)
    w = Witness(wvals)
    res = moduli.hopf_equiv(p1, p2, w)
    return res, EXIT_TRUE if res["equivalent"] else EXIT_FALSE


SINGLE_FILE_COMMANDS = {
    "validate": cmd_validate,
    "properties": cmd_properties,
    "comb-type": cmd_comb_type,
    "standardize": cmd_standardize,
    "atlas": cmd_atlas,
    "irrelevant": cmd_irrelevant,
    "gale": cmd_gale,
    "lvmb-build": cmd_lvmb_build,
    "lvmb-check": cmd_lvmb_check,
    "lvm-check": cmd_lvm_check,
    "polytope": cmd_polytope,
    "kh-check": cmd_kh_check,
    "lvmb-to-fan": cmd_lvmb_to_fan,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qtoric",
        description="Exact combinatorics of quantum toric geometry")
    ap.add_argument("--schema", action="store_true",
                    help="print the input file schema and exit")
    sub = ap.add_subparsers(dest="command")
    for name in SINGLE_FILE_COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("files", nargs="+", help="fan file(s), - for stdin")
        sp.add_argument("--jobs", type=int, default=1)
        if name == "gale":
            sp.add_argument("--affine", action="store_true")
            sp.add_argument("--tail", action="store_true",
                            help="normalize the last n-d affine Gale "
                                 "vectors to the canonical basis")
    sp = sub.add_parser("comb-equiv")
    sp.add_argument("files", nargs=2)
    sp = sub.add_parser("morphism-check")
    sp.add_argument("files", nargs=2)
    sp.add_argument("--morphism", required=True)
    sp.add_argument("--iso", action="store_true")
    sp = sub.add_parser("cal-morphism-check")
    sp.add_argument("files", nargs=2)
    sp.add_argument("--morphism")
    sp.add_argument("--search", action="store_true")
    sp = sub.add_parser("moduli-act")
    sp.add_argument("--hbar", required=True)
    sp.add_argument("--H", required=True)
    sp = sub.add_parser("moduli-equiv-2d")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp = sub.add_parser("p2-orbit")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--precision", type=int, default=128)
    sp.add_argument("--precision-cap", type=int, default=4096,
                    dest="precision_cap")
    sp = sub.add_parser("wps-weights")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp = sub.add_parser("hopf-equiv")
    sp.add_argument("--pair1", required=True)
    sp.add_argument("--pair2", required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.schema:
        _emit(SCHEMA)
        return EXIT_TRUE
    if not args.command:
        ap.print_help()
        return EXIT_INPUT
    try:
        if args.command in SINGLE_FILE_COMMANDS:
            handler = SINGLE_FILE_COMMANDS[args.command]

            def run_one(path):
                ff = load_fan_file(_read(path))
                return handler(ff, args)

            if len(args.files) == 1:
                payload, code = run_one(args.files[0])
                _emit(payload)
                return code
            jobs = max(1, args.jobs)
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(run_one, args.files))
            _emit([{"file": f, "report": payload}
                   for f, (payload, _) in zip(args.files, results)])
            return max(code for _, code in results)
        if args.command == "comb-equiv":
            payload, code = cmd_comb_equiv(args)
        elif args.command == "morphism-check":
            payload, code = cmd_morphism_check(args)
        elif args.command == "cal-morphism-check":
            payload, code = cmd_cal_morphism_check(args)
        elif args.command == "moduli-act":
            payload, code = cmd_moduli_act(args)
        elif args.command == "moduli-equiv-2d":
            payload, code = cmd_moduli_equiv_2d(args)
        elif args.command == "p2-orbit":
            payload, code = cmd_p2_orbit(args)
        elif args.command == "wps-weights":
            payload, code = cmd_wps_weights(args)
        elif args.command == "hopf-equiv":
            payload, code = cmd_hopf_equiv(args)
        else:  # pragma: no cover
            raise InputError(f"unknown command {args.command}")
        _emit(payload)
        return code
    except Indeterminate as e:
        _emit({"error": {"code": "Indeterminate", "message": str(e)}})
        return EXIT_INDETERMINATE
    except (QtoricError, OSError, ValueError, KeyError) as e:
        _emit({"error": {"code": type(e).__name__, "message": str(e)}})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
