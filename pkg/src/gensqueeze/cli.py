"""Command-line entry point: figure sweeps, state construction, verification, scheme runs.

Exit codes: 0 success, 1 usage error, 2 convergence or validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import figures, verify
from .errors import GenSqueezeError
from .fock import DEFAULT_TAIL_TOL, build_su11_generators
from .moments import photon_statistics, uncertainty_matrix
from .scheme import (SchemeConfig, cancelling_gamma2, physical_for_chi, scheme_targets,
                     simulate_scheme, verify_scheme_output)
from .su11 import (CUTOFF_ENV, Su11Params, build_state, eigen_residual, even_odd_state,
                   ladder_to_fock)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
FIG_DEFAULT_CUTOFF = 512


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _pair(c: complex) -> list:
    return [float(c.real), float(c.imag)]


def _emit(obj, out: str | None = None):
    text = json.dumps(obj, indent=2, default=_json_default)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text + "\n")
    else:
        print(text)


def _json_default(x):
    if isinstance(x, complex):
        return _pair(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _error(exc: Exception, **extra) -> int:
    body = {"error": type(exc).__name__, "message": str(exc), **extra}
    margin = getattr(exc, "margin", None)
    if margin is not None:
        body["margin"] = margin
    print(json.dumps(body, default=_json_default), file=sys.stderr)
    return EXIT_FAIL


def _env_cutoff(default: int) -> int:
    return int(os.environ.get(CUTOFF_ENV, default))


def _load_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def cmd_figure(args) -> int:
    cutoff = args.cutoff if args.cutoff is not None else _env_cutoff(FIG_DEFAULT_CUTOFF)
    if args.step is not None and args.step <= 0:
        print("--step must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "fig1a":
        sw = figures.fig1a(step=args.step or 0.05, cutoff=cutoff)
    elif args.command == "fig1b":
        sw = figures.fig1b(step=args.step or 0.01, cutoff=cutoff)
    elif args.command == "fig2a":
        sw = figures.fig2a(cutoff=cutoff)
    else:
        sw = figures.fig2b(cutoff=cutoff)
    csv_text = sw.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(csv_text)
        _emit(sw.summary, args.out + ".json")
        _emit(sw.summary)
    else:
        sys.stdout.write(csv_text)
        print(json.dumps(sw.summary, default=_json_default), file=sys.stderr)
    return EXIT_OK


def state_report(params: Su11Params, cutoff: int | None, tol: float) -> dict:
    """State amplitudes plus residual, K variances and Robertson reports."""
    st = build_state(params, cutoff, tol=tol)
    g = build_su11_generators(st.basis)
    pair = uncertainty_matrix(st, [g["K1"], g["K2"]], ("K1", "K2"))
    trio = uncertainty_matrix(st, [g["K1"], g["K2"], g["K3"]], ("K1", "K2", "K3"))
    out = {
        "params": json.loads(params.to_json()),
        "state": json.loads(st.to_json()),
        "cutoff": st.basis.cutoff,
        "tail_mass": st.tail_mass,
        "residual": eigen_residual(st, params),
        "variances": {lab: float(v) for lab, v in zip(trio.labels, trio.variances)},
        "means": {lab: float(v) for lab, v in zip(trio.labels, trio.means)},
        "robertson_K1K2": {**pair.to_dict(), "slack": pair.slack, "saturation": pair.saturation},
        "robertson_K1K2K3": {**trio.to_dict(), "slack": trio.slack, "saturation": trio.saturation},
    }
    if params.k in (0.25, 0.75):
        # one-mode quadratic realization: n = 2 K3 - 1/2
        ps = photon_statistics(ladder_to_fock(st, "even" if params.k == 0.25 else "odd"))
        out["photon"] = {"mean_n": ps.mean, "variance_n": ps.variance, "Q": ps.mandel_q}
    return out


def cmd_state(args) -> int:
    try:
        params = Su11Params.from_dict(_load_json(args.params))
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as e:
        print(f"invalid params: {e}", file=sys.stderr)
        return EXIT_USAGE
    except GenSqueezeError as e:
        return _error(e)
    cutoff = args.cutoff if args.cutoff is not None else _env_cutoff(0) or None
    try:
        report = state_report(params, cutoff, args.tol)
    except GenSqueezeError as e:
        return _error(e)
    _emit(report, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in verify.SUITES:
        print(f"unknown suite {args.suite!r}; choose from {sorted(verify.SUITES)}",
              file=sys.stderr)
        return EXIT_USAGE
    checks = verify.run_suite(args.suite)
    for c in checks:
        print(c.line(), file=sys.stderr)
    ok = all(c.passed for c in checks)
    _emit({"suite": args.suite, "passed": ok, "checks": [c.to_dict() for c in checks]})
    return EXIT_OK if ok else EXIT_FAIL


def _overlap_with(t, ref: dict) -> float:
    cx = lambda x: complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)
    parity = "even" if t.k == 0.25 else "odd"
    a = even_odd_state(t.z, t.u, t.v, 0, parity)
    b = even_odd_state(cx(ref["z"]), cx(ref["u"]), cx(ref["v"]), cx(ref.get("w", 0)), parity)
    m = min(a.basis.dim, b.basis.dim)
    return float(abs(np.vdot(a.amplitudes[:m], b.amplitudes[:m])))


def cmd_scheme(args) -> int:
    try:
        raw = _load_json(args.config)
        cfg = SchemeConfig.from_dict(raw)
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_USAGE
    except GenSqueezeError as e:
        return _error(e)
    try:
        t = scheme_targets(cfg)
        out = {"mode": args.mode, "targets": t.to_dict()}
        if args.mode == "map":
            if "reference" in raw:
                try:
                    out["overlap"] = _overlap_with(t, raw["reference"])
                except GenSqueezeError as e:
                    out["overlap"] = 0.0
                    out["overlap_error"] = f"{type(e).__name__}: {e}"
            _emit(out, args.out)
            return EXIT_OK
        if args.cutoff_a is None or args.cutoff_b is None:
            print("simulate mode requires --cutoff-a and --cutoff-b", file=sys.stderr)
            return EXIT_USAGE
        phys = raw.get("physical") or physical_for_chi(cfg.chi)
        g2 = raw.get("gamma2")
        if g2 == "cancel":
            g2 = cancelling_gamma2(cfg, cutoff=args.cutoff_b)
        elif isinstance(g2, (list, tuple)):
            g2 = complex(g2[0], g2[1])
        run = simulate_scheme(cfg, phys, (args.cutoff_a, args.cutoff_b), gamma2=g2, tol=args.tol)
        chk = verify_scheme_output(run.state, cfg.lam, t.z)
        out.update({
            "physical": phys,
            "gamma2_used": t.gamma2 if g2 is None else complex(g2),
            "success_probability": run.success_probability,
            "tail_mass_a": run.tail_mass_a,
            "tail_mass_b": run.tail_mass_b,
            "residual": chk["residual"],
            "a_variance": chk["a_variance"],
            "fitted_z": chk["fitted_z"],
            "fidelity": chk["fidelity"],
        })
    except GenSqueezeError as e:
        return _error(e)
    _emit(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gensqueeze", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)
    for name in ("fig1a", "fig1b", "fig2a", "fig2b"):
        f = sub.add_parser(name, help=f"sweep for {name}: CSV rows plus JSON summary")
        f.add_argument("--out", help="CSV path; the summary goes to PATH.json and stdout")
        f.add_argument("--step", type=float, help="sweep step (fig1a, fig1b)")
        f.add_argument("--cutoff", type=int, help=f"Fock cutoff (default ${CUTOFF_ENV} or 512)")
        f.set_defaults(func=cmd_figure)
    s = sub.add_parser("state", help="build |z,u,v,w;k> and report its moments")
    s.add_argument("--params", required=True, help="JSON file with z, u, v, w, k ('-' for stdin)")
    s.add_argument("--cutoff", type=int, help=f"initial ladder cutoff (default ${CUTOFF_ENV} or 256)")
    s.add_argument("--tol", type=float, default=DEFAULT_TAIL_TOL, help="tail-mass tolerance")
    s.add_argument("--out", help="write JSON here instead of stdout")
    s.set_defaults(func=cmd_state)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help=f"one of {', '.join(verify.SUITES)}")
    v.set_defaults(func=cmd_verify)
    g = sub.add_parser("scheme", help="map optical controls to a target state, or simulate")
    g.add_argument("--config", required=True, help="JSON file with chi, gamma1, n, optional alpha")
    g.add_argument("--mode", choices=("map", "simulate"), default="map")
    g.add_argument("--cutoff-a", type=int, help="mode-a Fock cutoff (simulate)")
    g.add_argument("--cutoff-b", type=int, help="mode-b Fock cutoff (simulate)")
    g.add_argument("--tol", type=float, default=1e-8, help="tail-mass tolerance (simulate)")
    g.add_argument("--out", help="write JSON here instead of stdout")
    g.set_defaults(func=cmd_scheme)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
