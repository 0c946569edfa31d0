"""Command-line interface.

Subcommands: robin, annulus-compare, energy-expand, reduce-critical,
construct-spheres, kernel, validate.  Reports are JSON (with the
resolved configuration embedded), curves are CSV, figures are rendered
with matplotlib to the requested path.  Exit codes: 0 success, 1 usage
or operational error, 2 ran fine but a validation criterion failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import HBubbleError

OUT_DIR_ENV = "HBUBBLE_OUT_DIR"


def _out_path(path):
    if path is None:
        return None
    base = os.environ.get(OUT_DIR_ENV, "")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(report, out, as_json):
    payload = json.dumps(report, indent=2, sort_keys=True)
    out = _out_path(out)
    if out:
        with open(out, "w") as fh:
            fh.write(payload + "\n")
    if as_json or not out:
        print(payload)
    elif out:
        print(f"wrote {out}")


def _parse_point(text):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 'x,y'")
    return parts


def _build_domain(args):
    from .domains import AnnulusDomain, DiskDomain, mobius_domain

    if args.domain == "disk":
        return DiskDomain()
    if args.domain == "mobius":
        c = complex(args.mobius_c[0], args.mobius_c[1])
        return mobius_domain(c, args.mobius_alpha)
    if args.domain == "annulus":
        if args.rho is None:
            raise HBubbleError("--rho is required for the annulus")
        return AnnulusDomain(args.rho)
    raise HBubbleError(f"unknown domain {args.domain}")


def _domain_spec(args):
    spec = {"variant": args.domain}
    if args.domain == "mobius":
        spec["c"] = list(args.mobius_c)
        spec["alpha"] = args.mobius_alpha
    if args.domain == "annulus":
        spec["rho"] = args.rho
    return spec


def cmd_robin(args):
    from .domains import h_tilde, radii, regular_part

    domain = _build_domain(args)
    a = args.point
    ht = h_tilde(domain, a)
    report = {
        "config": {"command": "robin", "domain": _domain_spec(args),
                   "point": list(a)},
        "h_tilde": ht,
    }
    if domain.variant != "annulus":
        h_diag = regular_part(domain, a, a)
        report["robin_H"] = h_diag
        report["two_e2H"] = 2.0 * float(np.exp(2.0 * h_diag))
        report["h_tilde_minus_two_e2H"] = ht - report["two_e2H"]
    else:
        from .annulus import AnnulusSeries
        series = AnnulusSeries(domain.rho)
        report["two_e2H"] = float(series.robin_exp(float(np.hypot(*a))))
        report["h_tilde_minus_two_e2H"] = ht - report["two_e2H"]
    r_har, r_hyp = radii(domain, a)
    report["harmonic_radius"] = r_har
    report["hyperbolic_radius"] = r_hyp
    _emit(report, args.out, args.json)
    return 0


def cmd_annulus_compare(args):
    from .annulus import AnnulusSeries, compare_scan, critical_points_radial

    series = AnnulusSeries(args.rho, args.k)
    curve = compare_scan(series, args.grid,
                         include_prefactor=not args.factor_prefactor)
    out = _out_path(args.out)
    header = (f"# rho={args.rho} K={series.terms} "
              f"prefactor={'included' if curve.prefactor_included else 'factored'}\n"
              "x,h_tilde,two_e2H\n")
    with open(out, "w") as fh:
        fh.write(header)
        for x, ht, re_ in zip(curve.x, curve.h_tilde, curve.robin_exp):
            fh.write(f"{x:.16e},{ht:.16e},{re_:.16e}\n")
    print(f"wrote {out}")
    if args.svg:
        from .figures import render_annulus_comparison
        render_annulus_comparison(curve, _out_path(args.svg), detail=True)
        print(f"wrote {_out_path(args.svg)}")
    if args.json:
        crit_h = critical_points_radial("h_tilde", series)
        crit_r = critical_points_radial("robin_exp", series)
        print(json.dumps({
            "config": {"command": "annulus-compare", "rho": args.rho,
                       "K": series.terms, "grid": args.grid},
            "max_relative_difference": curve.max_relative_difference(),
            "critical_logx_h_tilde": list(crit_h),
            "critical_logx_two_e2H": list(crit_r),
        }, indent=2))
    return 0


def _rotation_from_spec(spec):
    from .geometry import rotation_aligning, rotation_from_angles

    if spec is None:
        return np.eye(3)
    if "angles" in spec:
        return rotation_from_angles(spec["angles"])
    if "matrix" in spec:
        return np.asarray(spec["matrix"], dtype=float)
    if "align_to" in spec:
        return rotation_aligning(np.asarray(spec["align_to"], dtype=float))
    raise HBubbleError("rotation spec needs 'angles', 'matrix' or 'align_to'")


def _datum_from_spec(spec):
    from .energy import RotatedDatum, ZeroDatum, g_omega
    from .spheres import SphereConfig, ConstructionParams, build_g_k_omega

    if spec is None or spec.get("name", "zero") == "zero":
        return ZeroDatum()
    name = spec["name"]
    if name == "g_omega":
        base = g_omega(spec["omega"])
        if "rotation" in spec:
            return RotatedDatum(_rotation_from_spec(spec["rotation"]), base)
        return base
    if name == "G_k_omega":
        targets = SphereConfig.from_targets(spec["targets"])
        params = ConstructionParams(k=len(spec["targets"]),
                                    omega=spec["omega"], eps=spec.get("eps", 1e-3),
                                    mu=spec.get("mu", 0.1), targets=targets)
        return build_g_k_omega(params)
    raise HBubbleError(f"unknown datum {name}")


def _config_from_json(payload):
    from .energy import Configuration
    from .geometry import BubbleParams

    bubbles = []
    for spec in payload["bubbles"]:
        bubbles.append(BubbleParams(
            np.asarray(spec["center"], dtype=float),
            float(spec.get("scale", spec.get("lambda"))),
            _rotation_from_spec(spec.get("rotation"))))
    return Configuration(epsilon=float(payload["epsilon"]), bubbles=bubbles,
                         cbar=float(payload.get("cbar", 10.0)))


def _domain_from_json(spec):
    from .domains import AnnulusDomain, DiskDomain, mobius_domain

    if spec is None or spec.get("variant", "disk") == "disk":
        return DiskDomain()
    if spec["variant"] == "mobius":
        c = spec.get("c", [0.0, 0.0])
        return mobius_domain(complex(c[0], c[1]), spec.get("alpha", 0.0))
    if spec["variant"] == "annulus":
        return AnnulusDomain(spec["rho"])
    raise HBubbleError(f"unknown domain {spec['variant']}")


def cmd_energy_expand(args):
    from .energy import sigma_gradient

    with open(args.config) as fh:
        payload = json.load(fh)
    config = _config_from_json(payload)
    domain = _domain_from_json(payload.get("domain"))
    datum = _datum_from_spec(payload.get("datum"))
    report = sigma_gradient(config, domain, datum)
    out = {
        "config": payload,
        "value": report.value,
        "gradient_blocks": [
            {"position": list(map(float, b["position"])),
             "scale": float(b["scale"]),
             "angles": list(map(float, b["angles"]))}
            for b in report.blocks],
        "diagnostics": report.diagnostics,
    }
    _emit(out, args.out, args.json)
    return 0


def cmd_reduce_critical(args):
    from .energy import sigma_gradient, Configuration
    from .geometry import BubbleParams, rotation_relative

    with open(args.config) as fh:
        payload = json.load(fh)
    config = _config_from_json(payload)
    domain = _domain_from_json(payload.get("domain"))
    datum = _datum_from_spec(payload.get("datum"))

    # plain damped Newton on the analytic gradient, FD Jacobian
    from .spheres import _fd_jacobian

    def to_config(chi):
        bubbles = []
        for i, b in enumerate(config.bubbles):
            blk = chi[6 * i:6 * i + 6]
            bubbles.append(BubbleParams(
                blk[:2], blk[2],
                rotation_relative(b.rotation, tuple(blk[3:]))))
        return Configuration(config.epsilon, bubbles, config.cbar)

    from .geometry import CHART_CENTER

    chi = np.concatenate([
        np.concatenate([b.center, [b.scale], CHART_CENTER])
        for b in config.bubbles])

    def grad(c):
        return sigma_gradient(to_config(c), domain, datum).gradient

    steps = np.where(np.arange(len(chi)) % 6 == 2, 1e-6 * np.abs(chi) + 1e-9,
                     1e-6)
    g = grad(chi)
    for _ in range(args.max_iter):
        if np.linalg.norm(g) < args.tol:
            break
        jac = _fd_jacobian(grad, chi, steps)
        step = np.linalg.solve(jac, -g)
        damping, base = 1.0, np.linalg.norm(g)
        for _ in range(30):
            cand = chi + damping * step
            gn = grad(cand)
            if np.linalg.norm(gn) < base:
                break
            damping *= 0.5
        chi, g = cand, gn
    final = to_config(chi)
    jac = _fd_jacobian(grad, chi, steps)
    eigs = np.linalg.eigvalsh(0.5 * (jac + jac.T))
    out = {
        "config": payload,
        "gradient_norm": float(np.linalg.norm(g)),
        "converged": bool(np.linalg.norm(g) < args.tol),
        "hessian_eigenvalues": [float(e) for e in eigs],
        "critical_configuration": {
            "epsilon": final.epsilon,
            "bubbles": [{"center": list(map(float, b.center)),
                         "scale": float(b.scale),
                         "rotation": [list(map(float, r))
                                      for r in b.rotation]}
                        for b in final.bubbles]},
    }
    _emit(out, args.out, args.json)
    return 0 if out["converged"] else 2


def cmd_construct_spheres(args):
    from .spheres import (ConstructionParams, SphereConfig, build_g_k_omega,
                          center_deviation, find_critical_configuration,
                          limiting_spheres)

    with open(args.targets) as fh:
        targets_payload = json.load(fh)
    targets = targets_payload["targets"] if isinstance(targets_payload, dict) \
        else targets_payload
    sphere_targets = SphereConfig.from_targets(targets)
    params = ConstructionParams(k=args.k, omega=args.omega, eps=args.eps,
                                mu=args.mu, targets=sphere_targets)
    config, cert, info = find_critical_configuration(
        params, face_points_per_dim=args.face_points)
    centers = limiting_spheres(config)
    report = {
        "config": {"command": "construct-spheres", "k": args.k,
                   "omega": args.omega, "eps": args.eps, "mu": args.mu,
                   "targets": [list(map(float, t)) for t in targets],
                   "face_points": args.face_points},
        "certificate": cert.to_dict(),
        "iterations": info["iterations"],
        "sphere_centers": [list(map(float, c)) for c in centers],
        "max_center_deviation": center_deviation(config, targets),
        "configuration": {
            "epsilon": config.epsilon,
            "bubbles": [{"center": list(map(float, b.center)),
                         "scale": float(b.scale),
                         "rotation": [list(map(float, r)) for r in b.rotation]}
                        for b in config.bubbles]},
    }
    _emit(report, args.out, args.json)
    if args.svg:
        from .figures import render_sphere_configuration
        render_sphere_configuration(centers, targets, _out_path(args.svg),
                                    datum=build_g_k_omega(params))
        print(f"wrote {_out_path(args.svg)}")
    return 0 if cert.passed else 2


def cmd_kernel(args):
    from .harmonics import (appendix_inequality_check, kernel_bound_value,
                            kernel_margin, spectral_gap_check)

    dims = {}
    margins = {}
    for n in range(args.nmax + 1):
        dim, margin = kernel_margin(n, args.tol)
        dims[str(n)] = dim
        margins[str(n)] = margin
    report = {
        "config": {"command": "kernel", "nmax": args.nmax, "tol": args.tol},
        "dims": dims,
        "smallest_nonzero_singular_values": margins,
        "total_dim_up_to_3": sum(dims[str(n)] for n in range(0, 4)),
        "scalar_bound": kernel_bound_value(),
        "bound_admits": {str(n): appendix_inequality_check(n)
                         for n in range(1, args.nmax + 1)},
    }
    if args.spectrum:
        report["spectral_gap"] = spectral_gap_check(min(args.nmax, 8))
    _emit(report, args.out, args.json)
    return 0


def cmd_validate(args):
    from .energy import g_omega
    from .euler import (validate_datum_cross_term,
                        validate_one_bubble_expansion,
                        validate_pair_interaction)

    defaults = {"one-bubble": [10.0, 20.0, 40.0, 80.0],
                "pair": [20.0, 40.0, 80.0],
                "datum": [20.0, 40.0, 80.0]}
    lambdas = args.lambdas or defaults[args.suite]
    eye = np.eye(3)
    if args.suite == "one-bubble":
        rep = validate_one_bubble_expansion((0.0, 0.0), eye, lambdas)
    elif args.suite == "pair":
        rep = validate_pair_interaction((-0.3, 0.0), (0.3, 0.0), eye, eye,
                                        lambdas)
    elif args.suite == "datum":
        rep = validate_datum_cross_term((-0.3, 0.0), (0.3, 0.0), eye, eye,
                                        g_omega(0.5), lambdas)
    else:
        raise HBubbleError(f"unknown suite {args.suite}")
    payload = rep.to_dict()
    payload["config"] = {"command": "validate", "suite": args.suite,
                         "lambdas": list(map(float, lambdas))}
    _emit(payload, args.out, args.json)
    return 0 if rep.passed else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hbubble",
        description="bubble calculus and reduced energies for the planar "
                    "H-surface system")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("robin", help="Green data at a point")
    p.add_argument("--domain", choices=["disk", "mobius", "annulus"],
                   default="disk")
    p.add_argument("--mobius-c", type=_parse_point, default=[0.0, 0.0])
    p.add_argument("--mobius-alpha", type=float, default=0.0)
    p.add_argument("--rho", type=float)
    p.add_argument("--point", type=_parse_point, required=True)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_robin)

    p = sub.add_parser("annulus-compare",
                       help="scan h_tilde vs 2e^{2H} on an annulus")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--grid", type=int, default=501)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--factor-prefactor", action="store_true",
                   help="emit the series parts with the radial prefactor "
                        "factored out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_annulus_compare)

    p = sub.add_parser("energy-expand",
                       help="reduced energy and gradient of a configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_energy_expand)

    p = sub.add_parser("reduce-critical",
                       help="Newton search for a critical configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reduce_critical)

    p = sub.add_parser("construct-spheres",
                       help="multi-sphere critical configuration with "
                            "degree certificate")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--face-points", type=int, default=3)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_construct_spheres)

    p = sub.add_parser("kernel",
                       help="kernel classification of the linearized operator")
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--spectrum", action="store_true")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("validate",
                       help="quadrature validation of the expansions")
    p.add_argument("--suite", choices=["one-bubble", "pair", "datum"],
                   required=True)
    p.add_argument("--lambdas", type=float, nargs="+")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    parser.add_argument("--threads", type=int, default=1,
                        help="cap on worker threads (computations are "
                             "single-process; the flag bounds BLAS workers)")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; exit code 2 is reserved here
        # for "ran fine, validation failed", so remap usage errors to 1
        if exc.code in (0, None):
            return 0
        return 1
    if getattr(args, "threads", 1):
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        return args.func(args)
    except HBubbleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
