"""Command-line front end.

Subcommands
-----------
``analyze``
    Mesh a preset domain, build boundary data (tangential by default,
    or from a ``t,q11,q12`` CSV), run the harmonic solves and the
    degree-class minimization, and write the verdict report (text +
    CSV), the minimizing field CSV, and an SVG line-field plot.
``sweep``
    Repeat ``analyze`` over a list of parameter values; one CSV row per
    value, sorted by parameter.  Per-point failures are recorded in the
    row and the sweep continues.
``bisect``
    Locate a parameter value where a selected flux component J_i hits a
    target, then report the verdict there.  The search uses geometric
    midpoints when the bracket spans several decades (hole fluxes decay
    like 1/log of a shrinking radius, so arithmetic midpoints stall).
``liftcheck``
    Orientability of a nodal line field by sign propagation, checked
    against the boundary degree parities; writes a witness cycle when
    the field is not orientable.
``mesh``
    Build and export a mesh (``.node``/``.ele``/``.edge``) only.

Exit codes: 0 success, 1 error, 2 verdict NumericallyIndeterminate.

Configuration can come from an INI file (one section per subcommand,
``key = value`` with the same names as the long flags); command-line
flags override file values.  All output files are written to a
temporary name and renamed into place, so a failing run leaves no
partial artifacts.
"""

import argparse
import concurrent.futures
import configparser
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import criterion, degree, geometry, harmonic, lifting, tensor

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INDETERMINATE = 2

# preset knobs the CLI exposes as flags; "h" is additionally sweepable
PARAM_FLAGS = ("delta", "rho", "hole_radius")


@dataclass
class RunConfig:
    """Resolved settings of one CLI invocation."""

    command: str
    preset: str = "stadium"
    params: dict = field(default_factory=dict)
    s: float = 1.0
    h: float = 0.05
    refine: int = 0
    tie_tol: float | None = None
    outdir: str = "."
    seed: int = 0
    data: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("mesh size h must be positive")
        if self.refine < 0:
            raise ValueError("refinement count must be >= 0")
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")
        tensor.check_order_parameter(self.s)


def _atomic_write(path, text):
    """Write text to path via a temporary file in the same directory."""
    path = os.path.abspath(path)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _build_domain(cfg, params=None, h=None):
    spec = geometry.preset(cfg.preset, **(cfg.params if params is None else params))
    mesh = geometry.triangulate(spec, cfg.h if h is None else h)
    if cfg.data:
        g = geometry.boundary_data_from_file(mesh, cfg.data, cfg.s)
    else:
        g = geometry.tangential_boundary_data(mesh, cfg.s)
    return mesh, g


# ---------------------------------------------------------------------------
# artifacts


def svg_line_field(mesh, m, h):
    """SVG 1.1 plot: boundary loops plus one segment of length 0.8 h per
    triangle, through the centroid, along the director of the field.

    ``m`` holds nodal values of the unit auxiliary field; the director
    angle is half its argument, so the drawn lines are insensitive to
    the director's sign ambiguity.
    """
    nodes = mesh.nodes
    tris = mesh.triangles
    lo = nodes.min(axis=0)
    hi = nodes.max(axis=0)
    pad = 0.05 * max(hi - lo)
    lo, hi = lo - pad, hi + pad
    width = 720.0
    scale = width / (hi[0] - lo[0])
    height = scale * (hi[1] - lo[1])

    def xy(p):
        return scale * (p[0] - lo[0]), height - scale * (p[1] - lo[1])

    def pt(p):
        x, y = xy(p)
        return f"{x:.2f},{y:.2f}"

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">\n'
    )
    out.write(f'<rect width="{width:.2f}" height="{height:.2f}" fill="white"/>\n')

    for loop in mesh.loops:
        pts = " ".join(pt(nodes[i]) for i in loop)
        out.write(
            f'<polygon points="{pts}" fill="none" stroke="#444444" stroke-width="1.2"/>\n'
        )

    amc = m[:, 0] + 1j * m[:, 1]
    cen = nodes[tris].mean(axis=1)
    avg = amc[tris].sum(axis=1)
    theta = 0.5 * np.angle(avg)
    half = 0.4 * h * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    out.write('<g stroke="#1f6fb4" stroke-width="0.9" stroke-linecap="round">\n')
    for c, d in zip(cen, half):
        x1, y1 = xy(c - d)
        x2, y2 = xy(c + d)
        out.write(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"/>\n')
    out.write("</g>\n</svg>\n")
    return out.getvalue()


def minimizer_csv(mesh, recon):
    out = io.StringIO()
    out.write("node_index,x,y,q11,q12,m1,m2\n")
    for i, (p, q, m) in enumerate(zip(mesh.nodes, recon.q, recon.m), start=1):
        out.write(
            f"{i},{p[0]:.12g},{p[1]:.12g},{q[0]:.12g},{q[1]:.12g},{m[0]:.12g},{m[1]:.12g}\n"
        )
    return out.getvalue()


def _run_header(cfg, mesh):
    lines = [f"preset: {cfg.preset}"]
    for k in sorted(cfg.params):
        lines.append(f"{k}: {cfg.params[k]:.10g}")
    if cfg.data:
        lines.append(f"data: {cfg.data}")
    lines.append(f"s: {cfg.s:.10g}")
    lines.append(f"h: {cfg.h:.10g}")
    lines.append(f"nodes: {len(mesh.nodes)}")
    lines.append(f"triangles: {len(mesh.triangles)}")
    lines.append(f"min_angle_deg: {mesh.min_angle():.4f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(cfg) -> int:
    mesh, g = _build_domain(cfg)
    header = _run_header(cfg, mesh)

    if mesh.n_holes == 0:
        even = g.outer_degree % 2 == 0
        verdict = (
            criterion.Verdict.AllMinimizersOrientable if even else criterion.Verdict.AllMinimizersNonOrientable
        )
        text = header + (
            "holes: 0\n"
            "simply_connected: true\n"
            f"outer_degree: {g.outer_degree}\n"
            "note: no degree classes on a simply connected domain; every"
            " admissible field shares the boundary parity\n"
            f"verdict: {verdict}\n"
        )
        _atomic_write(os.path.join(cfg.outdir, "report.txt"), text)
        print(text, end="")
        return EXIT_OK

    report = criterion.analyze_mesh(mesh, g, cfg.tie_tol)
    recon = criterion.reconstruct_minimizer(mesh, g, report.d_star)

    text = header + report.to_text()
    text += f"reconstructed_windings: {' '.join(str(w) for w in recon.windings)}\n"
    text += f"reconstruction_energy_agreement: {abs(recon.m_energy - recon.phi_energy) / recon.phi_energy:.3e}\n"
    for k in range(1, cfg.refine + 1):
        mesh_k, g_k = _build_domain(cfg, h=cfg.h / 2.0**k)
        flux_k = harmonic.compute_J(mesh_k, g_k)
        text += (
            f"refine_{k}: h={cfg.h / 2.0 ** k:.6g}"
            f" J={' '.join(f'{x:.10g}' for x in flux_k.J)}"
            f" mismatch={flux_k.mismatch:.6g}\n"
        )

    _atomic_write(os.path.join(cfg.outdir, "report.txt"), text)
    _atomic_write(os.path.join(cfg.outdir, "report.csv"), "\n".join(report.csv_rows()) + "\n")
    _atomic_write(os.path.join(cfg.outdir, "minimizer.csv"), minimizer_csv(mesh, recon))
    _atomic_write(os.path.join(cfg.outdir, "field.svg"), svg_line_field(mesh, recon.m, cfg.h))
    print(text, end="")
    return EXIT_INDETERMINATE if report.verdict is criterion.Verdict.NumericallyIndeterminate else EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def _sweep_point(job):
    """One sweep evaluation; returns a plain tuple so it can cross a
    process boundary."""
    cfg_dict, param, value = job
    cfg = RunConfig(**cfg_dict)
    try:
        params = dict(cfg.params)
        h = cfg.h
        if param == "h":
            h = value
        else:
            params[param] = value
        mesh, g = _build_domain(cfg, params=params, h=h)
        report = criterion.analyze_mesh(mesh, g, cfg.tie_tol)
        q_even = "" if report.q_even_star is None else f"{report.q_even_star:.12g}"
        return (value, [f"{x:.12g}" for x in report.J], f"{report.q_star:.12g}", q_even,
                str(report.verdict), "")
    except Exception as exc:  # recorded in the row; the sweep continues
        return (value, None, "", "", "", f"{type(exc).__name__}: {exc}")


def cmd_sweep(cfg, param, values) -> int:
    values = sorted(values)
    cfg_dict = dict(
        command=cfg.command, preset=cfg.preset, params=cfg.params, s=cfg.s, h=cfg.h,
        refine=0, tie_tol=cfg.tie_tol, outdir=cfg.outdir, seed=cfg.seed,
        data=cfg.data, workers=1,
    )
    jobs = [(cfg_dict, param, v) for v in values]
    if cfg.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]

    n_flux = max((len(r[1]) for r in results if r[1] is not None), default=0)
    out = io.StringIO()
    out.write(param + "," + ",".join(f"J_{i + 1}" for i in range(n_flux)))
    out.write(",q_star,q_even_star,verdict,error\n")
    for value, J, q_star, q_even, verdict, err in results:
        Jcols = J if J is not None else [""] * n_flux
        out.write(f"{value:.12g}," + ",".join(Jcols))
        out.write(f",{q_star},{q_even},{verdict},{err}\n")
    _atomic_write(os.path.join(cfg.outdir, "sweep.csv"), out.getvalue())
    print(out.getvalue(), end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bisect


def _flux_at(cfg, param, value):
    params = dict(cfg.params)
    h = cfg.h
    if param == "h":
        h = value
    else:
        params[param] = value
    mesh, g = _build_domain(cfg, params=params, h=h)
    return harmonic.compute_J(mesh, g)


def cmd_bisect(cfg, param, target, component, lo, hi, tol) -> int:
    if lo >= hi:
        print("bisect: --lo must be below --hi", file=sys.stderr)
        return EXIT_ERROR
    idx = component - 1

    history = []

    def f(value):
        J = _flux_at(cfg, param, value).J
        if idx >= len(J):
            raise ValueError(f"component {component} out of range (domain has {len(J)} holes)")
        history.append((value, float(J[idx])))
        return float(J[idx])

    y_lo, y_hi = f(lo), f(hi)
    best = min(history, key=lambda t: abs(t[1] - target))
    if abs(best[1] - target) > tol:
        if (y_lo - target) * (y_hi - target) > 0.0:
            print(
                f"bisect: target {target} not bracketed by J_{component}({lo:g})={y_lo:.4f}"
                f" and J_{component}({hi:g})={y_hi:.4f}",
                file=sys.stderr,
            )
            return EXIT_ERROR
        # geometric midpoints for wide positive brackets (capacity-type decay)
        geometric = lo > 0.0 and hi / lo >= 100.0
        while True:
            mid = float(np.sqrt(lo * hi)) if geometric else 0.5 * (lo + hi)
            y = f(mid)
            if abs(y - target) <= tol:
                best = (mid, y)
                break
            if (y - target) * (y_lo - target) > 0.0:
                lo, y_lo = mid, y
            else:
                hi, y_hi = mid, y
            width = np.log10(hi / lo) if geometric else hi - lo
            if width < 1e-4:
                best = min(history, key=lambda t: abs(t[1] - target))
                break

    value, y = best
    # verdict at the located parameter; an explicit tie tolerance makes a
    # genuine tie report BothKindsExist rather than NumericallyIndeterminate
    tie_tol = cfg.tie_tol if cfg.tie_tol is not None else tol
    params = dict(cfg.params)
    h = cfg.h
    if param == "h":
        h = value
    else:
        params[param] = value
    mesh, g = _build_domain(cfg, params=params, h=h)
    report = criterion.analyze_mesh(mesh, g, tie_tol)
    if len(report.J) == 2:
        # At a tie point the interesting comparison is the distance of the
        # flux itself to the nearest odd/even integer, so for two-hole
        # domains the verdict is issued on that scale (the quadratic-form
        # margin divides by the hole conductance and would need a much
        # tighter parameter bracket to fall below the same tolerance).
        report.verdict = criterion.two_hole_verdict(float(report.J[idx]), tie_tol)

    out = io.StringIO()
    out.write(f"{param},J_{component}\n")
    for v, jv in history:
        out.write(f"{v:.12g},{jv:.12g}\n")
    _atomic_write(os.path.join(cfg.outdir, "bisect.csv"), out.getvalue())

    text = (
        f"param: {param}\n"
        f"target: J_{component} = {target:.10g}\n"
        f"found: {param} = {value:.10g}\n"
        f"J_{component}: {y:.10g}\n"
        f"residual: {abs(y - target):.3e} (tolerance {tol:g})\n"
        f"evaluations: {len(history)}\n"
    ) + report.to_text()
    _atomic_write(os.path.join(cfg.outdir, "bisect_report.txt"), text)
    print(text, end="")
    if abs(y - target) > tol:
        print(
            f"bisect: interval collapsed before reaching the target within {tol:g}",
            file=sys.stderr,
        )
        return EXIT_ERROR
    if report.verdict is criterion.Verdict.NumericallyIndeterminate:
        return EXIT_INDETERMINATE
    return EXIT_OK


# ---------------------------------------------------------------------------
# liftcheck


def _field_from_csv(mesh, path):
    q = np.full((len(mesh.nodes), 2), np.nan)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        if "q11" not in cols or "q12" not in cols:
            raise ValueError("field file needs a header with q11 and q12 columns")
        for row in reader:
            i = int(row.get("node_index", len(q) + 1)) - 1
            if not 0 <= i < len(q):
                raise ValueError(f"node_index {i + 1} outside 1..{len(q)}")
            q[i] = (float(row["q11"]), float(row["q12"]))
    if np.isnan(q).any():
        raise ValueError("field file does not cover every mesh node")
    return q


def cmd_liftcheck(cfg, canonical, field_file) -> int:
    if canonical:
        spec, sample = lifting.canonical_field(canonical, cfg.s)
        mesh = geometry.triangulate(spec, cfg.h)
        q = sample(mesh.nodes)
        label = canonical
    else:
        mesh, _ = _build_domain(cfg)
        q = _field_from_csv(mesh, field_file)
        label = field_file

    lift = lifting.lift_field(mesh, q, cfg.s)
    parities = []
    for i, loop in enumerate(mesh.loops):
        orientable, deg = degree.boundary_orientable(q[loop], cfg.s)
        parities.append((i, deg, orientable))

    lines = [f"field: {label}", f"interior_orientable: {str(lift.orientable).lower()}"]
    for i, deg_i, ok in parities:
        name = "outer" if i == 0 else f"hole_{i}"
        lines.append(f"boundary_{name}: degree {deg_i} ({'even' if ok else 'odd'})")
    agree = lift.orientable == all(ok for _, _, ok in parities)
    lines.append(f"parity_agreement: {str(agree).lower()}")
    if not lift.orientable:
        prod = lifting.witness_sign_product(q, cfg.s, lift.witness)
        lines.append(f"witness_length: {len(lift.witness)}")
        lines.append(f"witness_sign_product: {prod}")
        out = io.StringIO()
        out.write("node_index,x,y\n")
        for i in lift.witness:
            out.write(f"{i + 1},{mesh.nodes[i, 0]:.12g},{mesh.nodes[i, 1]:.12g}\n")
        _atomic_write(os.path.join(cfg.outdir, "witness.csv"), out.getvalue())
        lines.append("witness_file: witness.csv")
    text = "\n".join(lines) + "\n"
    _atomic_write(os.path.join(cfg.outdir, "liftcheck.txt"), text)
    print(text, end="")
    if not agree:
        print("liftcheck: interior lift disagrees with boundary parity", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


# ---------------------------------------------------------------------------
# mesh


def cmd_mesh(cfg, out_base) -> int:
    spec = geometry.preset(cfg.preset, **cfg.params)
    mesh = geometry.triangulate(spec, cfg.h)
    base = os.path.join(cfg.outdir, out_base)
    os.makedirs(cfg.outdir, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=cfg.outdir) as tmp:
        tmp_base = os.path.join(tmp, out_base)
        geometry.write_mesh(mesh, tmp_base)
        for ext in (".node", ".ele", ".edge"):
            os.replace(tmp_base + ext, base + ext)
    print(
        f"mesh: {len(mesh.nodes)} nodes, {len(mesh.triangles)} triangles, "
        f"{mesh.n_holes} holes, min angle {mesh.min_angle():.2f} deg -> {base}.node/.ele/.edge"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad arguments; the documented
    contract reserves 2 for NumericallyIndeterminate, so remap to 1."""

    def error(self, message):
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser():
    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--config", help="INI file; section named after the subcommand")
    base.add_argument("--preset", default="stadium", help="domain preset name")
    base.add_argument("--delta", type=float, help="stadium half-length parameter")
    base.add_argument("--rho", type=float, help="stadium_asym shrinking-hole parameter")
    base.add_argument("--hole-radius", type=float, help="offset_annulus hole radius")
    base.add_argument("--s", type=float, default=1.0, help="scalar order parameter")
    base.add_argument("--h", type=float, default=0.05, help="target mesh size")
    base.add_argument("--refine", type=int, default=0, help="extra halvings of h reported")
    base.add_argument("--tie-tol", type=float, help="explicit tie tolerance for the verdict")
    base.add_argument("--outdir", default=".", help="directory for output artifacts")
    base.add_argument("--seed", type=int, default=0, help="seed recorded for reproducibility")
    base.add_argument("--data", help="boundary data CSV (t,q11,q12) instead of tangential")

    parser = _Parser(prog="nematic-orient", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[base], help="verdict report for one domain")

    p = sub.add_parser("sweep", parents=[base], help="analyze over a parameter list")
    p.add_argument("--param", required=True, choices=PARAM_FLAGS + ("h",))
    p.add_argument("--values", required=True, help="comma-separated parameter values")
    p.add_argument("--workers", type=int, default=1, help="parallel sweep evaluations")

    p = sub.add_parser("bisect", parents=[base], help="solve J_component(param) = target")
    p.add_argument("--param", choices=PARAM_FLAGS + ("h",), help="default: rho")
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--component", type=int, help="1-based flux index (default: last hole)")
    p.add_argument("--lo", type=float, help="bracket low end")
    p.add_argument("--hi", type=float, help="bracket high end")
    p.add_argument("--tol", type=float, default=0.02, help="|J - target| stop tolerance")

    p = sub.add_parser("liftcheck", parents=[base], help="orientability of a nodal field")
    p.add_argument("--canonical", help="named reference field (e.g. horseshoe)")
    p.add_argument("--field", help="nodal field CSV (node_index,...,q11,q12)")

    p = sub.add_parser("mesh", parents=[base], help="build and export a mesh")
    p.add_argument("--out", help="output file base name (default: preset name)")
    return parser


def _insert_config_args(argv, command):
    """Splice INI-file values in as flags right after the subcommand, so
    later (real) flags override them."""
    pos = 0
    while pos < len(argv) and argv[pos] != command:
        pos += 2 if argv[pos] == "--config" else 1
    if pos == len(argv):
        return argv
    idx = None
    for i in range(len(argv)):
        if argv[i] == "--config" and i + 1 < len(argv):
            idx = argv[i + 1]
    parser = configparser.ConfigParser()
    if not parser.read(idx):
        raise FileNotFoundError(f"config file {idx!r} not found")
    extra = []
    if parser.has_section(command):
        for key, value in parser.items(command):
            extra.extend((f"--{key.replace('_', '-')}", value))
    return argv[: pos + 1] + extra + argv[pos + 1 :]


def _run_config_from(args):
    params = {}
    for name in PARAM_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    return RunConfig(
        command=args.command,
        preset=args.preset,
        params=params,
        s=args.s,
        h=args.h,
        refine=args.refine,
        tie_tol=args.tie_tol,
        outdir=args.outdir,
        seed=args.seed,
        data=args.data,
        workers=getattr(args, "workers", 1),
    )


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()

    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        pre.add_argument("command", nargs="?")
        known, _ = pre.parse_known_args(argv)
        if known.config and known.command:
            argv = _insert_config_args(argv, known.command)
    except Exception as exc:
        print(f"nematic-orient: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    args = parser.parse_args(argv)
    try:
        cfg = _run_config_from(args)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
            if not values:
                raise ValueError("--values is empty")
            return cmd_sweep(cfg, args.param, values)
        if args.command == "bisect":
            param = args.param or ("rho" if cfg.preset == "stadium_asym" else None)
            if param is None:
                raise ValueError("--param is required for this preset")
            lo, hi = args.lo, args.hi
            if lo is None and hi is None and param == "rho" and cfg.preset == "stadium_asym":
                lo, hi = 1e-12, 0.5
            if lo is None or hi is None:
                raise ValueError("--lo and --hi are required for this preset/parameter")
            component = args.component
            if component is None:
                spec = geometry.preset(cfg.preset, **cfg.params)
                component = max(len(spec.holes), 1)
            return cmd_bisect(cfg, param, args.target, component, lo, hi, args.tol)
        if args.command == "liftcheck":
            if bool(args.canonical) == bool(args.field):
                raise ValueError("give exactly one of --canonical or --field")
            return cmd_liftcheck(cfg, args.canonical, args.field)
        if args.command == "mesh":
            return cmd_mesh(cfg, args.out or cfg.preset)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:
        print(f"nematic-orient {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
