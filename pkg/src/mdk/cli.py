"""Command-line front end.

Each subcommand runs one pipeline stage on a triangle and writes a JSON
document to stdout; ``render`` (or the --svg flag on a stage) writes SVG
figures.  Exit codes: 0 success, 1 domain error (rejected input or failed
consistency check), 2 usage error.  The environment variable MDK_THREADS
caps parallelism of per-critical-value work.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import svg
from .coamoeba import (
    Membership,
    coamoeba_membership,
    fundamental_triangles,
    sample_fiber_arguments,
    vertex_rays,
)
from .dimer import (
    LatticePolygon,
    build_hexagonal_dimer,
    check_dimer,
    internal_matchings,
    matching_count_oracle,
    perfect_matchings,
)
from .errors import DomainError
from .lattice import (
    NormalizedTriangle,
    k0_group,
    normalize,
    stack_weights,
    validate_triangle,
)
from .potential import build_potential, critical_points_oracle, critical_values
from .tracing import matching_path, trace_branch_points
from .verify import verify_conjecture


@dataclass
class RunConfig:
    """Options shared by the pipeline stages."""

    triangle: list | None = None
    abcde: tuple[int, int, int, int, int] | None = None
    tol_root: float = 1e-10
    tol_step: float = 1.0 / 64.0
    eps_band: float = 0.12
    seed: int = 0
    out: Path | None = None
    svg: Path | None = None


def _parse_triangle(text: str):
    if text.strip().startswith("["):
        data = json.loads(text)
    else:
        data = json.loads(Path(text).read_text())
    if len(data) != 3 or any(len(v) != 2 for v in data):
        raise DomainError(f"expected three [x, y] pairs, got {data!r}")
    return data


def _normalized(cfg: RunConfig) -> NormalizedTriangle:
    if cfg.abcde is not None:
        return NormalizedTriangle(*cfg.abcde)
    if cfg.triangle is None:
        raise DomainError("no triangle given (use --triangle or --abcde)")
    tri = validate_triangle(*cfg.triangle)
    nt, _ = normalize(tri)
    return nt


def _emit(doc: dict, cfg: RunConfig) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if cfg.out is not None:
        cfg.out.write_text(text + "\n")
    else:
        print(text)


def _write_svg(cfg: RunConfig, name: str, content: str) -> None:
    if cfg.svg is None:
        return
    path = cfg.svg
    if path.is_dir() or path.suffix == "":
        path.mkdir(parents=True, exist_ok=True)
        path = path / f"{name}.svg"
    path.write_text(content)
    print(f"wrote {path}", file=sys.stderr)


def cmd_normalize(cfg: RunConfig) -> dict:
    tri = validate_triangle(*cfg.triangle)
    nt, transform = normalize(tri)
    doc = nt.to_json()
    doc["input"] = tri.to_json()
    return doc


def cmd_stack(cfg: RunConfig) -> dict:
    tri = validate_triangle(*cfg.triangle)
    return stack_weights(tri).to_json()


def cmd_critvals(cfg: RunConfig) -> dict:
    nt = _normalized(cfg)
    p = build_potential(nt)
    values = critical_values(p, verify_oracle=False)
    oracle = critical_points_oracle(p)
    return {
        "n": p.n,
        "t0": values[0].modulus,
        "values": [[v.t.real, v.t.imag] for v in values],
        "oracle_points": [
            {"x": [x.real, x.imag], "y": [y.real, y.imag], "t": [t.real, t.imag]}
            for x, y, t in oracle
        ],
        "k0": k0_group(nt).to_json(),
    }


def cmd_trace(cfg: RunConfig, cv_index: int, t_end: float | None) -> dict:
    nt = _normalized(cfg)
    p = build_potential(nt)
    cvs = critical_values(p, verify_oracle=False)
    steps = max(8, int(round(1.0 / cfg.tol_step)))
    if t_end is not None:
        traj = trace_branch_points(p, 0.0, complex(t_end), steps=steps)
        _write_svg(cfg, "trace", svg.render_trajectories(traj))
        return traj.to_json()
    mp = matching_path(p, cvs[cv_index], steps=steps)
    _write_svg(cfg, "trace", svg.render_matching_path(mp))
    doc = mp.to_json()
    doc["trajectory"] = mp.trajectory.to_json()
    return doc


def cmd_coamoeba(cfg: RunConfig, samples: int) -> dict:
    nt = _normalized(cfg)
    tris = fundamental_triangles(nt)
    rays = vertex_rays(nt)
    doc = {
        "n": nt.n,
        "triangles": [t.to_json() for t in tris],
        "rays": [r.to_json() for r in rays],
    }
    if samples > 0:
        args = sample_fiber_arguments(nt, samples, seed=cfg.seed)
        exterior = sum(
            1
            for t1, t2 in args
            if coamoeba_membership(nt, (t1, t2)) == Membership.EXTERIOR
        )
        doc["fiber_samples"] = {"points": len(args), "exterior": exterior}
    _write_svg(cfg, "coamoeba", svg.render_coamoeba(nt))
    return doc


def cmd_dimer(cfg: RunConfig) -> dict:
    nt = _normalized(cfg)
    g = build_hexagonal_dimer(nt)
    report = check_dimer(g)
    matchings = perfect_matchings(g)
    delta = LatticePolygon.hull(nt.vertices)
    internal = internal_matchings(g, delta)
    doc = g.to_json()
    doc["consistency"] = report.to_json()
    doc["matchings"] = len(matchings)
    doc["matchings_oracle"] = matching_count_oracle(g)
    doc["internal_matchings"] = len(internal)
    doc["characteristic_polygon"] = delta.to_json()
    _write_svg(cfg, "dimer", svg.render_dimer(g, matching=internal[0]))
    return doc


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    tri = validate_triangle(*cfg.triangle)
    report = verify_conjecture(tri, eps=cfg.eps_band)
    print(report.summary(), file=sys.stderr)
    return report.to_json(), report.overall


def cmd_render(cfg: RunConfig, stage: str, cv_index: int) -> dict:
    nt = _normalized(cfg)
    if cfg.svg is None:
        cfg.svg = Path(".")
    written = []
    if stage in ("trace", "all"):
        p = build_potential(nt)
        cvs = critical_values(p, verify_oracle=False)
        mp = matching_path(p, cvs[cv_index])
        _write_svg(cfg, "trace", svg.render_matching_path(mp))
        written.append("trace")
    if stage in ("coamoeba", "all"):
        _write_svg(cfg, "coamoeba", svg.render_coamoeba(nt))
        written.append("coamoeba")
    if stage in ("dimer", "all"):
        g = build_hexagonal_dimer(nt)
        delta = LatticePolygon.hull(nt.vertices)
        internal = internal_matchings(g, delta)
        _write_svg(cfg, "dimer", svg.render_dimer(g, matching=internal[0]))
        written.append("dimer")
    return {"rendered": written}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdk",
        description="Lattice-triangle potentials, coamoebas, and hexagonal dimer models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--triangle", help="three [x,y] integer pairs as JSON, or a file path")
        sp.add_argument(
            "--abcde",
            help="normal form a,b,c,d,e (bypasses triangle normalization)",
        )
        sp.add_argument("--tol-root", type=float, default=1e-10)
        sp.add_argument("--tol-step", type=float, default=1.0 / 64.0)
        sp.add_argument("--eps-band", type=float, default=0.12)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", type=Path, help="write JSON here instead of stdout")
        sp.add_argument("--svg", type=Path, help="write stage figures here (file or directory)")

    for name in ("normalize", "stack", "critvals", "coamoeba", "dimer", "verify"):
        common(sub.add_parser(name))
    sp = sub.add_parser("trace")
    common(sp)
    sp.add_argument("--cv-index", type=int, default=0, help="critical value index to trace to")
    sp.add_argument("--t-end", type=float, help="trace [0, t_end] instead of a matching path")
    sp = sub.add_parser("render")
    common(sp)
    sp.add_argument("--stage", choices=["trace", "coamoeba", "dimer", "all"], default="all")
    sp.add_argument("--cv-index", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        tol_root=getattr(args, "tol_root", 1e-10),
        tol_step=getattr(args, "tol_step", 1.0 / 64.0),
        eps_band=getattr(args, "eps_band", 0.12),
        seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None),
        svg=getattr(args, "svg", None),
    )
    try:
        if getattr(args, "triangle", None):
            cfg.triangle = _parse_triangle(args.triangle)
        if getattr(args, "abcde", None):
            parts = [int(x) for x in args.abcde.split(",")]
            if len(parts) != 5:
                raise DomainError("--abcde needs five comma-separated integers")
            cfg.abcde = tuple(parts)
        if args.command in ("normalize", "stack", "verify") and cfg.triangle is None:
            parser.error(f"{args.command} requires --triangle")
        if args.command in ("critvals", "trace", "coamoeba", "dimer", "render"):
            if cfg.triangle is None and cfg.abcde is None:
                parser.error(f"{args.command} requires --triangle or --abcde")

        if args.command == "normalize":
            _emit(cmd_normalize(cfg), cfg)
        elif args.command == "stack":
            _emit(cmd_stack(cfg), cfg)
        elif args.command == "critvals":
            _emit(cmd_critvals(cfg), cfg)
        elif args.command == "trace":
            _emit(cmd_trace(cfg, args.cv_index, args.t_end), cfg)
        elif args.command == "coamoeba":
            _emit(cmd_coamoeba(cfg, samples=200), cfg)
        elif args.command == "dimer":
            _emit(cmd_dimer(cfg), cfg)
        elif args.command == "verify":
            doc, ok = cmd_verify(cfg)
            _emit(doc, cfg)
            return 0 if ok else 1
        elif args.command == "render":
            _emit(cmd_render(cfg, args.stage, args.cv_index), cfg)
        else:
            parser.error(f"unknown command {args.command}")
    except DomainError as ex:
        print(f"{type(ex).__name__}: {ex}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
