import argparse
from typing import Optional, Sequence

from RunConfig import RunConfig
from geom_core import DEFAULT_TOL
from chain_distributions import DEFAULT_BRACKET_STEP
from constructions import DEFAULT_CORNER_RADIUS, DEFAULT_SIDE_RADIUS
from equitangent_flow import CLOCKS, DEFAULT_STEPS_PER_PERIOD

COMMANDS = ("frame", "chain", "rank", "bigon", "flow", "monodromy", "spectrum", "scan", "bicentric", "construct")


def _add_common(parser: argparse.ArgumentParser):
    parser_numerics = parser.add_argument_group("numerics")
    parser_output = parser.add_argument_group("output")

    parser_numerics.add_argument("--tol", default=DEFAULT_TOL, type=float, help="Absolute tolerance of geometric residuals. Default: %(default)s")
    parser_numerics.add_argument("--step", default=DEFAULT_BRACKET_STEP, type=float, help="Step of flow-composition brackets. Default: %(default)s")
    parser_numerics.add_argument("--seed", default=0, type=int, help="Seed of random instances. Default: %(default)s")
    parser_numerics.add_argument("--count", default=1, type=int, help="Number of random instances. Default: %(default)s")
    parser_numerics.add_argument("--n", default=None, type=int, help="Number of vertices or circles. Default: %(default)s")

    parser_output.add_argument("--out", default=None, help="Output file, stdout when omitted. Default: %(default)s")
    parser_output.add_argument("--verbose", action="store_true", help="Debug logging. Default: %(default)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equitangent.py",
        description="Framed polygons, chains of circles and equitangent curves",
        usage="%(prog)s <command> [input] [options]\n\nAll options are optional"
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("frame", help="Frame a polygon (odd n) or report the obstruction (even n)")
    p.add_argument("input", nargs="?", default=None, help="Polygon JSON. Default: random polygon")
    p.add_argument("--family_s", default=0.0, type=float, help="Parameter of the even-n framing family. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("chain", help="Convert between oriented chains and framed polygons")
    p.add_argument("input", nargs="?", default=None, help="Chain JSON (or framed polygon JSON with --from_framed). Default: random chain")
    p.add_argument("--from_framed", action="store_true", help="Input is a framed polygon. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("rank", help="Certify that the chain distribution is bracket generating")
    p.add_argument("--bigon", action="store_true", help="Certify the bigon distribution instead. Default: %(default)s")
    p.add_argument("--state", nargs=5, type=float, default=None, metavar=("P", "Q", "R", "ALPHA", "PHI"),
                   help="Bigon state for --bigon. Default: random states")
    _add_common(p)

    p = sub.add_parser("bigon", help="Bigon commutators at a state, or the singular-curve test of a path")
    p.add_argument("input", nargs="?", default=None, help="Path CSV with columns t, p, q, r, alpha, phi. Default: %(default)s")
    p.add_argument("--state", nargs=5, type=float, default=None, metavar=("P", "Q", "R", "ALPHA", "PHI"),
                   help="Bigon state. Default: random state")
    p.add_argument("--full_check", action="store_true", help="Cross-check with the kernel of the form differentials. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("flow", help="Integrate the equitangent flow")
    p.add_argument("input", nargs="?", default=None, help="Inscribed polygon JSON {\"psi\": [...]}. Default: regular n-gon")
    p.add_argument("--T", default=None, type=float, help="Duration. Default: one regular period")
    p.add_argument("--steps", default=DEFAULT_STEPS_PER_PERIOD, type=int, help="RK4 steps. Default: %(default)s")
    p.add_argument("--clock", default=CLOCKS[0], choices=CLOCKS, help="Default: %(default)s")
    p.add_argument("--halving", action="store_true", help="Verify by step halving. Default: %(default)s")
    p.add_argument("--perturb", default=0.0, type=float, help="Random perturbation of the regular n-gon. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("monodromy", help="Return time of the flow to the cyclically shifted polygon")
    p.add_argument("input", nargs="?", default=None, help="Inscribed polygon JSON. Default: regular n-gon")
    p.add_argument("--shift", default=1, type=int, help="Cyclic shift of the target. Default: %(default)s")
    p.add_argument("--max_periods", default=2.0, type=float, help="Search horizon in regular periods. Default: %(default)s")
    p.add_argument("--clock", default=CLOCKS[0], choices=CLOCKS, help="Default: %(default)s")
    p.add_argument("--steps", default=DEFAULT_STEPS_PER_PERIOD, type=int, help="RK4 steps per period. Default: %(default)s")
    p.add_argument("--perturb", default=0.0, type=float, help="Random perturbation of the regular n-gon. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("spectrum", help="Eigenvalues of the linearized flow at the regular n-gon")
    _add_common(p)

    p = sub.add_parser("scan", help="Search integer relations between eigenvalue magnitudes")
    p.add_argument("--bound", default=10, type=int, help="Coefficient bound. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("bicentric", help="Euler-Fuss relations and Poncelet closure")
    p.add_argument("input", nargs="?", default=None, help="Bicentric JSON {\"n\": ..., \"R\": ..., \"r\": ..., \"d\": ...}. Default: from the options")
    p.add_argument("--R", default=None, type=float, help="Outer radius. Default: solved from n, r, d")
    p.add_argument("--r", default=None, type=float, help="Inner radius. Default: solved for R = 1")
    p.add_argument("--d", default=0.0, type=float, help="Distance between centers. Default: %(default)s")
    p.add_argument("--starts", default=10, type=int, help="Number of Poncelet starting points. Default: %(default)s")
    _add_common(p)

    p = sub.add_parser("construct", help="Smoothed regular n-gon and its equitangent locus")
    p.add_argument("--corner_radius", default=DEFAULT_CORNER_RADIUS, type=float, help="Default: %(default)s")
    p.add_argument("--side_radius", default=DEFAULT_SIDE_RADIUS, type=float, help="Default: %(default)s")
    p.add_argument("--samples", default=1000, type=int, help="Samples along the locus. Default: %(default)s")
    _add_common(p)
    return parser


def parse_commandline(argv: Optional[Sequence[str]] = None) -> dict:
    return vars(build_parser().parse_args(argv))


def get_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = parse_commandline(argv)
    return RunConfig(
        command=args["command"],
        input_path=args.get("input"),
        out=args["out"],
        tol=args["tol"],
        step=args["step"],
        seed=args["seed"],
        count=args["count"],
        n=args["n"],
        verbose=args["verbose"],
        family_s=args.get("family_s", 0.0),
        from_framed=args.get("from_framed", False),
        bigon=args.get("bigon", False),
        state=args.get("state"),
        full_check=args.get("full_check", False),
        T=args.get("T"),
        steps=args.get("steps", DEFAULT_STEPS_PER_PERIOD),
        clock=args.get("clock", CLOCKS[0]),
        halving=args.get("halving", False),
        shift=args.get("shift", 1),
        max_periods=args.get("max_periods", 2.0),
        perturb=args.get("perturb", 0.0),
        bound=args.get("bound", 10),
        R=args.get("R"),
        r=args.get("r"),
        d=args.get("d", 0.0),
        starts=args.get("starts", 10),
        corner_radius=args.get("corner_radius", DEFAULT_CORNER_RADIUS),
        side_radius=args.get("side_radius", DEFAULT_SIDE_RADIUS),
        samples=args.get("samples", 1000),
    )
