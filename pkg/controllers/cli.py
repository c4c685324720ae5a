import sys
import os
# Add project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import argparse
import json
import logging
from typing import List, Optional

from datasource.results_store import ResultsStore
from models.request_models import RunConfig
from suites.runners import PlateLab
from system.config import LOG_FORMAT, LOG_LEVEL
from system.errors import EXIT_OK, InvalidParametersError, exit_code

logger = logging.getLogger(__name__)


def _floats(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--problem", choices=["dirichlet", "navier", "neumann", "steklov_ks", "steklov_bp"])
    common.add_argument("--tau", type=float, help="Lateral tension")
    common.add_argument("--sigma", type=float, help="Poisson ratio in (-1, 1)")
    common.add_argument("--disk", type=float, metavar="R", help="Disk of radius R")
    common.add_argument("--chart", type=float, metavar="R0", help="Star chart base radius")
    common.add_argument("--cos", type=_floats, metavar="A1,A2,..", help="Relative cosine coefficients")
    common.add_argument("--sin", type=_floats, metavar="B1,B2,..", help="Relative sine coefficients")
    common.add_argument("--rectangle", type=float, nargs=2, metavar=("A", "B"), help="Navier rectangle")
    common.add_argument("--solver", choices=["bessel", "ritz"])
    common.add_argument("--count", type=int, help="Clusters to compute (eigenvalues on rectangles)")
    common.add_argument("--n-max", dest="n_max", type=int, help="Largest angular index of the disk solver")
    common.add_argument("--degree", type=int, help="Ritz polynomial degree")
    common.add_argument("--radial-nodes", dest="radial_nodes", type=int)
    common.add_argument("--angular-nodes", dest="angular_nodes", type=int)
    common.add_argument("--boundary-nodes", dest="boundary_nodes", type=int)
    common.add_argument("--no-quotient", dest="quotient", action="store_false",
                        help="Keep constants in the Neumann and Steklov BP spaces")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"])
    common.add_argument("--output", help="Output file; stdout when missing")
    common.add_argument("--assert", dest="check", action="store_true", help="Exit 4 when the threshold is missed")
    common.add_argument("--threshold", type=float, help="Override the command threshold")
    common.add_argument("--steps", type=_floats, metavar="H1,H2,..", help="Decreasing finite-difference steps")
    return common


def build_parser() -> argparse.ArgumentParser:
    """The plate-lab argument parser with one subcommand per report."""
    parser = argparse.ArgumentParser(prog="plate-lab", description="Biharmonic plate eigenvalue lab")
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    commands.add_parser("spectrum", parents=[common], argument_default=argparse.SUPPRESS,
                        help="Lowest eigenvalue clusters")

    for name, text in (("hadamard", "Shape derivative against finite differences"),
                       ("criticality", "Constancy of the boundary density"),
                       ("radiality", "Radial eigenspace sums on the disk")):
        sub = commands.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS, help=text)
        sub.add_argument("--cluster", dest="cluster_index", type=int, help="1-based cluster position")
        if name == "hadamard":
            sub.add_argument("--s", type=int, help="Order of the symmetric function")
            sub.add_argument("--perturbation", help="Normal speed, e.g. 1, cos2, 0.5 - 2 sin3")
        if name == "radiality":
            sub.add_argument("--radii", type=_floats, help="Circle radii relative to R")
            sub.add_argument("--members", type=_ints, help="1-based member subset")

    lemma = commands.add_parser("lemma", parents=[common], argument_default=argparse.SUPPRESS,
                                help="Form-derivative identities")
    lemma.add_argument("--which", dest="lemma", choices=["dM", "dB", "dL", "dDet", "dJ1", "dJ2", "dJ3"])
    lemma.add_argument("--preset", type=int, help="Bundled example number")
    lemma.add_argument("--u1", help="First polynomial in x, y")
    lemma.add_argument("--u2", help="Second polynomial in x, y")
    lemma.add_argument("--psi", nargs=2, metavar=("PSI_X", "PSI_Y"), help="Deformation field")

    branches = commands.add_parser("branches", parents=[common], argument_default=argparse.SUPPRESS,
                                   help="Stretch sweep through a crossing")
    branches.add_argument("--rectangle-stretch", dest="stretch", type=float, nargs=3, metavar=("START", "STOP", "N"),
                          help="Sweep of e^t x e^-t")
    branches.add_argument("--pair", type=_ints, metavar="M,N", help="Mode numbers of the crossing pair")
    return parser


def _config_data(args: argparse.Namespace) -> dict:
    values = vars(args).copy()
    values.pop("command")
    data = {}
    path = values.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidParametersError(f"Cannot read config {path}: {e}") from e

    base = values.pop("chart", None)
    cos_coeffs = values.pop("cos", None)
    sin_coeffs = values.pop("sin", None)
    if base is not None or cos_coeffs is not None or sin_coeffs is not None:
        data["chart"] = {"base_radius": 1.0 if base is None else base,
                         "cos_coeffs": cos_coeffs or [], "sin_coeffs": sin_coeffs or []}
    if "rectangle" in values:
        a, b = values.pop("rectangle")
        data["rectangle"] = {"a": a, "b": b}
    if "stretch" in values:
        start, stop, samples = values.pop("stretch")
        data["stretch"] = (start, stop, int(samples))
    data.update(values)
    return data


def main(argv: Optional[List[str]] = None) -> int:
    """Run one plate-lab command and return its exit status."""
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.model_validate(_config_data(args))
        lab = PlateLab(config)
        output = lab.run(args.command)
        lab.write(output, ResultsStore(config.output))
        lab.verify(args.command, output)
    except Exception as e:
        code = exit_code(e)
        message = " ".join(str(e).split())
        logger.error(f"{args.command} failed ({type(e).__name__}, exit {code}): {message}")
        logger.debug("Traceback", exc_info=True)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
