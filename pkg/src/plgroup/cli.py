"""
Command-line interface for plgroup.

Every subcommand reads elements from files or inline ``plmap1p`` literals,
writes exact text to standard output (or ``--out``) and returns an exit
code: 0 on success, 1 on a mathematical refusal or failed verdict, 2 on
malformed input.
"""
import argparse
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from src.plgroup import __version__
from src.plgroup.core.certify import (
    brute_force_width_check,
    commutator_lower_certificate,
    ulam_lower_certificate,
)
from src.plgroup.core.cocycle import classify_subgroup, gimel, orbit_partition, xi
from src.plgroup.core.decompose import (
    normal_form_near_zero,
    verify_factorization,
    weak_generators_delta,
    width_witness,
)
from src.plgroup.core.dyadic import Dyadic, parse_dyadic, theta
from src.plgroup.core.errors import (
    ConstructionError,
    MalformedInputError,
    ParseError,
    RefusalError,
)
from src.plgroup.core.omega import check_omega, make_tau, make_translation, make_zeta
from src.plgroup.core.plmap import (
    PLMap1P,
    compose,
    evaluate,
    identity,
    invert,
    parse_plmap,
    serialize,
)
from src.plgroup.core.thompson import classify_thompson, transporter
from src.plgroup.models.factorization import read_manifest, write_manifest
from src.plgroup.models.report import SuiteReport
from src.plgroup.services.registry import service_registry
from src.plgroup.services.suite_service import SuiteService
from src.plgroup.utils.config import config_manager
from src.plgroup.utils.logging import get_logger, logging_manager

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class PLGroupCLI:
    """
    Command dispatcher.

    Each subcommand maps to a ``cmd_<name>`` method that returns an exit code.
    """

    def __init__(self, stdout: Optional[TextIO] = None) -> None:
        self.stdout = stdout or sys.stdout
        self.logger = get_logger(self.__class__.__name__)

    def initialize(self, config_dir: Optional[str] = None, env: str = "development") -> None:
        """
        Load configuration and set up logging.

        Args:
            config_dir: Directory holding ``default.yaml`` and ``<env>.yaml``
            env: Environment name (e.g., development, testing, production)
        """
        if config_dir:
            config_manager.load_hierarchical_config(config_dir, env)
        config_manager.load_from_env()
        logging_manager.init_logging(force=True)

    def run(self, args: argparse.Namespace) -> int:
        """Dispatch a parsed invocation, mapping errors to exit codes."""
        handler: Callable[[argparse.Namespace], int] = getattr(
            self, "cmd_" + args.command.replace("-", "_")
        )
        try:
            return handler(args)
        except MalformedInputError as e:
            self.logger.error("Malformed input: %s", e)
            return 2
        except (RefusalError, ConstructionError) as e:
            self.logger.error("%s: %s", type(e).__name__, e)
            return 1

    # Input and output

    def _emit(self, text: str, out: Optional[str] = None) -> None:
        if out:
            Path(out).write_text(text)
            self.logger.info("Wrote %s", out)
        else:
            self.stdout.write(text)
            self.stdout.flush()

    @staticmethod
    def _load(source: str) -> PLMap1P:
        if source.lstrip().startswith("plmap1p"):
            return parse_plmap(source)
        try:
            text = Path(source).read_text()
        except OSError as e:
            raise ParseError(f"cannot read {source}: {e.strerror}") from e
        return parse_plmap(text)

    @staticmethod
    def _points(text: str) -> List[Dyadic]:
        return [parse_dyadic(token) for token in text.replace(",", " ").split()]

    # Element construction and algebra

    def cmd_make(self, args: argparse.Namespace) -> int:
        makers: Dict[str, Callable[[], PLMap1P]] = {
            "tau": lambda: make_tau(args.n),
            "zeta": lambda: make_zeta(args.n, args.k),
            "translation": lambda: make_translation(parse_dyadic(args.c)),
            "identity": identity,
            "witness": lambda: width_witness(args.n),
        }
        self._emit(serialize(makers[args.element]()), args.out)
        return 0

    def cmd_compose(self, args: argparse.Namespace) -> int:
        self._emit(serialize(compose(*(self._load(source) for source in args.inputs))), args.out)
        return 0

    def cmd_invert(self, args: argparse.Namespace) -> int:
        self._emit(serialize(invert(self._load(args.input))), args.out)
        return 0

    def cmd_eval(self, args: argparse.Namespace) -> int:
        self._emit(f"{evaluate(self._load(args.input), parse_dyadic(args.x))}\n")
        return 0

    def cmd_transporter(self, args: argparse.Namespace) -> int:
        f = transporter(
            args.n,
            self._points(args.xs),
            self._points(args.ys),
            parse_dyadic(args.lo),
            parse_dyadic(args.hi),
        )
        self._emit(serialize(f), args.out)
        return 0

    # Invariants

    def cmd_check_omega(self, args: argparse.Namespace) -> int:
        certificate = check_omega(self._load(args.input), args.n)
        self._emit(certificate.render())
        return 0 if certificate.passed else 1

    def cmd_theta(self, args: argparse.Namespace) -> int:
        self._emit(theta(parse_dyadic(args.x), args.n).describe() + "\n")
        return 0

    def cmd_xi(self, args: argparse.Namespace) -> int:
        self._emit(f"{xi(self._load(args.input), args.n)}\n")
        return 0

    def cmd_gimel(self, args: argparse.Namespace) -> int:
        self._emit(f"{gimel(self._load(args.input), args.n)}\n")
        return 0

    def cmd_partition(self, args: argparse.Namespace) -> int:
        self._emit(orbit_partition(args.n).render())
        return 0

    def cmd_classify(self, args: argparse.Namespace) -> int:
        f = self._load(args.input)
        thompson = classify_thompson(f, args.n)
        lines = [f"in_Omega={str(check_omega(f, args.n).passed).lower()}", thompson.render()]
        if thompson.in_Fc:
            lines.append(classify_subgroup(f, args.n).render())
        self._emit("\n".join(lines) + "\n")
        return 0

    # Constructions

    def cmd_normal_form(self, args: argparse.Namespace) -> int:
        fz = normal_form_near_zero(self._load(args.input), args.n)
        self._emit(fz.render())
        if args.out_dir:
            self._emit(f"manifest {write_manifest(fz, args.out_dir)}\n")
        return 0

    def cmd_check_manifest(self, args: argparse.Namespace) -> int:
        fz = read_manifest(args.manifest)
        budget = args.budget if args.budget is not None else 2 * fz.level + 4
        defects = verify_factorization(fz, budget)
        lines = [f"defect {defect}" for defect in defects]
        lines.append(f"verdict {'FAIL' if defects else 'pass'}")
        self._emit("\n".join(lines) + "\n")
        return 1 if defects else 0

    def cmd_weak_generators(self, args: argparse.Namespace) -> int:
        report = weak_generators_delta(args.n)
        self._emit(report.render())
        if args.out_dir:
            directory = Path(args.out_dir)
            directory.mkdir(parents=True, exist_ok=True)
            for i, (commutator, conjugator) in enumerate(report.pairs, start=1):
                (directory / f"commutator_{i}.plmap").write_text(serialize(commutator))
                (directory / f"conjugator_{i}.plmap").write_text(serialize(conjugator))
        return 0 if report.ok else 1

    # Certificates and the verification suite

    def cmd_certify_ulam(self, args: argparse.Namespace) -> int:
        self._emit(ulam_lower_certificate(self._load(args.input), args.n).render())
        return 0

    def cmd_certify_commutator(self, args: argparse.Namespace) -> int:
        self._emit(commutator_lower_certificate(self._load(args.input), args.n).render())
        return 0

    def cmd_verify(self, args: argparse.Namespace) -> int:
        suite = config_manager.section("suite")
        seed = args.seed if args.seed is not None else int(suite.get("seed", 0))
        iterations = args.iters if args.iters is not None else int(suite.get("iterations", 500))
        if iterations < 0:
            raise MalformedInputError(f"iterations must be non-negative, got {iterations}")

        service = service_registry.get_typed("suite", SuiteService)
        report = SuiteReport(args.n, seed, iterations)
        for result in service.stream(args.n, seed, iterations):
            report.results.append(result)
            self._emit(result.render())
        if args.brute_force:
            result = brute_force_width_check(args.n, seed, args.brute_force)
            report.results.append(result)
            self._emit(result.render())
        self._emit(report.summary())
        return 0 if report.ok else 1


def _level(text: str) -> int:
    try:
        n = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"level must be an integer, got {text!r}") from e
    if n < 2:
        raise argparse.ArgumentTypeError(f"level must be at least 2, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one sub-parser per command."""
    parser = argparse.ArgumentParser(
        prog="plgroup",
        description="Exact computations in Omega_n, Gamma_n and F_{2^n}",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--config", help="Path to the configuration directory", type=str, default="config"
    )
    parser.add_argument(
        "--env",
        help="Environment name (e.g., development, production)",
        type=str,
        default="development",
    )
    parser.add_argument(
        "--log-level", help="Logging level", choices=LOG_LEVELS, type=str, default=None
    )

    level = argparse.ArgumentParser(add_help=False)
    level.add_argument("--n", type=_level, required=True, help="Level n >= 2")
    single = argparse.ArgumentParser(add_help=False)
    single.add_argument("--in", dest="input", required=True, help="Element file or literal")
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None, help="Write the element to this file")

    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    make = commands.add_parser("make", parents=[output], help="Build a named element")
    make.add_argument(
        "element", choices=["tau", "zeta", "translation", "identity", "witness"]
    )
    make.add_argument("--n", type=_level, default=2, help="Level n >= 2")
    make.add_argument("--k", type=int, default=1, help="Index of zeta_k")
    make.add_argument("--c", default="0", help="Translation amount")

    compose_cmd = commands.add_parser("compose", parents=[output], help="Compose, left first")
    compose_cmd.add_argument(
        "--in", dest="inputs", action="append", required=True, help="Element, repeatable"
    )
    commands.add_parser("invert", parents=[single, output], help="Inverse element")
    eval_cmd = commands.add_parser("eval", parents=[single], help="Image of a point")
    eval_cmd.add_argument("--x", required=True, help="Dyadic point")

    commands.add_parser(
        "check-omega", parents=[level, single], help="Omega_n membership certificate"
    )
    theta_cmd = commands.add_parser("theta", parents=[level], help="Residue of a point")
    theta_cmd.add_argument("--x", required=True, help="Dyadic point")
    commands.add_parser("xi", parents=[level, single], help="Xi cocycle of an F^c element")
    commands.add_parser("gimel", parents=[level, single], help="Gimel cocycle")
    commands.add_parser("partition", parents=[level], help="Orbit partition of indices")
    commands.add_parser("classify", parents=[level, single], help="Subgroup memberships")

    transport_cmd = commands.add_parser(
        "transporter", parents=[level, output], help="F element mapping xs to ys"
    )
    transport_cmd.add_argument("--xs", required=True, help="Source points, comma separated")
    transport_cmd.add_argument("--ys", required=True, help="Target points, comma separated")
    transport_cmd.add_argument("--lo", default="0", help="Left end of the support")
    transport_cmd.add_argument("--hi", default="1", help="Right end of the support")

    normal = commands.add_parser(
        "normal-form", parents=[level, single], help="Factor into conjugates of F' elements"
    )
    normal.add_argument("--out-dir", default=None, help="Write a manifest and factor files")
    manifest = commands.add_parser("check-manifest", help="Re-verify a stored factorization")
    manifest.add_argument("--manifest", required=True, help="Path of manifest.txt")
    manifest.add_argument("--budget", type=int, default=None, help="Conjugated factor limit")
    weak = commands.add_parser(
        "weak-generators", parents=[level], help="Verify the weak generating set of Delta_n"
    )
    weak.add_argument("--out-dir", default=None, help="Write the commutator pairs")

    commands.add_parser("certify-ulam", parents=[level, single], help="Ulam width bound")
    commands.add_parser(
        "certify-commutator", parents=[level, single], help="Commutator width bound"
    )
    verify = commands.add_parser("verify", parents=[level], help="Run the verification suite")
    verify.add_argument("--seed", type=int, default=None, help="Suite seed")
    verify.add_argument("--iters", type=int, default=None, help="Trials per random check")
    verify.add_argument(
        "--brute-force", type=int, default=0, help="Samples for the brute-force width oracle"
    )
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Returns:
        Parsed arguments
    """
    return build_parser().parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI."""
    args = parse_args(argv)

    if args.log_level:
        os.environ["PLGROUP_LOG_LEVEL"] = args.log_level

    cli = PLGroupCLI()
    cli.initialize(args.config, args.env)
    try:
        return cli.run(args)
    finally:
        service_registry.shutdown_all()


if __name__ == "__main__":
    sys.exit(main())
