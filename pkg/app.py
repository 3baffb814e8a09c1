from __future__ import annotations

import argparse
import sys

from dotenv import load_dotenv

from src.common.constants import EXIT_CONFIG_ERROR
from src.common.exceptions import KgoError
from src.physics.params import FREE_PARAMETERS, SWEEP_PARAMETERS
from src.utils.logging_config import cleanup_session_logger, get_session_logger, set_request_id
from src.workflow.commands import (
    cmd_joint,
    cmd_scan,
    cmd_selftest,
    cmd_spectrum,
    cmd_verify,
    cmd_wavefunction,
    exit_code_for,
)
from src.workflow.config import add_config_arguments, load_run_config


def _add_joint_arguments(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--free", choices=FREE_PARAMETERS, required=required, help="parameter fixed by A_{n+1} = 0")
    parser.add_argument("--guess-energy", type=float, default=None)
    parser.add_argument("--guess-value", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgo-heun",
        description="Bound states of the generalized KG oscillator in a Gödel-type space-time.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="roots of the energy quantization condition")
    add_config_arguments(spectrum)

    joint = sub.add_parser("joint", help="solve for E and one free parameter")
    add_config_arguments(joint)
    _add_joint_arguments(joint, required=True)

    wavefunction = sub.add_parser("wavefunction", help="normalized radial wave function")
    add_config_arguments(wavefunction)
    _add_joint_arguments(wavefunction, required=False)

    verify = sub.add_parser("verify", help="finite-difference cross-check")
    add_config_arguments(verify)
    _add_joint_arguments(verify, required=False)

    scan = sub.add_parser("scan", help="sweep one parameter")
    add_config_arguments(scan)
    scan.add_argument("--param", choices=SWEEP_PARAMETERS, required=True)
    scan.add_argument("--from", dest="start", type=float, required=True)
    scan.add_argument("--to", dest="stop", type=float, required=True)
    scan.add_argument("--steps", type=int, required=True)
    scan.add_argument("--levels", type=int, nargs="+", default=None)

    selftest = sub.add_parser("selftest", help="built-in consistency checks")
    selftest.add_argument("--format", choices=["csv", "json"], default="csv")
    selftest.add_argument("--out", "--out-path", dest="out", default=None)
    selftest.add_argument("--seed", type=int, default=0)
    return parser


def run(args: argparse.Namespace) -> int:
    if args.command == "selftest":
        return cmd_selftest(args.format, args.out, args.seed)

    cfg = load_run_config(args)
    if args.command == "spectrum":
        return cmd_spectrum(cfg)
    if args.command == "joint":
        return cmd_joint(cfg, args.free, args.guess_energy, args.guess_value)
    if args.command == "wavefunction":
        return cmd_wavefunction(cfg, args.free, args.guess_energy, args.guess_value)
    if args.command == "verify":
        return cmd_verify(cfg, args.free, args.guess_energy, args.guess_value)
    return cmd_scan(cfg, args.param, args.start, args.stop, args.steps, args.levels)


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG_ERROR if e.code else 0

    request_id = set_request_id()
    logger = get_session_logger(request_id)
    logger.info(f"🟢 Run {args.command} started, request_id={request_id}")
    try:
        return run(args)
    except KgoError as e:
        code = exit_code_for(e)
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return code
    finally:
        cleanup_session_logger(request_id)


if __name__ == "__main__":
    sys.exit(main())
