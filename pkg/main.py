import argparse
import logging
import sys
import time

from pydantic import ValidationError

from cli.schemas import RunConfig, RunReport
from cli.views import common_options, register_certificates, register_scan, register_verify
from services.common import ExitCode, Settings, SteinbergError, configure_logging, get_settings
from services.storage import write_report

logger = logging.getLogger("steinberg")

CONFIG_FIELDS = set(RunConfig.model_fields)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steinberg", description="Steinberg module engine for SL_n over finite field towers.")
    subparsers = parser.add_subparsers(dest="group", required=True)
    parent = common_options()
    register_verify(subparsers, parent)
    register_certificates(subparsers, parent)
    register_scan(subparsers, parent)
    return parser


def make_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    values = {"a_max": settings.a_max, "seed": settings.seed, "timing": settings.record_timing}
    for key, value in vars(args).items():
        if key in CONFIG_FIELDS and value is not None:
            values[key] = value
    return RunConfig(**values)


def execute(args: argparse.Namespace, settings: Settings) -> int:
    config = make_config(args, settings)
    start = time.perf_counter()
    outcome = args.handler(config, settings)
    elapsed = time.perf_counter() - start
    report = RunReport(
        command=config.command,
        parameters=config.parameters(),
        seed=config.seed,
        wall_time=round(elapsed, 3) if config.timing else None,
        passed=outcome.passed,
        certificates=outcome.certificates,
        results=outcome.results,
    )
    path = config.out
    if path is None and settings.output_dir:
        path = f"{settings.output_dir}/{config.command.replace(' ', '-')}.{config.format.value}"
    write_report(report, path, config.format.value, outcome.csv_table)
    logger.info("%s finished in %.3fs, passed=%s", config.command, elapsed, outcome.passed)
    return ExitCode.passed if outcome.passed else ExitCode.assertion_failure


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
        if args.log_level:
            settings = Settings(**{**settings.model_dump(), "log_level": args.log_level})
        configure_logging(settings.log_level)
        return int(execute(args, settings))
    except ValidationError as e:
        for error in e.errors():
            print(f"invalid configuration: {error['loc'][0] if error['loc'] else ''} {error['msg']}", file=sys.stderr)
        return int(ExitCode.invalid_config)
    except SteinbergError as e:
        print(e, file=sys.stderr)
        return int(e.status_code)


if __name__ == "__main__":
    sys.exit(main())
