import argparse
import logging
from typing import Iterator

from engine.schemas import CertificateSummary, ReachEtaReport, certificate_from_text, certificate_to_text, parse_certificate_header
from engine.services import (
    all_st_vectors, check_basis, check_coefficient_sums, check_core_identity, check_eta_alternation,
    random_st_vectors, reach_eta, verify_certificate,
)
from engine.spinning import finite_steinberg_report, quasifinite_evidence
from fields.schemas import describe_tower
from group_sl.schemas import describe_datum
from group_sl.services import check_bruhat, make_group
from module_mtr.schemas import stvector_to_text
from module_mtr.services import SteinbergModule, make_module
from quasifinite.schemas import SCAN_COLUMNS, scan_csv_rows
from quasifinite.services import coprime_divisibility_check, divides_for_all_a, ell_candidates
from services.common import ExitCode, Settings, SteinbergError, characteristic_check, prime_power
from services.storage import read_text, write_certificate

from .models import Outcome
from .schemas import RunConfig

logger = logging.getLogger(__name__)


def _dump(report) -> dict:
    return report.model_dump(mode="json")


def _modules(config: RunConfig, with_a: bool = True) -> Iterator[tuple[tuple[int, ...], SteinbergModule]]:
    """One module per grid case; every case is checked for ell = p before any work.

    Action caches are dropped after each case.
    """
    if not config.ell:
        raise SteinbergError(ExitCode.invalid_config, "--ell is required for this command.")
    cases = config.grid(with_a=with_a)
    for case in cases:
        characteristic_check(prime_power(case[1])[0], case[-1])
    for case in cases:
        n, q, ell = case[0], case[1], case[-1]
        p, d = prime_power(q)
        module = make_module(n, p, d, ell)
        yield case, module
        module.clear_caches()


# verify

def cmd_verify_bruhat(config: RunConfig, settings: Settings) -> Outcome:
    results = []
    for n, q, a in config.grid(with_ell=False):
        p, d = prime_power(q)
        results.append(_dump(check_bruhat(make_group(n, p, d), a, settings.bruhat_limit, config.sample, config.seed)))
    return Outcome(passed=all(r["passed"] for r in results), results=results)


def cmd_verify_eta(config: RunConfig, settings: Settings) -> Outcome:
    results = [_dump(check_eta_alternation(module, case[2])) for case, module in _modules(config)]
    return Outcome(passed=all(r["passed"] for r in results), results=results)


def cmd_verify_basis(config: RunConfig, settings: Settings) -> Outcome:
    results = [_dump(check_basis(module, case[2], config.roundtrips, config.seed)) for case, module in _modules(config)]
    return Outcome(passed=all(r["passed"] for r in results), results=results)


def cmd_verify_coefficient_sums(config: RunConfig, settings: Settings) -> Outcome:
    results = [_dump(check_coefficient_sums(module, case[2])) for case, module in _modules(config)]
    return Outcome(passed=all(r["passed"] for r in results), results=results)


def cmd_verify_identity(config: RunConfig, settings: Settings) -> Outcome:
    results = []
    for case, module in _modules(config):
        indices = sorted(set(config.i)) or range(1, module.group.r + 1)
        for i in indices:
            if not 1 <= i <= module.group.r:
                raise SteinbergError(ExitCode.invalid_config, f"--i {i} is outside 1..{module.group.r}.")
            results.append(_dump(check_core_identity(module, i, case[2])))
    return Outcome(passed=all(r["passed"] for r in results), results=results)


# certificates

def cmd_reach_eta(config: RunConfig, settings: Settings) -> Outcome:
    results = []
    paths = []
    passed = True
    for (n, q, a, ell), module in _modules(config):
        if config.all_vectors:
            mode, vectors = "all", list(all_st_vectors(module, a))
        else:
            mode, vectors = "random", random_st_vectors(module, a, config.random or 20, config.seed)
        summaries = []
        levels = {a}
        for k, v in enumerate(vectors):
            cert = reach_eta(module, v, a)
            levels.update(cert.levels_used())
            verified = verify_certificate(module, cert)
            bound = cert.a * 2 ** module.group.r
            path = None
            if config.certs:
                path = write_certificate(certificate_to_text(cert, module), config.certs, f"sl{n}-q{q}-a{a}-ell{ell}-{k:04d}")
                paths.append(path)
            summaries.append(CertificateSummary(
                vector=stvector_to_text(v).strip(), steps=len(cert.steps), multiplier_terms=cert.size(),
                claimed_scalar=cert.claimed_scalar, max_level=cert.max_level, matrix_level=cert.matrix_level,
                level_bound=bound, verified=verified, path=path,
            ))
            passed = passed and verified and cert.max_level <= bound
        report = ReachEtaReport(
            n=n, q=q, a=a, ell=ell, mode=mode, certificates=summaries,
            max_level_seen=max((s.max_level for s in summaries), default=a),
            passed=all(s.verified for s in summaries),
        )
        result = _dump(report)
        result["datum"] = _dump(describe_datum(module.group.datum))
        result["tower"] = _dump(describe_tower(module.tower, sorted(levels)))
        if config.with_spin:
            result["spin"] = _dump(finite_steinberg_report(module, a, settings, config.seed))
        results.append(result)
        logger.info("reach-eta n=%d q=%d ell=%d: %d certificates", n, q, ell, len(summaries))
    return Outcome(passed=passed, results=results, certificates=paths)


def cmd_verify_certificate(config: RunConfig, settings: Settings) -> Outcome:
    if not config.paths:
        raise SteinbergError(ExitCode.invalid_config, "No certificate files given.")
    results = []
    for path in config.paths:
        text = read_text(path)
        header = parse_certificate_header(text)
        characteristic_check(header["p"], header["ell"])
        module = make_module(header["n"], header["p"], header["d"], header["ell"])
        cert = certificate_from_text(text, module)
        results.append({
            "path": path,
            "verified": verify_certificate(module, cert),
            "claimed_scalar": cert.claimed_scalar,
            "steps": len(cert.steps),
            "max_level": cert.max_level,
        })
        module.clear_caches()
    return Outcome(passed=all(r["verified"] for r in results), results=results)


def cmd_steinberg_report(config: RunConfig, settings: Settings) -> Outcome:
    results = [_dump(finite_steinberg_report(module, case[2], settings, config.seed)) for case, module in _modules(config)]
    return Outcome(passed=True, results=results)


# scans

def _scan_cases(config: RunConfig) -> list[tuple[int, int, int]]:
    """Grid cases; without --ell, every small prime dividing the product at a = 1."""
    if config.ell:
        return config.grid(with_a=False)
    return [(n, q, ell) for n, q in config.grid(with_a=False, with_ell=False) for ell in ell_candidates(n, q)]


def cmd_scan_quasifinite(config: RunConfig, settings: Settings) -> Outcome:
    results = []
    rows = []
    for n, q, ell in _scan_cases(config):
        report = divides_for_all_a(ell, n, q, config.a_max)
        rows += scan_csv_rows(report)
        result = _dump(report)
        if config.evidence:
            evidence_settings = settings.model_copy(update={"a_max": config.a_max, "seed": config.seed})
            result["evidence"] = _dump(quasifinite_evidence(n, q, ell, config.levels, evidence_settings))
        results.append(result)
    return Outcome(passed=True, results=results, csv_table=(SCAN_COLUMNS, rows))


def cmd_scan_coprime(config: RunConfig, settings: Settings) -> Outcome:
    results = [_dump(coprime_divisibility_check(n, q, config.a_max)) for n, q in config.grid(with_a=False, with_ell=False)]
    return Outcome(passed=all(r["passed"] for r in results), results=results)


# parser registration

def common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--n", type=int, action="append", help="SL_n rank parameter (repeatable)")
    parent.add_argument("--q", type=str, action="append", help="field size, as 9 or 3^2 (repeatable)")
    parent.add_argument("--a", type=int, action="append", help="field level (repeatable)")
    parent.add_argument("--ell", type=int, action="append", help="coefficient characteristic (repeatable)")
    parent.add_argument("--amax", dest="a_max", type=int, help="scan horizon for a")
    parent.add_argument("--seed", type=int, help="seed for sampling and random vectors")
    parent.add_argument("--format", choices=["json", "csv", "human"], help="report format")
    parent.add_argument("--out", help="report path (stdout when omitted)")
    parent.add_argument("--timing", action="store_true", default=None, help="record wall time in the report")
    parent.add_argument("--log-level", help="logging level: DEBUG, INFO, WARNING, ERROR or CRITICAL")
    return parent


def register_verify(subparsers, parent: argparse.ArgumentParser):
    verify = subparsers.add_parser("verify", help="exhaustive checks of the construction")
    checks = verify.add_subparsers(dest="check", required=True)

    bruhat = checks.add_parser("bruhat", parents=[parent], help="Bruhat decomposition roundtrip")
    bruhat.add_argument("--sample", type=int, help="sample this many elements when |G| is too large")
    bruhat.set_defaults(handler=cmd_verify_bruhat, command="verify bruhat")

    eta = checks.add_parser("eta", parents=[parent], help="n_i η = -η and t η = η")
    eta.set_defaults(handler=cmd_verify_eta, command="verify eta")

    basis = checks.add_parser("basis", parents=[parent], help="rank of {zη} and coordinate roundtrips")
    basis.add_argument("--roundtrips", type=int)
    basis.set_defaults(handler=cmd_verify_basis, command="verify basis")

    sums = checks.add_parser("coefficient-sums", parents=[parent], help="coefficient sums of n·u·η")
    sums.set_defaults(handler=cmd_verify_coefficient_sums, command="verify coefficient-sums")

    identity = checks.add_parser("identity", parents=[parent], help="torus averaging identity, --a is b")
    identity.add_argument("--i", type=int, action="append", help="root index (repeatable, default all)")
    identity.set_defaults(handler=cmd_verify_identity, command="verify identity")


def register_certificates(subparsers, parent: argparse.ArgumentParser):
    reach = subparsers.add_parser("reach-eta", parents=[parent], help="certify that vectors of St_a generate η")
    group = reach.add_mutually_exclusive_group()
    group.add_argument("--all-vectors", action="store_true", default=None)
    group.add_argument("--random", type=int, help="number of seeded random vectors")
    reach.add_argument("--certs", help="directory for certificate files")
    reach.add_argument("--with-spin", action="store_true", default=None, help="add the finite spinning report")
    reach.set_defaults(handler=cmd_reach_eta, command="reach-eta")

    check = subparsers.add_parser("verify-certificate", parents=[parent], help="replay stored certificates")
    check.add_argument("paths", nargs="+")
    check.set_defaults(handler=cmd_verify_certificate, command="verify-certificate")

    report = subparsers.add_parser("steinberg-report", parents=[parent], help="spin St_a over GF(ell)")
    report.set_defaults(handler=cmd_steinberg_report, command="steinberg-report")


def register_scan(subparsers, parent: argparse.ArgumentParser):
    scan = subparsers.add_parser("scan", help="divisibility scans over a")
    kinds = scan.add_subparsers(dest="kind", required=True)

    quasi = kinds.add_parser("quasifinite", parents=[parent], help="ell | ∏ A_m(q, a) for all a")
    quasi.add_argument("--evidence", action="store_true", default=None, help="also spin St_a at --levels")
    quasi.add_argument("--levels", type=int, action="append")
    quasi.set_defaults(handler=cmd_scan_quasifinite, command="scan quasifinite")

    coprime = kinds.add_parser("coprime", parents=[parent], help="n | ∏ A_m(q, a) when gcd(n, q) = 1")
    coprime.set_defaults(handler=cmd_scan_coprime, command="scan coprime")
