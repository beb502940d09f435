"""Batch pipelines behind the CLI: certify and cross-check."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

from . import __version__
from .bochner import AntisymmetryWarning, BochnerCertificate, CertifyOptions, certify
from .config import CertConfig
from .errors import CertError
from .lie_core import cartan_decompose
from .recipes import build_rep
from .rep_core import admissible_metric, constituent_weights
from .roots import cartan_subalgebra, compute_roots, exclusion_check, raghunathan_higher_criterion

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_NOT_PD, EXIT_CONTRADICTION = 0, 1, 2, 3


def _options(config: CertConfig) -> CertifyOptions:
    return CertifyOptions(gap_tolerance=config.gap_tolerance,
                          antisymmetry_tolerance=config.antisymmetry_tolerance,
                          antisymmetry=config.antisymmetry_policy, seed=config.seed)


def error_payload(exc: CertError) -> dict:
    return {"tool_version": __version__, "status": "error", **exc.to_record()}


def run_certify(config: CertConfig) -> tuple[list[BochnerCertificate], dict, int]:
    """Certificates for every (rep, degree), the JSON payload and the exit code."""
    try:
        algebra = config.build_algebra()
        cartan = cartan_decompose(algebra)
        config.check_degrees(cartan.p_dim)
        certs = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AntisymmetryWarning)
            for recipe in config.reps:
                rep = build_rep(algebra, recipe)
                metric = admissible_metric(rep, cartan, seed=config.seed)
                for p in config.degrees:
                    certs.append(certify(algebra, rep, p, _options(config), cartan=cartan, metric=metric))
    except CertError as exc:
        log.error("%s: %s", exc.code, exc)
        return [], error_payload(exc), EXIT_ERROR
    payload = {
        "tool_version": __version__,
        "status": "ok",
        "seed": config.seed,
        "algebra": algebra.name,
        "certificates": [c.to_json() for c in certs],
    }
    code = EXIT_OK if all(c.verdict == "positive_definite" for c in certs) else EXIT_NOT_PD
    return certs, payload, code


@dataclass(frozen=True)
class CrossCheckRow:
    rep_recipe: str
    p: int
    bochner_verdict: str
    gap: float
    criterion: dict
    exclusion: list
    vanishing_prediction: str
    agreement: str

    def to_json(self) -> dict:
        return {
            "rep_recipe": self.rep_recipe,
            "p": self.p,
            "bochner": {"verdict": self.bochner_verdict, "gap": self.gap},
            "criterion": self.criterion,
            "exclusion": self.exclusion,
            "vanishing_prediction": self.vanishing_prediction,
            "agreement": self.agreement,
        }


@dataclass(frozen=True)
class CrossCheckReport:
    algebra: str
    seed: int
    rows: tuple[CrossCheckRow, ...]

    @property
    def contradictions(self) -> int:
        return sum(r.agreement == "CONTRADICTION" for r in self.rows)

    def to_json(self) -> dict:
        return {
            "tool_version": __version__,
            "status": "ok",
            "seed": self.seed,
            "algebra": self.algebra,
            "contradictions": self.contradictions,
            "rows": [r.to_json() for r in self.rows],
        }


def agreement_status(criterion_verdict: str, exact_orders: bool, bochner_verdict: str) -> str:
    certified = criterion_verdict == "certified_over_sampled_orders"
    if certified and exact_orders:
        return "CONTRADICTION" if bochner_verdict != "positive_definite" else "agree"
    if criterion_verdict == "inconclusive":
        return "criterion_inconclusive"
    if certified and bochner_verdict != "positive_definite":
        # sampled orders only: the sampling, not the spectrum, is suspect
        return "criterion_inconclusive"
    return "agree"


def crosscheck(config: CertConfig) -> CrossCheckReport:
    algebra = config.build_algebra()
    cartan = cartan_decompose(algebra)
    config.check_degrees(cartan.p_dim)
    sub = cartan_subalgebra(algebra, cartan)
    rootdata = compute_roots(algebra, sub)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AntisymmetryWarning)
        for recipe in config.reps:
            rep = build_rep(algebra, recipe)
            metric = admissible_metric(rep, cartan, seed=config.seed)
            complex_parts = constituent_weights(rep, cartan, sub, metric, field="complex")
            real_parts = constituent_weights(rep, cartan, sub, metric, field="real")
            flags = [f for part in real_parts for f in exclusion_check(algebra, part)]
            for p in config.degrees:
                cert = certify(algebra, rep, p, _options(config), cartan=cartan, metric=metric)
                crit = raghunathan_higher_criterion(rootdata, complex_parts, p, config.trials, config.seed)
                if p == 1:
                    prediction = "positive_definite" if all(f.vanishing_predicted for f in flags) else "not_applicable"
                else:
                    prediction = "not_applicable"
                rows.append(CrossCheckRow(
                    rep_recipe=rep.recipe, p=p, bochner_verdict=cert.verdict, gap=cert.gap,
                    criterion={**crit.to_json(), "excluded_pairs": [f.to_json() for f in flags if f.excluded]},
                    exclusion=[f.to_json() for f in flags],
                    vanishing_prediction=prediction,
                    agreement=agreement_status(crit.verdict, crit.exact, cert.verdict),
                ))
    return CrossCheckReport(algebra.name, config.seed, tuple(rows))


def run_crosscheck(config: CertConfig) -> tuple[CrossCheckReport | None, dict, int]:
    try:
        report = crosscheck(config)
    except CertError as exc:
        log.error("%s: %s", exc.code, exc)
        return None, error_payload(exc), EXIT_ERROR
    code = EXIT_CONTRADICTION if report.contradictions else EXIT_OK
    return report, report.to_json(), code
