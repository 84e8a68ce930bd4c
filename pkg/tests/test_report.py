from __future__ import annotations

import json

import pytest

from sievelab.audits import NOT_ADMISSIBLE, resolve_topology
from sievelab.checks import (
    CONCLUSION_ONLY,
    HYPOTHESIS_FAILS,
    NOT_IMPLIED,
    VERIFIED,
    VIOLATED,
    Section,
    TheoremAudit,
)
from sievelab.errors import InputError, ResolutionError
from sievelab.omega import double_negation
from sievelab.report import COMMANDS, Report, run


def test_omega_command(gamma) -> None:
    report = run(gamma, "omega")
    assert report.passed
    facts = report.as_dict()["sections"][0]["facts"]
    assert facts["sizes"] == {"N": 2, "A": 5}
    assert facts["j_Sub = ¬¬"] == NOT_ADMISSIBLE


def test_ideals_command_on_gamma(gamma) -> None:
    report = run(gamma, "ideals")
    section = report.as_dict()["sections"][0]
    assert section["facts"]["count"] == 7
    assert {"N": ["id_N"], "A": ["s", "t"]} in section["facts"]["ideals"]
    assert report.passed


def test_ideal_counts_elsewhere(mon_e) -> None:
    assert run(mon_e, "ideals").as_dict()["sections"][0]["facts"]["count"] == 3


def test_omega_facts_on_chain(l3) -> None:
    facts = run(l3, "omega").as_dict()["sections"][0]["facts"]
    assert facts["sizes"] == {"x": 2, "y": 3, "1": 4}
    assert facts["j_Sub = ¬¬"] is True


def test_arguments_are_checked(l3) -> None:
    with pytest.raises(InputError, match="Unknown command"):
        run(l3, "explode")
    with pytest.raises(InputError, match="takes 1 argument"):
        run(l3, "ideal-audit")
    with pytest.raises(ResolutionError):
        run(l3, "ideal-audit", ["nope"])
    assert set(COMMANDS) >= {"validate", "full-audit", "equivariance"}


def test_topology_tokens(l3) -> None:
    assert resolve_topology(l3, "notnot").kind == "notnot"
    assert resolve_topology(l3, "¬¬").kind == "notnot"
    assert resolve_topology(l3, "j^y").ideal == l3.ideal("y")
    assert resolve_topology(l3, "j_M:M_L3").admissible == l3.admissible("M_L3")
    assert resolve_topology(l3, "alpha:F_L3").j.name == "α_F_L3"
    with pytest.raises(ResolutionError, match="Unknown topology"):
        resolve_topology(l3, "j_Nope")


def test_j_sub_token_needs_admissible_monos(l3, gamma) -> None:
    assert resolve_topology(l3, "j_Sub").j == double_negation(l3.omega)
    with pytest.raises(ResolutionError, match="not form an admissible class"):
        resolve_topology(gamma, "j_Sub")
    with pytest.raises(ResolutionError):
        run(gamma, "equivariance", ["j_Sub", "Id"])


def test_ideal_audit_on_chain(l3) -> None:
    report = run(l3, "ideal-audit", ["y"])
    assert report.passed, report.failures()
    names = [c["name"] for c in report.as_dict()["sections"][0]["checks"]]
    assert "j^y is the identity" in names


def test_ideal_audit_checks_closure_laws(zoo) -> None:
    for name in sorted(zoo.ideals):
        report = run(zoo, "ideal-audit", [name])
        checks = {c.name: c.passed for c in report.sections[0].checks}
        assert checks["C^I is extensive"] and checks["C^I is monotone"]


def test_equivariance_command(l3) -> None:
    report = run(l3, "equivariance", ["notnot", "M_L3"])
    facts = report.as_dict()["sections"][0]["facts"]
    assert facts["equivariant"] is True
    assert report.passed


def test_family_audit_on_chain(l3) -> None:
    report = run(l3, "family-audit", ["F_L3"])
    assert report.audits[0].status == VERIFIED
    checks = {c.name: c.passed for c in report.sections[0].checks}
    assert checks["α is natural"] and checks["α is weak"] and checks["α is productive"]
    assert checks["α is action preserving for M_L3"]


def test_theorem_statuses() -> None:
    assert TheoremAudit("t", {"h": True}, True).status == VERIFIED
    assert TheoremAudit("t", {"h": True}, False).status == VIOLATED
    assert TheoremAudit("t", {"h": True}, False, claimed=False).status == NOT_IMPLIED
    assert TheoremAudit("t", {"h": False}, True).status == CONCLUSION_ONLY
    assert TheoremAudit("t", {"h": False}, False).status == HYPOTHESIS_FAILS
    assert not TheoremAudit("t", {}, False).passed


def test_informational_checks_do_not_fail_a_report(l3) -> None:
    section = Section("s")
    section.check("real", True)
    section.check("note", False, {"why": "shown only"}, info=True)
    report = Report("ws", "omega", [], [section])
    assert report.passed
    assert report.failures() == []
    assert "[~] note" in report.render_text()


def test_failures_are_listed() -> None:
    section = Section("s")
    section.expect_none("search", {"object": "x"})
    report = Report("ws", "omega", [], [section], [TheoremAudit("claim", {"h": True}, False)])
    assert not report.passed
    assert report.failures() == ["s: search", "claim"]
    text = report.render_text()
    assert "result:    FAIL" in text
    assert 'witness: {"object": "x"}' in text


def test_json_is_deterministic(l3) -> None:
    first = run(l3, "action-audit", ["M_L3"]).to_json()
    second = run(l3, "action-audit", ["M_L3"]).to_json()
    assert first == second
    data = json.loads(first)
    assert data["command"] == "action-audit"
    assert data["args"] == ["M_L3"]
    assert "sievelab" in data


def test_text_report(l3) -> None:
    text = run(l3, "validate").render_text()
    assert text.startswith("sievelab ")
    assert "result:    PASS" in text
    assert "== validate ok" in text


def test_full_audit_passes(zoo) -> None:
    report = run(zoo, "full-audit")
    assert report.passed, report.failures()
    assert all(row.status != VIOLATED for row in report.audits)


def test_admissible_audit_command(l3, gamma) -> None:
    report = run(l3, "admissible-audit", ["M_L3"])
    assert report.passed, report.failures()
    checks = {c.name: c.passed for c in report.sections[0].checks}
    assert checks["MP: p s closed"] and checks["P′: p s closed"]
    facts = run(gamma, "admissible-audit", ["Id"]).as_dict()["sections"][0]["facts"]
    assert facts["P′ skipped"] == NOT_ADMISSIBLE
    assert facts["j_Sub = ¬¬"] == NOT_ADMISSIBLE


def test_demorgan_command(l3, gamma) -> None:
    report = run(l3, "demorgan", ["y"])
    assert report.passed
    assert report.audits[0].status == VERIFIED
    assert all(case["passed"] for case in report.as_dict()["sections"][0]["facts"]["cases"])
    row = run(gamma, "demorgan", ["I_prime"]).audits[0]
    assert row.hypotheses["right_ore"] is False
    assert row.status in (HYPOTHESIS_FAILS, CONCLUSION_ONLY)
