"""Rich tables for the command-line reports."""
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.table import Table

from iffkit.iffkit_types import LawReport
from iffkit.ifca import ConceptLattice
from iffkit.integrate import FusionResult
from iffkit.metalang import ComplianceReport, Issue
from iffkit.registry import Namespace, Registry, Warrant, WarrantReport, vocabulary_report
from iffkit.suites import SuiteResult
from iffkit.termlang import LawvereFragment

HEADER_STYLE = "bold magenta"


def _console() -> Console:
    # fixed width and no colour detection keep output byte-identical across runs
    return Console(width=120, highlight=False, color_system=None, soft_wrap=False)


def _table(*headers: str, title: str|None = None) -> Table:
    table = Table(show_header=True, header_style=HEADER_STYLE, title=title)
    for header in headers:
        table.add_column(header)
    return table


def print_table(table: Table, console: Console|None = None) -> None:
    (console or _console()).print(table)


@dataclass
class FileCheck:
    path: Path
    sentences: int = 0
    issues: list[Issue] = field(default_factory=list)
    compliance: ComplianceReport = field(default_factory=ComplianceReport)


def check_table(results: Iterable[FileCheck]) -> Table:
    table = _table("File", "Sentences", "Issues", "Categorical\ndesign", "% Compliant",
                   title="Sentence check")
    for r in results:
        c = r.compliance
        table.add_row(str(r.path), str(r.sentences), str(len(r.issues)),
                      f"{c.compliant_count}/{len(c.records)}", f"{c.ratio * 100:6.2f}%")
    return table


def issues_table(results: Iterable[FileCheck]) -> Table:
    table = _table("Location", "Kind", "Detail", title="Issues")
    for r in results:
        for issue in r.issues:
            table.add_row(str(issue.span or r.path), issue.kind, issue.detail)
        for record in r.compliance.records:
            if not record.compliant:
                table.add_row(str(record.span or r.path), "categorical-design",
                              " ".join(record.offending) or "not an atom or equation")
    return table


def resolution_table(resolved: Mapping[str, Namespace|str]) -> Table:
    table = _table("Prefix", "Namespace", "Numeric", "Special", "Status", title="Prefix resolution")
    for prefix, ns in resolved.items():
        if isinstance(ns, str):
            table.add_row(prefix, "-", "-", "-", ns)
        else:
            table.add_row(prefix, ns.prefix, ns.numeric_prefix,
                          ",".join(sorted(ns.special_prefixes)) or "-",
                          "deprecated" if ns.deprecated else "ok")
    return table


def vocabulary_table(registry: Registry) -> Table:
    table = _table("Namespace", "Sets", "Functions", "Relations", "Total", title="Vocabulary")
    totals = [0, 0, 0, 0]
    for key in sorted(registry.namespaces):
        counts = vocabulary_report(registry, key)
        row = [counts.sets, counts.functions, counts.relations, counts.total]
        totals = [a + b for a, b in zip(totals, row)]
        table.add_row(str(registry.namespaces[key]), *map(str, row))
    table.add_row("total", *map(str, totals))
    return table


def warrant_table(report: WarrantReport) -> Table:
    table = _table("Term", "Warrant", title="Conceptual warrant")
    for ref, status in report.status.items():
        if status is Warrant.ORPHAN:
            table.add_row(str(ref), status.value)
    counts = report.counts()
    table.add_row("summary", ", ".join(f"{w.value} {n}" for w, n in counts.items()))
    return table


def concepts_table(lattice: ConceptLattice, token_text: Any = str, type_text: Any = str) -> Table:
    table = _table("#", "Extent", "Intent", title=f"{len(lattice)} concepts")
    c = lattice.classification
    for i, k in enumerate(lattice):
        table.add_row(str(i),
                      " ".join(token_text(a) for a in c.tokens if a in k.extent) or "-",
                      " ".join(type_text(t) for t in c.types if t in k.intent) or "-")
    return table


def truth_table(lattice: ConceptLattice, model_text: Any = str,
                marked: frozenset[Any]|None = None) -> Table:
    table = _table("#", "Models", "Sentences", "", title=f"{len(lattice)} truth concepts")
    c = lattice.classification
    for i, k in enumerate(lattice):
        table.add_row(str(i),
                      " ".join(model_text(m) for m in c.tokens if m in k.extent) or "-",
                      str(len(k.intent)),
                      "theory" if k.extent == marked else "")
    return table


def lawvere_table(fragment: LawvereFragment) -> Table:
    table = _table("Source", "Target", "Morphisms",
                   title=f"law({fragment.lang.id or 'L'}) to depth {fragment.depth}")
    for a in fragment.objects():
        for b in fragment.objects():
            table.add_row("{" + " ".join(sorted(a)) + "}", "{" + " ".join(sorted(b)) + "}",
                          str(fragment.hom_size(a, b)))
    return table


def law_table(reports: Mapping[str, LawReport], title: str) -> Table:
    table = _table("Check", "Cases", "Violations", "Laws violated", title=title)
    for name, report in reports.items():
        table.add_row(name, str(report.checked), str(len(report.violations)),
                      ", ".join(sorted(report.laws_violated())) or "-")
    return table


def provenance_table(result: FusionResult) -> Table:
    table = _table("Symbol", "Origins", title="Provenance")
    for name, origins in result.provenance.items():
        table.add_row(name, ", ".join(f"{node}:{sym}" for node, sym in origins))
    return table


def suites_table(results: Iterable[SuiteResult]) -> Table:
    table = _table("Suite", "Cases", "Violations", "Status", title="Verification suites")
    for r in results:
        status = "pass" if r.passed else (f"error: {r.error}" if r.error else "FAIL")
        table.add_row(r.name, str(r.report.checked), str(len(r.report.violations)), status)
    return table
