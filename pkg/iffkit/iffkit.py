import functools
import importlib.metadata
import logging
import sys
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import click

from iffkit import reports
from iffkit.cat_engine import check_category_laws
from iffkit.ifca import concepts, dump_concepts, load_classification_file
from iffkit.iffkit_types import IffError
from iffkit.iffkit_utils import (
    TOOL_NAME,
    corpus_dir,
    debug_print,
    debug_print_set_level,
    expand_sources,
)
from iffkit.institution import dump_theory, load_theory_file, theory_models, truth_lattice
from iffkit.integrate import dump_provenance, fuse, load_alignment_file, verify_fusion_universal
from iffkit.metalang import lint_categorical_design, parse_file, validate
from iffkit.registry import (
    Namespace,
    Registry,
    RegistryError,
    dump_vocabulary,
    load_vocabulary,
    scan_sentences,
    warrant_check,
)
from iffkit.suites import SUITES, SuiteConfig, run_suites
from iffkit.termlang import check_term_monad_laws, lawvere_fragment, load_languages_file


@dataclass
class Options:
    depth: int = 2
    model_bound: int = 3
    cocone_bound: int = 4
    strict: bool = False
    verbose: bool = False
    log: bool = False
    vocab: tuple[str, ...] = field(default_factory=tuple)
    use_multiprocessing: bool = False

options = Options()

logger = logging.getLogger("iffkit")

FORMAT = "[%(filename)s:%(lineno)s] %(message)s"


def setup_logging(log: bool, verbose: bool) -> None:
    level = logging.DEBUG if verbose else (logging.INFO if log else logging.WARNING)
    logging.basicConfig(
        filename=f"{TOOL_NAME}.log" if log else None,
        level=level,
        format=FORMAT,
    )


class DomainFailure(Exception):
    """A check ran to completion and found something wrong."""


def command_errors(func: Callable[..., None]) -> Callable[..., None]:
    """Maps library errors to exit status 2 and domain failures to 1."""
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            func(*args, **kwargs)
        except DomainFailure as e:
            click.echo(f"{TOOL_NAME}: {e}", err=True)
            sys.exit(1)
        except (IffError, OSError) as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"{TOOL_NAME}: error: {e}", err=True)
            sys.exit(2)
    return wrapper


def load_registry() -> Registry:
    registry = Registry()
    for path in options.vocab or (str(corpus_dir() / "iff.vocab"),):
        load_vocabulary(path, registry)
    return registry


def model_text(m: Any) -> str:
    if isinstance(m, frozenset):
        return "{" + " ".join(sorted(m)) + "}"
    return str(m)


@click.group()
@click.option(
    "--depth",
    type=click.IntRange(min=0),
    default=options.depth,
    show_default=True,
    help="Maximum depth of enumerated terms and sentences.",
)
@click.option(
    "--model-bound",
    type=click.IntRange(min=0),
    default=options.model_bound,
    show_default=True,
    help="Maximum carrier size (or atom count) of enumerated models.",
)
@click.option(
    "--cocone-bound",
    type=click.IntRange(min=0),
    default=options.cocone_bound,
    show_default=True,
    help="Maximum apex size when checking universal properties.",
)
@click.option(
    "--strict",
    is_flag=True,
    help="Treat non-compliance, orphans and inconsistent fusions as failures.",
)
@click.option(
    "--verbose",
    is_flag=True,
    help="Print diagnostic information.",
)
@click.option(
    "--log",
    is_flag=True,
    help=f"Write a log to {TOOL_NAME}.log.",
)
@click.option(
    "--vocab",
    multiple=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Vocabulary file to load (repeatable); defaults to the bundled iff.vocab.",
)
@click.option(
    "--use-multiprocessing/--no-use-multiprocessing",
    default=False,
    hidden=True,
    help="Whether to run verification suites in separate processes.",
)
@click.version_option(
    version=importlib.metadata.version(TOOL_NAME),
    prog_name=TOOL_NAME,
)
def main(
    depth: int,
    model_bound: int,
    cocone_bound: int,
    strict: bool,
    verbose: bool,
    log: bool,
    vocab: tuple[str, ...],
    use_multiprocessing: bool,
) -> None:
    """Parses, checks and integrates IFF ontology sources."""
    setup_logging(log, verbose)
    debug_print_set_level(verbose)
    options.depth = depth
    options.model_bound = model_bound
    options.cocone_bound = cocone_bound
    options.strict = strict
    options.verbose = verbose
    options.log = log
    options.vocab = vocab
    options.use_multiprocessing = use_multiprocessing
    debug_print(options)


@main.command()
@click.argument("sources", nargs=-1, type=click.Path(exists=True))
@command_errors
def check(sources: tuple[str, ...]) -> None:
    """Parses sentence files, validates them and lints for categorical design."""
    paths = expand_sources(sources or (str(corpus_dir()),))
    if not paths:
        raise click.UsageError("no sentence files found")

    results = []
    for path in paths:
        sentences = parse_file(path)
        logger.info(f"{path}: {len(sentences)} sentences")
        results.append(reports.FileCheck(
            path,
            len(sentences),
            [issue for s in sentences for issue in validate(s)],
            lint_categorical_design(sentences),
        ))

    reports.print_table(reports.check_table(results))
    if any(r.issues for r in results) or (options.strict and any(r.compliance.ratio < 1 for r in results)):
        reports.print_table(reports.issues_table(results))
        raise DomainFailure("check failed")


@main.command()
@click.argument("prefixes", nargs=-1, required=True)
@command_errors
def resolve(prefixes: tuple[str, ...]) -> None:
    """Resolves surface prefixes (such as 'cat' or 'CAT') to namespaces."""
    registry = load_registry()
    resolved: dict[str, Namespace|str] = {}
    for prefix in prefixes:
        try:
            resolved[prefix] = registry.resolve(prefix)
        except RegistryError as e:
            logger.info(f"{prefix}: {e}")
            resolved[prefix] = type(e).__name__

    reports.print_table(reports.resolution_table(resolved))
    if any(isinstance(ns, str) for ns in resolved.values()):
        raise DomainFailure("unresolved prefixes")


@main.command()
@click.option(
    "--scan",
    multiple=True,
    metavar="PREFIX=FILE",
    help="Record the terms that FILE's sentences use, as axioms of namespace PREFIX.",
)
@click.option(
    "--canonical",
    is_flag=True,
    help="Print the vocabulary in canonical form instead of the tables.",
)
@command_errors
def report(scan: tuple[str, ...], canonical: bool) -> None:
    """Reports vocabulary counts per namespace and conceptual warrant."""
    registry = load_registry()
    for item in scan:
        prefix, sep, file = item.partition("=")
        if not sep or not prefix or not file:
            raise click.UsageError(f"--scan expects PREFIX=FILE, got '{item}'")
        n = scan_sentences(registry, registry.resolve(prefix), parse_file(file))
        logger.info(f"{file}: {n} term uses recorded for {prefix}")

    if canonical:
        click.echo(dump_vocabulary(registry), nl=False)
        return

    warrant = warrant_check(registry)
    reports.print_table(reports.vocabulary_table(registry))
    reports.print_table(reports.warrant_table(warrant))
    if options.strict and warrant.orphans:
        raise DomainFailure(f"{len(warrant.orphans)} orphan terms")


@main.command()
@click.argument("context", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--table",
    is_flag=True,
    help="Print a table instead of (concept ...) forms.",
)
@command_errors
def lattice(context: str, table: bool) -> None:
    """Computes the concept lattice of a classification file, in lectic order."""
    lat = concepts(load_classification_file(context))
    if table:
        reports.print_table(reports.concepts_table(lat))
    else:
        click.echo(dump_concepts(lat), nl=False)


@main.command("truth-lattice")
@click.argument("theory_file", type=click.Path(exists=True, dir_okay=False))
@command_errors
def truth_lattice_command(theory_file: str) -> None:
    """Builds the truth concept lattice at a theory file's signature.

    Tokens are the models within --model-bound, types the sentences up to --depth;
    the concept whose extent is the theory's model class is marked.
    """
    inst, theory = load_theory_file(theory_file)
    lat = truth_lattice(inst, theory.signature, options.depth, options.model_bound)
    theory_extent = frozenset(theory_models(inst, theory, options.model_bound))
    reports.print_table(reports.truth_table(lat, model_text, theory_extent))


@main.command()
@click.argument("language_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--check-laws",
    is_flag=True,
    help="Also check the category and substitution monad laws.",
)
@click.option(
    "--sample",
    type=click.IntRange(min=1),
    default=200,
    show_default=True,
    help="Composable triples sampled by --check-laws.",
)
@command_errors
def lawvere(language_file: str, check_laws: bool, sample: int) -> None:
    """Lists the bounded Lawvere category of each term language in a file."""
    laws = {}
    for lang_id, pres in sorted(load_languages_file(language_file).items()):
        fragment = lawvere_fragment(pres.language, options.depth)
        reports.print_table(reports.lawvere_table(fragment))
        if check_laws:
            laws[f"{lang_id} category"] = check_category_laws(fragment, sample=sample)
            laws[f"{lang_id} monad"] = check_term_monad_laws(pres.language, options.depth, sample=sample)

    if laws:
        reports.print_table(reports.law_table(laws, "Lawvere laws"))
        if not all(r.lawful for r in laws.values()):
            raise DomainFailure("law violations found")


@main.command()
@click.argument("alignment_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the fused theory here instead of to standard output.",
)
@click.option(
    "--provenance",
    type=click.Path(dir_okay=False, writable=True),
    help="Also write the provenance as a (provenance ...) form.",
)
@click.option(
    "--universal/--no-universal",
    default=False,
    help="Check the universal property of the fusion within --cocone-bound.",
)
@command_errors
def merge(alignment_file: str, output: str|None, provenance: str|None, universal: bool) -> None:
    """Fuses the theories of an alignment diagram by taking its colimit."""
    d = load_alignment_file(alignment_file)
    result = fuse(d, options.model_bound)
    text = dump_theory(d.inst, result.theory)

    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    if provenance:
        Path(provenance).write_text(dump_provenance(result), encoding="utf-8")
    reports.print_table(reports.provenance_table(result))

    if universal and not verify_fusion_universal(d, result, options.cocone_bound):
        raise DomainFailure("fusion is not universal")
    if options.strict and not result.consistent:
        raise DomainFailure(f"fused theory {result.theory.id} is inconsistent")


@main.command()
@click.argument("suites", nargs=-1, type=click.Choice(sorted(SUITES)))
@click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    help="Seed for the randomized cases.",
)
@click.option(
    "--cases",
    type=click.IntRange(min=1),
    default=50,
    show_default=True,
    help="Randomized cases per property.",
)
@command_errors
def verify(suites: tuple[str, ...], seed: int, cases: int) -> None:
    """Runs the property suites (all of them by default)."""
    config = SuiteConfig(
        depth=options.depth,
        model_bound=options.model_bound,
        cocone_bound=options.cocone_bound,
        seed=seed,
        cases=cases,
        corpus=str(corpus_dir()),
    )
    results = run_suites(suites or SUITES, config, options.use_multiprocessing)
    reports.print_table(reports.suites_table(results))
    if not all(r.passed for r in results):
        raise DomainFailure("verification failed")
