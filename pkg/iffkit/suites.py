"""Property suites run by `iffkit verify`, one per module.

Each suite is a top-level function of a `SuiteConfig` returning a `LawReport`,
so suites can be dispatched to worker processes.
"""
import concurrent.futures
import itertools
import logging
import random
import time
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path

from iffkit.cat_engine import (
    ConeKind,
    Diagram,
    FinGraph,
    FinSetMap,
    FinSetObj,
    check_category_laws,
    colimit,
    finset_category,
    limit,
    pullback_diagram,
    pushout_diagram,
    verify_universal_property,
)
from iffkit.iffkit_types import LawReport
from iffkit.iffkit_utils import corpus_dir, expand_sources, powerset
from iffkit.ifca import Classification, check_lattice_laws, concepts, extent, intent
from iffkit.institution import (
    EQN,
    EQN_TO_FOL,
    PROP,
    TINYFOL,
    check_institution_morphism,
    check_reduct_functoriality,
    check_satisfaction_condition,
    check_theory_lattice,
    check_translation_functoriality,
    lattice_of_theories,
)
from iffkit.integrate import fuse, load_alignment_file, verify_fusion_universal
from iffkit.metalang import (
    And,
    Application,
    Atom,
    Binding,
    Constant,
    Equal,
    Exists,
    Forall,
    Iff,
    Implies,
    MetaSentence,
    MetaTerm,
    Not,
    Or,
    QualifiedName,
    Tuple,
    Variable,
    lint_categorical_design,
    parse_file,
    parse_sentence,
    print_canonical,
)
from iffkit.metastack import (
    LeveledFunction,
    LeveledRelation,
    LeveledSet,
    check_kernel,
    is_abridgment,
    is_restriction,
    is_subobject,
    specialize,
)
from iffkit.registry import Metalevel, dump_vocabulary, load_vocabulary, parse_vocabulary, vocabulary_report
from iffkit.sexpr import SList, expect_list, read_one
from iffkit.termlang import (
    Term,
    TermLanguage,
    TermLanguageMorphism,
    TermTuple,
    apply_morphism,
    check_term_monad_laws,
    compose_morphisms,
    identity_morphism,
    lawvere_fragment,
    substitute,
    terms,
)

logger = logging.getLogger("iffkit")

UR_COUNTS = {"sets": 6, "functions": 16, "relations": 8, "total": 30}


@dataclass(eq=True, frozen=True)
class SuiteConfig:
    depth: int = 2
    model_bound: int = 3
    cocone_bound: int = 4
    seed: int = 0
    cases: int = 50
    corpus: str = ""

    @property
    def corpus_path(self) -> Path:
        return Path(self.corpus) if self.corpus else corpus_dir()


@dataclass
class SuiteResult:
    name: str
    report: LawReport = field(default_factory=LawReport)
    seconds: float = 0.0
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and self.report.lawful


# --- generators ---

_NAMES = ("object", "ur:thing", "vlrg.set:collection", "lrg.cat:category", "SET.LIM.PBK:pullback", "f-2")
# keywords are ordinary names in term position
_TERM_NAMES = _NAMES + ("and", "forall", "not")
_VARIABLES = ("?x", "?y", "?c2")


def random_term(rng: random.Random, depth: int) -> MetaTerm:
    match rng.randrange(4) if depth > 0 else rng.randrange(2):
        case 0:
            return Variable(rng.choice(_VARIABLES))
        case 1:
            return Constant(QualifiedName.parse(rng.choice(_TERM_NAMES)))
        case 2:
            return Application(QualifiedName.parse(rng.choice(_TERM_NAMES)),
                               tuple(random_term(rng, depth - 1) for _ in range(rng.randint(1, 3))))
    return Tuple(tuple(random_term(rng, depth - 1) for _ in range(rng.randint(0, 3))))


def _random_binding(rng: random.Random, depth: int) -> Binding:
    var = rng.choice(_VARIABLES)
    extra = tuple(random_term(rng, depth - 1) for _ in range(rng.randint(0, 1)))
    return Binding(var, Atom(QualifiedName.parse(rng.choice(_NAMES)), (Variable(var), *extra)))


def random_sentence(rng: random.Random, depth: int) -> MetaSentence:
    """A random AST whose sentence nesting is at most `depth`."""
    name = QualifiedName.parse(rng.choice(_NAMES))
    if depth <= 1:
        if rng.random() < 0.5:
            return Atom(name, tuple(random_term(rng, 1) for _ in range(rng.randint(0, 3))))
        return Equal(random_term(rng, 1), random_term(rng, 1))

    def sub() -> MetaSentence:
        return random_sentence(rng, rng.randint(1, depth - 1))

    match rng.randrange(9):
        case 0:
            return Atom(name, tuple(random_term(rng, depth - 1) for _ in range(rng.randint(0, 3))))
        case 1:
            return Equal(random_term(rng, depth - 1), random_term(rng, depth - 1))
        case 2:
            return Not(sub())
        case 3:
            return And(tuple(sub() for _ in range(rng.randint(0, 3))))
        case 4:
            return Or(tuple(sub() for _ in range(rng.randint(0, 3))))
        case 5:
            return Implies(sub(), sub())
        case 6:
            return Iff(sub(), sub())
    bindings = tuple(_random_binding(rng, depth - 1) for _ in range(rng.randint(1, 2)))
    return (Forall if rng.random() < 0.5 else Exists)(bindings, sub())


def sentence_depth(s: MetaSentence) -> int:
    match s:
        case Atom() | Equal():
            return 1
        case Not(body):
            return 1 + sentence_depth(body)
        case And(parts) | Or(parts):
            return 1 + max(map(sentence_depth, parts), default=0)
        case Implies(lhs, rhs) | Iff(lhs, rhs):
            return 1 + max(sentence_depth(lhs), sentence_depth(rhs))
        case Forall(bindings, body) | Exists(bindings, body):
            return 1 + max(sentence_depth(body), *(sentence_depth(b.guard) for b in bindings))
    raise TypeError(f"not a sentence: {s!r}")


# --- suites ---

def metalang_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()
    for path in expand_sources([str(config.corpus_path)]):
        for s in parse_file(path):
            report.checked += 1
            text = print_canonical(s)
            if parse_sentence(text) != s or print_canonical(parse_sentence(text)) != text:
                report.add("round-trip", f"{path.name}: {text[:60]}")

    rng = random.Random(config.seed)
    for _ in range(config.cases * 4):
        report.checked += 1
        s = random_sentence(rng, 6)
        text = print_canonical(s)
        if parse_sentence(text) != s:
            report.add("round-trip", text[:60])

    category_code = lint_categorical_design(parse_file(config.corpus_path / "cat.iff"))
    if category_code.ratio != 1.0:
        report.add("categorical-design", f"category code is {category_code.ratio:.0%} compliant")
    metashell_code = lint_categorical_design(parse_file(config.corpus_path / "set-metashell.iff"))
    if metashell_code.compliant_count:
        report.add("categorical-design", "metashell code passed the lint")
    return report


def registry_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()
    ur = load_vocabulary(config.corpus_path / "ur.vocab")
    counts = vocabulary_report(ur, (Metalevel.UR, ("ur",))).as_dict()
    report.checked += 1
    if counts != UR_COUNTS:
        report.add("vocabulary-counts", f"{counts}")
    for problem in check_kernel(ur):
        report.add("kernel", problem)

    for name in ("ur.vocab", "iff.vocab"):
        report.checked += 1
        text = dump_vocabulary(load_vocabulary(config.corpus_path / name))
        if dump_vocabulary(parse_vocabulary(text)) != text:
            report.add("canonical-dump", name)
    return report


def _random_subset(rng: random.Random, items: Iterable[str]) -> frozenset[str]:
    return frozenset(x for x in items if rng.random() < 0.6)


def metastack_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()
    rng = random.Random(config.seed)
    for _ in range(config.cases):
        report.checked += 1
        level = Metalevel(rng.randint(Metalevel.LRG, Metalevel.UR))
        a = LeveledSet(level, frozenset(f"a{i}" for i in range(rng.randint(1, 6))))
        b = LeveledSet(level, frozenset(f"b{i}" for i in range(rng.randint(1, 6))))
        f = LeveledFunction.of(level, a, b, {x: rng.choice(sorted(b.elements)) for x in a.elements})
        r = LeveledRelation(level, a, b, frozenset(p for p in itertools.product(a.elements, b.elements)
                                                   if rng.random() < 0.4))

        sub = _random_subset(rng, a.elements)
        lower_set = specialize(a, sub)
        assert isinstance(lower_set, LeveledSet)
        if not is_subobject(lower_set, a):
            report.add("subset", f"{sorted(sub)}")

        source = _random_subset(rng, a.elements)
        target = {f(x) for x in source} | _random_subset(rng, b.elements)
        lower_f = specialize(f, source, target)
        assert isinstance(lower_f, LeveledFunction)
        if not is_restriction(lower_f, f):
            report.add("restriction", f"{sorted(source)} -> {sorted(target)}")

        left, right = _random_subset(rng, a.elements), _random_subset(rng, b.elements)
        lower_r = specialize(r, left, right)
        assert isinstance(lower_r, LeveledRelation)
        if not is_abridgment(lower_r, r):
            report.add("abridgment", f"{sorted(left)} x {sorted(right)}")
        if lower_r.extent:
            dropped = LeveledRelation(lower_r.level, lower_r.left, lower_r.right,
                                      lower_r.extent - {min(lower_r.extent)})
            if is_abridgment(dropped, r):
                report.add("abridgment", "a one-pair mutation still abridges")
    return report


def _random_map(rng: random.Random, a: FinSetObj, b: FinSetObj) -> FinSetMap:
    return FinSetMap.of(a, b, {x: rng.choice(list(b)) for x in a})


def _random_set(rng: random.Random, name: str, low: int = 1, high: int = 3) -> FinSetObj:
    return FinSetObj(frozenset(f"{name}{i}" for i in range(rng.randint(low, high))))


def random_diagram(rng: random.Random, max_nodes: int = 4, max_carrier: int = 4) -> Diagram:
    nodes = [f"n{i}" for i in range(rng.randint(1, max_nodes))]
    objects = {n: FinSetObj(frozenset(range(rng.randint(1, max_carrier)))) for n in nodes}
    edges = {f"e{i}": (rng.choice(nodes), rng.choice(nodes)) for i in range(rng.randint(0, max_nodes))}
    maps = {e: _random_map(rng, objects[s], objects[t]) for e, (s, t) in edges.items()}
    return Diagram(FinGraph.of(nodes, edges), objects, maps)


def component_count(d: Diagram) -> int:
    """Connected components of the disjoint union, by breadth-first search."""
    adjacent: dict[tuple, set[tuple]] = {(n, x): set() for n in d.shape.nodes for x in d.objects[n]}
    for e in d.shape.edges:
        s, t = d.shape.src[e], d.shape.tgt[e]
        for x in d.objects[s]:
            adjacent[(s, x)].add((t, d.maps[e](x)))
            adjacent[(t, d.maps[e](x))].add((s, x))
    seen: set[tuple] = set()
    count = 0
    for start in adjacent:
        if start in seen:
            continue
        count += 1
        frontier = [start]
        while frontier:
            v = frontier.pop()
            if v not in seen:
                seen.add(v)
                frontier.extend(adjacent[v])
    return count


def cat_engine_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()
    rng = random.Random(config.seed)
    bound = min(config.cocone_bound, 4)
    # ten diagrams per case: 500 at the default case count
    for _ in range(config.cases * 10):
        report.checked += 1
        d = random_diagram(rng)
        cocone = colimit(d)
        if len(cocone.apex) != component_count(d):
            report.add("colimit-classes", f"{len(cocone.apex)} classes, {component_count(d)} components")
        if not verify_universal_property(d, cocone.apex, cocone.legs, ConeKind.COLIMIT, bound):
            report.add("colimit", f"{len(d.shape.nodes)} nodes")
        cone = limit(d)
        if not verify_universal_property(d, cone.apex, cone.legs, ConeKind.LIMIT, bound):
            report.add("limit", f"{len(d.shape.nodes)} nodes")

    for _ in range(config.cases):
        report.checked += 1
        a, b, c = (_random_set(rng, n) for n in "abc")
        span = pushout_diagram(_random_map(rng, a, b), _random_map(rng, a, c))
        cocone = colimit(span)
        if not verify_universal_property(span, cocone.apex, cocone.legs, ConeKind.COLIMIT, bound):
            report.add("colimit", f"{a} {b} {c}")
        cospan = pullback_diagram(_random_map(rng, b, a), _random_map(rng, c, a))
        cone = limit(cospan)
        if not verify_universal_property(cospan, cone.apex, cone.legs, ConeKind.LIMIT, bound):
            report.add("limit", f"{a} {b} {c}")

    category = finset_category([FinSetObj.of(0), FinSetObj.of(0, 1)])
    laws = check_category_laws(category)
    report.violations.extend(laws.violations)
    report.checked += laws.checked
    return report


SMALL_VARIABLES = ("x", "y")


def small_term_languages(max_symbols: int = 2) -> Iterator[TermLanguage]:
    """Every language over at most two variables with at most `max_symbols` symbols,
    up to renaming of the symbols."""
    for n in range(len(SMALL_VARIABLES) + 1):
        variables = SMALL_VARIABLES[:n]
        arities = list(powerset(variables))
        for k in range(max_symbols + 1):
            for chosen in itertools.combinations_with_replacement(arities, k):
                arity = {f"f{i}": a for i, a in enumerate(chosen)}
                yield TermLanguage.of(variables, arity, f"v{n}-" + "-".join(str(len(a)) for a in chosen))


def random_language_morphism(rng: random.Random, source: TermLanguage) -> TermLanguageMorphism:
    """A morphism out of `source` into a random target that may merge symbols or add one."""
    names = sorted(source.variables)
    fresh = [f"v{i}" for i in range(len(names))]
    var_map = dict(zip(names, rng.sample(fresh, len(fresh))))

    arity: dict[str, frozenset[str]] = {}
    sym_map = {}
    for f in sorted(source.symbols):
        image = frozenset(var_map[v] for v in source.arity[f])
        same = [g for g, a in sorted(arity.items()) if a == image]
        if same and rng.random() < 0.5:
            sym_map[f] = rng.choice(same)
        else:
            sym_map[f] = f"g{len(arity)}"
            arity[sym_map[f]] = image
    if rng.random() < 0.5:
        arity[f"g{len(arity)}"] = frozenset(v for v in fresh if rng.random() < 0.5)
    return TermLanguageMorphism.of(source, TermLanguage.of(fresh, arity), var_map, sym_map)


def _random_tuple(rng: random.Random, candidates: list[Term], variables: frozenset[str]) -> TermTuple:
    return TermTuple.of(variables, {v: rng.choice(candidates) for v in variables})


def check_morphism_functoriality(rng: random.Random, m: TermLanguageMorphism, depth: int,
                                 samples: int = 5) -> LawReport:
    """apply_morphism respects identities, composition and substitution."""
    report = LawReport()
    source = m.source
    candidates = terms(source, source.variables, depth)
    if not candidates:
        return report
    n = random_language_morphism(rng, m.target)
    identity = identity_morphism(source)
    nm = compose_morphisms(n, m)
    for _ in range(samples):
        report.checked += 1
        t = rng.choice(candidates)
        s = _random_tuple(rng, candidates, source.variables)
        if apply_morphism(identity, t) != t:
            report.add("morphism-identity", f"{t}")
        if apply_morphism(nm, t) != apply_morphism(n, apply_morphism(m, t)):
            report.add("morphism-composition", f"{t}")
        if apply_morphism(m, substitute(t, s)) != substitute(apply_morphism(m, t), apply_morphism(m, s)):
            report.add("morphism-substitution", f"{t} with {s}")
    return report


def termlang_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()

    def merge(sub: LawReport) -> None:
        report.violations.extend(sub.violations)
        report.checked += sub.checked

    depth = min(config.depth, 2)
    languages = list(small_term_languages())
    for lang in languages:
        # associativity triples are enumerated in full at depth 1 and sampled beyond
        merge(check_term_monad_laws(lang, min(depth, 1)))
        if depth > 1:
            merge(check_term_monad_laws(lang, depth, sample=config.cases * 4, seed=config.seed))
        merge(check_category_laws(lawvere_fragment(lang, depth), sample=config.cases * 4, seed=config.seed))

    rng = random.Random(config.seed)
    for _ in range(100):
        m = random_language_morphism(rng, rng.choice(languages))
        merge(check_morphism_functoriality(rng, m, depth))
    return report


def _brute_concepts(c: Classification) -> set[tuple[frozenset, frozenset]]:
    return {(extent(c, intent(c, a)), intent(c, a)) for a in powerset(c.tokens)}


def ifca_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()
    rng = random.Random(config.seed)
    for _ in range(config.cases):
        report.checked += 1
        tokens = [f"g{i}" for i in range(rng.randint(0, 5))]
        types = [f"m{i}" for i in range(rng.randint(0, 5))]
        incidence = [(g, m) for g in tokens for m in types if rng.random() < 0.5]
        c = Classification.of(tokens, types, incidence)
        lattice = concepts(c)
        if {(k.extent, k.intent) for k in lattice} != _brute_concepts(c):
            report.add("next-closure", f"{incidence}")
        laws = check_lattice_laws(lattice)
        report.violations.extend(laws.violations)
    return report


def institution_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()

    def merge(sub: LawReport) -> None:
        report.violations.extend(sub.violations)
        report.checked += sub.checked

    pq, r = frozenset({"p", "q"}), frozenset({"r", "s"})
    for sigma in PROP.morphisms(pq, r):
        merge(check_satisfaction_condition(PROP, sigma, min(config.depth, 2), 0))
    sigma = next(PROP.morphisms(pq, r))
    tau = next(PROP.morphisms(r, pq))
    merge(check_translation_functoriality(PROP, sigma, tau, 1))
    merge(check_reduct_functoriality(PROP, sigma, tau, 0))

    bound = min(config.model_bound, 3)
    unary = TermLanguage.of(("x",), {"s": ("x",), "c": ()}, "unary")
    renamed = TermLanguage.of(("y",), {"t": ("y",), "d": ()}, "renamed")
    for sigma in EQN.morphisms(unary, renamed):
        merge(check_satisfaction_condition(EQN, sigma, 1, bound))
    merge(check_institution_morphism(EQN_TO_FOL, [unary], 1, min(bound, 2)))

    fol = TINYFOL.load_signature(_fol_signature())
    for sigma in TINYFOL.morphisms(fol, fol):
        merge(check_satisfaction_condition(TINYFOL, sigma, 1, min(bound, 2)))

    lattice = lattice_of_theories(PROP, pq, 2)
    report.checked += 1
    if len(lattice) != 16:
        report.add("lattice-of-theories", f"{len(lattice)} closed theories over {{p, q}}")
    merge(check_theory_lattice(lattice))
    return report


def _fol_signature() -> SList:
    return expect_list(read_one("(signature (vars x) (function f (arity x)) (relation r (arity x)))"))


def integrate_suite(config: SuiteConfig) -> LawReport:
    report = LawReport()
    d = load_alignment_file(config.corpus_path / "span.align")
    result = fuse(d, config.model_bound)
    report.checked += 1
    if result.theory.signature != frozenset({"p", "q", "r"}):
        report.add("fusion", f"fused atoms {sorted(result.theory.signature)}")
    axioms = {PROP.sentence_text(a) for a in result.theory.axioms}
    if axioms != {"p", "(implies q r)"}:
        report.add("fusion", f"fused axioms {sorted(axioms)}")
    if not verify_fusion_universal(d, result, config.cocone_bound):
        report.add("fusion-universal", f"bound {config.cocone_bound}")
    return report


SUITES: dict[str, Callable[[SuiteConfig], LawReport]] = {
    "cat-engine": cat_engine_suite,
    "ifca": ifca_suite,
    "institution": institution_suite,
    "integrate": integrate_suite,
    "metalang": metalang_suite,
    "metastack": metastack_suite,
    "registry": registry_suite,
    "termlang": termlang_suite,
}


def run_suite(args: tuple[str, SuiteConfig]) -> SuiteResult:
    name, config = args
    start = time.perf_counter()
    try:
        report = SUITES[name](config)
    except Exception as e:
        logger.exception(f"suite {name} failed")
        return SuiteResult(name, error=f"{type(e).__name__}: {e}", seconds=time.perf_counter() - start)
    return SuiteResult(name, report, time.perf_counter() - start)


def run_suites(names: Iterable[str], config: SuiteConfig, use_multiprocessing: bool = False) -> list[SuiteResult]:
    """Runs the named suites; results are ordered by suite name."""
    args = [(name, config) for name in sorted(names)]

    def results() -> Iterator[SuiteResult]:
        if use_multiprocessing:
            with concurrent.futures.ProcessPoolExecutor() as executor:
                yield from executor.map(run_suite, args)
        else:
            yield from map(run_suite, args)

    return sorted(results(), key=lambda r: r.name)
