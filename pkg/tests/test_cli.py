import subprocess
import sys
import textwrap
from pathlib import Path

import pytest

from iffkit.iffkit_utils import corpus_dir
from iffkit.suites import SuiteConfig, run_suites


@pytest.fixture
def tmp_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    yield tmp_path


def iffkit(*args, check=False):
    return subprocess.run([sys.executable, '-m', 'iffkit', *map(str, args)],
                          capture_output=True, text=True, check=check)


def test_version():
    out = iffkit('--version', check=True).stdout
    assert out.startswith("iffkit, version ")


def test_check_corpus(tmp_cwd):
    corpus = corpus_dir()
    out = iffkit('check', corpus / "ur.iff", corpus / "cat.iff", check=True).stdout
    assert "cat.iff" in out
    assert "100.00%" in out


def test_check_strict_fails_on_metashell_code(tmp_cwd):
    p = iffkit('--strict', 'check', corpus_dir() / "set-metashell.iff")
    assert p.returncode == 1
    assert "categorical-design" in p.stdout


def test_check_open_sentence(tmp_cwd):
    Path("open.iff").write_text("(collection ?c)\n")
    p = iffkit('check', 'open.iff')
    assert p.returncode == 1
    assert "open-sentence" in p.stdout


def test_check_parse_error(tmp_cwd):
    Path("bad.iff").write_text("(collection\n  (class)\n")
    p = iffkit('check', 'bad.iff')
    assert p.returncode == 2
    assert "iffkit: error:" in p.stderr


def test_usage_error(tmp_cwd):
    assert iffkit('--depth', '-1', 'check').returncode == 2


def test_resolve(tmp_cwd):
    out = iffkit('resolve', 'cat', 'CAT', '3.ftn', check=True).stdout
    assert "lrg.cat" in out
    assert "vlrg.ftn" in out

    p = iffkit('resolve', 'cat', 'xyz')
    assert p.returncode == 1
    assert "UnknownPrefix" in p.stdout


def test_report_counts(tmp_cwd):
    out = iffkit('--vocab', corpus_dir() / "ur.vocab", 'report', check=True).stdout
    row = next(line for line in out.splitlines() if "ur.ur" in line)
    assert [cell.strip() for cell in row.split("│")[1:6]] == ["ur.ur", "6", "16", "8", "30"]


def test_report_canonical(tmp_cwd):
    out = iffkit('report', '--canonical', check=True).stdout
    assert "namespace lrg cat special=CAT" in out.splitlines()


def test_report_scan(tmp_cwd):
    Path("uses.iff").write_text("(= (object category) category)\n")
    iffkit('report', '--scan', 'lrg.cat=uses.iff', check=True)
    assert iffkit('report', '--scan', 'nonsense', check=False).returncode == 2


def test_lattice(tmp_cwd):
    out = iffkit('lattice', corpus_dir() / "diamond.ctx", check=True).stdout
    assert out.splitlines() == [
        "(concept (extent) (intent t1 t2))",
        "(concept (extent b) (intent t2))",
        "(concept (extent a) (intent t1))",
        "(concept (extent a b) (intent))",
    ]


def test_truth_lattice(tmp_cwd):
    out = iffkit('--depth', '1', 'truth-lattice', corpus_dir() / "t1.thy", check=True).stdout
    assert "theory" in out
    assert "{p}" in out


def test_lawvere(tmp_cwd):
    Path("unary.trm").write_text("(term-language unary (vars x) (symbol s (arity x)))\n")
    out = iffkit('--depth', '1', 'lawvere', 'unary.trm', '--check-laws', check=True).stdout
    assert "law(unary) to depth 1" in out
    assert "unary category" in out


def test_merge(tmp_cwd):
    align = corpus_dir() / "span.align"
    iffkit('merge', align, '-o', 'fused.thy', '--provenance', 'prov.sexp', check=True)
    first = Path("fused.thy").read_text()
    iffkit('merge', align, '-o', 'fused.thy', check=True)
    assert Path("fused.thy").read_text() == first

    assert first == textwrap.dedent("""\
        (theory span
          (institution prop)
          (signature p q r)
          (axioms
            (implies q r)
            p))
        """)
    assert "(q (t0 q) (t1 q) (t2 q))" in Path("prov.sexp").read_text()


def test_merge_universal(tmp_cwd):
    iffkit('--cocone-bound', '3', 'merge', corpus_dir() / "span.align", '--universal', check=True)


def test_verify(tmp_cwd):
    out = iffkit('verify', 'metalang', 'registry', check=True).stdout
    assert "metalang" in out and "registry" in out
    assert "FAIL" not in out


def test_run_suites_orders_by_name():
    results = run_suites(["registry", "metalang"], SuiteConfig())
    assert [r.name for r in results] == ["metalang", "registry"]
    assert all(r.passed for r in results)
