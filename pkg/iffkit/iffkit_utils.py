import itertools
import logging
import os
from collections.abc import Hashable, Iterable, Iterator, Sequence
from pathlib import Path
from typing import Any, Final, TypeVar

from wcmatch import glob

TOOL_NAME: Final[str] = "iffkit"
CORPUS_ENV: Final[str] = "IFFKIT_CORPUS"
_DEBUG_PRINT: bool = False

logger = logging.getLogger("iffkit")

K = TypeVar("K", bound=Hashable)
V = TypeVar("V", bound=Hashable)


def debug_print(args: Any, *varargs: Any, **kwargs: Any) -> None:
    if _DEBUG_PRINT:
        print(__file__, args, *varargs, **kwargs)


def debug_print_set_level(level: bool) -> None:
    global _DEBUG_PRINT
    _DEBUG_PRINT = level


def sort_key(value: object) -> tuple[str, str]:
    """Total order over heterogeneous element ids; output ordering depends on it."""
    return type(value).__name__, repr(value)


def ordered(values: Iterable[K]) -> list[K]:
    return sorted(values, key=sort_key)


def powerset(values: Iterable[K]) -> Iterator[frozenset[K]]:
    """All subsets, by size and then in the order of `values`."""
    items = list(values)
    for n in range(len(items) + 1):
        for combo in itertools.combinations(items, n):
            yield frozenset(combo)


def all_maps(source: Sequence[K], target: Sequence[V]) -> Iterator[dict[K, V]]:
    """Every total assignment source -> target."""
    for images in itertools.product(target, repeat=len(source)):
        yield dict(zip(source, images))


def all_bijections(source: Sequence[K], target: Sequence[V]) -> Iterator[dict[K, V]]:
    if len(source) != len(target):
        return
    for images in itertools.permutations(target):
        yield dict(zip(source, images))


def corpus_dir() -> Path:
    """The sample corpus: $IFFKIT_CORPUS if set, else the bundled copy."""
    if env := os.environ.get(CORPUS_ENV):
        return Path(env)
    return Path(__file__).parent / "corpus"


def expand_sources(paths: Iterable[str], pattern: str = "**/*.iff") -> list[Path]:
    """Expands directories to the matching files below them; files pass through."""
    result: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            matches = glob.glob(pattern, root_dir=str(path), flags=glob.GLOBSTAR)
            result.extend(path / m for m in sorted(matches))
        else:
            result.append(path)
    return result
