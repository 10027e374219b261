"""Reference metric corpus shipped as metric files inside the package."""

from importlib import resources
from pathlib import Path

from .errors import InputError
from .metric import MetricSpec, parse_metric_file

CORPUS_NAMES = ("minkowski", "schwarzschild", "desitter-like", "sphere2")
_PREFIX = "corpus:"


def corpus_text(name: str) -> str:
    if name not in CORPUS_NAMES:
        raise InputError(f"unknown corpus metric {name!r}; choose from {', '.join(CORPUS_NAMES)}")
    return resources.files("curvedirac").joinpath("corpus").joinpath(f"{name}.metric").read_text(encoding="utf-8")


def load_corpus(name: str) -> MetricSpec:
    return parse_metric_file(corpus_text(name))


def load_metric(ref: str) -> MetricSpec:
    """Accept ``corpus:<name>`` or a filesystem path."""
    if ref.startswith(_PREFIX):
        return load_corpus(ref[len(_PREFIX):])
    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {ref}: {exc.strerror}") from exc
    return parse_metric_file(text)
