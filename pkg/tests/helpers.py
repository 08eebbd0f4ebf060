"""Shortcuts for building instances inline in tests."""

from ringform.core import Configuration, Instance, RequirementSpec


def make_p1(config: str, k: int, p: int, rows) -> Instance:
    spec = RequirementSpec.exact(rows, p)
    return Instance(spec=spec, initial=Configuration.from_string(config, k, p, len(rows)))


def make_p2(config: str, k: int, p: int, rows) -> Instance:
    spec = RequirementSpec.lower_bound(rows, p)
    return Instance(spec=spec, initial=Configuration.from_string(config, k, p, len(rows)))


def make_p3(config: str, k: int, p: int, patterns, q: int = 2) -> Instance:
    spec = RequirementSpec.for_patterns(patterns, q)
    return Instance(spec=spec, initial=Configuration.from_string(config, k, p, q))
