"""Shared registry of acceptance results, printed by the terminal summary hook."""

RESULTS = {}


def record(name: str, passed: bool, detail: str = "") -> None:
    RESULTS[name] = (passed, detail)
