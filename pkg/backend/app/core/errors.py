"""Planner exceptions. Each class carries its CLI exit code and HTTP status."""

from typing import Optional


class FoonError(Exception):
    exit_code: int = 1
    http_status: int = 500


class ParseError(FoonError):
    """Malformed subgraph, kitchen or profile input."""

    exit_code = 3
    http_status = 400

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        where = ""
        if self.source:
            where = f"{self.source}:"
        if self.line is not None:
            where += f"{self.line}:"
        return f"{where} {self.message}" if where else self.message

    def with_source(self, source: str) -> "ParseError":
        return type(self)(self.message, self.line, source)


class ProfileError(ParseError):
    pass


class MergeError(FoonError):
    exit_code = 4
    http_status = 400


class GoalNotProducible(FoonError):
    exit_code = 5
    http_status = 404


class ExpansionLimitExceeded(FoonError):
    exit_code = 6
    http_status = 422

    def __init__(self, message: str, stats: dict):
        self.stats = stats
        super().__init__(f"expansion limit exceeded: {message} (partial: {stats})")


class NoExecutableTree(FoonError):
    exit_code = 7
    http_status = 422


class PlanningFailure(FoonError):
    exit_code = 8
    http_status = 422


class DelegationError(FoonError):
    exit_code = 9
    http_status = 400


class NoEligibleTree(DelegationError):
    exit_code = 10
