"""Collects one summary line per acceptance criterion for the terminal report."""

LINES: dict[int, str] = {}


def record(number: int, passed: bool, title: str, seconds: float, limit: float | None):
    budget = f" (limit {limit:g}s)" if limit else ""
    LINES[number] = (f"{'PASS' if passed else 'FAIL'} criterion {number}: {title} "
                     f"[{seconds:.1f}s{budget}]")
    print(LINES[number])
