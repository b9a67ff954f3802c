from fractions import Fraction

from hypothesis import settings, strategies as st

from padicbij.padic import PAdic

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")

PRIMES = (2, 3, 5, 7)

nonzero_ints = st.integers(-10 ** 6, 10 ** 6).filter(bool)
rationals = st.builds(Fraction, st.integers(-10 ** 6, 10 ** 6),
                      st.integers(1, 10 ** 4))
nonzero_rationals = rationals.filter(bool)


def P(p, x):
    return PAdic(p, Fraction(x))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
