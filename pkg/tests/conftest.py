"""Brute-force oracles and hypothesis strategies shared by the test modules."""

import sys
from itertools import combinations, permutations, product

import pytest
from hypothesis import strategies as st

from fpplab.core import build_poset


def order_preserving(p, images):
    return all((p.up[images[i]] >> images[j]) & 1 for i, j in p.comparable_pairs)


def brute_fpp(p):
    n = len(p)
    for images in product(range(n), repeat=n):
        if all(images[i] != i for i in range(n)) and order_preserving(p, images):
            return False
    return True


def brute_retractions(p, subset):
    subset = sorted(subset)
    n = len(p)
    out = []
    for choice in product(subset, repeat=n):
        if all(choice[s] == s for s in subset) and order_preserving(p, choice):
            out.append(choice)
    return out


def brute_automorphisms(p):
    n = len(p)
    out = []
    for perm in permutations(range(n)):
        if all(bool((p.up[i] >> j) & 1) == bool((p.up[perm[i]] >> perm[j]) & 1) for i in range(n) for j in range(n)):
            out.append(perm)
    return out


def brute_width(p):
    n = len(p)
    for size in range(n, 0, -1):
        for sub in combinations(range(n), size):
            if p.is_antichain(sum(1 << e for e in sub)):
                return size
    return 0


@st.composite
def posets(draw, min_size=1, max_size=6):
    """Random posets: a random set of pairs compatible with a shuffled linear order, then closed."""
    n = draw(st.integers(min_size, max_size))
    order = draw(st.permutations(range(n)))
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            if draw(st.booleans()):
                pairs.append((f"e{order[a]}", f"e{order[b]}"))
    return build_poset([f"e{i}" for i in range(n)], pairs)


@pytest.fixture
def c4():
    return build_poset(["x0", "x1", "y0", "y1"], [("x0", "y0"), ("x1", "y0"), ("x1", "y1"), ("x0", "y1")])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
