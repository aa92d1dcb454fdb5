from pathlib import Path

import numpy as np
import pytest

from szego.schur import GammaField

GOLDEN = Path(__file__).parent / "golden"


def random_field(rng, size, max_mod=0.9, complex_=True, diag=(0.5, 2.0)):
    """Parameters uniform in the disk of radius ``max_mod`` (or the interval when real)."""
    if complex_:
        mod = max_mod * np.sqrt(rng.uniform(size=(size, size)))
        gam = mod * np.exp(2j * np.pi * rng.uniform(size=(size, size)))
    else:
        gam = rng.uniform(-max_mod, max_mod, size=(size, size))
    return GammaField(rng.uniform(*diag, size), np.triu(gam, 1))


def random_pd_matrix(rng, size, eps=0.1, complex_=True):
    a = rng.normal(size=(size, size))
    if complex_:
        a = a + 1j * rng.normal(size=(size, size))
    return a.conj().T @ a / size + eps * np.eye(size)


def decaying_field(size, diag=1.0):
    """``gamma[k, j] = (1/2) 3^(k - j)``: a Szego-class field."""
    return GammaField.from_function(lambda k, j: 0.5 * 3.0 ** (k - j), size, diag=diag)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, checks: list[tuple[str, bool, str]]) -> bool:
    """Store one verdict per criterion; ``checks`` holds ``(name, ok, measured)`` triples."""
    ok = all(c[1] for c in checks)
    detail = "; ".join(f"{name}: {'ok' if good else 'FAILED'} ({measured})" for name, good, measured in checks)
    ACCEPTANCE[number] = (ok, detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
