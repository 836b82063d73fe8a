import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zerocalc.indexset import TruncatedIndexSet, member_keys  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "zerocalc" / "data"
FIXTURES = Path(__file__).parent / "fixtures"


def exact_set(points, cutoff=float("inf")) -> TruncatedIndexSet:
    """Exact-mode set from (re, im, k) triples given as ints/strings/Fractions."""
    pts = [(Fraction(r), Fraction(i), int(k)) for r, i, k in points]
    return TruncatedIndexSet.from_points(pts, cutoff if cutoff == float("inf") else Fraction(cutoff), tol=0.0)


def keys(E, C) -> set:
    return {(Fraction(r), Fraction(i), k) for r, i, k in member_keys(E, C)}


@pytest.fixture
def data_dir():
    return DATA
