import numpy as np
import pytest

from arbqubo import RateMatrix

FIG1_LABELS = ("USD", "EUR", "GBP")
FIG1_FORWARD = {("USD", "EUR"): 0.85, ("EUR", "GBP"): 1.17, ("GBP", "USD"): 1.40}


def fig1_rates() -> RateMatrix:
    """The three-currency triangle with reciprocal reverse edges."""
    n = len(FIG1_LABELS)
    rate = np.ones((n, n))
    for (a, b), value in FIG1_FORWARD.items():
        i, j = FIG1_LABELS.index(a), FIG1_LABELS.index(b)
        rate[i, j] = value
        rate[j, i] = 1.0 / value
    return RateMatrix(labels=FIG1_LABELS, rate=rate)


def fig1_csv_bytes() -> bytes:
    lines = ["from,to,rate"]
    for (a, b), value in FIG1_FORWARD.items():
        lines.append(f"{a},{b},{value}")
        lines.append(f"{b},{a},{1.0 / value!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


@pytest.fixture
def fig1():
    return fig1_rates()
