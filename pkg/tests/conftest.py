import pytest

from lricnet import OutShareQuota, ingest_edges

# Two hand-sized lending networks used across the suite.  The first is a
# 10-node net with one dominant intermediary; the second is an 11-node
# bow-tie: nine lenders of equal volume, two pure borrowers (5 and 11).
EX1_EDGES = [
    ("1", "2", 500), ("1", "3", 100), ("1", "5", 400),
    ("2", "3", 40), ("2", "6", 100), ("2", "9", 60),
    ("3", "6", 150),
    ("4", "6", 50), ("4", "3", 10),
    ("5", "6", 700), ("5", "7", 200), ("5", "8", 200),
    ("7", "9", 600), ("7", "10", 250), ("7", "4", 150),
    ("8", "10", 150),
]

EX2_EDGES = [
    ("1", "2", 60), ("1", "3", 16), ("1", "4", 24),
    ("2", "5", 6), ("2", "6", 70), ("2", "8", 24),
    ("3", "2", 24), ("3", "4", 60), ("3", "5", 16),
    ("4", "5", 10), ("4", "7", 66), ("4", "9", 24),
    ("6", "10", 24), ("6", "11", 76),
    ("7", "10", 24), ("7", "11", 76),
    ("8", "10", 24), ("8", "11", 76),
    ("9", "10", 24), ("9", "11", 76),
    ("10", "1", 100),
]


@pytest.fixture(scope="session")
def ex1():
    return ingest_edges(EX1_EDGES)


@pytest.fixture(scope="session")
def ex2():
    return ingest_edges(EX2_EDGES)


@pytest.fixture(scope="session")
def quarter():
    return OutShareQuota(0.25)


def write_edges_csv(path, edges):
    lines = ["from,to,weight"]
    lines += [f"{a},{b},{w}" for a, b, w in edges]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
