import pytest

from dsmlab import Parameter, classify, immediate_basin_arcs, markov_partition

# the symmetric period-1 benchmark parameter and a period-2 one near the ceiling
P_SYM = Parameter(0.5, 0.75)
P_TWO = Parameter(0.1028001817, 0.98)


@pytest.fixture(scope="session")
def sym_cycle():
    cls = classify(P_SYM, 5)
    assert cls.cycle is not None
    return cls.cycle


@pytest.fixture(scope="session")
def sym_partition(sym_cycle):
    return markov_partition(P_SYM, immediate_basin_arcs(P_SYM, sym_cycle))


@pytest.fixture(scope="session")
def two_cycle():
    cls = classify(P_TWO, 8)
    assert cls.cycle is not None and cls.cycle.q == 2
    return cls.cycle


@pytest.fixture(scope="session")
def two_partition(two_cycle):
    return markov_partition(P_TWO, immediate_basin_arcs(P_TWO, two_cycle))
