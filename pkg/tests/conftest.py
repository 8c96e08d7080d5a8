import pytest

from truncshor import FactoringInstance, build_orbit, synth_all_powers

# (base, control width) per modulus studied here.
CASES = {
    21: (2, 5),
    33: (7, 6),
    35: (4, 6),
    143: (5, 10),
    247: (2, 10),
}


@pytest.fixture(scope="session")
def instances():
    return {N: FactoringInstance(N=N, a=a, m=m) for N, (a, m) in CASES.items()}


@pytest.fixture(scope="session")
def orbits(instances):
    return {N: build_orbit(inst) for N, inst in instances.items()}


@pytest.fixture(scope="session")
def circuit_sets(orbits):
    """Untruncated circuits for p = 2^0 .. 2^(m-1), per modulus."""
    return {N: synth_all_powers(orbits[N], CASES[N][1]) for N in CASES}
