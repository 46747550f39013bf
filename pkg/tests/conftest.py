import pytest

from conelab import dec, generators


@pytest.fixture(scope="session")
def t3_n4():
    return generators.freudenthal_torus(3, 4)


@pytest.fixture(scope="session")
def s2_sub2():
    return generators.icosphere(2)


@pytest.fixture(scope="session")
def s2xs1():
    return generators.simplicial_product(generators.icosphere(1), generators.circle(8))


@pytest.fixture(scope="session")
def s3():
    return generators.simplex_sphere(3)


@pytest.fixture(scope="session")
def s5():
    return generators.simplex_sphere(5)


@pytest.fixture(scope="session")
def hodge_t3(t3_n4):
    return dec.build_hodge(t3_n4)


@pytest.fixture(scope="session")
def hodge_s2(s2_sub2):
    return dec.build_hodge(s2_sub2)


@pytest.fixture(scope="session")
def hodge_s2xs1(s2xs1):
    return dec.build_hodge(s2xs1)


@pytest.fixture(scope="session")
def hodge_s3(s3):
    return dec.build_hodge(s3)


@pytest.fixture(scope="session")
def hodge_s5(s5):
    return dec.build_hodge(s5)
