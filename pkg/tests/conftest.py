import pytest

import geometry


@pytest.fixture
def triangle():
    return geometry.single_triangle()


@pytest.fixture
def square():
    return geometry.flat_square()


@pytest.fixture
def tetra():
    return geometry.tetrahedron()


@pytest.fixture
def octa():
    return geometry.octahedron()


@pytest.fixture
def icosa():
    return geometry.icosahedron()


@pytest.fixture
def cube8():
    return geometry.unit_cube8()


@pytest.fixture(scope="session")
def cube16():
    return geometry.subdivided_cube(16)


@pytest.fixture(scope="session")
def sphere200():
    return geometry.uv_sphere(12, 18)


@pytest.fixture
def tent():
    return geometry.tent_mesh()


@pytest.fixture
def strip():
    return geometry.zigzag_strip()
