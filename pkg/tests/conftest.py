import numpy as np
import pytest

from penfem.mesh import RegionTag, build_interval_mesh, build_rectangle_mesh

ALL_DIRICHLET = {s: RegionTag.DIRICHLET for s in ("bottom", "right", "top", "left")}


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # first call of each jit kernel compiles; keep that out of timed tests
    mesh = build_rectangle_mesh(1.0, 1.0, 1, 1, ALL_DIRICHLET)
    from penfem.fem import LinearIsotropic, NonlinearHencky, build_dofmap, stiffness_matrix, stiffness_action

    dm = build_dofmap(mesh, 2)
    stiffness_matrix(mesh, LinearIsotropic(1.0, 1.0), dm)
    stiffness_action(mesh, NonlinearHencky(1.0, 0.5, 1.0), dm, np.zeros(dm.n_dofs))
    dm1 = build_dofmap(mesh, 1)
    stiffness_matrix(mesh, LinearIsotropic(0.0, 0.5), dm1)
    stiffness_action(mesh, NonlinearHencky(1.0, 0.5, 1.0), dm1, np.zeros(dm1.n_dofs))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_square_contact():
    return build_rectangle_mesh(
        1.0, 1.0, 2, 2,
        {
            "left": RegionTag.NEUMANN,
            "right": RegionTag.NEUMANN,
            "top": RegionTag.DIRICHLET,
            "bottom": RegionTag.CONTACT1,
        },
    )


@pytest.fixture
def interval2():
    return build_interval_mesh(2)
