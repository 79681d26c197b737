import pytest

import dnncost as dc


@pytest.fixture(scope="session")
def arch():
    return dc.default_arch()


@pytest.fixture(scope="session")
def resolved_builtins():
    return {name: dc.resolve_shapes(dc.builtin(name))
            for name in dc.BUILTIN_NAMES}
