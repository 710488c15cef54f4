import pytest

from fields.services import get_tower
from group_sl.services import make_group
from module_mtr.services import make_module


@pytest.fixture
def tower3():
    return get_tower(3)


@pytest.fixture
def tower2():
    return get_tower(2)


@pytest.fixture
def sl2_f3():
    return make_group(2, 3)


@pytest.fixture
def sl3_f2():
    return make_group(3, 2)


@pytest.fixture
def st_sl2_f3_mod2():
    """SL_2(F_3) over GF(2), where St_1 is reducible."""
    return make_module(2, 3, 1, 2)


@pytest.fixture
def st_sl2_f3_mod5():
    return make_module(2, 3, 1, 5)


@pytest.fixture
def st_sl3_f2_mod3():
    return make_module(3, 2, 1, 3)
