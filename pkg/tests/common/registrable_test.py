import pytest

from heislab.common.exceptions import ConfigurationError, RegistryKeyError
from heislab.common.registrable import Registrable
from heislab.common.testing import HeislabTestCase
from heislab.format import Format
from heislab.inequalities import InequalityCheck
from heislab.laakso import Motif


class TestRegistrable(HeislabTestCase):
    def test_basic_functionality(self):
        class MockBaseClass(Registrable):
            pass

        assert "mock-1" not in MockBaseClass.list_available()

        @MockBaseClass.register("mock-1")
        class MockSubclass1(MockBaseClass):
            pass

        assert MockBaseClass in Registrable._registry
        assert MockBaseClass.by_name("mock-1") == MockSubclass1

        # Verify that registering under a name that already exists
        # causes a ConfigurationError.
        with pytest.raises(ConfigurationError):

            @MockBaseClass.register("mock-1")
            class MockAlternate(MockBaseClass):
                pass

        # Registering under a name that already exists should overwrite
        # if exist_ok=True.
        @MockBaseClass.register("mock-1", exist_ok=True)
        class MockAlternate2(MockBaseClass):
            pass

        assert MockBaseClass.by_name("mock-1") == MockAlternate2

    def test_suggestion_on_close_name(self):
        with pytest.raises(RegistryKeyError) as exc:
            Motif.by_name("planar_double_diamond")
        assert "did you mean 'planar-double-diamond'?" in str(exc.value)

    def test_unknown_name_lists_available(self):
        with pytest.raises(RegistryKeyError) as exc:
            Format.by_name("parquet")
        assert "json" in str(exc.value)

    def test_default_comes_first(self):
        assert Motif.list_available()[0] == "laakso"
        assert Format.list_available()[0] == "json"

    def test_unregistered_default(self):
        class Broken(Registrable):
            default_implementation = "missing"

        with pytest.raises(ConfigurationError):
            Broken.list_available()

    def test_suggestion_on_typo(self):
        with pytest.raises(RegistryKeyError) as exc:
            InequalityCheck.by_name("midpont")
        assert "did you mean 'midpoint'?" in str(exc.value)
