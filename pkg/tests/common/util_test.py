import pytest

from heislab.common.exceptions import ConfigurationError
from heislab.common.testing import HeislabTestCase
from heislab.common.util import (
    SEED_ENV_VAR,
    chunk_bounds,
    chunked_map,
    resolve_seed,
    spawn_generators,
)


class TestChunking(HeislabTestCase):
    def test_chunk_bounds(self):
        assert chunk_bounds(10, 4) == [(0, 4), (4, 8), (8, 10)]
        assert chunk_bounds(8, 4) == [(0, 4), (4, 8)]
        assert chunk_bounds(0, 4) == []

    def test_chunk_bounds_rejects_zero_size(self):
        with pytest.raises(ConfigurationError):
            chunk_bounds(10, 0)

    def test_streams_depend_only_on_seed_and_index(self):
        first = [g.integers(0, 2**32, size=4).tolist() for g in spawn_generators(5, 3)]
        again = [g.integers(0, 2**32, size=4).tolist() for g in spawn_generators(5, 3)]
        assert first == again
        assert first[0] != first[1]
        other = [g.integers(0, 2**32, size=4).tolist() for g in spawn_generators(6, 3)]
        assert other != first

    @pytest.mark.parametrize("threads", [1, 2, 4])
    def test_chunked_map_keeps_order(self, threads: int):
        generators = spawn_generators(1, 9)
        result = chunked_map(lambda i: (i, float(generators[i].random())), 9, threads=threads)
        assert [i for i, _ in result] == list(range(9))
        reference = [float(g.random()) for g in spawn_generators(1, 9)]
        assert [x for _, x in result] == reference

    def test_chunked_map_rejects_zero_threads(self):
        with pytest.raises(ConfigurationError):
            chunked_map(lambda i: i, 3, threads=0)


class TestResolveSeed(HeislabTestCase):
    def test_default(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        assert resolve_seed(None) == 1
        assert resolve_seed(7) == 7

    def test_environment_wins(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "42")
        assert resolve_seed(7) == 42

    def test_bad_environment(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "forty-two")
        with pytest.raises(ConfigurationError):
            resolve_seed(7)

    def test_negative(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        with pytest.raises(ConfigurationError):
            resolve_seed(-1)
