from types import SimpleNamespace

import pytest

from services import resource_optimizer as module
from services.resource_optimizer import ResourceOptimizer


@pytest.fixture
def calm_memory(monkeypatch):
    monkeypatch.setattr(module.psutil, 'virtual_memory', lambda: SimpleNamespace(percent=10.0))
    monkeypatch.setattr(module.psutil, 'Process',
                        lambda pid: SimpleNamespace(memory_info=lambda: SimpleNamespace(rss=1024 ** 2)))


def test_oversized_cache_is_cleared(calm_memory):
    optimizer = ResourceOptimizer()
    optimizer.memo_limit = 2
    small, large = {1: 1}, {1: 1, 2: 2, 3: 3}
    optimizer.register_cache('small', small)
    optimizer.register_cache('large', large)
    optimizer.check()
    assert large == {} and small == {1: 1}
    assert optimizer.cleanups == 1
    assert optimizer.cache_sizes() == {'large': 0, 'small': 1}


def test_memory_pressure_clears_everything(monkeypatch, calm_memory):
    optimizer = ResourceOptimizer()
    cache = {'a': 1}
    optimizer.register_cache('c', cache)
    monkeypatch.setattr(module.psutil, 'virtual_memory', lambda: SimpleNamespace(percent=99.0))
    optimizer.check()
    assert cache == {}


def test_quiet_when_within_limits(calm_memory):
    optimizer = ResourceOptimizer()
    cache = {'a': 1}
    optimizer.register_cache('c', cache)
    optimizer.check()
    assert cache == {'a': 1} and optimizer.cleanups == 0


def test_status_lists_caches():
    optimizer = ResourceOptimizer()
    optimizer.register_cache('c', {'a': 1})
    assert optimizer.get_system_status()['caches'] == {'c': 1}
