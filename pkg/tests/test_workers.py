"""
Tests del pool de hilos
"""

import numpy as np
import pytest

from core.errors import ValidationError
from core.workers import THREADS_ENV, fill_slabs, map_ordered, resolve_threads


def test_explicit_threads_win(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '3')
    assert resolve_threads(5) == 5


def test_env_fallback(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '3')
    assert resolve_threads() == 3


def test_cpu_fallback(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert resolve_threads() >= 1


def test_bad_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, 'muchos')
    with pytest.raises(ValidationError):
        resolve_threads()


def test_zero_threads():
    with pytest.raises(ValidationError):
        resolve_threads(0)


@pytest.mark.parametrize('threads', [1, 4])
def test_fill_slabs_writes_every_block(threads):
    out = np.zeros((10, 3))

    def fill(i):
        out[i] = i

    fill_slabs(10, fill, threads)
    assert (out[:, 0] == np.arange(10)).all()


def test_map_ordered_keeps_order():
    assert map_ordered(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]


def test_errors_propagate():
    def boom(i):
        raise ValueError(i)

    with pytest.raises(ValueError):
        fill_slabs(4, boom, threads=2)
