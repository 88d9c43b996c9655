import numpy as np
import pytest

from noise_enhanced_qht.propagator import get_propagator_cache
from noise_enhanced_qht.settings import reset_settings


@pytest.fixture(autouse=True)
def fresh_state(monkeypatch):
    """테스트마다 환경 설정과 전파자 캐시를 초기화"""
    monkeypatch.delenv("QHT_THREADS", raising=False)
    monkeypatch.delenv("QHT_LOG_LEVEL", raising=False)
    reset_settings()
    get_propagator_cache().clear()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_density(rng) -> np.ndarray:
    """블로흐 구 내부의 임의 혼합 상태"""
    r = rng.normal(size=3)
    r *= rng.uniform(0.0, 1.0) / np.linalg.norm(r)
    paulis = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    return 0.5 * (np.eye(2) + np.tensordot(r, paulis, axes=1))
