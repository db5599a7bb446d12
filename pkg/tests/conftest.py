import numpy as np
import pytest

from mmdvar import KernelSpec

#: kernel specs exercised by randomized equivalence tests
KERNEL_CASES = {
    "linear": KernelSpec.linear(),
    "rbf_median": KernelSpec.rbf("median"),
    "poly2": KernelSpec.polynomial(2, coef0=1.0),
    "const": KernelSpec.constant(0.7),
}


def make_xyz(rng: np.random.Generator, m: int, d: int = 2):
    """Three mildly separated random samples of equal size."""
    x = rng.normal(size=(m, d))
    y = rng.normal(loc=0.4, size=(m, d))
    z = rng.normal(loc=-0.3, scale=1.3, size=(m, d))
    return x, y, z


def rel_close(a: float, b: float, rtol: float = 1e-10, small: float = 1e-8,
              atol: float = 1e-12) -> bool:
    """Relative comparison that switches to absolute below ``small``."""
    if abs(b) < small:
        return abs(a - b) <= atol
    return abs(a - b) <= rtol * abs(b)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
