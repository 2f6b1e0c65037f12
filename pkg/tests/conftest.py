from __future__ import annotations

import numpy as np
import pytest

from tnrisk import BLOCKED, ModelParams, bundled_data_dir, load_bundle


@pytest.fixture(scope="session")
def bundle():
    return load_bundle(bundled_data_dir())


@pytest.fixture(scope="session")
def pre_params(bundle):
    return bundle.pre_estimated


@pytest.fixture()
def params(pre_params):
    return pre_params.copy()


def tiny_params(abandon=BLOCKED, lam=0.1) -> ModelParams:
    """One source, two targets of unequal worth."""
    return ModelParams(
        S={"SRC": 100.0},
        T={("SRC", "USA"): 0.2, ("SRC", "FRA"): 1.0},
        I={"USA": 1.5, "FRA": 0.6},
        Y={"USA": -54.0, "FRA": -6.8},
        A=abandon,
        lam=lam,
    )


def random_params(rng: np.random.Generator,
                  max_sources: int = 5,
                  max_targets: int = 6,
                  blocked_fraction: float = 0.2,
                  finite_abandon_prob: float = 0.5) -> ModelParams:
    """Small random instance with costs in [-60, 5] and some blocked edges."""
    n_src = int(rng.integers(1, max_sources + 1))
    n_tgt = int(rng.integers(1, max_targets + 1))
    sources = [f"S{k:02d}" for k in range(n_src)]
    targets = [f"T{k:02d}" for k in range(n_tgt)]
    T = {}
    for i in sources:
        for j in targets:
            if rng.random() < blocked_fraction:
                T[(i, j)] = BLOCKED
            else:
                T[(i, j)] = float(rng.uniform(0.0, 10.0))
    I = {j: float(rng.uniform(0.0, 5.0)) for j in targets}
    Y = {j: float(rng.uniform(-60.0, 0.0)) for j in targets}
    A = float(rng.uniform(-60.0, 5.0)) if rng.random() < finite_abandon_prob else BLOCKED
    S = {i: float(rng.uniform(1.0, 1000.0)) for i in sources}
    return ModelParams(S=S, T=T, I=I, Y=Y, A=A, lam=float(rng.uniform(0.0, 1.0)))
