import math

import numpy as np
import pytest

from colvne.diffgraph import grad_check, ops
from colvne.losses import (
    CrossViewTargets,
    LogitsPair,
    LossConfig,
    autocorrelation,
    col_loss,
    naive_ssl_ce,
    total_objective,
    total_objective_node,
    vne,
)
from colvne.losses.objective import effective_rank
from tests.conftest import random_unit_rows
from tests.losses import oracle


@pytest.fixture
def pair(rng) -> LogitsPair:
    return LogitsPair(rng.standard_normal((4, 3)), rng.standard_normal((4, 3)))


def test_alpha_zero_equals_col(pair, rng):
    h = random_unit_rows(rng, 8, 4)
    cfg = LossConfig(alpha=0.0)
    assert total_objective(pair, h, cfg) == col_loss(pair, cfg)


def test_vne_disabled_equals_col(pair, rng):
    cfg = LossConfig(enable_vne=False)
    assert total_objective(pair, random_unit_rows(rng, 8, 4), cfg) == col_loss(pair, cfg)


def test_col_disabled_uses_naive_ce(pair, rng):
    cfg = LossConfig(enable_col=False, enable_vne=False)
    assert total_objective(pair, random_unit_rows(rng, 8, 4), cfg) == pytest.approx(
        naive_ssl_ce(pair), abs=1e-12
    )


def test_subtracts_weighted_entropy(pair, rng):
    h = random_unit_rows(rng, 8, 4)
    cfg = LossConfig(alpha=0.5)
    expected = col_loss(pair, cfg) - 0.5 * vne(autocorrelation(h))
    assert total_objective(pair, h, cfg) == pytest.approx(expected, abs=1e-12)


def test_arithmetic_example():
    # 两个正交单位行: S = ln 2；全零 logits, γ=0: COL = ln 2
    pair = LogitsPair(np.zeros((2, 2)), np.zeros((2, 2)), tau_row=1.0, tau_col=1.0)
    value = total_objective(pair, np.eye(2), LossConfig(alpha=1.0, gamma=0.0))
    assert value == pytest.approx(math.log(2) - math.log(2), abs=1e-12)
    assert 0.5 - math.log(2) == pytest.approx(-0.193147, abs=1e-6)


def test_matches_oracle_on_random_instances(rng):
    cfg = LossConfig(alpha=1.0, gamma=-1.0)
    for _ in range(10):
        n, c, d = int(rng.integers(2, 9)), int(rng.integers(2, 5)), int(rng.integers(2, 6))
        s1, s2 = rng.standard_normal((n, c)), rng.standard_normal((n, c))
        h = random_unit_rows(rng, 2 * n, d)
        expected = oracle.col(s1, s2, cfg.tau_row, cfg.tau_col, cfg.gamma) - oracle.vne(h)
        assert total_objective(LogitsPair(s1, s2), h, cfg) == pytest.approx(expected, abs=1e-9)


def test_gradient_of_full_composite(rng):
    cfg = LossConfig()
    s1, s2 = 0.1 * rng.standard_normal((5, 3)), 0.1 * rng.standard_normal((5, 3))
    targets = CrossViewTargets.from_logits(s1, s2, cfg.tau_row, cfg.tau_col)

    def build(g, p):
        h_all = ops.l2_normalize_rows(p["h"])
        return total_objective_node(p["s1"], p["s2"], h_all, targets, cfg)

    point = {"s1": s1, "s2": s2, "h": rng.standard_normal((10, 4))}
    assert grad_check(build, point) <= 1e-4


def test_effective_rank():
    assert effective_rank(np.full(4, 0.25)) == pytest.approx(4.0)
    assert effective_rank(np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)
