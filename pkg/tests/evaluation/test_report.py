import numpy as np
import pandas as pd
import pytest

from colvne.evaluation import EvalConfig, evaluate_state, write_report_csv, write_spectrum_csv
from colvne.model import EmbeddingSpace, init_model
from colvne.train.loop import resolve_arch

SUMMARY_KEYS = {
    "knn_top1",
    "knn_top5",
    "probe_top1",
    "probe_top5",
    "cluster_accuracy",
    "vne",
    "effective_rank",
    "class_usage_entropy",
    "majority_fraction",
}


@pytest.fixture
def untrained(tiny_config, tiny_splits):
    return init_model(resolve_arch(tiny_config, tiny_splits), tiny_config.seed)


def test_report_covers_all_metrics(untrained, tiny_config, tiny_splits, tmp_path):
    report = evaluate_state(untrained, tiny_splits, tiny_config.eval)
    summary = report.summary()
    assert set(summary) == SUMMARY_KEYS
    for key in ("knn_top1", "knn_top5", "probe_top1", "cluster_accuracy", "majority_fraction"):
        assert 0.0 <= summary[key] <= 1.0
    assert report.diagnostics.spectrum.shape == (untrained.arch.proj_out,)

    frame = pd.read_csv(write_report_csv(report, tmp_path / "report.csv"))
    assert list(frame.columns) == ["metric", "value"]
    assert frame["metric"].tolist()[:9] == [k for k, _ in report.rows()][:9]
    assert len(frame) == 9 + untrained.arch.proj_out


def test_evaluation_is_repeatable(untrained, tiny_config, tiny_splits):
    cfg = EvalConfig(knn_k=3, probe_epochs=2, probe_batch=8, knn_space=EmbeddingSpace.BACKBONE)
    a = evaluate_state(untrained, tiny_splits, cfg).summary()
    b = evaluate_state(untrained, tiny_splits, cfg).summary()
    assert a == b


def test_spectrum_csv(untrained, tiny_config, tiny_splits, tmp_path):
    report = evaluate_state(untrained, tiny_splits, tiny_config.eval)
    frame = pd.read_csv(write_spectrum_csv(report.diagnostics, tmp_path / "spectrum.csv"))
    assert frame["metric"].tolist()[:4] == [
        "vne",
        "effective_rank",
        "class_usage_entropy",
        "majority_fraction",
    ]
    eigs = frame.loc[frame["metric"].str.startswith("eig_"), "value"].to_numpy()
    assert np.sum(eigs) == pytest.approx(1.0, abs=1e-6)
