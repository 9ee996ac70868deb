"""桌面规模的损失消融：VNE 项应当提高投影的有效秩，完整目标应当避免塌缩。运行时间较长，默认不执行。"""

from pathlib import Path

import pytest

from colvne.cli import AblationAxis, RunConfig, ablation_matrix, loss_axis_checks

DESK_CONFIG_PATH = Path(__file__).resolve().parents[2] / "configs" / "desk.json"

SMALL_CONFIG = {
    "epochs": 8,
    "warmup_epochs": 1,
    "batch_size": 32,
    "seed": 0,
    "longtail": {"num_classes": 4, "n_max": 80, "rho": 4.0, "image_size": 16},
    "augment": {"global_size": 16, "local_size": 8, "local_views": 1},
    "arch": {"encoder_widths": [8, 16, 16], "proj_hidden": 32, "proj_out": 16},
    "eval": {"knn_k": 10, "probe_epochs": 20, "probe_batch": 32, "online_knn": False},
}


@pytest.mark.slow
def test_vne_raises_effective_rank(tmp_path):
    frame = ablation_matrix(
        RunConfig.model_validate(SMALL_CONFIG), AblationAxis.LOSS, tmp_path
    ).set_index("cell")
    assert frame.loc["+VNE", "effective_rank"] > frame.loc["baseline", "effective_rank"]
    assert frame.loc["+COL+VNE", "effective_rank"] > frame.loc["+COL", "effective_rank"]


@pytest.mark.slow
def test_desk_loss_ablation_ordering(tmp_path):
    base = RunConfig.from_json_file(DESK_CONFIG_PATH)
    frame = ablation_matrix(base, AblationAxis.LOSS, tmp_path)
    checks = loss_axis_checks(frame, base.longtail.num_classes, base.arch.proj_out)
    failed = [name for name, passed in checks.items() if not passed]
    assert not failed, frame.to_string()
