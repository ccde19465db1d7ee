"""Dataset corruptions used to exercise the validator."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pandas as pd

from flowgen.export import DAILY, WEEKLY


def copy_dataset(src: Path, dst: Path) -> Path:
    """Hard-link copy; corruptions below always write a new file, never in place."""
    dst.mkdir(parents=True)
    for f in src.iterdir():
        if f.suffix == ".csv":
            os.link(f, dst / f.name)
    return dst


def replace_text(path: Path, text: str) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_frame(frame: pd.DataFrame, path: Path) -> None:
    replace_text(path, frame.to_csv(index=False, lineterminator="\n"))


def _rewrite_column(path: Path, column: str, transform) -> None:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    frame[column] = transform(frame[column])
    write_frame(frame, path)


def out_of_range_cell(root: Path, row: int = 100) -> None:
    def edit(col):
        col = col.copy()
        col.iat[row] = "12.00"
        return col

    _rewrite_column(root / DAILY.name, "stress_level", edit)


def constant_column(root: Path, column: str = "focus") -> None:
    _rewrite_column(root / DAILY.name, column, lambda col: pd.Series(["5.00"] * len(col)))


def shuffle_stress(root: Path, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    _rewrite_column(root / DAILY.name, "stress_level", lambda col: pd.Series(rng.permutation(col.to_numpy())))


def white_noise_weight(root: Path, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    _rewrite_column(
        root / DAILY.name,
        "weight_kg",
        lambda col: pd.Series([f"{w:.3f}" for w in rng.normal(75.0, 10.0, len(col))]),
    )


def perturb_weekly(root: Path, row: int = 3) -> tuple[str, str]:
    frame = pd.read_csv(root / WEEKLY.name, dtype=str, keep_default_na=False)
    frame.loc[row, "avg_stress"] = f"{float(frame.loc[row, 'avg_stress']) + 0.5:.2f}"
    write_frame(frame, root / WEEKLY.name)
    return frame.loc[row, "user_id"], frame.loc[row, "week_index"]


def delete_daily_all_row(root: Path, line: int = 10) -> None:
    path = root / "daily_all.csv"
    lines = path.read_text(encoding="utf-8").splitlines(keepends=True)
    del lines[line]
    replace_text(path, "".join(lines))


def empty_interventions(root: Path) -> None:
    path = root / "interventions.csv"
    header = path.read_text(encoding="utf-8").splitlines()[0]
    replace_text(path, header + "\n")


CORRUPTIONS = {
    "out_of_range_cell": out_of_range_cell,
    "shuffled_stress": shuffle_stress,
    "white_noise_weight": white_noise_weight,
    "perturbed_weekly": perturb_weekly,
    "deleted_daily_all_row": delete_daily_all_row,
}
