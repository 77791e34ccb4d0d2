# app/services/export.py
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, Optional, Sequence, Tuple, Union

import pandas as pd

from app.core.config import settings

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@contextmanager
def atomic_path(path: PathLike) -> Iterator[Path]:
    """
    Временный файл рядом с целевым; по выходу из блока - os.replace.

    При исключении временный файл удаляется, целевой не трогается.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    """CSV с заголовком, атомарно"""
    path = Path(path)
    with atomic_path(path) as tmp:
        frame.to_csv(tmp, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def write_text(text: str, path: PathLike) -> Path:
    path = Path(path)
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8")
    return path


Line = Tuple[Sequence[float], Sequence[float]]


def write_line_chart(
    path: PathLike,
    lines: Dict[str, Line],
    title: str,
    xlabel: str,
    ylabel: str,
    log_y: bool = False,
    fits: Optional[Dict[str, Line]] = None,
) -> Path:
    """SVG с линейным графиком; fits рисуются пунктиром"""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        for label in sorted(lines):
            xs, ys = lines[label]
            ax.plot(list(xs), list(ys), marker="o", markersize=3, linewidth=1.2, label=label)
        for label in sorted(fits or {}):
            xs, ys = fits[label]
            ax.plot(list(xs), list(ys), linestyle="--", linewidth=1.0, color="gray")
        if log_y:
            ax.set_yscale("log")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if len(lines) > 1:
            ax.legend(fontsize="small")
        fig.tight_layout()

        path = Path(path)
        with atomic_path(path) as tmp:
            fig.savefig(tmp, format="svg")
    finally:
        plt.close(fig)
    return path
