#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
输出写入：CSV（17 位有效数字、LF 换行、临时文件加改名的原子写入）与静态 SVG 折线图
"""

import csv
import io
import logging
import math
import os
import sys
import tempfile
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger("subordinatorDensity.cli.writers")

# 固定 SVG 中的随机 id，保证同一输入产生同一文件
_SVG_HASHSALT = "subordinatorDensity"

Cell = object


def format_cell(value: Cell) -> str:
    """浮点数用 17 位有效数字的科学计数法，None 为空串，整数与字符串原样输出"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.16e}"
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> str:
    """
    写出 CSV；path 为 None 或 "-" 时写到标准输出

    Returns:
        CSV 文本
    """
    text = render_csv(header, rows)
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        _atomic_write(path, text.encode("utf-8"))
        logger.info(f"已写出 CSV: {path} ({text.count(chr(10)) - 1} 行)")
    return text


Curves = Dict[str, Tuple[List[float], List[float]]]


def write_svg(path: str, curves: Curves, xlabel: str, ylabel: str, title: str = "",
              log_x: bool = False, log_y: bool = False) -> None:
    """
    每条曲线一条折线；曲线按标签排序，非有限值跳过

    Args:
        curves: 标签 → (横坐标, 纵坐标)
    """
    plt.rcParams["svg.hashsalt"] = _SVG_HASHSALT
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        for label in sorted(curves):
            xs, ys = curves[label]
            pts = [(a, b) for a, b in zip(xs, ys) if b is not None and math.isfinite(a) and math.isfinite(b)
                   and (not log_y or b > 0) and (not log_x or a > 0)]
            if not pts:
                continue
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", markersize=3, label=label)
        if log_x:
            ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize="small")
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    _atomic_write(path, buf.getvalue())
    logger.info(f"已写出 SVG: {path} ({len(curves)} 条曲线)")
