import logging
import os
from pathlib import Path

from modules.errors import OutputIoError

# --force で削除してよい、以前の実行が残した成果物
STALE_ARTIFACT_PATTERNS = ('frame_*.svg', 'manifest.txt', 'animation.svg', 'timeline.json',
                           'diagram.svg', '[0-9][0-9]-*.fsm', '[0-9][0-9]-*.svg')

logger = logging.getLogger(__name__)


def is_subpath(child: str, parent: str) -> bool:
    """Return True if 'child' is the same as or inside 'parent'."""
    child_abs = os.path.abspath(child)
    parent_abs = os.path.abspath(parent)
    return os.path.commonpath([child_abs, parent_abs]) == parent_abs


def output_path(out_dir, name: str) -> Path:
    """out_dir 内の成果物パス。out_dir の外を指す名前は拒否する"""
    path = Path(out_dir) / name
    if not is_subpath(str(path), str(out_dir)):
        raise OutputIoError(str(path), ValueError('path escapes the output directory'))
    return path


def prepare_out_dir(out_dir, force: bool = False) -> Path:
    """
    出力ディレクトリを用意する

    空でないディレクトリは force なしでは拒否する。
    force の場合は以前の成果物（フレーム・マニフェスト等）だけを削除する。

    Raises:
        OutputIoError: ディレクトリを作れない、または空でない
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise OutputIoError(str(out_dir), NotADirectoryError('not a directory'))
    if out_dir.is_dir() and any(out_dir.iterdir()):
        if not force:
            raise OutputIoError(str(out_dir),
                                FileExistsError('output directory is not empty (use --force)'))
        removed = 0
        for pattern in STALE_ARTIFACT_PATTERNS:
            for stale in out_dir.glob(pattern):
                if stale.is_file():
                    stale.unlink()
                    removed += 1
        simulation = out_dir / 'simulation'
        if simulation.is_dir():
            for stale in [*simulation.glob('frame_*.svg'), *simulation.glob('manifest.txt')]:
                stale.unlink()
                removed += 1
        logger.info(f"Removed {removed} stale artifacts from {out_dir}")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputIoError(str(out_dir), e) from e
    return out_dir
