"""
Style Configuration Module for FsmAnimator

描画スタイル（拡大率・色・フォント・fps・各区間の長さ）を管理します。
既定値 → スタイルファイル (--style) → CLI フラグ の順に上書きされます。

スタイルファイルは .fsm と同じ行指向の形式です:

    scale: 48
    fps: 24
    highlight: "#ffcc00"     # '#' はコメントになるので色は引用符で囲むか
    reject: e05050           # '#' を省略して書く
"""

import logging
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict

from modules.definition_format import tokenize_line
from modules.errors import ParseError, StyleError

COLOR_FIELDS = (
    'background', 'text', 'state_fill', 'state_stroke', 'accept_ring',
    'highlight', 'accept', 'reject', 'marker', 'ghost',
)

_HEX_COLOR = re.compile(r'^#?([0-9a-fA-F]{6})$')
_KEY_LINE = re.compile(r'^[ \t]*([A-Za-z_][A-Za-z0-9_-]*)[ \t]*:')
_TRUE_WORDS = ('true', 'yes', 'on', '1')
_FALSE_WORDS = ('false', 'no', 'off', '0')

logger = logging.getLogger(__name__)


def normalize_color(value: str) -> str:
    """'#RRGGBB' / 'rrggbb' を小文字の '#rrggbb' に正規化する"""
    match = _HEX_COLOR.match(value.strip())
    if not match:
        raise StyleError(f"invalid color {value!r} (expected 6-digit hex like #1e1e2e)")
    return '#' + match.group(1).lower()


@dataclass(frozen=True)
class StyleConfig:
    """描画スタイル。不正な値は構築時に StyleError になる"""
    scale: float = 40.0
    fps: int = 30
    font_family: str = 'monospace'
    font_size: float = 16.0
    intro_duration: float = 2.0
    step_duration: float = 1.0
    verdict_duration: float = 1.5
    ghost_consumed: bool = False
    background: str = '#1e1e2e'
    text: str = '#e6e6e6'
    state_fill: str = '#2a2a3d'
    state_stroke: str = '#c8c8d8'
    accept_ring: str = '#c8c8d8'
    highlight: str = '#ffcc33'
    accept: str = '#4cc38a'
    reject: str = '#e5534b'
    marker: str = '#58a6ff'
    ghost: str = '#6b6b80'

    def __post_init__(self):
        if not self.scale > 0:
            raise StyleError(f"scale must be > 0, got {self.scale}")
        if isinstance(self.fps, bool) or not isinstance(self.fps, int) or self.fps < 1:
            raise StyleError(f"fps must be an integer >= 1, got {self.fps!r}")
        if not self.font_size > 0:
            raise StyleError(f"font_size must be > 0, got {self.font_size}")
        for name in ('intro_duration', 'step_duration', 'verdict_duration'):
            value = getattr(self, name)
            if not value > 0:
                raise StyleError(f"{name} must be > 0, got {value}")
        for name in COLOR_FIELDS:
            object.__setattr__(self, name, normalize_color(getattr(self, name)))

    def with_overrides(self, **overrides: Any) -> 'StyleConfig':
        """None 以外の値だけを上書きした新しい StyleConfig を返す"""
        known = {f.name for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if key not in known:
                raise StyleError(f"unknown style key {key!r}")
            if value is not None:
                changes[key] = value
        return replace(self, **changes)


def _convert(key: str, raw: str, line_no: int) -> Any:
    kind = StyleConfig.__dataclass_fields__[key].type
    try:
        if kind in (float, 'float'):
            return float(raw)
        if kind in (int, 'int'):
            return int(raw)
        if kind in (bool, 'bool'):
            lowered = raw.lower()
            if lowered in _TRUE_WORDS:
                return True
            if lowered in _FALSE_WORDS:
                return False
            raise ValueError(raw)
    except ValueError:
        raise StyleError(f"line {line_no}: invalid value {raw!r} for {key}")
    return raw


def parse_style(text: str) -> Dict[str, Any]:
    """
    スタイルファイルの内容を解析して上書き値の辞書にする

    Args:
        text: スタイルファイルの内容

    Returns:
        Dict[str, Any]: キー -> 型変換済みの値

    Raises:
        StyleError: 未知のキー、重複、値の個数・型の誤り
    """
    known = {f.name for f in fields(StyleConfig)}
    values: Dict[str, Any] = {}
    for line_no, line in enumerate(text.split('\n'), start=1):
        line = line.rstrip('\r')
        try:
            if not tokenize_line(line, line_no):
                continue
            match = _KEY_LINE.match(line)
            if not match:
                raise StyleError(f"line {line_no}: expected 'key: value'")
            key = match.group(1).replace('-', '_')
            tokens = tokenize_line(line, line_no, start=match.end())
        except ParseError as e:
            raise StyleError(str(e)) from e
        if key not in known:
            raise StyleError(f"line {line_no}: unknown style key {key!r}")
        if key in values:
            raise StyleError(f"line {line_no}: duplicate style key {key!r}")
        if len(tokens) != 1:
            raise StyleError(f"line {line_no}: {key} takes exactly one value")
        values[key] = _convert(key, tokens[0].text, line_no)
    return values


def load_style_file(path, base: StyleConfig = None) -> StyleConfig:
    """
    スタイルファイルを読み込んで base に適用する

    Args:
        path: スタイルファイルのパス
        base: 上書き元（省略時は既定値）

    Returns:
        StyleConfig: 適用後のスタイル

    Raises:
        StyleError: 読めない、UTF-8 でない、または内容が不正
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise StyleError(f"cannot read style file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise StyleError(f"style file {path} is not valid UTF-8 (byte offset {e.start})") from e
    overrides = parse_style(text)
    logger.info(f"Loaded {len(overrides)} style settings from {path}")
    return (base or StyleConfig()).with_overrides(**overrides)
