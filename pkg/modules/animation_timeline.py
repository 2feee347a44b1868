"""
Animation Timeline Module for FsmAnimator

シミュレーショントレースを、入力1文字ごとに1つの「同時イベントグループ」を持つ
タイムラインに変換します。各ステップでは次の4つのイベントが同じ開始時刻・同じ長さで起こります:

  - ConsumeChar:   入力文字列から文字を取り除く
  - HighlightEdge: 状態図の遷移辺を強調する
  - HighlightCell: 遷移表のセルを強調する
  - MoveMarker:    現在状態マーカーを遷移先へ移動する

タイムラインは JSON ドキュメント (--format timeline) として書き出せます。
"""

import json
import logging
import math
from dataclasses import dataclass, fields
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from modules.automata import (
    Dfa,
    SimulationTrace,
    Verdict,
    machine_fingerprint,
    subset_name,
)
from modules.definition_format import EPSILON
from modules.errors import TraceMismatch
from modules.layout_engine import EPSILON_LABEL, LayoutGraph
from modules.style_config import StyleConfig

TIMELINE_FORMAT_VERSION = 1

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# 遷移表
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableModel:
    """遷移表。行は状態（定義順）、列は記号（定義順、NFA は必要なら ε 列）"""
    rows: Tuple[str, ...]
    columns: Tuple[str, ...]
    cells: Dict[Tuple[str, str], str]
    start: str
    accepting: Tuple[str, ...]

    def row_index(self, state: str) -> int:
        return self.rows.index(state)

    def column_index(self, symbol: str) -> int:
        return self.columns.index(symbol)

    def is_start(self, state: str) -> bool:
        return state == self.start

    def is_accepting(self, state: str) -> bool:
        return state in self.accepting


def transition_table(machine) -> TableModel:
    """
    機械の遷移表を作る

    DFA ではセルは遷移先の状態名、NFA ではセルは遷移先集合の正規名（空なら ∅）になる。

    Args:
        machine: 検証済みの Dfa または Nfa

    Returns:
        TableModel: |states| 行 × 列数 の表
    """
    if isinstance(machine, Dfa):
        cells = {(state, symbol): machine.transitions[(state, symbol)]
                 for state in machine.states for symbol in machine.alphabet}
        return TableModel(tuple(machine.states), tuple(machine.alphabet), cells,
                          machine.start, tuple(machine.accepting))

    has_epsilon = any(symbol == EPSILON for _, symbol in machine.transitions)
    columns = tuple(machine.alphabet) + ((EPSILON_LABEL,) if has_epsilon else ())
    cells = {}
    for state in machine.states:
        for column in columns:
            key = EPSILON if column == EPSILON_LABEL else column
            cells[(state, column)] = subset_name(machine.transitions.get((state, key), ()))
    return TableModel(tuple(machine.states), columns, cells,
                      machine.start, tuple(machine.accepting))


# ---------------------------------------------------------------------------
# イベントとグループ
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimelineEvent:
    """イベントの基底クラス。start / duration は所属グループと同じ値を持つ"""
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class ShowDiagram(TimelineEvent):
    pass


@dataclass(frozen=True)
class ShowTable(TimelineEvent):
    pass


@dataclass(frozen=True)
class ShowInput(TimelineEvent):
    symbols: Tuple[str, ...]


@dataclass(frozen=True)
class PlaceMarker(TimelineEvent):
    state: str


@dataclass(frozen=True)
class ConsumeChar(TimelineEvent):
    position: int
    symbol: str
    ghost: bool = False


@dataclass(frozen=True)
class HighlightEdge(TimelineEvent):
    source: str
    target: str
    symbol: str


@dataclass(frozen=True)
class HighlightCell(TimelineEvent):
    row: str
    column: str


@dataclass(frozen=True)
class MoveMarker(TimelineEvent):
    source: str
    target: str


@dataclass(frozen=True)
class ShowVerdict(TimelineEvent):
    verdict: Verdict
    final_state: str


@dataclass(frozen=True)
class EventGroup:
    start: float
    duration: float
    events: Tuple[TimelineEvent, ...]

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class IntroGroup(EventGroup):
    pass


@dataclass(frozen=True)
class StepGroup(EventGroup):
    index: int = 0

    def event(self, kind):
        """指定した型のイベントを1つ返す"""
        return next(e for e in self.events if isinstance(e, kind))


@dataclass(frozen=True)
class VerdictGroup(EventGroup):
    verdict: Verdict = Verdict.REJECTED
    final_state: str = ''


@dataclass(frozen=True)
class AnimationTimeline:
    """Intro → StepGroup × |input| → Verdict の順のグループ列"""
    groups: Tuple[EventGroup, ...]
    machine_id: str
    input: Tuple[str, ...]
    fps: int

    @property
    def intro(self) -> IntroGroup:
        return self.groups[0]

    @cached_property
    def steps(self) -> Tuple[StepGroup, ...]:
        return tuple(g for g in self.groups if isinstance(g, StepGroup))

    @property
    def verdict(self) -> VerdictGroup:
        return self.groups[-1]

    @property
    def duration(self) -> float:
        return self.groups[-1].end

    @property
    def frame_count(self) -> int:
        return math.ceil(round(self.duration * self.fps, 9))

    @cached_property
    def _group_by_frame(self) -> Tuple[int, ...]:
        """フレーム番号 -> グループ番号の表（グループは連続して並ぶ）"""
        last = len(self.groups) - 1
        table: List[int] = []
        for index, group in enumerate(self.groups):
            span = frame_span(group.start, group.duration, self.fps)
            while len(table) < span.stop:
                table.append(index if len(table) >= span.start else last)
        return tuple(table)

    def group_at_frame(self, frame: int) -> EventGroup:
        """フレーム frame を含むグループ（範囲外は Verdict）"""
        if 0 <= frame < len(self._group_by_frame):
            return self.groups[self._group_by_frame[frame]]
        return self.groups[-1]


def frame_span(start: float, duration: float, fps: int) -> range:
    """
    区間 [start, start + duration) に含まれるフレーム番号（0始まり、フレーム k は時刻 k / fps）

    浮動小数点の誤差は小数第9位で丸めてから切り上げる。
    """
    first = math.ceil(round(start * fps, 9))
    last = math.ceil(round((start + duration) * fps, 9))
    return range(first, last)


# ---------------------------------------------------------------------------
# 構築
# ---------------------------------------------------------------------------

def _check_consistency(dfa: Dfa, trace: SimulationTrace, layout: LayoutGraph) -> None:
    if trace.machine_id != machine_fingerprint(dfa):
        raise TraceMismatch("trace was produced by a different machine")
    if len(trace.visited) != len(trace.input) + 1 or len(trace.steps) != len(trace.input):
        raise TraceMismatch("trace length does not match its input")
    if trace.visited[0] != dfa.start:
        raise TraceMismatch(f"trace starts in {trace.visited[0]!r}, machine starts in {dfa.start!r}")
    for index, step in enumerate(trace.steps):
        expected = dfa.transitions.get((step.source, step.symbol))
        if (step.source != trace.visited[index] or step.target != trace.visited[index + 1]
                or step.symbol != trace.input[index] or expected != step.target):
            raise TraceMismatch(f"step {index} ({step.source} --{step.symbol}--> {step.target}) "
                                f"does not follow the transition function")
    accepted = dfa.is_accepting(trace.final_state)
    if accepted != trace.accepted:
        raise TraceMismatch("verdict does not match the final state")
    if set(layout.nodes) != set(dfa.states):
        raise TraceMismatch("layout does not cover the machine's states")
    for step in trace.steps:
        edge = layout.edge_between(step.source, step.target)
        if edge is None or step.symbol not in edge.labels:
            raise TraceMismatch(f"layout has no edge {step.source} -> {step.target} "
                                f"labelled {step.symbol!r}")


def build_timeline(dfa: Dfa, trace: SimulationTrace, layout: LayoutGraph,
                   style: StyleConfig) -> AnimationTimeline:
    """
    トレースからアニメーションのタイムラインを構築する

    ステップ i の開始時刻は intro + i × step（累積加算ではなく直接計算）。

    Args:
        dfa: トレースを生成した DFA
        trace: simulate の結果
        layout: dfa のレイアウト
        style: 各区間の長さ・fps・ghost_consumed

    Returns:
        AnimationTimeline: グループ数は |input| + 2

    Raises:
        TraceMismatch: トレース・機械・レイアウトが一致しない
    """
    _check_consistency(dfa, trace, layout)

    intro, step_len = style.intro_duration, style.step_duration
    groups: List[EventGroup] = [IntroGroup(0.0, intro, (
        ShowDiagram(0.0, intro),
        ShowTable(0.0, intro),
        ShowInput(0.0, intro, trace.input),
        PlaceMarker(0.0, intro, dfa.start),
    ))]

    for index, step in enumerate(trace.steps):
        start = intro + index * step_len
        groups.append(StepGroup(start, step_len, (
            ConsumeChar(start, step_len, index, step.symbol, style.ghost_consumed),
            HighlightEdge(start, step_len, step.source, step.target, step.symbol),
            HighlightCell(start, step_len, step.source, step.symbol),
            MoveMarker(start, step_len, step.source, step.target),
        ), index=index))

    verdict_start = intro + len(trace.steps) * step_len
    verdict_len = style.verdict_duration
    groups.append(VerdictGroup(
        verdict_start, verdict_len,
        (ShowVerdict(verdict_start, verdict_len, trace.verdict, trace.final_state),),
        verdict=trace.verdict, final_state=trace.final_state))

    timeline = AnimationTimeline(tuple(groups), trace.machine_id, trace.input, style.fps)
    logger.debug(f"Timeline: {len(groups)} groups, {timeline.duration:.3f}s, "
                 f"{timeline.frame_count} frames at {style.fps} fps")
    return timeline


# ---------------------------------------------------------------------------
# シリアライズ
# ---------------------------------------------------------------------------

def _event_to_dict(event: TimelineEvent) -> Dict:
    data = {'type': type(event).__name__}
    for f in fields(event):
        value = getattr(event, f.name)
        if isinstance(value, Verdict):
            value = value.value
        elif isinstance(value, tuple):
            value = list(value)
        data[f.name] = value
    return data


def _group_kind(group: EventGroup) -> str:
    if isinstance(group, IntroGroup):
        return 'intro'
    if isinstance(group, StepGroup):
        return 'step'
    return 'verdict'


def timeline_to_dict(timeline: AnimationTimeline) -> Dict:
    """タイムラインを JSON 互換の辞書にする"""
    groups = []
    for group in timeline.groups:
        span = frame_span(group.start, group.duration, timeline.fps)
        entry: Dict = {
            'type': _group_kind(group),
            'start': group.start,
            'duration': group.duration,
            'frames': [span.start, span.stop],
        }
        if isinstance(group, StepGroup):
            entry['index'] = group.index
        if isinstance(group, VerdictGroup):
            entry['verdict'] = group.verdict.value
            entry['final_state'] = group.final_state
        entry['events'] = [_event_to_dict(e) for e in group.events]
        groups.append(entry)
    return {
        'version': TIMELINE_FORMAT_VERSION,
        'machine_id': timeline.machine_id,
        'input': ''.join(timeline.input),
        'fps': timeline.fps,
        'duration': timeline.duration,
        'frame_count': timeline.frame_count,
        'groups': groups,
    }


def serialize_timeline(timeline: AnimationTimeline) -> str:
    """タイムラインドキュメント（JSON、UTF-8、末尾改行あり）"""
    return json.dumps(timeline_to_dict(timeline), indent=2, ensure_ascii=False) + '\n'


def step_progress(group: EventGroup, frame: int, fps: int) -> float:
    """フレーム frame におけるグループ内の進行度（0.0〜1.0）"""
    return min(max((frame / fps - group.start) / group.duration, 0.0), 1.0)


def marker_position(timeline: AnimationTimeline, layout: LayoutGraph,
                    frame: int) -> Tuple[float, float]:
    """
    フレーム frame における現在状態マーカーの位置（レイアウト単位）

    ステップ中は遷移元から遷移先へ直線補間する。
    """
    group = timeline.group_at_frame(frame)
    if isinstance(group, StepGroup):
        move = group.event(MoveMarker)
        (x1, y1), (x2, y2) = layout.nodes[move.source], layout.nodes[move.target]
        progress = step_progress(group, frame, timeline.fps)
        return x1 + (x2 - x1) * progress, y1 + (y2 - y1) * progress
    if isinstance(group, VerdictGroup):
        return layout.nodes[group.final_state]
    placed = next(e for e in group.events if isinstance(e, PlaceMarker))
    return layout.nodes[placed.state]


def consume_progress(timeline: AnimationTimeline, frame: int, position: int) -> float:
    """入力の position 文字目の取り除き進行度（未着手 0.0、完了 1.0）"""
    group = timeline.steps[position]
    span = frame_span(group.start, group.duration, timeline.fps)
    if frame < span.start:
        return 0.0
    if frame >= span.stop:
        return 1.0
    return step_progress(group, frame, timeline.fps)


def active_step(timeline: AnimationTimeline, frame: int) -> Optional[StepGroup]:
    group = timeline.group_at_frame(frame)
    return group if isinstance(group, StepGroup) else None
