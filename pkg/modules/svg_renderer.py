"""
SVG Renderer Module for FsmAnimator

レイアウト・遷移表・タイムラインから SVG の成果物を生成します。

  - render_static:        静的な構成図（左に遷移表、右に状態図、下に入力文字列）
  - render_frames:        フレーム列（frame_000001.svg ...）とマニフェスト
  - render_animated_svg:  宣言的アニメーション (SMIL) を含む単一の SVG

同じ入力からは常にバイト単位で同一の出力を生成します。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import drawsvg as draw

from modules.animation_timeline import (
    AnimationTimeline,
    HighlightCell,
    HighlightEdge,
    TableModel,
    VerdictGroup,
    active_step,
    consume_progress,
    marker_position,
)
from modules.automata import Verdict
from modules.errors import OutputIoError
from modules.layout_engine import LayoutEdge, LayoutGraph, arc_control_point
from modules.style_config import StyleConfig

FRAME_PATTERN = 'frame_%06d.svg'
MANIFEST_NAME = 'manifest.txt'
CHAR_ADVANCE = 0.6      # 1文字の幅 = 0.6 × フォントサイズ
MARGIN = 20.0
CELL_PADDING = 16.0
START_ARROW_ROOM = 2.4  # レイアウト単位
LOOP_ROOM = 2.6
LOOP_SPREAD = 25.0      # 自己ループの両端の角度（度）
ARROW_SIZE = 0.3
EDGE_WIDTH = 2.0

ANCHOR_DEGREES = {'E': 0.0, 'N': 90.0, 'W': 180.0, 'S': 270.0}

logger = logging.getLogger(__name__)


def _r(value: float) -> float:
    """座標の丸め（出力の決定性のため小数第2位まで）"""
    rounded = round(value, 2)
    return 0.0 if rounded == 0 else rounded


def _unit(dx: float, dy: float) -> Tuple[float, float]:
    length = math.hypot(dx, dy) or 1.0
    return dx / length, dy / length


def _compass(degrees: float) -> Tuple[float, float]:
    """方位角をキャンバス上の単位ベクトルにする（y 下向き）"""
    rad = math.radians(degrees)
    return math.cos(rad), -math.sin(rad)


def text_width(text: str, font_size: float) -> float:
    return len(text) * CHAR_ADVANCE * font_size


def mix_color(a: str, b: str, t: float) -> str:
    """2色を t (0.0〜1.0) で線形補間する"""
    ca = [int(a[i:i + 2], 16) for i in (1, 3, 5)]
    cb = [int(b[i:i + 2], 16) for i in (1, 3, 5)]
    mixed = [round(x + (y - x) * t) for x, y in zip(ca, cb)]
    return '#' + ''.join(f'{v:02x}' for v in mixed)


# ---------------------------------------------------------------------------
# 構成（ピクセル座標の計算）
# ---------------------------------------------------------------------------

@dataclass
class _EdgeGeometry:
    path: str
    head: Tuple[float, ...]
    label: Tuple[float, float]


@dataclass
class _Scene:
    """1つの構成図のピクセル座標。フレームごとに再利用する"""
    width: float
    height: float
    nodes: Dict[str, Tuple[float, float]]
    edges: List[_EdgeGeometry]
    start_arrow: Tuple[Tuple[float, float], Tuple[float, ...]]
    row_labels: List[str]
    table_columns: List[Tuple[float, float]]
    table_origin: Tuple[float, float]
    row_header_width: float
    cell_height: float
    chars: List[Tuple[float, float]]
    verdict_at: Tuple[float, float]
    symbols: Tuple[str, ...] = field(default_factory=tuple)
    diagram_left: float = 0.0
    min_x: float = 0.0
    min_y: float = 0.0
    scale: float = 1.0

    def to_px(self, point: Tuple[float, float]) -> Tuple[float, float]:
        """レイアウト単位の座標をピクセル座標にする"""
        return (self.diagram_left + (START_ARROW_ROOM + point[0] - self.min_x) * self.scale,
                MARGIN + (LOOP_ROOM + point[1] - self.min_y) * self.scale)


def _arrow_head(tip: Tuple[float, float], direction: Tuple[float, float],
                size: float) -> Tuple[float, ...]:
    ux, uy = _unit(*direction)
    bx, by = tip[0] - ux * size, tip[1] - uy * size
    px, py = -uy * size * 0.5, ux * size * 0.5
    return tuple(_r(v) for v in (tip[0], tip[1], bx + px, by + py, bx - px, by - py))


def _edge_geometry(edge: LayoutEdge, layout: LayoutGraph, to_px, scale: float) -> _EdgeGeometry:
    radius = scale
    head_size = ARROW_SIZE * scale
    if edge.route.kind == 'self-loop':
        cx, cy = to_px(layout.nodes[edge.source])
        angle = ANCHOR_DEGREES[edge.route.anchor]
        out_x, out_y = _compass(angle + LOOP_SPREAD)
        in_x, in_y = _compass(angle - LOOP_SPREAD)
        c1x, c1y = _compass(angle + LOOP_SPREAD + 10)
        c2x, c2y = _compass(angle - LOOP_SPREAD - 10)
        p1 = (cx + out_x * radius, cy + out_y * radius)
        p2 = (cx + in_x * radius, cy + in_y * radius)
        k1 = (cx + c1x * radius * 2.6, cy + c1y * radius * 2.6)
        k2 = (cx + c2x * radius * 2.6, cy + c2y * radius * 2.6)
        path = (f'M{_r(p1[0])},{_r(p1[1])} C{_r(k1[0])},{_r(k1[1])} '
                f'{_r(k2[0])},{_r(k2[1])} {_r(p2[0])},{_r(p2[1])}')
        head = _arrow_head(p2, (p2[0] - k2[0], p2[1] - k2[1]), head_size)
        dx, dy = _compass(angle)
        label = (cx + dx * radius * 2.45, cy + dy * radius * 2.45)
        return _EdgeGeometry(path, head, (_r(label[0]), _r(label[1])))

    a = to_px(layout.nodes[edge.source])
    b = to_px(layout.nodes[edge.target])
    if edge.route.kind == 'arc':
        control = to_px(arc_control_point(layout.nodes, edge))
        ux, uy = _unit(control[0] - a[0], control[1] - a[1])
        start = (a[0] + ux * radius, a[1] + uy * radius)
        vx, vy = _unit(control[0] - b[0], control[1] - b[1])
        end = (b[0] + vx * radius, b[1] + vy * radius)
        path = (f'M{_r(start[0])},{_r(start[1])} Q{_r(control[0])},{_r(control[1])} '
                f'{_r(end[0])},{_r(end[1])}')
        head = _arrow_head(end, (end[0] - control[0], end[1] - control[1]), head_size)
        mid = (0.25 * start[0] + 0.5 * control[0] + 0.25 * end[0],
               0.25 * start[1] + 0.5 * control[1] + 0.25 * end[1])
        chord = ((start[0] + end[0]) / 2, (start[1] + end[1]) / 2)
        ox, oy = _unit(mid[0] - chord[0], mid[1] - chord[1])
        label = (mid[0] + ox * 0.35 * scale, mid[1] + oy * 0.35 * scale)
        return _EdgeGeometry(path, head, (_r(label[0]), _r(label[1])))

    ux, uy = _unit(b[0] - a[0], b[1] - a[1])
    start = (a[0] + ux * radius, a[1] + uy * radius)
    end = (b[0] - ux * radius, b[1] - uy * radius)
    path = f'M{_r(start[0])},{_r(start[1])} L{_r(end[0])},{_r(end[1])}'
    head = _arrow_head(end, (ux, uy), head_size)
    label = ((start[0] + end[0]) / 2 + uy * 0.35 * scale,
             (start[1] + end[1]) / 2 - ux * 0.35 * scale)
    return _EdgeGeometry(path, head, (_r(label[0]), _r(label[1])))


def _row_label(table: TableModel, state: str) -> str:
    prefix = ('→' if table.is_start(state) else '') + ('*' if table.is_accepting(state) else '')
    return f'{prefix} {state}' if prefix else state


def _compose(layout: LayoutGraph, table: TableModel, style: StyleConfig,
             symbols: Sequence[str]) -> _Scene:
    scale, font = style.scale, style.font_size

    # 遷移表
    cell_height = font * 1.9
    row_labels = [_row_label(table, state) for state in table.rows]
    row_header_width = max(text_width(label, font) for label in row_labels) + CELL_PADDING
    table_columns = []
    x = MARGIN + row_header_width
    for column in table.columns:
        contents = [column] + [table.cells[(state, column)] for state in table.rows]
        width = max(text_width(c, font) for c in contents) + CELL_PADDING
        table_columns.append((_r(x), _r(width)))
        x += width
    table_width = x - MARGIN
    table_height = cell_height * (len(table.rows) + 1)

    # 状態図
    min_x, min_y = layout.origin()
    span_x = layout.bounds[0] - 2
    span_y = layout.bounds[1] - 2
    diagram_left = MARGIN * 2 + table_width

    def to_px(point: Tuple[float, float]) -> Tuple[float, float]:
        return (diagram_left + (START_ARROW_ROOM + point[0] - min_x) * scale,
                MARGIN + (LOOP_ROOM + point[1] - min_y) * scale)

    nodes = {state: tuple(_r(v) for v in to_px(point)) for state, point in layout.nodes.items()}
    diagram_width = (START_ARROW_ROOM + span_x + LOOP_ROOM) * scale
    diagram_height = (2 * LOOP_ROOM + span_y) * scale
    edges = [_edge_geometry(edge, layout, to_px, scale) for edge in layout.edges]

    # 開始矢印（開始状態の西に自己ループがあれば北西から）
    start_loop = layout.edge_between(table.start, table.start) if table.start in layout.nodes else None
    approach = 135.0 if start_loop is not None and start_loop.route.anchor == 'W' else 180.0
    sx, sy = nodes[table.start]
    dx, dy = _compass(approach)
    tip = (sx + dx * scale, sy + dy * scale)
    tail = (sx + dx * scale * 2.2, sy + dy * scale * 2.2)
    start_arrow = ((_r(tail[0]), _r(tail[1])),
                   _arrow_head(tip, (tip[0] - tail[0], tip[1] - tail[1]), ARROW_SIZE * scale))

    # 入力文字列とキャンバス
    box = font * 1.4
    strip_width = box * len(symbols)
    width = max(diagram_left + diagram_width + MARGIN, strip_width + 2 * MARGIN, 240.0)
    strip_top = MARGIN + max(table_height, diagram_height) + MARGIN
    strip_left = (width - strip_width) / 2
    chars = [(_r(strip_left + box * (i + 0.5)), _r(strip_top + font)) for i in range(len(symbols))]
    verdict_at = (_r(width / 2), _r(strip_top + font * 2.8))
    height = strip_top + font * 3.8 + MARGIN

    return _Scene(
        width=_r(width), height=_r(height), nodes=nodes, edges=edges,
        start_arrow=start_arrow, row_labels=row_labels, table_columns=table_columns,
        table_origin=(MARGIN, MARGIN), row_header_width=_r(row_header_width),
        cell_height=_r(cell_height), chars=chars, verdict_at=verdict_at,
        symbols=tuple(symbols), diagram_left=diagram_left, min_x=min_x, min_y=min_y,
        scale=scale,
    )


# ---------------------------------------------------------------------------
# 描画
# ---------------------------------------------------------------------------

@dataclass
class _FrameState:
    """1フレーム分の可変部分"""
    highlight_edge: Optional[int] = None
    highlight_cell: Optional[Tuple[int, int]] = None
    consumed: Tuple[float, ...] = ()
    marker: Optional[Tuple[float, float]] = None
    verdict: Optional[Verdict] = None
    final_state: Optional[str] = None
    ghost: bool = False


def _draw(scene: _Scene, layout: LayoutGraph, table: TableModel, style: StyleConfig,
          state: _FrameState, verdict: Optional[Tuple[str, str]] = None,
          registry: Optional[Dict[str, Any]] = None) -> draw.Drawing:
    scale, font = style.scale, style.font_size
    registry = {} if registry is None else registry

    def keep(element, element_id: str):
        registry[element_id] = element
        return element

    d = draw.Drawing(scene.width, scene.height)
    d.append(draw.Rectangle(0, 0, scene.width, scene.height, fill=style.background))
    text_args = dict(font_family=style.font_family, fill=style.text)

    # 遷移表
    left, top = scene.table_origin
    header = draw.Group(id='table')
    for c, (x, w) in enumerate(scene.table_columns):
        header.append(draw.Text(table.columns[c], font, _r(x + w / 2), _r(top + scene.cell_height / 2),
                                text_anchor='middle', dominant_baseline='central', **text_args))
    for r, row in enumerate(table.rows):
        y = _r(top + scene.cell_height * (r + 1))
        header.append(draw.Text(scene.row_labels[r], font, _r(left + CELL_PADDING / 2),
                                _r(y + scene.cell_height / 2), dominant_baseline='central',
                                **text_args))
        for c, (x, w) in enumerate(scene.table_columns):
            lit = state.highlight_cell == (r, c)
            cell_id = f'cell-{r}-{c}'
            header.append(keep(draw.Rectangle(x, y, w, scene.cell_height, id=cell_id,
                                              fill=style.highlight if lit else style.state_fill,
                                              stroke=style.state_stroke, stroke_width=1), cell_id))
            header.append(draw.Text(table.cells[(row, table.columns[c])], font,
                                    _r(x + w / 2), _r(y + scene.cell_height / 2),
                                    text_anchor='middle', dominant_baseline='central', **text_args))
    d.append(header)

    # 辺
    for index, (edge, geometry) in enumerate(zip(layout.edges, scene.edges)):
        lit = state.highlight_edge == index
        group = draw.Group(id=f'edge-{index}', color=style.highlight if lit else style.state_stroke)
        group.append(draw.Path(d=geometry.path, stroke='currentColor', stroke_width=EDGE_WIDTH,
                               fill='none'))
        group.append(draw.Lines(*geometry.head, close=True, fill='currentColor', stroke='none'))
        d.append(keep(group, f'edge-{index}'))
        d.append(draw.Text(edge.label, font, geometry.label[0], geometry.label[1],
                           text_anchor='middle', dominant_baseline='central', **text_args))

    tail, head = scene.start_arrow
    d.append(draw.Line(tail[0], tail[1], head[0], head[1], stroke=style.state_stroke,
                       stroke_width=EDGE_WIDTH))
    d.append(draw.Lines(*head, close=True, fill=style.state_stroke, stroke='none'))

    # 状態
    for index, name in enumerate(layout.nodes):
        cx, cy = scene.nodes[name]
        stroke = style.state_stroke
        if state.verdict is not None and name == state.final_state:
            stroke = style.accept if state.verdict is Verdict.ACCEPTED else style.reject
        d.append(keep(draw.Circle(cx, cy, _r(scale), id=f'node-{index}', fill=style.state_fill,
                                  stroke=stroke, stroke_width=EDGE_WIDTH), f'node-{index}'))
        if table.is_accepting(name):
            d.append(draw.Circle(cx, cy, _r(scale * 0.8), fill='none',
                                 stroke=style.accept_ring, stroke_width=EDGE_WIDTH))
        size = min(font, 1.7 * scale / max(1, len(name)) / CHAR_ADVANCE)
        d.append(draw.Text(name, _r(size), cx, cy, text_anchor='middle',
                           dominant_baseline='central', **text_args))

    if state.marker is not None:
        d.append(keep(draw.Circle(_r(state.marker[0]), _r(state.marker[1]), _r(scale * 1.15),
                                  id='marker', fill='none', stroke=style.marker,
                                  stroke_width=3), 'marker'))

    # 入力文字列
    for k, (x, y) in enumerate(scene.chars):
        progress = state.consumed[k] if k < len(state.consumed) else 0.0
        args = dict(text_args)
        if state.ghost:
            args['fill'] = mix_color(style.text, style.ghost, progress)
            opacity = 1
        else:
            opacity = _r(1 - progress)
        d.append(keep(draw.Text(scene.symbols[k], font, x, y, id=f'char-{k}', text_anchor='middle',
                                dominant_baseline='central', opacity=opacity, **args), f'char-{k}'))

    if verdict is not None:
        label, color = verdict
        d.append(keep(draw.Text(label, font, scene.verdict_at[0], scene.verdict_at[1],
                                id='verdict', text_anchor='middle', dominant_baseline='central',
                                font_family=style.font_family, fill=color,
                                visibility='visible' if state.verdict is not None else 'hidden'),
                      'verdict'))
    return d


def render_static(layout: LayoutGraph, table: TableModel, style: StyleConfig,
                  symbols: Sequence[str] = ()) -> str:
    """
    静的な構成図を描画する

    受理状態は二重丸、開始状態には左からの矢印を描く。

    Args:
        layout: レイアウト
        table: 遷移表
        style: スタイル
        symbols: 下部に表示する入力文字列（省略可）

    Returns:
        str: SVG ドキュメント
    """
    scene = _compose(layout, table, style, tuple(symbols))
    return _draw(scene, layout, table, style, _FrameState()).as_svg()


# ---------------------------------------------------------------------------
# フレーム列
# ---------------------------------------------------------------------------

def _verdict(timeline: AnimationTimeline, style: StyleConfig) -> Tuple[str, str]:
    if timeline.verdict.verdict is Verdict.ACCEPTED:
        return 'ACCEPTED', style.accept
    return 'REJECTED', style.reject


def _frame_state(scene: _Scene, timeline: AnimationTimeline, layout: LayoutGraph,
                 table: TableModel, style: StyleConfig, frame: int) -> _FrameState:
    state = _FrameState(ghost=style.ghost_consumed)
    step = active_step(timeline, frame)
    if step is not None:
        edge = step.event(HighlightEdge)
        cell = step.event(HighlightCell)
        state.highlight_edge = layout.edge_index(edge.source, edge.target)
        state.highlight_cell = (table.row_index(cell.row), table.column_index(cell.column))
    state.consumed = tuple(consume_progress(timeline, frame, k) for k in range(len(timeline.input)))
    state.marker = scene.to_px(marker_position(timeline, layout, frame))
    group = timeline.group_at_frame(frame)
    if isinstance(group, VerdictGroup):
        state.verdict = group.verdict
        state.final_state = group.final_state
    return state


def render_frame(index: int, timeline: AnimationTimeline, layout: LayoutGraph,
                 table: TableModel, style: StyleConfig, scene: Optional[_Scene] = None) -> str:
    """フレーム index（0始まり、時刻 index / fps）の SVG ドキュメント"""
    if scene is None:
        scene = _compose(layout, table, style, timeline.input)
    state = _frame_state(scene, timeline, layout, table, style, index)
    return _draw(scene, layout, table, style, state, _verdict(timeline, style)).as_svg()


def frame_file_name(index: int) -> str:
    """フレーム index（0始まり）のファイル名（1始まりの連番）"""
    return FRAME_PATTERN % (index + 1)


def build_manifest(timeline: AnimationTimeline) -> str:
    """外部エンコーダ向けのマニフェスト"""
    fps = timeline.fps
    lines = [
        f'fps: {fps}',
        f'frames: {timeline.frame_count}',
        f'pattern: {FRAME_PATTERN}',
        'start_number: 1',
        f'duration: {_number(timeline.duration)}',
        '# Rasterize the SVG frames first, e.g. with rsvg-convert:',
        '#   for f in frame_*.svg; do rsvg-convert "$f" -o "${f%.svg}.png"; done',
        '# then assemble the video with ffmpeg:',
        f'#   ffmpeg -framerate {fps} -start_number 1 -i frame_%06d.png '
        f'-pix_fmt yuv420p simulation.mp4',
    ]
    return '\n'.join(lines) + '\n'


@dataclass(frozen=True)
class RenderedFrames:
    frames: Tuple[str, ...]
    manifest: str


def _render_all(timeline: AnimationTimeline, layout: LayoutGraph, table: TableModel,
                style: StyleConfig, jobs: int) -> List[str]:
    scene = _compose(layout, table, style, timeline.input)

    def render(index: int) -> str:
        return render_frame(index, timeline, layout, table, style, scene)

    indices = range(timeline.frame_count)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(render, indices))
    return [render(index) for index in indices]


def render_frames(timeline: AnimationTimeline, layout: LayoutGraph, table: TableModel,
                  style: StyleConfig, jobs: int = 1) -> RenderedFrames:
    """
    タイムラインをフレーム列に描画する

    フレーム数は ceil(総時間 × fps)。jobs > 1 の場合はスレッドプールで並列に描画するが、
    出力は逐次描画とバイト単位で同一になる。

    Returns:
        RenderedFrames: フレームの SVG 列とマニフェスト
    """
    frames = _render_all(timeline, layout, table, style, jobs)
    logger.debug(f"Rendered {len(frames)} frames")
    return RenderedFrames(tuple(frames), build_manifest(timeline))


def write_document(path, content: str) -> Path:
    """テキスト成果物を UTF-8・LF で書き出す"""
    path = Path(path)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
    except OSError as e:
        raise OutputIoError(str(path), e) from e
    return path


def write_frames(out_dir, timeline: AnimationTimeline, layout: LayoutGraph,
                 table: TableModel, style: StyleConfig, jobs: int = 1) -> List[Path]:
    """
    フレームとマニフェストを out_dir に書き出す

    Returns:
        List[Path]: 書き出したフレームのパス（マニフェストを除く）
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputIoError(str(out_dir), e) from e
    rendered = render_frames(timeline, layout, table, style, jobs)
    paths = [write_document(out_dir / frame_file_name(index), content)
             for index, content in enumerate(rendered.frames)]
    write_document(out_dir / MANIFEST_NAME, rendered.manifest)
    logger.info(f"Wrote {len(paths)} frames and {MANIFEST_NAME} to {out_dir}")
    return paths


# ---------------------------------------------------------------------------
# アニメーション SVG
# ---------------------------------------------------------------------------

def _number(value: float) -> str:
    text = f'{value:.6f}'.rstrip('0').rstrip('.')
    return text or '0'


def _seconds(value: float) -> str:
    return _number(value) + 's'


def render_animated_svg(timeline: AnimationTimeline, layout: LayoutGraph,
                        table: TableModel, style: StyleConfig) -> str:
    """
    宣言的アニメーション (SMIL) を含む単一の SVG を描画する

    各ステップグループにつき、辺の強調 <set>、セルの強調 <set>、文字の取り除き <animate>、
    マーカー移動の <animate> (cx, cy) を1つずつ持つ。判定は <set> で表示する。
    timeline-clock 要素の <animate> の長さがタイムライン全体の長さになる。

    Returns:
        str: SVG ドキュメント
    """
    scene = _compose(layout, table, style, timeline.input)
    base = _FrameState(ghost=style.ghost_consumed,
                       consumed=tuple(0.0 for _ in timeline.input),
                       marker=scene.to_px(marker_position(timeline, layout, 0)))
    elements: Dict[str, Any] = {}
    d = _draw(scene, layout, table, style, base, _verdict(timeline, style), registry=elements)

    for group in timeline.steps:
        begin, dur = _seconds(group.start), _seconds(group.duration)
        edge = group.event(HighlightEdge)
        cell = group.event(HighlightCell)
        edge_index = layout.edge_index(edge.source, edge.target)
        elements[f'edge-{edge_index}'].append_anim(
            draw.Set('color', dur, style.highlight, begin=begin))
        cell_id = f'cell-{table.row_index(cell.row)}-{table.column_index(cell.column)}'
        elements[cell_id].append_anim(draw.Set('fill', dur, style.highlight, begin=begin))
        char = elements[f'char-{group.index}']
        if style.ghost_consumed:
            char.append_anim(draw.Animate('fill', dur, style.text, style.ghost,
                                          begin=begin, fill='freeze'))
        else:
            char.append_anim(draw.Animate('opacity', dur, 1, 0, begin=begin, fill='freeze'))
        (x1, y1), (x2, y2) = scene.nodes[edge.source], scene.nodes[edge.target]
        marker = elements['marker']
        marker.append_anim(draw.Animate('cx', dur, x1, x2, begin=begin, fill='freeze'))
        marker.append_anim(draw.Animate('cy', dur, y1, y2, begin=begin, fill='freeze'))

    verdict = timeline.verdict
    begin, dur = _seconds(verdict.start), _seconds(verdict.duration)
    elements['verdict'].append_anim(
        draw.Set('visibility', dur, 'visible', begin=begin, fill='freeze'))
    final_index = list(layout.nodes).index(verdict.final_state)
    _, color = _verdict(timeline, style)
    elements[f'node-{final_index}'].append_anim(
        draw.Set('stroke', dur, color, begin=begin, fill='freeze'))

    clock = draw.Rectangle(0, 0, 0, 0, id='timeline-clock', opacity=0)
    clock.append_anim(draw.Animate('opacity', _seconds(timeline.duration), 0, 0,
                                   begin='0s', fill='freeze'))
    d.append(clock)
    logger.debug(f"Animated SVG: {len(timeline.steps)} steps, {_number(timeline.duration)}s")
    return d.as_svg()
