"""
Layout Engine Module for FsmAnimator

状態図の自動レイアウトを行います。
開始状態からの幅優先距離でランク分けした左→右の階層レイアウトで、
ランク内は前任ノードの y 座標の重心順に並べます。座標は抽象単位（ノード半径 = 1）です。
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from modules.definition_format import EPSILON

RANK_SPACING = 4.0
ROW_SPACING = 3.0
NODE_RADIUS = 1.0
OPPOSITE_BEND = 0.8
LONG_EDGE_BEND = 1.2

# コンパス方位の角度（東 = 0、反時計回り）。同点時はこの順で選ぶ
ANCHOR_ANGLES = (('N', 90.0), ('E', 0.0), ('S', 270.0), ('W', 180.0))
EPSILON_LABEL = 'ε'

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Route:
    """
    辺の経路

    kind は 'straight' / 'arc' / 'self-loop'。
    bend は弧の中点のずれで、名前の小さい端点から大きい端点へのベクトル (dx, dy) に対する
    垂線 (-dy, dx) 方向を正とする。向かい合う2辺は符号が逆になり、反対側に膨らむ。
    """
    kind: str
    bend: float = 0.0
    anchor: Optional[str] = None


@dataclass(frozen=True)
class LayoutEdge:
    source: str
    target: str
    labels: Tuple[str, ...]
    route: Route

    @property
    def label(self) -> str:
        return ', '.join(self.labels)

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class LayoutGraph:
    """ノード座標・ランク・辺の経路・全体の大きさ"""
    nodes: Dict[str, Tuple[float, float]]
    ranks: Dict[str, int]
    edges: Tuple[LayoutEdge, ...]
    bounds: Tuple[float, float]

    def edge_index(self, source: str, target: str) -> Optional[int]:
        for index, edge in enumerate(self.edges):
            if edge.source == source and edge.target == target:
                return index
        return None

    def edge_between(self, source: str, target: str) -> Optional[LayoutEdge]:
        index = self.edge_index(source, target)
        return None if index is None else self.edges[index]

    def origin(self) -> Tuple[float, float]:
        """ノード中心の最小 x, y"""
        xs = [p[0] for p in self.nodes.values()]
        ys = [p[1] for p in self.nodes.values()]
        return min(xs), min(ys)

    def to_dict(self) -> Dict:
        return {
            'nodes': {state: [x, y] for state, (x, y) in self.nodes.items()},
            'ranks': dict(self.ranks),
            'edges': [
                {
                    'source': e.source,
                    'target': e.target,
                    'labels': list(e.labels),
                    'route': {'kind': e.route.kind, 'bend': e.route.bend,
                              'anchor': e.route.anchor},
                }
                for e in self.edges
            ],
            'bounds': list(self.bounds),
        }


def transition_triples(machine) -> List[Tuple[str, str, str]]:
    """
    機械の遷移を (遷移元, 表示記号, 遷移先) の列にする

    DFA / NFA の両方を扱う。NFA の ε 遷移は 'ε' と表示する。
    """
    triples = []
    for state in machine.states:
        for symbol in machine.alphabet:
            targets = machine.transitions.get((state, symbol))
            if targets is None:
                continue
            if isinstance(targets, str):
                targets = (targets,)
            for target in targets:
                triples.append((state, symbol, target))
        for target in machine.transitions.get((state, EPSILON), ()):
            triples.append((state, EPSILON_LABEL, target))
    return triples


def _compute_ranks(graph: nx.DiGraph, states: Sequence[str], start: str) -> Dict[str, int]:
    distances = nx.single_source_shortest_path_length(graph, start)
    unreachable_rank = max(distances.values()) + 1
    return {state: distances.get(state, unreachable_rank) for state in states}


def _place_nodes(graph: nx.DiGraph, states: Sequence[str],
                 ranks: Dict[str, int]) -> Dict[str, Tuple[float, float]]:
    positions: Dict[str, Tuple[float, float]] = {}
    for rank in range(max(ranks.values()) + 1):
        members = [s for s in states if ranks[s] == rank]

        def barycenter(state: str) -> float:
            ys = [positions[p][1] for p in graph.predecessors(state)
                  if ranks[p] < rank]
            return round(sum(ys) / len(ys), 9) if ys else 0.0

        members.sort(key=lambda s: (barycenter(s), s))
        count = len(members)
        for index, state in enumerate(members):
            y = ROW_SPACING * (index - (count - 1) / 2)
            positions[state] = (RANK_SPACING * rank, y + 0.0)
    return {state: positions[state] for state in states}


def arc_control_point(nodes: Dict[str, Tuple[float, float]], edge: LayoutEdge) -> Tuple[float, float]:
    """弧（2次ベジェ）の制御点。曲線の中点が bend だけずれる位置"""
    low, high = sorted((edge.source, edge.target))
    (x1, y1), (x2, y2) = nodes[low], nodes[high]
    dx, dy = x2 - x1, y2 - y1
    length = math.hypot(dx, dy) or 1.0
    nx_, ny_ = -dy / length, dx / length
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    return mx + nx_ * 2 * edge.route.bend, my + ny_ * 2 * edge.route.bend


def compass_angle(dx: float, dy: float) -> float:
    """キャンバス座標（y 下向き）のベクトルを方位角（東 = 0、北 = 90）に変換する"""
    return math.degrees(math.atan2(-dy, dx)) % 360.0


def angular_distance(a: float, b: float) -> float:
    diff = abs(a - b) % 360.0
    return min(diff, 360.0 - diff)


def incident_directions(layout: LayoutGraph, state: str) -> List[float]:
    """
    state に接続する自己ループ以外の辺が state から出ていく方向（方位角）

    直線は相手ノードの方向、弧は制御点の方向（接線方向）を使う。
    """
    x, y = layout.nodes[state]
    directions = []
    for edge in layout.edges:
        if edge.is_loop or state not in (edge.source, edge.target):
            continue
        if edge.route.kind == 'arc':
            px, py = arc_control_point(layout.nodes, edge)
        else:
            other = edge.target if edge.source == state else edge.source
            px, py = layout.nodes[other]
        directions.append(compass_angle(px - x, py - y))
    return directions


def place_self_loop(layout: LayoutGraph, state: str) -> str:
    """
    自己ループを描く方位を選ぶ

    接続する辺の方向との最小角距離が最大になる方位を N, E, S, W から選ぶ。
    同点の場合は N, E, S, W の順で先のものを選ぶ。

    Args:
        layout: レイアウト
        state: 自己ループを持つ状態

    Returns:
        str: 'N' / 'E' / 'S' / 'W'
    """
    directions = incident_directions(layout, state)
    best_anchor = ANCHOR_ANGLES[0][0]
    best_score = -1.0
    for anchor, angle in ANCHOR_ANGLES:
        if directions:
            score = round(min(angular_distance(angle, d) for d in directions), 9)
        else:
            score = 180.0
        if score > best_score:
            best_anchor, best_score = anchor, score
    return best_anchor


def _route_for(source: str, target: str, ranks: Dict[str, int],
               slots: Dict[str, int], pairs: Dict[Tuple[str, str], List[str]]) -> Route:
    sign = 1.0 if source < target else -1.0
    if (target, source) in pairs:
        return Route('arc', bend=sign * OPPOSITE_BEND)
    rank_gap = abs(ranks[source] - ranks[target])
    if rank_gap == 1 or (rank_gap == 0 and abs(slots[source] - slots[target]) == 1):
        return Route('straight')
    return Route('arc', bend=LONG_EDGE_BEND)


def layout(machine) -> LayoutGraph:
    """
    状態図のレイアウトを計算する

    rank(state) は開始状態からの幅優先距離（到達不能な状態は最大ランク + 1）、
    x = 4 × rank、ランク内は前任ノードの y の重心順（同点は名前順）に 3 単位間隔で中央揃え。
    同じ (遷移元, 遷移先) の遷移は1本の辺にまとめ、ラベルは記号のソート済み集合とする。

    Args:
        machine: 検証済みの Dfa または Nfa

    Returns:
        LayoutGraph: 入力が同じなら常に同じ結果
    """
    states = list(machine.states)
    pairs: Dict[Tuple[str, str], List[str]] = {}
    for source, symbol, target in transition_triples(machine):
        labels = pairs.setdefault((source, target), [])
        if symbol not in labels:
            labels.append(symbol)

    graph = nx.DiGraph()
    graph.add_nodes_from(states)
    graph.add_edges_from(pair for pair in pairs if pair[0] != pair[1])

    ranks = _compute_ranks(graph, states, machine.start)
    nodes = _place_nodes(graph, states, ranks)
    slots: Dict[str, int] = {}
    for state in states:
        same_rank = sorted((s for s in states if ranks[s] == ranks[state]),
                           key=lambda s: nodes[s][1])
        slots[state] = same_rank.index(state)

    xs = [p[0] for p in nodes.values()]
    ys = [p[1] for p in nodes.values()]
    bounds = (max(xs) - min(xs) + 2 * NODE_RADIUS, max(ys) - min(ys) + 2 * NODE_RADIUS)

    straight_and_arcs = tuple(
        LayoutEdge(source, target, tuple(sorted(labels)),
                   _route_for(source, target, ranks, slots, pairs))
        for (source, target), labels in pairs.items() if source != target
    )
    partial = LayoutGraph(nodes=nodes, ranks=ranks, edges=straight_and_arcs, bounds=bounds)

    edges = []
    for (source, target), labels in pairs.items():
        if source == target:
            route = Route('self-loop', anchor=place_self_loop(partial, source))
        else:
            route = _route_for(source, target, ranks, slots, pairs)
        edges.append(LayoutEdge(source, target, tuple(sorted(labels)), route))

    result = LayoutGraph(nodes=nodes, ranks=ranks, edges=tuple(edges), bounds=bounds)
    logger.debug(f"Layout: {len(nodes)} nodes, {len(edges)} edges, bounds {bounds}")
    return result
