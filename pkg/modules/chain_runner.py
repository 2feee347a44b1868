"""
Chain Runner Module for FsmAnimator

変換ステージ（regex-to-nfa → nfa-to-dfa → minimize）を順に実行する「チェーン」機能を提供します。
各ステージの機械を .fsm と静的 SVG として書き出し、連続する DFA ステージの言語等価性を検証します。
ステージ順序の型検査は、どの処理よりも前に行います。
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from modules.animation_timeline import build_timeline, transition_table
from modules.automata import (
    Dfa,
    Machine,
    Nfa,
    SimulationTrace,
    equivalent,
    minimize,
    simulate,
    subset_construction,
)
from modules.definition_format import definition_from_dfa, definition_from_nfa, save_definition
from modules.errors import ChainPlanError, EquivalenceFailure
from modules.layout_engine import layout
from modules.regex import RegexNode, regex_to_nfa
from modules.style_config import StyleConfig
from modules.svg_renderer import render_static, write_document, write_frames
from modules.utils.path_utils import output_path

REGEX_TO_NFA = 'regex-to-nfa'
NFA_TO_DFA = 'nfa-to-dfa'
MINIMIZE = 'minimize'

STAGE_ALIASES = {
    REGEX_TO_NFA: REGEX_TO_NFA, 'nfa': REGEX_TO_NFA,
    NFA_TO_DFA: NFA_TO_DFA, 'dfa': NFA_TO_DFA,
    MINIMIZE: MINIMIZE, 'min': MINIMIZE,
}
# ステージ -> (入力の種類, 出力の種類, ファイル名の短縮形)
STAGE_TYPES = {
    REGEX_TO_NFA: ('regex', 'nfa', 'nfa'),
    NFA_TO_DFA: ('nfa', 'dfa', 'dfa'),
    MINIMIZE: ('dfa', 'dfa', 'min'),
}
SIMULATION_DIR = 'simulation'


@dataclass
class ChainStage:
    """チェーンの1ステージ"""
    index: int
    kind: str
    machine_path: Path
    diagram_path: Path
    status: str = 'pending'
    machine: Optional[Machine] = None

    @property
    def label(self) -> str:
        return f'{self.index:02d}-{STAGE_TYPES[self.kind][2]}'


@dataclass
class ChainPlan:
    """型検査済みのステージ列と出力先"""
    source_kind: str
    stages: List[ChainStage]
    out_dir: Path
    input: Optional[str] = None

    @property
    def final_kind(self) -> str:
        return STAGE_TYPES[self.stages[-1].kind][1]


@dataclass
class ChainResult:
    stages: List[ChainStage]
    trace: Optional[SimulationTrace] = None
    frames: List[Path] = field(default_factory=list)

    @property
    def final_machine(self) -> Machine:
        return self.stages[-1].machine


def normalize_stage(name: str) -> str:
    """ステージ名（別名 nfa / dfa / min を含む）を正規名にする"""
    try:
        return STAGE_ALIASES[name]
    except KeyError:
        known = ', '.join(sorted(STAGE_ALIASES))
        raise ChainPlanError(f"unknown stage {name!r} (known: {known})")


def validate_plan(source_kind: str, stages: Sequence[str],
                  wants_input: bool = False) -> Tuple[bool, str]:
    """
    ステージ列の妥当性を検証する

    regex-to-nfa は先頭のみ、nfa-to-dfa は上流が NFA、minimize は上流が DFA であること。

    Args:
        source_kind: 入力の種類（'regex' / 'nfa' / 'dfa'）
        stages: 正規化済みのステージ名
        wants_input: 最終機械のシミュレーションを描画するか

    Returns:
        Tuple[bool, str]: (妥当性, エラーメッセージ)
    """
    if not stages:
        return False, "at least one stage is required"
    current = source_kind
    for position, stage in enumerate(stages, start=1):
        expected, produced, _ = STAGE_TYPES[stage]
        if current != expected:
            return False, (f"stage {position} ({stage}) needs a {expected} upstream, "
                           f"but the upstream is a {current}")
        current = produced
    if wants_input and current != 'dfa':
        return False, "--input needs a chain whose final stage produces a dfa"
    return True, ""


def build_plan(source_kind: str, stage_names: Sequence[str], out_dir,
               input_word: Optional[str] = None) -> ChainPlan:
    """
    ChainPlan を構築する（処理を始める前の型検査を含む）

    Raises:
        ChainPlanError: 未知のステージ名、または型的に不正な順序
    """
    stages = [normalize_stage(name) for name in stage_names]
    valid, message = validate_plan(source_kind, stages, input_word is not None)
    if not valid:
        raise ChainPlanError(message)
    out_dir = Path(out_dir)
    plan_stages = []
    for index, stage in enumerate(stages, start=1):
        label = f'{index:02d}-{STAGE_TYPES[stage][2]}'
        plan_stages.append(ChainStage(
            index=index,
            kind=stage,
            machine_path=output_path(out_dir, f'{label}.fsm'),
            diagram_path=output_path(out_dir, f'{label}.svg'),
        ))
    return ChainPlan(source_kind, plan_stages, out_dir, input_word)


def source_kind_of(source: Any) -> str:
    if isinstance(source, RegexNode):
        return 'regex'
    if isinstance(source, Nfa):
        return 'nfa'
    if isinstance(source, Dfa):
        return 'dfa'
    raise ChainPlanError(f"unsupported chain source: {type(source).__name__}")


class ChainRunner:
    """ChainPlan の実行器"""

    def __init__(self, style: StyleConfig, jobs: int = 1,
                 alphabet: Sequence[str] = ()):
        """
        コンストラクタ

        Args:
            style: 静的図とシミュレーションの描画スタイル
            jobs: フレーム描画の並列数
            alphabet: regex-to-nfa で追加するアルファベット
        """
        self.style = style
        self.jobs = jobs
        self.alphabet = tuple(alphabet)
        self.logger = logging.getLogger(__name__)

    def _apply(self, stage: str, current: Any) -> Machine:
        if stage == REGEX_TO_NFA:
            return regex_to_nfa(current, self.alphabet)
        if stage == NFA_TO_DFA:
            return subset_construction(current)
        return minimize(current)

    def _write_stage(self, stage: ChainStage) -> None:
        machine = stage.machine
        if isinstance(machine, Dfa):
            definition = definition_from_dfa(machine)
        else:
            definition = definition_from_nfa(machine)
        save_definition(definition, stage.machine_path)
        svg = render_static(layout(machine), transition_table(machine), self.style)
        write_document(stage.diagram_path, svg)

    def run(self, plan: ChainPlan, source: Any) -> ChainResult:
        """
        チェーンを実行する

        Args:
            plan: build_plan の結果
            source: 正規表現の AST、または検証済みの Nfa / Dfa

        Returns:
            ChainResult: 各ステージの機械と（--input 指定時は）最終機械のトレース

        Raises:
            EquivalenceFailure: 連続する DFA ステージの言語が一致しない
        """
        if source_kind_of(source) != plan.source_kind:
            raise ChainPlanError(f"plan expects a {plan.source_kind} source")

        current = source
        previous_dfa: Optional[Dfa] = None
        previous_label = ''
        for stage in plan.stages:
            try:
                stage.machine = self._apply(stage.kind, current)
            except Exception:
                stage.status = 'failed'
                raise
            if isinstance(stage.machine, Dfa):
                if previous_dfa is not None:
                    result = equivalent(previous_dfa, stage.machine)
                    if not result:
                        stage.status = 'failed'
                        raise EquivalenceFailure(previous_label, stage.label,
                                                 result.counterexample)
                previous_dfa = stage.machine
                previous_label = stage.label
            self._write_stage(stage)
            stage.status = 'done'
            self.logger.info(f"Stage {stage.label} ({stage.kind}): "
                             f"{len(stage.machine.states)} states -> {stage.machine_path.name}")
            current = stage.machine

        result = ChainResult(plan.stages)
        if plan.input is not None:
            final = result.final_machine
            trace = simulate(final, plan.input)
            graph = layout(final)
            timeline = build_timeline(final, trace, graph, self.style)
            result.trace = trace
            result.frames = write_frames(output_path(plan.out_dir, SIMULATION_DIR), timeline,
                                         graph, transition_table(final), self.style, self.jobs)
        return result

    def get_status(self, plan: ChainPlan) -> Dict[str, Any]:
        """各ステージの状態"""
        return {
            stage.label: {
                'stage': stage.kind,
                'status': stage.status,
                'states': len(stage.machine.states) if stage.machine else None,
                'file': stage.machine_path.name,
            }
            for stage in plan.stages
        }
