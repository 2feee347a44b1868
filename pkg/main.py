"""
FsmAnimator - Finite State Machine Simulation Animator

有限オートマトンを定義ファイル (.fsm) から読み込み、入力文字列に対するシミュレーションを
遷移表・状態図・入力文字列の同時アニメーションとして描画するコマンドラインツール
正規表現 → NFA → DFA → 最小 DFA の変換チェーンもサポート

終了コード: 0 = 受理（または成功）、1 = 拒否、2 = エラー
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from modules.animation_timeline import build_timeline, serialize_timeline, transition_table
from modules.app_logger import APP_LOGGER_NAME, setup_logging
from modules.automata import (
    Dfa,
    Nfa,
    complete,
    load_machine,
    minimize,
    nfa_accepts,
    simulate,
    simulate_nfa,
    subset_construction,
    subset_name,
    validate_dfa,
)
from modules.chain_runner import ChainRunner, build_plan, source_kind_of
from modules.definition_format import (
    definition_from_dfa,
    definition_from_nfa,
    load_definition,
    save_definition,
    serialize_definition,
)
from modules.errors import FsmError, KindMismatch
from modules.layout_engine import layout
from modules.regex import parse_regex, regex_to_nfa
from modules.style_config import StyleConfig, load_style_file
from modules.svg_renderer import (
    render_animated_svg,
    render_static,
    write_document,
    write_frames,
)
from modules.utils.path_utils import output_path, prepare_out_dir

CONFIG_PATH = os.path.join(os.path.dirname(__file__), 'config.json')

DEFAULT_CONFIG: Dict[str, Any] = {
    "log_level": "WARNING",
    "log_file": None,
    "max_log_size_mb": 10,
    "backup_log_count": 5,
    "jobs": 1,
}

EXIT_ACCEPTED = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2

RENDER_FORMATS = ('frames', 'animated-svg', 'timeline', 'static')
CONVERT_STAGES = ('regex-to-nfa', 'nfa-to-dfa', 'minimize')

logger = logging.getLogger(f'{APP_LOGGER_NAME}.Main')


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    設定ファイルを読み込む

    ファイルがなければ既定値を使う（既定値をファイルに書き出すことはしない）。

    Args:
        path: 設定ファイルのパス（省略時は main.py と同じ場所の config.json）

    Returns:
        Dict[str, Any]: 既定値にファイルの内容を上書きした設定
    """
    config = dict(DEFAULT_CONFIG)
    path = path or CONFIG_PATH
    if not os.path.exists(path):
        return config
    try:
        with open(path, 'r', encoding='utf-8') as f:
            loaded = json.load(f)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        print(f"Failed to load config {path}: {e}", file=sys.stderr)
        return config
    if isinstance(loaded, dict):
        config.update(loaded)
    return config


# ---------------------------------------------------------------------------
# 引数
# ---------------------------------------------------------------------------

def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return number


def _positive_float(value: str) -> float:
    number = float(value)
    if not number > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return number


def _add_render_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--fps', type=_positive_int, help='フレームレート（既定 30）')
    parser.add_argument('--step-duration', type=_positive_float,
                        help='1ステップの長さ（秒、既定 1.0）')
    parser.add_argument('--intro-duration', type=_positive_float,
                        help='導入部の長さ（秒、既定 2.0）')
    parser.add_argument('--verdict-duration', type=_positive_float,
                        help='判定表示の長さ（秒、既定 1.5）')
    parser.add_argument('--style', type=str, help='スタイルファイルのパス')
    parser.add_argument('--ghost-consumed', action='store_true',
                        help='読み終えた文字を消さずに灰色で残す')
    parser.add_argument('--jobs', type=_positive_int,
                        help='フレーム描画の並列数（出力は逐次と同一）')
    parser.add_argument('--force', action='store_true',
                        help='空でない出力ディレクトリへの書き込みを許可する')


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """コマンドライン引数を解析する"""
    parser = argparse.ArgumentParser(
        prog='fsm-animator',
        description='FsmAnimator - Finite State Machine Simulation Animator')
    parser.add_argument('--config', type=str, default=CONFIG_PATH,
                        help='設定ファイルのパス')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='ログを詳しくする（-v で INFO、-vv で DEBUG）')
    subparsers = parser.add_subparsers(dest='command', required=True)

    sim = subparsers.add_parser('simulate', help='入力文字列を実行してトレースを表示する')
    sim.add_argument('definition', help='定義ファイル (.fsm)')
    sim.add_argument('input', help='入力文字列')
    sim.add_argument('--complete-with-trap', metavar='NAME',
                     help='欠けている遷移をこの名前のトラップ状態へ向ける')

    render = subparsers.add_parser('render', help='シミュレーションを描画する')
    render.add_argument('definition', help='定義ファイル (.fsm)')
    render.add_argument('input', help='入力文字列')
    render.add_argument('--out-dir', required=True, help='出力ディレクトリ')
    render.add_argument('--format', choices=RENDER_FORMATS, default='frames',
                        help='出力形式（既定 frames）')
    render.add_argument('--complete-with-trap', metavar='NAME',
                        help='欠けている遷移をこの名前のトラップ状態へ向ける')
    _add_render_flags(render)

    convert = subparsers.add_parser('convert', help='機械を変換して .fsm に書き出す')
    convert.add_argument('definition', nargs='?', help='定義ファイル (.fsm)')
    convert.add_argument('stage', choices=CONVERT_STAGES, help='変換ステージ')
    convert.add_argument('--regex', help='正規表現（regex-to-nfa の入力）')
    convert.add_argument('-o', '--output', help='出力ファイル（省略時は標準出力）')
    convert.add_argument('--alphabet', default='',
                         help='正規表現に現れない記号も含めるアルファベット（例: abc）')

    chain = subparsers.add_parser('chain', help='変換ステージを連続して実行する')
    source = chain.add_mutually_exclusive_group(required=True)
    source.add_argument('--definition', help='定義ファイル (.fsm)')
    source.add_argument('--regex', help='正規表現')
    chain.add_argument('stages', nargs='+', metavar='STAGE',
                       help='regex-to-nfa (nfa) / nfa-to-dfa (dfa) / minimize (min)')
    chain.add_argument('--out-dir', required=True, help='出力ディレクトリ')
    chain.add_argument('--input', help='最終機械で実行して描画する入力文字列')
    chain.add_argument('--alphabet', default='',
                       help='正規表現に現れない記号も含めるアルファベット')
    _add_render_flags(chain)

    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# 共通処理
# ---------------------------------------------------------------------------

def _load_dfa(path: str, trap_name: Optional[str] = None) -> Dfa:
    definition = load_definition(path)
    if definition.kind == 'nfa':
        raise KindMismatch('dfa', 'nfa', 'convert it first with `convert FILE nfa-to-dfa`')
    if trap_name:
        return complete(definition, trap_name)
    return validate_dfa(definition)


def _build_style(args: argparse.Namespace) -> StyleConfig:
    style = StyleConfig()
    if getattr(args, 'style', None):
        style = load_style_file(args.style, style)
    return style.with_overrides(
        fps=args.fps,
        step_duration=args.step_duration,
        intro_duration=args.intro_duration,
        verdict_duration=args.verdict_duration,
        ghost_consumed=True if args.ghost_consumed else None,
    )


def _jobs(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    return args.jobs or int(config.get('jobs', 1) or 1)


# ---------------------------------------------------------------------------
# サブコマンド
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """
    入力文字列を実行し、1ステップ1行のトレースと判定を表示する

    Returns:
        int: 受理 0、拒否 1
    """
    definition = load_definition(args.definition)
    if definition.kind == 'nfa' and not args.complete_with_trap:
        nfa = load_machine(definition)
        history = simulate_nfa(nfa, args.input)
        for index, symbol in enumerate(args.input):
            print(f"{subset_name(history[index])} --{symbol}--> {subset_name(history[index + 1])}")
        accepted = nfa_accepts(nfa, args.input)
    else:
        dfa = _load_dfa(args.definition, args.complete_with_trap)
        trace = simulate(dfa, args.input)
        for step in trace.steps:
            print(f"{step.source} --{step.symbol}--> {step.target}")
        accepted = trace.accepted
    print('ACCEPTED' if accepted else 'REJECTED')
    logger.info(f"Simulated {args.definition} on {args.input!r}: "
                f"{'accepted' if accepted else 'rejected'}")
    return EXIT_ACCEPTED if accepted else EXIT_REJECTED


def cmd_render(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """
    シミュレーションを --format に応じて描画する

    Returns:
        int: 成功 0（判定結果は終了コードにしない）
    """
    style = _build_style(args)
    definition = load_definition(args.definition)

    if args.format == 'static' and definition.kind == 'nfa':
        machine = load_machine(definition)
        simulate_nfa(machine, args.input)
    else:
        machine = _load_dfa(args.definition, args.complete_with_trap)
    graph = layout(machine)
    table = transition_table(machine)

    if args.format == 'static':
        if isinstance(machine, Dfa):
            simulate(machine, args.input)
        out_dir = prepare_out_dir(args.out_dir, args.force)
        path = write_document(output_path(out_dir, 'diagram.svg'),
                              render_static(graph, table, style, tuple(args.input)))
        print(path)
        return EXIT_ACCEPTED

    trace = simulate(machine, args.input)
    timeline = build_timeline(machine, trace, graph, style)
    out_dir = prepare_out_dir(args.out_dir, args.force)

    if args.format == 'frames':
        paths = write_frames(out_dir, timeline, graph, table, style, _jobs(args, config))
        print(f"{len(paths)} frames -> {out_dir}")
    elif args.format == 'animated-svg':
        path = write_document(output_path(out_dir, 'animation.svg'),
                              render_animated_svg(timeline, graph, table, style))
        print(path)
    else:
        path = write_document(output_path(out_dir, 'timeline.json'), serialize_timeline(timeline))
        print(path)
    return EXIT_ACCEPTED


def cmd_convert(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """変換結果を .fsm 形式で書き出す"""
    if args.stage == 'regex-to-nfa':
        if args.regex is None or args.definition is not None:
            raise KindMismatch('regex', 'definition file' if args.definition else 'nothing',
                               'regex-to-nfa takes --regex "..."')
        result = regex_to_nfa(parse_regex(args.regex), tuple(args.alphabet))
    else:
        if args.definition is None:
            raise KindMismatch('definition file', 'regex',
                               'use `chain --regex ... nfa dfa min` to convert a regex further')
        machine = load_machine(load_definition(args.definition))
        if args.stage == 'nfa-to-dfa':
            if isinstance(machine, Dfa):
                raise KindMismatch('nfa', 'dfa', 'input is already deterministic')
            result = subset_construction(machine)
        else:
            if isinstance(machine, Nfa):
                raise KindMismatch('dfa', 'nfa', 'run nfa-to-dfa first')
            result = minimize(machine)

    definition = (definition_from_dfa(result) if isinstance(result, Dfa)
                  else definition_from_nfa(result))
    if args.output:
        save_definition(definition, args.output)
        logger.info(f"Wrote {args.stage} result ({len(result.states)} states) to {args.output}")
    else:
        sys.stdout.write(serialize_definition(definition))
    return EXIT_ACCEPTED


def cmd_chain(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """
    ChainPlan を型検査してから実行する

    Returns:
        int: 成功 0
    """
    if args.regex is not None:
        source = parse_regex(args.regex)
    else:
        source = load_machine(load_definition(args.definition))
    plan = build_plan(source_kind_of(source), args.stages, args.out_dir, args.input)
    style = _build_style(args)

    prepare_out_dir(args.out_dir, args.force)
    runner = ChainRunner(style, _jobs(args, config), tuple(args.alphabet))
    result = runner.run(plan, source)
    for stage in result.stages:
        print(f"{stage.machine_path.name}: {stage.kind}, {len(stage.machine.states)} states")
    if result.trace is not None:
        print(f"{len(result.frames)} frames -> {plan.out_dir / 'simulation'}")
        print('ACCEPTED' if result.trace.accepted else 'REJECTED')
    return EXIT_ACCEPTED


COMMANDS = {
    'simulate': cmd_simulate,
    'render': cmd_render,
    'convert': cmd_convert,
    'chain': cmd_chain,
}


def main(argv: Optional[List[str]] = None) -> int:
    """メイン関数"""
    args = parse_args(argv)

    try:
        config = load_config(args.config)
        setup_logging(config, args.verbose)
        return COMMANDS[args.command](args, config)
    except FsmError as e:
        logger.debug(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, UnicodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
