"""
Definition Format Module for FsmAnimator

有限オートマトンの定義ファイル (.fsm) の解析とシリアライズを行います。
行指向・UTF-8・LF改行・`#` コメントの形式で、形式的定義の5つ組を1行1フィールドで記述します。

    kind: dfa
    name: even number of a's
    states: e o
    alphabet: a b
    start: e
    accept: e
    delta:
      e a -> o
      e b -> e
      o a -> e
      o b -> o

ここでは構文のみを扱い、意味的な検証は automata.validate_dfa / validate_nfa が行います。
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from modules.errors import (
    DuplicateField,
    InvalidName,
    InvalidSymbol,
    InvalidTitle,
    OutputIoError,
    ParseError,
    UnknownKind,
)

EPSILON = 'epsilon'
ARROW = '->'
KINDS = ('dfa', 'nfa')
LINE_BREAKS = '\n\r'

# シリアライズ時のフィールド順（正規形）
FIELD_ORDER = ('kind', 'name', 'states', 'alphabet', 'start', 'accept', 'delta')
REQUIRED_FIELDS = ('kind', 'states', 'alphabet', 'start')

_FIELD_LINE = re.compile(r'^([A-Za-z_]+)[ \t]*:')

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Token:
    """1行内のトークン（列は1始まり）"""
    text: str
    column: int
    quoted: bool = False

    @property
    def is_arrow(self) -> bool:
        return not self.quoted and self.text == ARROW


@dataclass(frozen=True)
class Transition:
    """δ の1エントリ。行・列は診断用で等価比較には含めない"""
    source: str
    symbol: str
    target: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MachineDefinition:
    """定義ファイルの構文的な写し（未検証）"""
    kind: str
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    transitions: Tuple[Transition, ...]
    start: str
    accepting: Tuple[str, ...] = ()
    title: Optional[str] = None


def tokenize_line(line: str, line_no: int, start: int = 0) -> List[Token]:
    """
    1行をトークンに分割する

    空白区切り。`"` で囲んだトークンは `\\"` と `\\\\` のエスケープを持つ。
    引用符の外の `#` 以降はコメント、`->` は常に矢印トークンになる。

    Args:
        line: 行の内容（改行を含まない）
        line_no: 1始まりの行番号
        start: 解析を開始する0始まりのオフセット

    Returns:
        List[Token]: トークン列
    """
    tokens: List[Token] = []
    i = start
    n = len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == '#':
            break
        if ch == '"':
            column = i + 1
            i += 1
            buf = []
            while True:
                if i >= n:
                    raise ParseError(line_no, column, 'unterminated quoted token')
                ch = line[i]
                if ch == '\\':
                    if i + 1 >= n or line[i + 1] not in '"\\':
                        raise ParseError(line_no, i + 1,
                                         'invalid escape (only \\" and \\\\ are allowed)')
                    buf.append(line[i + 1])
                    i += 2
                    continue
                if ch == '"':
                    i += 1
                    break
                buf.append(ch)
                i += 1
            if i < n and not line[i].isspace() and line[i] != '#':
                raise ParseError(line_no, i + 1, 'expected whitespace after quoted token')
            tokens.append(Token(''.join(buf), column, quoted=True))
            continue
        if line.startswith(ARROW, i):
            tokens.append(Token(ARROW, i + 1))
            i += len(ARROW)
            continue
        column = i + 1
        begin = i
        while (i < n and not line[i].isspace() and line[i] not in '#"'
               and not line.startswith(ARROW, i)):
            i += 1
        if i < n and line[i] == '"':
            raise ParseError(line_no, i + 1, 'unexpected quote inside token')
        tokens.append(Token(line[begin:i], column))
    return tokens


def has_line_break(text: str) -> bool:
    """1行に書けない改行文字を含むか"""
    return any(ch in LINE_BREAKS for ch in text)


def quote_token(text: str) -> str:
    """必要な場合のみトークンを引用符で囲む"""
    needs_quotes = (
        not text
        or any(ch.isspace() for ch in text)
        or '#' in text
        or '"' in text
        or '\\' in text
        or ARROW in text
        or '{' in text
        or '}' in text
    )
    if not needs_quotes:
        return text
    escaped = text.replace('\\', '\\\\').replace('"', '\\"')
    return f'"{escaped}"'


def _split_lines(text: str) -> List[str]:
    if text.startswith('\ufeff'):
        text = text[1:]
    lines = text.split('\n')
    return [line[:-1] if line.endswith('\r') else line for line in lines]


def _names(tokens: Sequence[Token], line_no: int, field_name: str) -> Tuple[str, ...]:
    names = []
    for token in tokens:
        if token.is_arrow:
            raise ParseError(line_no, token.column, f"unexpected '->' in {field_name}")
        if not token.text:
            raise ParseError(line_no, token.column, f'empty name in {field_name}')
        names.append(token.text)
    return tuple(names)


def _parse_title(line: str, value_start: int, line_no: int) -> Optional[str]:
    raw = line[value_start:]
    if raw.strip().startswith('"'):
        tokens = tokenize_line(line, line_no, value_start)
        if len(tokens) != 1 or not tokens[0].quoted:
            column = tokens[1].column if len(tokens) > 1 else value_start + 1
            raise ParseError(line_no, column, 'name takes a single quoted string')
        return tokens[0].text
    title = raw.split('#', 1)[0].strip()
    return title or None


def _parse_transition(tokens: List[Token], line_no: int) -> List[Transition]:
    if (len(tokens) < 4 or not tokens[2].is_arrow
            or tokens[0].is_arrow or tokens[1].is_arrow):
        column = tokens[0].column if tokens else 1
        raise ParseError(line_no, column,
                         "transition must read 'from symbol -> to [to ...]'")
    source, symbol = tokens[0], tokens[1]
    for token in (source, symbol):
        if not token.text:
            raise ParseError(line_no, token.column, 'empty name in transition')
    targets = _names(tokens[3:], line_no, 'transition targets')
    return [Transition(source.text, symbol.text, target, line_no, source.column)
            for target in targets]


def parse_definition(text: str) -> MachineDefinition:
    """
    定義ドキュメントを解析する

    Args:
        text: .fsm ドキュメント

    Returns:
        MachineDefinition: 宣言順を保持した構文的な写し

    Raises:
        ParseError: 構文エラー（1始まりの行・列付き）
        DuplicateField: フィールドまたは DFA の δ エントリの重複
        UnknownKind: kind が dfa / nfa 以外
    """
    lines = _split_lines(text)
    values: Dict[str, object] = {}
    seen_on: Dict[str, int] = {}
    transitions: List[Transition] = []
    in_delta = False

    for index, line in enumerate(lines):
        line_no = index + 1
        if not line.strip() or line.lstrip().startswith('#'):
            continue

        if line[0].isspace():
            # インデントされた行は delta ブロックにのみ属する
            tokens = tokenize_line(line, line_no)
            if not tokens:
                continue
            if not in_delta:
                raise ParseError(line_no, tokens[0].column,
                                 'indented line outside of a delta block')
            transitions.extend(_parse_transition(tokens, line_no))
            continue

        in_delta = False
        match = _FIELD_LINE.match(line)
        if not match:
            raise ParseError(line_no, 1, "expected 'field: value'")
        key = match.group(1)
        value_start = match.end()
        if key not in FIELD_ORDER:
            raise ParseError(line_no, 1, f'unknown field {key!r}')
        if key in seen_on:
            raise DuplicateField(line_no, 1,
                                 f'field {key!r} already defined on line {seen_on[key]}')
        seen_on[key] = line_no

        if key == 'name':
            values[key] = _parse_title(line, value_start, line_no)
            continue

        tokens = tokenize_line(line, line_no, value_start)
        if key == 'kind':
            if len(tokens) != 1:
                column = tokens[1].column if tokens else value_start + 1
                raise ParseError(line_no, column, 'kind takes exactly one value')
            if tokens[0].text not in KINDS:
                raise UnknownKind(line_no, tokens[0].column,
                                  f'unknown kind {tokens[0].text!r} (expected dfa or nfa)')
            values[key] = tokens[0].text
        elif key == 'start':
            if len(tokens) != 1:
                column = tokens[1].column if tokens else value_start + 1
                raise ParseError(line_no, column, 'start takes exactly one state')
            values[key] = _names(tokens, line_no, key)[0]
        elif key == 'delta':
            if tokens:
                raise ParseError(line_no, tokens[0].column,
                                 'transitions go on the indented lines below delta:')
            in_delta = True
            values[key] = True
        else:
            values[key] = _names(tokens, line_no, key)

    last_line = max(1, len(lines))
    for key in REQUIRED_FIELDS:
        if key not in values:
            raise ParseError(last_line, 1, f'missing required field {key!r}')

    kind = values['kind']
    if kind == 'dfa':
        first_seen: Dict[Tuple[str, str], Transition] = {}
        for transition in transitions:
            pair = (transition.source, transition.symbol)
            if pair in first_seen:
                raise DuplicateField(
                    transition.line, transition.column,
                    f'duplicate transition for {pair!r} '
                    f'(first defined on line {first_seen[pair].line})')
            first_seen[pair] = transition

    definition = MachineDefinition(
        kind=kind,
        states=values['states'],
        alphabet=values['alphabet'],
        transitions=tuple(transitions),
        start=values['start'],
        accepting=values.get('accept', ()),
        title=values.get('name'),
    )
    logger.debug(f"Parsed {kind} definition: {len(definition.states)} states, "
                 f"{len(definition.transitions)} transitions")
    return definition


def _serialize_title(title: str) -> str:
    raw_ok = (
        title
        and title == title.strip()
        and '#' not in title
        and not title.startswith('"')
        and '\n' not in title and '\r' not in title
    )
    if raw_ok:
        return title
    escaped = title.replace('\\', '\\\\').replace('"', '\\"')
    return f'"{escaped}"'


def _check_single_line(defn: MachineDefinition) -> None:
    if defn.title is not None and has_line_break(defn.title):
        raise InvalidTitle(defn.title)
    names = [*defn.states, defn.start, *defn.accepting]
    names += [name for t in defn.transitions for name in (t.source, t.target)]
    for name in names:
        if has_line_break(name):
            raise InvalidName(name)
    for symbol in [*defn.alphabet, *(t.symbol for t in defn.transitions)]:
        if has_line_break(symbol):
            raise InvalidSymbol(symbol)


def serialize_definition(defn: MachineDefinition) -> str:
    """
    MachineDefinition を正規形のドキュメントに変換する

    フィールドは固定順、δ は1行1エントリ。

    Args:
        defn: 定義

    Returns:
        str: .fsm ドキュメント（LF改行、末尾改行あり）

    Raises:
        InvalidTitle, InvalidName, InvalidSymbol: 改行を含み、読み戻せない文書になる
    """
    _check_single_line(defn)

    def field_line(key: str, tokens: Sequence[str]) -> str:
        if not tokens:
            return f'{key}:'
        return f'{key}: ' + ' '.join(quote_token(t) for t in tokens)

    out = [f'kind: {defn.kind}']
    if defn.title is not None:
        out.append(f'name: {_serialize_title(defn.title)}')
    out.append(field_line('states', defn.states))
    out.append(field_line('alphabet', defn.alphabet))
    out.append(field_line('start', [defn.start]))
    out.append(field_line('accept', defn.accepting))
    out.append('delta:')
    for t in defn.transitions:
        out.append(f'  {quote_token(t.source)} {quote_token(t.symbol)} '
                   f'{ARROW} {quote_token(t.target)}')
    return '\n'.join(out) + '\n'


def _byte_location(raw: bytes, offset: int) -> Tuple[int, int]:
    """バイトオフセットを1始まりの (行, 列) に変換する（列は文字単位、BOM は数えない）"""
    prefix = raw[:offset]
    line = prefix.count(b'\n') + 1
    segment = prefix[prefix.rfind(b'\n') + 1:].decode('utf-8')
    if line == 1 and segment.startswith('\ufeff'):
        segment = segment[1:]
    return line, len(segment) + 1


def load_definition(path) -> MachineDefinition:
    """
    ファイルから定義を読み込む

    Raises:
        ParseError: UTF-8 として読めないバイトを含む（その位置を報告する）
        OSError: ファイルを読めない
    """
    raw = Path(path).read_bytes()
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as e:
        line, column = _byte_location(raw, e.start)
        raise ParseError(line, column, f"invalid UTF-8 byte 0x{raw[e.start]:02x}") from e
    return parse_definition(text)


def save_definition(defn: MachineDefinition, path) -> None:
    """定義をファイルに書き出す（書き出せない定義ではファイルを作らない）"""
    content = serialize_definition(defn)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
    except OSError as e:
        raise OutputIoError(str(path), e) from e


def definition_from_dfa(dfa) -> MachineDefinition:
    """検証済み Dfa を定義に戻す（δ は状態順×アルファベット順）"""
    transitions = tuple(
        Transition(state, symbol, dfa.transitions[(state, symbol)])
        for state in dfa.states
        for symbol in dfa.alphabet
    )
    defn = MachineDefinition(
        kind='dfa',
        states=tuple(dfa.states),
        alphabet=tuple(dfa.alphabet),
        transitions=transitions,
        start=dfa.start,
        accepting=tuple(dfa.accepting),
        title=dfa.name,
    )
    _check_single_line(defn)
    return defn


def definition_from_nfa(nfa) -> MachineDefinition:
    """検証済み Nfa を定義に戻す（ε 遷移は各状態の最後）"""
    transitions = []
    for state in nfa.states:
        for symbol in tuple(nfa.alphabet) + (EPSILON,):
            for target in nfa.transitions.get((state, symbol), ()):
                transitions.append(Transition(state, symbol, target))
    defn = MachineDefinition(
        kind='nfa',
        states=tuple(nfa.states),
        alphabet=tuple(nfa.alphabet),
        transitions=tuple(transitions),
        start=nfa.start,
        accepting=tuple(nfa.accepting),
        title=nfa.name,
    )
    _check_single_line(defn)
    return defn
