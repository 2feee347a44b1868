"""
Regex Module for FsmAnimator

正規表現の構文解析と Thompson 構成法による NFA への変換を提供します。

構文: リテラル、'|'（和）、'*'（閉包）、'(' ')'、暗黙の連接。
優先順位は * > 連接 > |。'ε' は空文字列、空白は無視、'\\x' で任意の文字をリテラルにする。
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from modules.automata import Nfa, nfa_accepts
from modules.definition_format import EPSILON
from modules.errors import InvalidSymbol, RegexSyntaxError

EMPTY_STRING = 'ε'
_OPERATORS = '|*()'

logger = logging.getLogger(__name__)


class RegexNode:
    """正規表現 AST のノード基底クラス"""


@dataclass(frozen=True)
class EmptyString(RegexNode):
    pass


@dataclass(frozen=True)
class Literal(RegexNode):
    symbol: str


@dataclass(frozen=True)
class Concat(RegexNode):
    left: RegexNode
    right: RegexNode


@dataclass(frozen=True)
class Union(RegexNode):
    left: RegexNode
    right: RegexNode


@dataclass(frozen=True)
class Star(RegexNode):
    inner: RegexNode


RegexAst = RegexNode


class _RegexParser:
    """再帰下降パーサー"""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> Optional[str]:
        self._skip_space()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return None

    def parse(self) -> RegexNode:
        node = self._union()
        if self._peek() is not None:
            raise RegexSyntaxError(self.pos, 'end of input')
        return node

    def _union(self) -> RegexNode:
        node = self._concat()
        while self._peek() == '|':
            self.pos += 1
            node = Union(node, self._concat())
        return node

    def _concat(self) -> RegexNode:
        node = self._star()
        while True:
            ch = self._peek()
            if ch is None or ch in '|)':
                return node
            node = Concat(node, self._star())

    def _star(self) -> RegexNode:
        node = self._atom()
        while self._peek() == '*':
            self.pos += 1
            node = Star(node)
        return node

    def _atom(self) -> RegexNode:
        ch = self._peek()
        if ch is None or ch in '|)*':
            raise RegexSyntaxError(self.pos, "a literal, 'ε' or '('")
        if ch == '(':
            self.pos += 1
            node = self._union()
            if self._peek() != ')':
                raise RegexSyntaxError(self.pos, "')'")
            self.pos += 1
            return node
        if ch == '\\':
            if self.pos + 1 >= len(self.text):
                raise RegexSyntaxError(self.pos + 1, 'a character after the escape')
            self.pos += 2
            return Literal(self.text[self.pos - 1])
        self.pos += 1
        if ch == EMPTY_STRING:
            return EmptyString()
        return Literal(ch)


def parse_regex(text: str) -> RegexNode:
    """
    正規表現を AST に変換する

    Args:
        text: 正規表現

    Returns:
        RegexNode: 正規形の AST（連接・和は左結合）

    Raises:
        RegexSyntaxError: 構文エラー（0始まりの位置と期待したもの）
    """
    return _RegexParser(text).parse()


def regex_alphabet(ast: RegexNode) -> Tuple[str, ...]:
    """AST に現れるリテラル記号（コードポイント順）"""
    symbols: Set[str] = set()
    stack = [ast]
    while stack:
        node = stack.pop()
        if isinstance(node, Literal):
            symbols.add(node.symbol)
        elif isinstance(node, (Concat, Union)):
            stack.extend([node.left, node.right])
        elif isinstance(node, Star):
            stack.append(node.inner)
    return tuple(sorted(symbols))


class _ThompsonBuilder:
    """Thompson 構成法。状態は整数で作り、最後に名前を付け直す"""

    def __init__(self):
        self.count = 0
        self.edges: Dict[int, List[Tuple[str, int]]] = {}

    def new_state(self) -> int:
        state = self.count
        self.count += 1
        self.edges[state] = []
        return state

    def add(self, source: int, symbol: str, target: int):
        self.edges[source].append((symbol, target))

    def build(self, node: RegexNode) -> Tuple[int, int]:
        if isinstance(node, EmptyString):
            start, accept = self.new_state(), self.new_state()
            self.add(start, EPSILON, accept)
            return start, accept
        if isinstance(node, Literal):
            start, accept = self.new_state(), self.new_state()
            self.add(start, node.symbol, accept)
            return start, accept
        if isinstance(node, Concat):
            left_start, left_accept = self.build(node.left)
            right_start, right_accept = self.build(node.right)
            self.add(left_accept, EPSILON, right_start)
            return left_start, right_accept
        if isinstance(node, Union):
            start = self.new_state()
            left_start, left_accept = self.build(node.left)
            right_start, right_accept = self.build(node.right)
            accept = self.new_state()
            self.add(start, EPSILON, left_start)
            self.add(start, EPSILON, right_start)
            self.add(left_accept, EPSILON, accept)
            self.add(right_accept, EPSILON, accept)
            return start, accept
        if isinstance(node, Star):
            start = self.new_state()
            inner_start, inner_accept = self.build(node.inner)
            accept = self.new_state()
            self.add(start, EPSILON, inner_start)
            self.add(start, EPSILON, accept)
            self.add(inner_accept, EPSILON, inner_start)
            self.add(inner_accept, EPSILON, accept)
            return start, accept
        raise TypeError(f"Unknown regex node: {node!r}")


def regex_to_nfa(ast: RegexNode, alphabet: Optional[Sequence[str]] = None) -> Nfa:
    """
    Thompson 構成法で AST を NFA に変換する

    受理状態はちょうど1つで出ていく遷移を持たない。
    状態名は開始状態からの幅優先順に q0, q1, ... と付け直す。

    Args:
        ast: 正規表現の AST
        alphabet: 追加で含めるアルファベット（省略時は AST のリテラルのみ）

    Returns:
        Nfa: 同じ言語を受理する NFA
    """
    builder = _ThompsonBuilder()
    start, accept = builder.build(ast)

    symbols = set(regex_alphabet(ast))
    for symbol in alphabet or ():
        if len(symbol) != 1:
            raise InvalidSymbol(symbol)
        symbols.add(symbol)

    # 幅優先で名前を付け直す（記号順、ε は最後）
    def edge_order(edge: Tuple[str, int]) -> Tuple[bool, str]:
        return edge[0] == EPSILON, edge[0]

    names: Dict[int, str] = {}
    queue = deque([start])
    names[start] = 'q0'
    while queue:
        state = queue.popleft()
        for _, target in sorted(builder.edges[state], key=edge_order):
            if target not in names:
                names[target] = f'q{len(names)}'
                queue.append(target)

    order = sorted(names, key=lambda s: int(names[s][1:]))
    transitions: Dict[Tuple[str, str], Tuple[str, ...]] = {}
    for state in order:
        for symbol, target in builder.edges[state]:
            key = (names[state], symbol)
            if names[target] not in transitions.get(key, ()):
                transitions[key] = transitions.get(key, ()) + (names[target],)

    nfa = Nfa(
        states=tuple(names[s] for s in order),
        alphabet=tuple(sorted(symbols)),
        transitions=transitions,
        start=names[start],
        accepting=(names[accept],),
    )
    logger.debug(f"Thompson construction: {len(nfa.states)} states")
    return nfa


def regex_matches(ast: RegexNode, word: Iterable[str]) -> bool:
    """AST が word に全体一致するか（NFA の集合シミュレーションで判定）"""
    symbols = tuple(word)
    nfa = regex_to_nfa(ast, alphabet=symbols)
    return nfa_accepts(nfa, symbols)
