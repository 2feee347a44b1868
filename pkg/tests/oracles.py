"""
テスト用の独立したオラクル

実装とは別のアルゴリズムで答えを求める:
  - 全文字列の列挙
  - δ の直接の畳み込みによる DFA の判定
  - 構成を1つずつたどる NFA の判定
  - 表埋め法による最小状態数
  - AST 上のバックトラックによる正規表現の全体一致
"""

from itertools import product
from typing import Iterator, Sequence, Set

from modules.automata import Dfa, Nfa
from modules.definition_format import EPSILON
from modules.regex import Concat, EmptyString, Literal, Star, Union


def all_words(alphabet: Sequence[str], max_length: int) -> Iterator[str]:
    """長さ 0..max_length の全文字列（長さ順）"""
    for length in range(max_length + 1):
        for letters in product(alphabet, repeat=length):
            yield ''.join(letters)


def fold_dfa(dfa: Dfa, word: str) -> bool:
    state = dfa.start
    for symbol in word:
        state = dfa.transitions[(state, symbol)]
    return state in dfa.accepting


def nfa_oracle(nfa: Nfa, word: str) -> bool:
    """(状態, 位置) の構成を深さ優先でたどる"""
    seen = set()
    stack = [(nfa.start, 0)]
    while stack:
        state, position = stack.pop()
        if (state, position) in seen:
            continue
        seen.add((state, position))
        if position == len(word) and state in nfa.accepting:
            return True
        for target in nfa.transitions.get((state, EPSILON), ()):
            stack.append((target, position))
        if position < len(word):
            for target in nfa.transitions.get((state, word[position]), ()):
                stack.append((target, position + 1))
    return False


def minimal_state_count(dfa: Dfa) -> int:
    """表埋め法（到達可能な状態のみ）で区別可能性を求め、同値類の数を返す"""
    reachable = [dfa.start]
    index = 0
    while index < len(reachable):
        for symbol in dfa.alphabet:
            target = dfa.transitions[(reachable[index], symbol)]
            if target not in reachable:
                reachable.append(target)
        index += 1

    marked = set()
    for p in reachable:
        for q in reachable:
            if (p in dfa.accepting) != (q in dfa.accepting):
                marked.add((p, q))
    changed = True
    while changed:
        changed = False
        for p in reachable:
            for q in reachable:
                if (p, q) in marked:
                    continue
                for symbol in dfa.alphabet:
                    pair = (dfa.transitions[(p, symbol)], dfa.transitions[(q, symbol)])
                    if pair in marked:
                        marked.add((p, q))
                        changed = True
                        break

    classes = []
    for state in reachable:
        for cls in classes:
            if (state, cls[0]) not in marked:
                cls.append(state)
                break
        else:
            classes.append([state])
    return len(classes)


def _ends(node, word: str, start: int) -> Set[int]:
    if isinstance(node, EmptyString):
        return {start}
    if isinstance(node, Literal):
        if start < len(word) and word[start] == node.symbol:
            return {start + 1}
        return set()
    if isinstance(node, Concat):
        result = set()
        for middle in _ends(node.left, word, start):
            result |= _ends(node.right, word, middle)
        return result
    if isinstance(node, Union):
        return _ends(node.left, word, start) | _ends(node.right, word, start)
    if isinstance(node, Star):
        result = {start}
        frontier = {start}
        while frontier:
            following = set()
            for position in frontier:
                following |= _ends(node.inner, word, position)
            frontier = following - result
            result |= following
        return result
    raise TypeError(node)


def regex_fullmatch(ast, word: str) -> bool:
    return len(word) in _ends(ast, word, 0)
