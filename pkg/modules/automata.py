"""
Automata Core Module for FsmAnimator

検証済みの DFA / NFA 型、ステップ実行とシミュレーション、
および変換アルゴリズム（部分集合構成法・最小化・補完）と言語等価性の判定を提供します。
すべての値は構築後に不変で、すべての操作は入力だけに依存する純粋関数です。
"""

import hashlib
import json
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from modules.definition_format import EPSILON, MachineDefinition, has_line_break
from modules.errors import (
    AlphabetMismatch,
    DuplicateField,
    DuplicateName,
    EmptyDeclaration,
    InvalidInputSymbol,
    InvalidName,
    InvalidSymbol,
    KindMismatch,
    MissingTransition,
    StartNotInStates,
    TrapNameCollision,
    UnknownState,
    UnknownSymbol,
)

EMPTY_SET_NAME = '∅'

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dfa:
    """決定性有限オートマトン (Q, Σ, δ, q0, F)。δ は全域"""
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    transitions: Dict[Tuple[str, str], str]
    start: str
    accepting: Tuple[str, ...]
    name: Optional[str] = None

    def is_accepting(self, state: str) -> bool:
        return state in self.accepting


@dataclass(frozen=True)
class Nfa:
    """非決定性有限オートマトン。δ は (状態, 記号または EPSILON) -> 遷移先のタプル"""
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    transitions: Dict[Tuple[str, str], Tuple[str, ...]]
    start: str
    accepting: Tuple[str, ...]
    name: Optional[str] = None

    def is_accepting(self, state: str) -> bool:
        return state in self.accepting


Machine = Union[Dfa, Nfa]


class Verdict(Enum):
    ACCEPTED = 'accepted'
    REJECTED = 'rejected'


@dataclass(frozen=True)
class Step:
    """1ステップ分の遷移 source --symbol--> target"""
    source: str
    symbol: str
    target: str


@dataclass(frozen=True)
class SimulationTrace:
    """1回の実行の記録。visited の長さは入力長 + 1"""
    machine_id: str
    input: Tuple[str, ...]
    steps: Tuple[Step, ...]
    visited: Tuple[str, ...]
    verdict: Verdict

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPTED

    @property
    def final_state(self) -> str:
        return self.visited[-1]


@dataclass(frozen=True)
class EquivalenceResult:
    """言語等価性の判定結果。不一致なら最短の区別文字列を持つ"""
    equivalent: bool
    counterexample: Optional[str] = None

    def __bool__(self) -> bool:
        return self.equivalent


# ---------------------------------------------------------------------------
# 検証
# ---------------------------------------------------------------------------

def _check_unique(names: Sequence[str], field_name: str) -> None:
    seen: Set[str] = set()
    for name in names:
        if name in seen:
            raise DuplicateName(name, field_name)
        seen.add(name)


def _valid_state_name(name: str) -> bool:
    return bool(name) and name == name.strip() and not has_line_break(name)


def _check_common(defn: MachineDefinition, require_alphabet: bool) -> None:
    for state in defn.states:
        if not _valid_state_name(state):
            raise InvalidName(state)
    _check_unique(defn.states, 'states')
    _check_unique(defn.alphabet, 'alphabet')
    if not defn.states:
        raise EmptyDeclaration('states')
    if require_alphabet and not defn.alphabet:
        raise EmptyDeclaration('alphabet')
    for symbol in defn.alphabet:
        if len(symbol) != 1 or has_line_break(symbol):
            raise InvalidSymbol(symbol)
    state_set = set(defn.states)
    if defn.start not in state_set:
        raise StartNotInStates(defn.start)
    for state in defn.accepting:
        if state not in state_set:
            raise UnknownState(state, 'accept')


def _check_dfa_transitions(defn: MachineDefinition) -> Dict[Tuple[str, str], str]:
    state_set = set(defn.states)
    symbol_set = set(defn.alphabet)
    table: Dict[Tuple[str, str], str] = {}
    for t in defn.transitions:
        if t.source not in state_set:
            raise UnknownState(t.source, 'delta')
        if t.symbol not in symbol_set:
            raise UnknownSymbol(t.symbol, 'delta')
        if t.target not in state_set:
            raise UnknownState(t.target, 'delta')
        if (t.source, t.symbol) in table:
            raise DuplicateField(t.line or 1, t.column or 1,
                                 f'duplicate transition for {(t.source, t.symbol)!r}')
        table[(t.source, t.symbol)] = t.target
    return table


def _ordered_accepting(states: Sequence[str], accepting: Iterable[str]) -> Tuple[str, ...]:
    accept_set = set(accepting)
    return tuple(s for s in states if s in accept_set)


def validate_dfa(defn: MachineDefinition) -> Dfa:
    """
    定義を検証して Dfa を構築する

    Args:
        defn: kind = dfa の定義

    Returns:
        Dfa: 宣言順を保持した検証済み DFA

    Raises:
        KindMismatch, InvalidName, DuplicateName, EmptyDeclaration, InvalidSymbol,
        StartNotInStates, UnknownState, UnknownSymbol, DuplicateField, MissingTransition
    """
    if defn.kind != 'dfa':
        raise KindMismatch('dfa', defn.kind)
    _check_common(defn, require_alphabet=True)
    table = _check_dfa_transitions(defn)
    for state in defn.states:
        for symbol in defn.alphabet:
            if (state, symbol) not in table:
                raise MissingTransition(state, symbol)
    return Dfa(
        states=tuple(defn.states),
        alphabet=tuple(defn.alphabet),
        transitions=table,
        start=defn.start,
        accepting=_ordered_accepting(defn.states, defn.accepting),
        name=defn.title,
    )


def validate_nfa(defn: MachineDefinition) -> Nfa:
    """
    定義を検証して Nfa を構築する

    アルファベットは空でもよい（例: 正規表現 ε の Thompson NFA）。
    同じ遷移の重複は1つにまとめる。

    Args:
        defn: kind = nfa の定義

    Returns:
        Nfa: 検証済み NFA
    """
    if defn.kind != 'nfa':
        raise KindMismatch('nfa', defn.kind)
    _check_common(defn, require_alphabet=False)
    state_set = set(defn.states)
    symbol_set = set(defn.alphabet)
    targets: Dict[Tuple[str, str], List[str]] = {}
    for t in defn.transitions:
        if t.source not in state_set:
            raise UnknownState(t.source, 'delta')
        if t.symbol != EPSILON and t.symbol not in symbol_set:
            raise UnknownSymbol(t.symbol, 'delta')
        if t.target not in state_set:
            raise UnknownState(t.target, 'delta')
        bucket = targets.setdefault((t.source, t.symbol), [])
        if t.target not in bucket:
            bucket.append(t.target)
    return Nfa(
        states=tuple(defn.states),
        alphabet=tuple(defn.alphabet),
        transitions={key: tuple(value) for key, value in targets.items()},
        start=defn.start,
        accepting=_ordered_accepting(defn.states, defn.accepting),
        name=defn.title,
    )


def load_machine(defn: MachineDefinition) -> Machine:
    """kind に応じて validate_dfa / validate_nfa を呼び分ける"""
    if defn.kind == 'nfa':
        return validate_nfa(defn)
    return validate_dfa(defn)


def complete(defn: MachineDefinition, trap_name: str) -> Dfa:
    """
    部分的な DFA 定義を全域化する

    欠けている δ エントリをすべて非受理のトラップ状態へ向け、
    トラップ状態は全記号で自己ループする。既に全域ならそのまま返す。

    Args:
        defn: kind = dfa の（部分的な）定義
        trap_name: 追加するトラップ状態の名前

    Returns:
        Dfa: 全域化された DFA

    Raises:
        TrapNameCollision: trap_name が既存の状態名と衝突する
    """
    if defn.kind != 'dfa':
        raise KindMismatch('dfa', defn.kind)
    _check_common(defn, require_alphabet=True)
    if trap_name in defn.states:
        raise TrapNameCollision(trap_name)
    if not _valid_state_name(trap_name):
        raise InvalidName(trap_name)
    table = _check_dfa_transitions(defn)
    missing = [(state, symbol)
               for state in defn.states
               for symbol in defn.alphabet
               if (state, symbol) not in table]
    states = tuple(defn.states)
    if missing:
        logger.info(f"Routing {len(missing)} missing transitions to trap state {trap_name!r}")
        states = states + (trap_name,)
        for pair in missing:
            table[pair] = trap_name
        for symbol in defn.alphabet:
            table[(trap_name, symbol)] = trap_name
    return Dfa(
        states=states,
        alphabet=tuple(defn.alphabet),
        transitions=table,
        start=defn.start,
        accepting=_ordered_accepting(states, defn.accepting),
        name=defn.title,
    )


def machine_fingerprint(machine: Machine) -> str:
    """
    機械の内容から識別子を計算する

    Returns:
        str: 正規化した5つ組の SHA-256 の先頭16桁
    """
    payload = {
        'states': list(machine.states),
        'alphabet': list(machine.alphabet),
        'transitions': sorted(
            [list(key), list(value) if isinstance(value, tuple) else value]
            for key, value in machine.transitions.items()),
        'start': machine.start,
        'accepting': list(machine.accepting),
    }
    content = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(content.encode('utf-8')).hexdigest()[:16]


# ---------------------------------------------------------------------------
# 実行
# ---------------------------------------------------------------------------

def step(dfa: Dfa, state: str, symbol: str) -> str:
    """δ(state, symbol) を返す"""
    if state not in dfa.states:
        raise UnknownState(state)
    if symbol not in dfa.alphabet:
        raise UnknownSymbol(symbol)
    return dfa.transitions[(state, symbol)]


def _check_input(alphabet: Sequence[str], word: Sequence[str]) -> Tuple[str, ...]:
    symbols = tuple(word)
    allowed = set(alphabet)
    for position, symbol in enumerate(symbols):
        if symbol not in allowed:
            raise InvalidInputSymbol(position, symbol)
    return symbols


def simulate(dfa: Dfa, word: Sequence[str]) -> SimulationTrace:
    """
    DFA を入力に対して実行する

    入力は文字単位（Unicode スカラー値単位）に分解される。
    アルファベット外の文字があれば、1ステップも実行せずに InvalidInputSymbol を送出する。

    Args:
        dfa: 検証済み DFA
        word: 入力（文字列または記号列）

    Returns:
        SimulationTrace: 実行トレース
    """
    symbols = _check_input(dfa.alphabet, word)
    visited = [dfa.start]
    steps = []
    current = dfa.start
    for symbol in symbols:
        target = dfa.transitions[(current, symbol)]
        steps.append(Step(current, symbol, target))
        visited.append(target)
        current = target
    verdict = Verdict.ACCEPTED if dfa.is_accepting(current) else Verdict.REJECTED
    return SimulationTrace(
        machine_id=machine_fingerprint(dfa),
        input=symbols,
        steps=tuple(steps),
        visited=tuple(visited),
        verdict=verdict,
    )


def accepts(dfa: Dfa, word: Sequence[str]) -> bool:
    """simulate(dfa, word) が受理なら True"""
    return simulate(dfa, word).accepted


def epsilon_closure(nfa: Nfa, seed: Iterable[str]) -> FrozenSet[str]:
    """
    ε 閉包（seed を含み ε 遷移で閉じた最小の集合）を計算する

    Raises:
        UnknownState: seed に未知の状態が含まれる
    """
    state_set = set(nfa.states)
    closure: Set[str] = set()
    stack = []
    for state in seed:
        if state not in state_set:
            raise UnknownState(state)
        if state not in closure:
            closure.add(state)
            stack.append(state)
    while stack:
        state = stack.pop()
        for target in nfa.transitions.get((state, EPSILON), ()):
            if target not in closure:
                closure.add(target)
                stack.append(target)
    return frozenset(closure)


def _move(nfa: Nfa, subset: Iterable[str], symbol: str) -> Set[str]:
    moved: Set[str] = set()
    for state in subset:
        moved.update(nfa.transitions.get((state, symbol), ()))
    return moved


def simulate_nfa(nfa: Nfa, word: Sequence[str]) -> List[FrozenSet[str]]:
    """
    NFA を集合単位で実行する

    Returns:
        List[FrozenSet[str]]: 各時点の状態集合（長さは入力長 + 1）
    """
    symbols = _check_input(nfa.alphabet, word)
    current = epsilon_closure(nfa, [nfa.start])
    history = [current]
    for symbol in symbols:
        current = epsilon_closure(nfa, _move(nfa, current, symbol))
        history.append(current)
    return history


def nfa_accepts(nfa: Nfa, word: Sequence[str]) -> bool:
    """最後の状態集合が受理状態を含むなら True"""
    final = simulate_nfa(nfa, word)[-1]
    return any(state in final for state in nfa.accepting)


# ---------------------------------------------------------------------------
# 変換
# ---------------------------------------------------------------------------

def subset_name(members: Iterable[str]) -> str:
    """状態集合の正規名 "{a,b,c}"（コードポイント順）。空集合は "∅" """
    ordered = sorted(members)
    if not ordered:
        return EMPTY_SET_NAME
    return '{' + ','.join(ordered) + '}'


class _NameAllocator:
    """集合 -> 名前の割り当て。異なる集合が同じ表記になる場合は ' を付けて区別する"""

    def __init__(self, reserved: Iterable[str] = ()):
        self.used: Set[str] = set(reserved)
        self.names: Dict[FrozenSet[str], str] = {}

    def name_for(self, members: FrozenSet[str], preferred: str) -> str:
        if members in self.names:
            return self.names[members]
        name = preferred
        while name in self.used:
            name += "'"
        self.used.add(name)
        self.names[members] = name
        return name


def subset_construction(nfa: Nfa) -> Dfa:
    """
    部分集合構成法で NFA を等価な DFA に変換する

    開始集合からの幅優先探索で到達可能な部分集合だけを生成し、
    記号はアルファベット順に探索する。空集合 "∅" はトラップ状態になる。

    Args:
        nfa: 検証済み NFA

    Returns:
        Dfa: 同じ言語を受理する DFA
    """
    if not nfa.alphabet:
        raise EmptyDeclaration('alphabet')
    allocator = _NameAllocator()
    start_set = epsilon_closure(nfa, [nfa.start])
    start_name = allocator.name_for(start_set, subset_name(start_set))
    order: List[FrozenSet[str]] = [start_set]
    queue = deque([start_set])
    table: Dict[Tuple[str, str], str] = {}
    accept_set = set(nfa.accepting)
    accepting: List[str] = []

    while queue:
        current = queue.popleft()
        current_name = allocator.names[current]
        if current & accept_set:
            accepting.append(current_name)
        for symbol in nfa.alphabet:
            target = epsilon_closure(nfa, _move(nfa, current, symbol))
            if target not in allocator.names:
                allocator.name_for(target, subset_name(target))
                order.append(target)
                queue.append(target)
            table[(current_name, symbol)] = allocator.names[target]

    states = tuple(allocator.names[subset] for subset in order)
    logger.debug(f"Subset construction: {len(nfa.states)} NFA states -> {len(states)} DFA states")
    return Dfa(
        states=states,
        alphabet=tuple(nfa.alphabet),
        transitions=table,
        start=start_name,
        accepting=_ordered_accepting(states, accepting),
        name=nfa.name,
    )


def reachable_states(dfa: Dfa) -> Tuple[str, ...]:
    """開始状態から到達可能な状態（宣言順）"""
    seen = {dfa.start}
    queue = deque([dfa.start])
    while queue:
        state = queue.popleft()
        for symbol in dfa.alphabet:
            target = dfa.transitions[(state, symbol)]
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return tuple(s for s in dfa.states if s in seen)


def remove_unreachable(dfa: Dfa) -> Dfa:
    """到達不能な状態を取り除く"""
    keep = reachable_states(dfa)
    if len(keep) == len(dfa.states):
        return dfa
    keep_set = set(keep)
    return Dfa(
        states=keep,
        alphabet=dfa.alphabet,
        transitions={key: value for key, value in dfa.transitions.items() if key[0] in keep_set},
        start=dfa.start,
        accepting=tuple(s for s in dfa.accepting if s in keep_set),
        name=dfa.name,
    )


def _refine_partition(dfa: Dfa) -> List[FrozenSet[str]]:
    """Hopcroft の分割細分化。ブロックは最初の要素の宣言順に並べて返す"""
    accept_set = frozenset(dfa.accepting)
    reject_set = frozenset(dfa.states) - accept_set
    partition: List[FrozenSet[str]] = [block for block in (accept_set, reject_set) if block]
    worklist: List[FrozenSet[str]] = list(partition)

    # 逆遷移: (記号, 遷移先) -> 遷移元の集合
    inverse: Dict[Tuple[str, str], Set[str]] = {}
    for (source, symbol), target in dfa.transitions.items():
        inverse.setdefault((symbol, target), set()).add(source)

    while worklist:
        splitter = worklist.pop(0)
        for symbol in dfa.alphabet:
            predecessors: Set[str] = set()
            for target in splitter:
                predecessors.update(inverse.get((symbol, target), ()))
            if not predecessors:
                continue
            refined: List[FrozenSet[str]] = []
            for block in partition:
                inside = block & predecessors
                outside = block - predecessors
                if not inside or not outside:
                    refined.append(block)
                    continue
                refined.extend([inside, outside])
                if block in worklist:
                    worklist.remove(block)
                    worklist.extend([inside, outside])
                else:
                    worklist.append(inside if len(inside) <= len(outside) else outside)
            partition = refined

    position = {state: index for index, state in enumerate(dfa.states)}
    return sorted(partition, key=lambda block: min(position[s] for s in block))


def minimize(dfa: Dfa) -> Dfa:
    """
    DFA を最小化する

    到達不能状態を除去した後、分割細分化で区別不能な状態をまとめる。
    単独のブロックは元の名前を保ち、併合したブロックは "{a,b}" と名付ける。

    Args:
        dfa: 検証済み DFA

    Returns:
        Dfa: 言語が等しく状態数が最小の DFA
    """
    trimmed = remove_unreachable(dfa)
    blocks = _refine_partition(trimmed)

    singles = [next(iter(block)) for block in blocks if len(block) == 1]
    allocator = _NameAllocator()
    # 単独ブロックの名前を先に確保する
    for name in singles:
        allocator.name_for(frozenset([name]), name)
    block_of: Dict[str, str] = {}
    for block in blocks:
        name = allocator.name_for(block, subset_name(block))
        for state in block:
            block_of[state] = name

    states = tuple(allocator.names[block] for block in blocks)
    table: Dict[Tuple[str, str], str] = {}
    for block in blocks:
        representative = next(iter(block))
        for symbol in trimmed.alphabet:
            table[(allocator.names[block], symbol)] = \
                block_of[trimmed.transitions[(representative, symbol)]]
    accepting = {block_of[s] for s in trimmed.accepting}
    logger.debug(f"Minimization: {len(dfa.states)} states -> {len(states)} states")
    return Dfa(
        states=states,
        alphabet=trimmed.alphabet,
        transitions=table,
        start=block_of[trimmed.start],
        accepting=_ordered_accepting(states, accepting),
        name=dfa.name,
    )


def equivalent(a: Dfa, b: Dfa) -> EquivalenceResult:
    """
    2つの DFA の言語等価性を判定する

    積オートマトン上を幅優先探索し、受理が食い違う対を探す。
    見つかった場合は最短の区別文字列を反例として返す。

    Raises:
        AlphabetMismatch: アルファベット（集合として）が異なる
    """
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch(a.alphabet, b.alphabet)
    start = (a.start, b.start)
    parent: Dict[Tuple[str, str], Optional[Tuple[Tuple[str, str], str]]] = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        left, right = pair
        if a.is_accepting(left) != b.is_accepting(right):
            symbols = []
            while parent[pair] is not None:
                pair, symbol = parent[pair]
                symbols.append(symbol)
            return EquivalenceResult(False, ''.join(reversed(symbols)))
        for symbol in a.alphabet:
            nxt = (a.transitions[(left, symbol)], b.transitions[(right, symbol)])
            if nxt not in parent:
                parent[nxt] = (pair, symbol)
                queue.append(nxt)
    return EquivalenceResult(True)
