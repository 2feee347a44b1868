"""
Error types for FsmAnimator

定義ファイルの解析・検証、シミュレーション、変換、描画で発生する例外を定義します。
CLI (main.py) はすべて FsmError として捕捉し、終了コード 2 に変換します。
"""

from typing import Optional


class FsmError(Exception):
    """FsmAnimator の全例外の基底クラス"""


# ---------------------------------------------------------------------------
# 定義ファイル (.fsm) の構文エラー
# ---------------------------------------------------------------------------

class ParseError(FsmError):
    """構文エラー（1始まりの行・列を保持する）"""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class DuplicateField(ParseError):
    """フィールドまたは DFA の δ エントリの重複"""


class UnknownKind(ParseError):
    """kind が dfa / nfa 以外"""


# ---------------------------------------------------------------------------
# 機械の意味検証エラー
# ---------------------------------------------------------------------------

class DefinitionError(FsmError):
    """定義の意味的な誤り"""


class MissingTransition(DefinitionError):
    def __init__(self, state: str, symbol: str):
        self.state = state
        self.symbol = symbol
        super().__init__(f"missing transition for ({state!r}, {symbol!r})")


class UnknownState(DefinitionError):
    def __init__(self, state: str, context: str = ""):
        self.state = state
        where = f" in {context}" if context else ""
        super().__init__(f"unknown state {state!r}{where}")


class UnknownSymbol(DefinitionError):
    def __init__(self, symbol: str, context: str = ""):
        self.symbol = symbol
        where = f" in {context}" if context else ""
        super().__init__(f"unknown symbol {symbol!r}{where}")


class StartNotInStates(DefinitionError):
    def __init__(self, start: str):
        self.start = start
        super().__init__(f"start state {start!r} is not declared in states")


class DuplicateName(DefinitionError):
    def __init__(self, name: str, field: str):
        self.name = name
        self.field = field
        super().__init__(f"duplicate name {name!r} in {field}")


class EmptyDeclaration(DefinitionError):
    def __init__(self, field: str):
        self.field = field
        super().__init__(f"{field} must not be empty")


class InvalidName(DefinitionError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(
            f"invalid state name {name!r} "
            f"(must be non-empty, without surrounding whitespace or line breaks)")


class InvalidSymbol(DefinitionError):
    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(
            f"invalid symbol {symbol!r} "
            f"(a symbol is exactly one character other than a line break)")


class InvalidTitle(DefinitionError):
    def __init__(self, title: str):
        self.title = title
        super().__init__(f"invalid name {title!r} (a name must fit on one line)")


class KindMismatch(DefinitionError):
    def __init__(self, expected: str, actual: str, hint: str = ""):
        self.expected = expected
        self.actual = actual
        message = f"expected a {expected} definition, got {actual}"
        if hint:
            message += f": {hint}"
        super().__init__(message)


class TrapNameCollision(DefinitionError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"trap state name {name!r} is already a state")


# ---------------------------------------------------------------------------
# 実行時・変換時のエラー
# ---------------------------------------------------------------------------

class InvalidInputSymbol(FsmError):
    """入力文字列にアルファベット外の文字が含まれる（位置は0始まり）"""

    def __init__(self, position: int, symbol: str):
        self.position = position
        self.symbol = symbol
        super().__init__(
            f"input symbol {symbol!r} at position {position} is not in the alphabet")


class RegexSyntaxError(FsmError):
    """正規表現の構文エラー（位置は0始まりの文字インデックス）"""

    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"regex syntax error at position {position}: expected {expected}")


class AlphabetMismatch(FsmError):
    def __init__(self, left, right):
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(
            f"alphabets differ: {''.join(self.left)!r} vs {''.join(self.right)!r}")


class TraceMismatch(FsmError):
    """トレース・機械・レイアウトの不一致"""


class StyleError(FsmError):
    """スタイル設定の不正値"""


class OutputIoError(FsmError):
    """成果物の書き込み失敗"""

    def __init__(self, path: str, reason: Optional[BaseException] = None):
        self.path = path
        self.reason = reason
        detail = f": {reason}" if reason else ""
        super().__init__(f"cannot write {path}{detail}")


class ChainPlanError(FsmError):
    """チェーンのステージ順序が型的に不正"""


class EquivalenceFailure(FsmError):
    """連続する DFA ステージの言語が一致しない（変換の不具合）"""

    def __init__(self, left: str, right: str, counterexample: str):
        self.counterexample = counterexample
        super().__init__(
            f"{left} and {right} disagree on {counterexample!r}")
