"""共通フィクスチャ"""

import logging

import pytest

from modules.app_logger import APP_LOGGER_NAME
from modules.automata import validate_dfa, validate_nfa
from modules.definition_format import parse_definition
from modules.style_config import StyleConfig

EVEN_AS = """\
kind: dfa
name: even number of a's        # optional
states: e o
alphabet: a b
start: e
accept: e
delta:
  e a -> o
  e b -> e
  o a -> e
  o b -> o
"""

# 状態 q2 で c を読むと q0 に戻る機械
ENDS_IN_AB = """\
kind: dfa
name: ends in ab
states: q0 q1 q2
alphabet: a b c
start: q0
accept: q2
delta:
  q0 a -> q1
  q0 b -> q0
  q0 c -> q0
  q1 a -> q1
  q1 b -> q2
  q1 c -> q0
  q2 a -> q1
  q2 b -> q0
  q2 c -> q0
"""

CONTAINS_AB = """\
kind: nfa
name: contains ab
states: p0 p1 p2
alphabet: a b
start: p0
accept: p2
delta:
  p0 a -> p0 p1
  p0 b -> p0
  p1 b -> p2
  p2 a -> p2
  p2 b -> p2
"""

# 2つの状態 (q1, q1x) が区別不能な DFA
DUPLICATED = """\
kind: dfa
states: q0 q1 q1x q2
alphabet: a b
start: q0
accept: q2
delta:
  q0 a -> q1
  q0 b -> q1x
  q1 a -> q2
  q1 b -> q0
  q1x a -> q2
  q1x b -> q0
  q2 a -> q2
  q2 b -> q2
"""


@pytest.fixture(autouse=True)
def reset_loggers():
    """main() が設定したハンドラーをテストごとに外す"""
    yield
    for name in (APP_LOGGER_NAME, 'modules'):
        target = logging.getLogger(name)
        for handler in target.handlers[:]:
            target.removeHandler(handler)
            handler.close()
        target.setLevel(logging.NOTSET)
        target.propagate = True


@pytest.fixture
def even_as_text():
    return EVEN_AS


@pytest.fixture
def even_as():
    return validate_dfa(parse_definition(EVEN_AS))


@pytest.fixture
def ends_in_ab():
    return validate_dfa(parse_definition(ENDS_IN_AB))


@pytest.fixture
def contains_ab():
    return validate_nfa(parse_definition(CONTAINS_AB))


@pytest.fixture
def duplicated():
    return validate_dfa(parse_definition(DUPLICATED))


@pytest.fixture
def style():
    return StyleConfig()


@pytest.fixture
def even_as_file(tmp_path):
    path = tmp_path / 'even.fsm'
    path.write_text(EVEN_AS, encoding='utf-8')
    return path


@pytest.fixture
def contains_ab_file(tmp_path):
    path = tmp_path / 'contains_ab.fsm'
    path.write_text(CONTAINS_AB, encoding='utf-8')
    return path
