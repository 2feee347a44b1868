"""hypothesis のストラテジー（ランダムな DFA / NFA / 定義）"""

from hypothesis import strategies as st

from modules.automata import Dfa, Nfa
from modules.definition_format import EPSILON, MachineDefinition, Transition

_LINE_SAFE = st.characters(blacklist_characters='\n\r', blacklist_categories=('Cs',))
WITH_LINE_BREAKS = st.one_of(st.sampled_from('\n\r'), st.characters(blacklist_categories=('Cs',)))


@st.composite
def dfas(draw, max_states: int = 8, max_symbols: int = 3):
    count = draw(st.integers(min_value=1, max_value=max_states))
    width = draw(st.integers(min_value=1, max_value=max_symbols))
    states = tuple(f'q{i}' for i in range(count))
    alphabet = tuple('abc'[:width])
    transitions = {}
    for state in states:
        for symbol in alphabet:
            transitions[(state, symbol)] = draw(st.sampled_from(states))
    accepting = tuple(s for s in states if draw(st.booleans()))
    return Dfa(states, alphabet, transitions, states[0], accepting)


@st.composite
def nfas(draw, max_states: int = 5):
    count = draw(st.integers(min_value=1, max_value=max_states))
    states = tuple(f'n{i}' for i in range(count))
    alphabet = ('a', 'b')
    transitions = {}
    for state in states:
        for symbol in alphabet + (EPSILON,):
            targets = draw(st.lists(st.sampled_from(states), unique=True, max_size=count))
            if targets:
                transitions[(state, symbol)] = tuple(targets)
    accepting = tuple(s for s in states if draw(st.booleans()))
    return Nfa(states, alphabet, transitions, states[0], accepting)


@st.composite
def machine_definitions(draw, characters=_LINE_SAFE):
    kind = draw(st.sampled_from(['dfa', 'nfa']))
    states = tuple(draw(st.lists(st.text(characters, min_size=1, max_size=6),
                                 min_size=1, max_size=5, unique=True)))
    alphabet = tuple(draw(st.lists(characters, min_size=1, max_size=4, unique=True)))
    symbols = alphabet + ((EPSILON,) if kind == 'nfa' else ())
    raw = draw(st.lists(st.tuples(st.sampled_from(states), st.sampled_from(symbols),
                                  st.sampled_from(states)), max_size=10))
    transitions = []
    used = set()
    for source, symbol, target in raw:
        if kind == 'dfa':
            if (source, symbol) in used:
                continue
            used.add((source, symbol))
        transitions.append(Transition(source, symbol, target))
    accepting = tuple(draw(st.lists(st.sampled_from(states), unique=True)))
    title = draw(st.one_of(st.none(), st.text(characters, max_size=12)))
    return MachineDefinition(
        kind=kind,
        states=states,
        alphabet=alphabet,
        transitions=tuple(transitions),
        start=draw(st.sampled_from(states)),
        accepting=accepting,
        title=title,
    )
