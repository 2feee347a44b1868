import pytest
from hypothesis import given, settings

from modules.automata import (
    Dfa,
    Verdict,
    accepts,
    complete,
    epsilon_closure,
    equivalent,
    load_machine,
    machine_fingerprint,
    minimize,
    nfa_accepts,
    reachable_states,
    simulate,
    simulate_nfa,
    step,
    subset_construction,
    subset_name,
    validate_dfa,
    validate_nfa,
)
from modules.definition_format import EPSILON, MachineDefinition, Transition, parse_definition
from modules.errors import (
    AlphabetMismatch,
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
from tests.conftest import CONTAINS_AB
from tests.oracles import all_words, fold_dfa, minimal_state_count, nfa_oracle
from tests.strategies import dfas, nfas


def _dfa_definition(**changes):
    values = dict(
        kind='dfa',
        states=('x', 'y'),
        alphabet=('a',),
        transitions=(Transition('x', 'a', 'y'), Transition('y', 'a', 'x')),
        start='x',
        accepting=('y',),
    )
    values.update(changes)
    return MachineDefinition(**values)


# ---------------------------------------------------------------------------
# 検証
# ---------------------------------------------------------------------------

def test_validate_dfa_keeps_declaration_order(even_as):
    assert even_as.states == ('e', 'o')
    assert even_as.transitions[('o', 'a')] == 'e'
    assert even_as.name == "even number of a's"


def test_accepting_follows_state_order():
    dfa = validate_dfa(_dfa_definition(accepting=('y', 'x')))
    assert dfa.accepting == ('x', 'y')


@pytest.mark.parametrize('changes, error', [
    ({'transitions': (Transition('x', 'a', 'y'),)}, MissingTransition),
    ({'start': 'z'}, StartNotInStates),
    ({'accepting': ('z',)}, UnknownState),
    ({'states': ('x', 'y', 'x')}, DuplicateName),
    ({'alphabet': ('a', 'a')}, DuplicateName),
    ({'alphabet': ()}, EmptyDeclaration),
    ({'states': ()}, EmptyDeclaration),
    ({'alphabet': ('ab',)}, InvalidSymbol),
    ({'states': ('x', ' y')}, InvalidName),
    ({'states': ('x', 'y\nz')}, InvalidName),
    ({'alphabet': ('a', '\r')}, InvalidSymbol),
    ({'transitions': (Transition('x', 'a', 'y'), Transition('y', 'b', 'x'))}, UnknownSymbol),
    ({'transitions': (Transition('x', 'a', 'z'), Transition('y', 'a', 'x'))}, UnknownState),
    ({'kind': 'nfa'}, KindMismatch),
])
def test_validate_dfa_errors(changes, error):
    with pytest.raises(error):
        validate_dfa(_dfa_definition(**changes))


def test_missing_transition_names_the_pair():
    with pytest.raises(MissingTransition) as info:
        validate_dfa(_dfa_definition(transitions=(Transition('x', 'a', 'y'),)))
    assert (info.value.state, info.value.symbol) == ('y', 'a')


def test_validate_nfa_merges_repeated_targets(contains_ab):
    assert contains_ab.transitions[('p0', 'a')] == ('p0', 'p1')
    defn = MachineDefinition('nfa', ('s',), ('a',), (Transition('s', 'a', 's'),) * 2, 's')
    assert validate_nfa(defn).transitions[('s', 'a')] == ('s',)


def test_validate_nfa_allows_empty_alphabet():
    defn = MachineDefinition('nfa', ('s', 't'), (), (Transition('s', EPSILON, 't'),), 's', ('t',))
    nfa = validate_nfa(defn)
    assert nfa_accepts(nfa, '')


def test_load_machine_dispatches_on_kind(even_as_text):
    assert isinstance(load_machine(parse_definition(even_as_text)), Dfa)
    assert not isinstance(load_machine(parse_definition(CONTAINS_AB)), Dfa)


# ---------------------------------------------------------------------------
# 補完
# ---------------------------------------------------------------------------

def test_complete_routes_missing_entries_to_trap():
    defn = _dfa_definition(alphabet=('a', 'b'))
    dfa = complete(defn, 'dead')
    assert dfa.states == ('x', 'y', 'dead')
    assert dfa.transitions[('x', 'b')] == 'dead'
    assert dfa.transitions[('dead', 'a')] == 'dead'
    assert not dfa.is_accepting('dead')
    assert not accepts(dfa, 'ab')
    assert accepts(dfa, 'a')


def test_complete_leaves_total_machine_alone():
    dfa = complete(_dfa_definition(), 'dead')
    assert dfa.states == ('x', 'y')


def test_complete_rejects_colliding_trap_name():
    with pytest.raises(TrapNameCollision):
        complete(_dfa_definition(), 'x')


@pytest.mark.parametrize('trap_name', ['', ' dead', 'dead\nend'])
def test_complete_rejects_invalid_trap_name(trap_name):
    with pytest.raises(InvalidName):
        complete(_dfa_definition(), trap_name)


# ---------------------------------------------------------------------------
# 実行
# ---------------------------------------------------------------------------

def test_simulate_even_as(even_as):
    trace = simulate(even_as, 'abab')
    assert trace.visited == ('e', 'o', 'o', 'e', 'e')
    assert trace.verdict is Verdict.ACCEPTED
    assert [s.symbol for s in trace.steps] == ['a', 'b', 'a', 'b']
    assert trace.machine_id == machine_fingerprint(even_as)


def test_simulate_empty_input(even_as):
    trace = simulate(even_as, '')
    assert trace.steps == ()
    assert trace.visited == ('e',)
    assert trace.accepted


def test_invalid_input_symbol_is_zero_based(even_as):
    with pytest.raises(InvalidInputSymbol) as info:
        simulate(even_as, 'abxa')
    assert info.value.position == 2
    assert info.value.symbol == 'x'


def test_step_rejects_unknown_names(even_as):
    assert step(even_as, 'e', 'a') == 'o'
    with pytest.raises(UnknownState):
        step(even_as, 'z', 'a')
    with pytest.raises(UnknownSymbol):
        step(even_as, 'e', 'z')


def test_simulate_is_deterministic(ends_in_ab):
    assert simulate(ends_in_ab, 'abcab') == simulate(ends_in_ab, 'abcab')


@settings(max_examples=500)
@given(dfas())
def test_traces_follow_the_transition_function(dfa):
    for word in all_words(dfa.alphabet, 4):
        trace = simulate(dfa, word)
        assert len(trace.visited) == len(word) + 1
        assert trace.visited[0] == dfa.start
        for index, s in enumerate(trace.steps):
            assert dfa.transitions[(trace.visited[index], word[index])] == trace.visited[index + 1]
            assert (s.source, s.symbol, s.target) == \
                (trace.visited[index], word[index], trace.visited[index + 1])
        assert trace.accepted == fold_dfa(dfa, word)


def test_epsilon_closure():
    defn = parse_definition(
        'kind: nfa\nstates: a b c d\nalphabet: x\nstart: a\ndelta:\n'
        '  a epsilon -> b\n  b epsilon -> c a\n  d epsilon -> a\n')
    nfa = validate_nfa(defn)
    assert epsilon_closure(nfa, ['a']) == frozenset({'a', 'b', 'c'})
    assert epsilon_closure(nfa, []) == frozenset()
    with pytest.raises(UnknownState):
        epsilon_closure(nfa, ['zz'])


def test_simulate_nfa_contains_ab(contains_ab):
    history = simulate_nfa(contains_ab, 'aab')
    assert [subset_name(s) for s in history] == ['{p0}', '{p0,p1}', '{p0,p1}', '{p0,p2}']
    assert nfa_accepts(contains_ab, 'bab')
    assert not nfa_accepts(contains_ab, 'bba')


@settings(max_examples=200)
@given(nfas())
def test_subset_construction_agrees_with_nfa(nfa):
    dfa = subset_construction(nfa)
    for word in all_words(nfa.alphabet, 6):
        expected = nfa_oracle(nfa, word)
        assert nfa_accepts(nfa, word) == expected
        assert accepts(dfa, word) == expected


# ---------------------------------------------------------------------------
# 変換
# ---------------------------------------------------------------------------

def test_subset_name():
    assert subset_name(['q2', 'q0', 'q1']) == '{q0,q1,q2}'
    assert subset_name([]) == '∅'


def test_subset_construction_contains_ab(contains_ab):
    dfa = subset_construction(contains_ab)
    assert dfa.start == '{p0}'
    assert dfa.states[:3] == ('{p0}', '{p0,p1}', '{p0,p2}')
    assert '{p0,p2}' in dfa.accepting
    assert len(minimize(dfa).states) == 3


def test_subset_construction_introduces_empty_set_trap():
    defn = parse_definition('kind: nfa\nstates: s t\nalphabet: a b\nstart: s\naccept: t\n'
                            'delta:\n  s a -> t\n')
    dfa = subset_construction(validate_nfa(defn))
    assert dfa.states == ('{s}', '{t}', '∅')
    assert dfa.transitions[('∅', 'a')] == '∅'


def test_colliding_subset_names_get_a_prime():
    # {"a,b"} と {a, b} はどちらも "{a,b}" と表記される
    defn = parse_definition('kind: nfa\nstates: a b "a,b"\nalphabet: x\nstart: "a,b"\n'
                            'delta:\n  "a,b" x -> a b\n  a x -> "a,b"\n')
    dfa = subset_construction(validate_nfa(defn))
    assert dfa.states == ('{a,b}', "{a,b}'")
    assert dfa.transitions[("{a,b}'", 'x')] == '{a,b}'


def test_minimize_merges_indistinguishable_states(duplicated):
    smaller = minimize(duplicated)
    assert len(smaller.states) == len(duplicated.states) - 1
    assert '{q1,q1x}' in smaller.states
    assert equivalent(smaller, duplicated)


def test_minimize_drops_unreachable_states():
    defn = parse_definition('kind: dfa\nstates: s t u\nalphabet: a\nstart: s\naccept: s\n'
                            'delta:\n  s a -> s\n  t a -> u\n  u a -> t\n')
    dfa = validate_dfa(defn)
    assert reachable_states(dfa) == ('s',)
    assert minimize(dfa).states == ('s',)


@settings(max_examples=300)
@given(dfas())
def test_minimize_is_equivalent_minimal_and_idempotent(dfa):
    smaller = minimize(dfa)
    assert equivalent(dfa, smaller)
    assert len(smaller.states) == minimal_state_count(dfa)
    again = minimize(smaller)
    assert again.states == smaller.states
    assert again.transitions == smaller.transitions


def test_equivalent_reports_shortest_counterexample(even_as):
    odd = Dfa(even_as.states, even_as.alphabet, even_as.transitions, 'e', ('o',))
    result = equivalent(even_as, odd)
    assert not result
    assert result.counterexample == ''

    only_empty = Dfa(('s', 'd'), ('a', 'b'),
                     {('s', 'a'): 'd', ('s', 'b'): 'd', ('d', 'a'): 'd', ('d', 'b'): 'd'},
                     's', ('s',))
    result = equivalent(even_as, only_empty)
    assert result.counterexample == 'b'


@settings(max_examples=200)
@given(dfas(max_symbols=2), dfas(max_symbols=2))
def test_counterexample_separates_languages(left, right):
    if set(left.alphabet) != set(right.alphabet):
        with pytest.raises(AlphabetMismatch):
            equivalent(left, right)
        return
    result = equivalent(left, right)
    if result:
        for word in all_words(left.alphabet, 5):
            assert fold_dfa(left, word) == fold_dfa(right, word)
    else:
        word = result.counterexample
        assert fold_dfa(left, word) != fold_dfa(right, word)
        for shorter in all_words(left.alphabet, len(word) - 1):
            assert fold_dfa(left, shorter) == fold_dfa(right, shorter)
