import json
import re

import pytest

import main
from modules.definition_format import parse_definition


def run(capsys, *argv):
    code = main.main(['--config', 'no-such-config.json', *argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as info:
        main.parse_args(['--help'])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for command in ('simulate', 'render', 'convert', 'chain'):
        assert command in out


RENDER_FLAGS = {'--fps', '--step-duration', '--intro-duration', '--verdict-duration',
                '--style', '--ghost-consumed', '--jobs', '--force'}


@pytest.mark.parametrize('command, flags', [
    ('simulate', {'--complete-with-trap'}),
    ('render', {'--out-dir', '--format', '--complete-with-trap'} | RENDER_FLAGS),
    ('convert', {'--regex', '--output', '--alphabet'}),
    ('chain', {'--definition', '--regex', '--out-dir', '--input', '--alphabet'} | RENDER_FLAGS),
])
def test_subcommand_help_documents_every_flag(capsys, command, flags):
    with pytest.raises(SystemExit) as info:
        main.parse_args([command, '--help'])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert set(re.findall(r'(?<![\w-])--[a-z][a-z-]*', out)) == flags | {'--help'}


def test_load_config_defaults_and_overrides(tmp_path):
    assert main.load_config(str(tmp_path / 'missing.json')) == main.DEFAULT_CONFIG
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'jobs': 3}), encoding='utf-8')
    config = main.load_config(str(path))
    assert config['jobs'] == 3
    assert config['log_level'] == 'WARNING'
    assert not (tmp_path / 'missing.json').exists()


def test_simulate_accept_and_reject(capsys, even_as_file):
    code, out, _ = run(capsys, 'simulate', str(even_as_file), 'abab')
    assert code == main.EXIT_ACCEPTED
    assert out.splitlines() == ['e --a--> o', 'o --b--> o', 'o --a--> e', 'e --b--> e', 'ACCEPTED']

    code, out, _ = run(capsys, 'simulate', str(even_as_file), 'a')
    assert code == main.EXIT_REJECTED
    assert out.splitlines()[-1] == 'REJECTED'


def test_simulate_invalid_symbol(capsys, even_as_file):
    code, out, err = run(capsys, 'simulate', str(even_as_file), 'abz')
    assert code == main.EXIT_ERROR
    assert out == ''
    assert "position 2" in err


def test_simulate_parse_error_reports_location(capsys, tmp_path):
    path = tmp_path / 'bad.fsm'
    path.write_text('kind: dfa\nstates: x\nalphabet: a\nstart: x\nbogus: 1\n', encoding='utf-8')
    code, _, err = run(capsys, 'simulate', str(path), 'a')
    assert code == main.EXIT_ERROR
    assert 'line 5, column 1' in err


def test_undecodable_definition_is_an_error(capsys, tmp_path):
    path = tmp_path / 'bad.fsm'
    path.write_bytes(b'kind: dfa\nname: \xff\xfe\nstates: x\nalphabet: a\nstart: x\n'
                     b'delta:\n  x a -> x\n')
    code, out, err = run(capsys, 'simulate', str(path), 'aa')
    assert code == main.EXIT_ERROR
    assert out == ''
    assert 'line 2, column 7' in err


def test_undecodable_style_file_is_an_error(capsys, tmp_path, even_as_file):
    style = tmp_path / 'bad.style'
    style.write_bytes(b'highlight: \xff\n')
    code, _, err = run(capsys, 'render', str(even_as_file), 'a', '--out-dir',
                       str(tmp_path / 'out'), '--format', 'static', '--style', str(style))
    assert code == main.EXIT_ERROR
    assert 'UTF-8' in err


def test_undecodable_config_falls_back_to_defaults(capsys, tmp_path, even_as_file):
    config = tmp_path / 'config.json'
    config.write_bytes(b'{"jobs": "\xff"}')
    assert main.load_config(str(config)) == main.DEFAULT_CONFIG
    code = main.main(['--config', str(config), 'simulate', str(even_as_file), 'aa'])
    out, err = capsys.readouterr()
    assert code == main.EXIT_ACCEPTED
    assert out.splitlines()[-1] == 'ACCEPTED'
    assert 'Failed to load config' in err


def test_unwritable_log_file_is_an_error(capsys, tmp_path, even_as_file):
    blocker = tmp_path / 'not-a-dir'
    blocker.write_text('x', encoding='utf-8')
    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'log_file': str(blocker / 'fsm.log')}), encoding='utf-8')
    code = main.main(['--config', str(config), 'simulate', str(even_as_file), 'aa'])
    out, err = capsys.readouterr()
    assert code == main.EXIT_ERROR
    assert out == ''
    assert 'error:' in err


def test_simulate_nfa_prints_sets(capsys, contains_ab_file):
    code, out, _ = run(capsys, 'simulate', str(contains_ab_file), 'ab')
    assert code == main.EXIT_ACCEPTED
    assert out.splitlines() == ['{p0} --a--> {p0,p1}', '{p0,p1} --b--> {p0,p2}', 'ACCEPTED']


def test_simulate_with_trap(capsys, tmp_path):
    path = tmp_path / 'partial.fsm'
    path.write_text('kind: dfa\nstates: s t\nalphabet: a b\nstart: s\naccept: t\n'
                    'delta:\n  s a -> t\n', encoding='utf-8')
    code, _, err = run(capsys, 'simulate', str(path), 'ab')
    assert code == main.EXIT_ERROR
    assert 'missing transition' in err
    code, out, _ = run(capsys, 'simulate', str(path), 'ab', '--complete-with-trap', 'dead')
    assert code == main.EXIT_REJECTED
    assert 't --b--> dead' in out


@pytest.mark.parametrize('fmt, artifact', [
    ('animated-svg', 'animation.svg'),
    ('timeline', 'timeline.json'),
    ('static', 'diagram.svg'),
])
def test_render_single_file_formats(capsys, tmp_path, even_as_file, fmt, artifact):
    out_dir = tmp_path / 'out'
    code, _, _ = run(capsys, 'render', str(even_as_file), 'ab', '--out-dir', str(out_dir),
                     '--format', fmt)
    assert code == 0
    assert (out_dir / artifact).exists()


def test_render_frames(capsys, tmp_path, even_as_file):
    out_dir = tmp_path / 'out'
    code, out, _ = run(capsys, 'render', str(even_as_file), 'ab', '--out-dir', str(out_dir),
                       '--fps', '4', '--step-duration', '0.5', '--jobs', '2')
    assert code == 0
    frames = sorted(out_dir.glob('frame_*.svg'))
    assert len(frames) == 18
    assert (out_dir / 'manifest.txt').exists()
    assert '18 frames' in out


def test_render_is_reproducible(capsys, tmp_path, even_as_file):
    first, second = tmp_path / 'one', tmp_path / 'two'
    for out_dir in (first, second):
        run(capsys, 'render', str(even_as_file), 'abba', '--out-dir', str(out_dir),
            '--fps', '2')
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_render_refuses_non_empty_directory(capsys, tmp_path, even_as_file):
    out_dir = tmp_path / 'out'
    out_dir.mkdir()
    (out_dir / 'notes.txt').write_text('keep me', encoding='utf-8')
    code, _, err = run(capsys, 'render', str(even_as_file), 'ab', '--out-dir', str(out_dir),
                       '--format', 'timeline')
    assert code == main.EXIT_ERROR
    assert 'not empty' in err

    (out_dir / 'frame_000009.svg').write_text('<svg/>', encoding='utf-8')
    code, _, _ = run(capsys, 'render', str(even_as_file), 'ab', '--out-dir', str(out_dir),
                     '--format', 'timeline', '--force')
    assert code == 0
    assert (out_dir / 'notes.txt').exists()
    assert not (out_dir / 'frame_000009.svg').exists()


def test_render_nfa_needs_conversion(capsys, tmp_path, contains_ab_file):
    code, _, err = run(capsys, 'render', str(contains_ab_file), 'ab',
                       '--out-dir', str(tmp_path / 'out'))
    assert code == main.EXIT_ERROR
    assert 'nfa-to-dfa' in err
    code, _, _ = run(capsys, 'render', str(contains_ab_file), 'ab',
                     '--out-dir', str(tmp_path / 'static'), '--format', 'static')
    assert code == 0


def test_render_with_style_file(capsys, tmp_path, even_as_file):
    style = tmp_path / 'house.style'
    style.write_text('highlight: 00ff00\nfps: 2\n', encoding='utf-8')
    out_dir = tmp_path / 'out'
    code, _, _ = run(capsys, 'render', str(even_as_file), 'a', '--out-dir', str(out_dir),
                     '--format', 'animated-svg', '--style', str(style))
    assert code == 0
    assert '#00ff00' in (out_dir / 'animation.svg').read_text(encoding='utf-8')


def test_invalid_fps_is_a_usage_error(capsys, tmp_path, even_as_file):
    with pytest.raises(SystemExit) as info:
        main.main(['render', str(even_as_file), 'a', '--out-dir', str(tmp_path), '--fps', '0'])
    assert info.value.code == 2


def test_convert_pipeline(capsys, tmp_path, contains_ab_file):
    dfa_path = tmp_path / 'dfa.fsm'
    code, _, _ = run(capsys, 'convert', str(contains_ab_file), 'nfa-to-dfa', '-o', str(dfa_path))
    assert code == 0
    code, out, _ = run(capsys, 'convert', str(dfa_path), 'minimize')
    assert code == 0
    assert len(parse_definition(out).states) == 3


def test_convert_regex_to_stdout(capsys):
    code, out, _ = run(capsys, 'convert', 'regex-to-nfa', '--regex', 'a|b', '--alphabet', 'abc')
    assert code == 0
    defn = parse_definition(out)
    assert defn.kind == 'nfa'
    assert defn.alphabet == ('a', 'b', 'c')


@pytest.mark.parametrize('argv, hint', [
    (['convert', 'regex-to-nfa'], 'regex-to-nfa takes --regex'),
    (['convert', '{even}', 'nfa-to-dfa'], 'already deterministic'),
    (['convert', '{nfa}', 'minimize'], 'run nfa-to-dfa first'),
])
def test_convert_kind_errors(capsys, even_as_file, contains_ab_file, argv, hint):
    argv = [a.format(even=even_as_file, nfa=contains_ab_file) for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == main.EXIT_ERROR
    assert hint in err


def test_regex_syntax_error(capsys):
    code, _, err = run(capsys, 'convert', 'regex-to-nfa', '--regex', '(ab')
    assert code == main.EXIT_ERROR
    assert 'position 3' in err


def test_chain(capsys, tmp_path):
    out_dir = tmp_path / 'chain'
    code, out, _ = run(capsys, 'chain', '--regex', '(a|b)*abb', 'nfa', 'dfa', 'min',
                       '--out-dir', str(out_dir), '--input', 'babb', '--fps', '2')
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith('01-nfa.fsm: regex-to-nfa')
    assert lines[2] == '03-min.fsm: minimize, 4 states'
    assert lines[-1] == 'ACCEPTED'
    assert (out_dir / 'simulation' / 'manifest.txt').exists()


def test_chain_type_error_does_no_work(capsys, tmp_path):
    out_dir = tmp_path / 'chain'
    code, _, err = run(capsys, 'chain', '--regex', 'ab', 'dfa', '--out-dir', str(out_dir))
    assert code == main.EXIT_ERROR
    assert 'needs a nfa upstream' in err
    assert not out_dir.exists()

    code, _, err = run(capsys, 'chain', '--regex', 'ab', 'nfa', '--out-dir', str(out_dir),
                       '--input', 'ab')
    assert code == main.EXIT_ERROR
    assert '--input' in err
    assert not out_dir.exists()
