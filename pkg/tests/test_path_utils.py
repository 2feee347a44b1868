import pytest

from modules.errors import OutputIoError
from modules.utils.path_utils import is_subpath, output_path, prepare_out_dir


def test_is_subpath(tmp_path):
    assert is_subpath(str(tmp_path / 'a' / 'b'), str(tmp_path))
    assert is_subpath(str(tmp_path), str(tmp_path))
    assert not is_subpath(str(tmp_path.parent), str(tmp_path))


def test_output_path_stays_inside(tmp_path):
    assert output_path(tmp_path, 'diagram.svg') == tmp_path / 'diagram.svg'
    with pytest.raises(OutputIoError):
        output_path(tmp_path, '../escape.svg')


def test_prepare_creates_missing_directory(tmp_path):
    out_dir = prepare_out_dir(tmp_path / 'a' / 'b')
    assert out_dir.is_dir()


def test_prepare_refuses_a_file(tmp_path):
    target = tmp_path / 'file'
    target.write_text('x', encoding='utf-8')
    with pytest.raises(OutputIoError):
        prepare_out_dir(target, force=True)


def test_force_removes_only_stale_artifacts(tmp_path):
    for name in ('frame_000001.svg', 'manifest.txt', '01-nfa.fsm', 'keep.fsm'):
        (tmp_path / name).write_text('x', encoding='utf-8')
    (tmp_path / 'simulation').mkdir()
    (tmp_path / 'simulation' / 'frame_000001.svg').write_text('x', encoding='utf-8')
    (tmp_path / 'simulation' / 'manifest.txt').write_text('x', encoding='utf-8')

    with pytest.raises(OutputIoError):
        prepare_out_dir(tmp_path)
    prepare_out_dir(tmp_path, force=True)
    assert sorted(p.name for p in tmp_path.iterdir()) == ['keep.fsm', 'simulation']
    assert not any((tmp_path / 'simulation').iterdir())
