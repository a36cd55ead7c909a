import os
from importlib import reload

import ribnet.config.settings as settings_mod


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("DATA_ROOT", str(tmp_path))
    monkeypatch.setenv("RIBNET_THREADS", "3")
    reload(settings_mod)
    s = settings_mod.Settings()
    assert s.DATA_ROOT == str(tmp_path)
    assert s.RIBNET_THREADS == 3


def test_env_file_precedence(tmp_path):
    d = tmp_path / "proj"
    d.mkdir()
    (d / ".env").write_text("OUTPUT_ROOT=/from_env_file\nRIBNET_SEED=17\n", encoding="utf-8")
    old = os.getcwd()
    os.chdir(d)
    try:
        reload(settings_mod)
        s = settings_mod.Settings()
        assert s.OUTPUT_ROOT == "/from_env_file"
        assert s.RIBNET_SEED == 17
    finally:
        os.chdir(old)
        reload(settings_mod)


def test_worker_count_follows_setting():
    from ribnet.utils.parallel import parallel_map, worker_count

    assert worker_count(2) == 2
    assert worker_count(0) >= 1
    assert parallel_map(lambda v: v * v, [3, 1, 2], threads=4) == [9, 1, 4]
