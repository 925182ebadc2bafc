import json

import pytest

from sparseprep.constants import DEFAULT_SETTINGS, SEED_ENV, SETTINGS_FILENAME
from sparseprep.settings_manager import SettingsManager, resolve_seed


def write_settings(directory, data):
    path = directory / SETTINGS_FILENAME
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


class TestLoad:
    def test_missing_file_gives_defaults(self, tmp_path):
        assert SettingsManager(str(tmp_path)).load() == DEFAULT_SETTINGS

    def test_saved_defaults(self, tmp_path):
        write_settings(tmp_path, {"version": 2, "defaults": {"mode": "ancilla", "ancillas": 40, "seed": 9}})
        settings = SettingsManager(str(tmp_path)).load()
        assert settings["mode"] == "ancilla"
        assert settings["ancillas"] == 40
        assert settings["seed"] == 9
        assert settings["bench_workers"] == 1

    @pytest.mark.parametrize("data", [
        {"ancillas": 32, "mode": "no-ancilla"},
        {"version": 1, "defaults": {"ancillas": 32}},
        {"version": 3, "defaults": {"ancillas": 32}},
    ])
    def test_other_versions_ignored(self, tmp_path, data):
        write_settings(tmp_path, data)
        assert SettingsManager(str(tmp_path)).load() == DEFAULT_SETTINGS

    def test_unknown_keys_dropped(self, tmp_path):
        write_settings(tmp_path, {"version": 2, "defaults": {"ancillas": 32, "junk": 1}})
        settings = SettingsManager(str(tmp_path)).load()
        assert settings["ancillas"] == 32
        assert "junk" not in settings

    @pytest.mark.parametrize("values", [
        {"mode": "fastest"},
        {"ancillas": -3},
        {"ancillas": "12"},
        {"bench_workers": True},
        {"strict_dispatch": 1},
    ])
    def test_invalid_values_ignored(self, tmp_path, values):
        write_settings(tmp_path, {"version": 2, "defaults": values})
        assert SettingsManager(str(tmp_path)).load() == DEFAULT_SETTINGS

    def test_corrupt_file_never_raises(self, tmp_path):
        write_settings(tmp_path, "{ not json")
        assert SettingsManager(str(tmp_path)).load() == DEFAULT_SETTINGS


class TestSave:
    def test_round_trip(self, tmp_path):
        manager = SettingsManager(str(tmp_path))
        manager.settings["mode"] = "ancilla"
        manager.settings["ancillas"] = 64
        manager.save()
        saved = json.loads((tmp_path / SETTINGS_FILENAME).read_text())
        assert saved["version"] == 2
        reloaded = SettingsManager(str(tmp_path)).load()
        assert reloaded["mode"] == "ancilla"
        assert reloaded["ancillas"] == 64
        assert manager.get("ancillas") == 64

    def test_update_reports_rejected(self, tmp_path):
        manager = SettingsManager(str(tmp_path))
        rejected = manager.update({"mode": "ancilla", "seed": -1, "expand_output": "yes", "colour": 2})
        assert sorted(rejected) == ["colour", "expand_output", "seed"]
        assert manager.get("mode") == "ancilla"
        assert manager.get("seed") == 0

    def test_path(self, tmp_path):
        assert SettingsManager(str(tmp_path)).path.endswith(SETTINGS_FILENAME)


class TestResolveSeed:
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "5")
        assert resolve_seed(3, {"seed": 7}) == 3

    def test_environment(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "5")
        assert resolve_seed(None, {"seed": 7}) == 5

    def test_settings(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV, raising=False)
        assert resolve_seed(None, {"seed": 7}) == 7

    def test_default(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV, raising=False)
        assert resolve_seed() == 0

    def test_bad_environment(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "many")
        assert resolve_seed(None, {"seed": 2}) == 2
