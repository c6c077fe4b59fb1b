"""
Unit tests for configuration and logging utilities.
"""
import logging

import pytest

from src.plgroup.core.errors import MalformedInputError
from src.plgroup.utils.config import ConfigurationManager, config_manager
from src.plgroup.utils.logging import LoggingManager, get_logger


class TestConfigurationManager:
    """Tests for the ConfigurationManager class."""

    @pytest.fixture
    def manager(self):
        return ConfigurationManager()

    def test_env_coercion(self, manager, monkeypatch):
        monkeypatch.setenv("PLGROUP_THREADS", "4")
        monkeypatch.setenv("PLGROUP_VERBOSE", "yes")
        monkeypatch.setenv("PLGROUP_QUIET", "off")
        monkeypatch.setenv("PLGROUP_RATIO", "0.5")
        monkeypatch.setenv("PLGROUP_LOG_LEVEL", "DEBUG")
        env_config = manager.load_from_env()
        assert env_config["threads"] == 4
        assert env_config["verbose"] is True
        assert env_config["quiet"] is False
        assert env_config["ratio"] == 0.5
        assert manager.get("log_level") == "DEBUG"

    def test_hierarchical_merge(self, manager, tmp_path):
        (tmp_path / "default.yaml").write_text(
            "suite:\n  seed: 0\n  iterations: 500\nconstruction:\n  placement_attempts: 64\n"
        )
        (tmp_path / "testing.yaml").write_text("suite:\n  iterations: 20\n")
        manager.load_hierarchical_config(tmp_path, "testing")
        assert manager.section("suite") == {"seed": 0, "iterations": 20}
        assert manager.section("construction")["placement_attempts"] == 64

    def test_missing_environment_file(self, manager, tmp_path):
        (tmp_path / "default.yaml").write_text("threads: 2\n")
        manager.load_hierarchical_config(tmp_path, "staging")
        assert manager.get("threads") == 2

    def test_json_file(self, manager, tmp_path):
        path = tmp_path / "settings.json"
        path.write_text('{"suite": {"seed": 3}}')
        assert manager.load_from_file(path) == {"suite": {"seed": 3}}

    def test_errors(self, manager, tmp_path):
        with pytest.raises(FileNotFoundError):
            manager.load_from_file(tmp_path / "absent.yaml")
        bad = tmp_path / "settings.ini"
        bad.write_text("[suite]\n")
        with pytest.raises(MalformedInputError):
            manager.load_from_file(bad)
        listing = tmp_path / "list.yaml"
        listing.write_text("- 1\n- 2\n")
        with pytest.raises(MalformedInputError):
            manager.load_from_file(listing)
        broken = tmp_path / "broken.yaml"
        broken.write_text("suite: [1, 2\n")
        with pytest.raises(MalformedInputError):
            manager.load_from_file(broken)

    def test_section_and_set(self, manager):
        assert manager.section("suite") == {}
        manager.set("suite", {"seed": 9})
        manager.set("threads", 2)
        assert manager.section("suite") == {"seed": 9}
        assert manager.section("threads") == {}
        assert manager.get("absent", "fallback") == "fallback"


class TestLoggingManager:
    """Tests for the LoggingManager class."""

    @pytest.fixture(autouse=True)
    def restore_root(self, monkeypatch):
        monkeypatch.delitem(config_manager.config, "log_level", raising=False)
        root = logging.getLogger()
        handlers, level = root.handlers[:], root.level
        yield
        root.handlers[:] = handlers
        root.setLevel(level)

    def test_init_logging(self):
        manager = LoggingManager()
        manager.init_logging({"level": "WARNING"})
        assert manager.initialized
        assert logging.getLogger().level == logging.WARNING
        manager.init_logging({"level": "DEBUG"})
        assert logging.getLogger().level == logging.WARNING
        manager.init_logging({"level": "DEBUG"}, force=True)
        assert logging.getLogger().level == logging.DEBUG

    def test_log_file(self, tmp_path):
        log_file = tmp_path / "logs" / "plgroup.log"
        LoggingManager().init_logging(
            {"level": "INFO", "log_to_file": True, "log_file": str(log_file)}
        )
        assert log_file.parent.is_dir()

    def test_level_names(self):
        assert LoggingManager._get_log_level("debug") == logging.DEBUG
        assert LoggingManager._get_log_level(logging.ERROR) == logging.ERROR
        assert LoggingManager._get_log_level("chatty") == logging.INFO

    def test_get_logger_is_cached(self):
        assert get_logger("plgroup.test") is get_logger("plgroup.test")
