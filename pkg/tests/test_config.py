"""Tests for configuration resolution."""

import pytest

from tencomp.config import configure, get_config, reset_config


class TestConfig:
    """Tests for configure, get_config and reset_config."""

    def test_defaults(self, monkeypatch):
        """Built-in defaults apply with no arguments or environment."""
        for name in ("TENCOMP_EIG_TOL", "TENCOMP_EIG_MAX_ITER", "TENCOMP_OVERSAMPLE", "TENCOMP_THREADS", "TENCOMP_LOG_LEVEL"):
            monkeypatch.delenv(name, raising=False)
        config = get_config()
        assert config.eig_tol == 1e-10
        assert config.eig_max_iter == 1000
        assert config.oversample == 8
        assert config.threads == 1
        assert config.log_level == "WARNING"

    def test_environment(self, monkeypatch):
        """Environment variables override defaults."""
        monkeypatch.setenv("TENCOMP_THREADS", "4")
        monkeypatch.setenv("TENCOMP_EIG_TOL", "1e-8")
        monkeypatch.setenv("TENCOMP_LOG_LEVEL", "debug")
        config = get_config()
        assert config.threads == 4
        assert config.eig_tol == 1e-8
        assert config.log_level == "DEBUG"

    def test_argument_beats_environment(self, monkeypatch):
        """Explicit arguments win over the environment."""
        monkeypatch.setenv("TENCOMP_THREADS", "4")
        configure(threads=2)
        assert get_config().threads == 2

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"eig_tol": 0.0}, "eig_tol"),
            ({"eig_max_iter": 0}, "eig_max_iter"),
            ({"oversample": -1}, "oversample"),
            ({"threads": 0}, "threads"),
            ({"log_level": "LOUD"}, "log_level"),
        ],
    )
    def test_validation(self, kwargs, message):
        """Out-of-range settings raise ValueError."""
        with pytest.raises(ValueError, match=message):
            configure(**kwargs)

    def test_bad_environment_value(self, monkeypatch):
        """Unparseable environment values name the variable."""
        monkeypatch.setenv("TENCOMP_EIG_MAX_ITER", "many")
        with pytest.raises(ValueError, match="TENCOMP_EIG_MAX_ITER"):
            configure()

    def test_reset(self, monkeypatch):
        """reset_config re-reads the environment on next access."""
        configure(threads=3)
        reset_config()
        monkeypatch.setenv("TENCOMP_THREADS", "5")
        assert get_config().threads == 5
