"""Tests for configuration validation."""

import json
from pathlib import Path

import pytest

from endofuse.types import ScaleMode
from endofuse.utils.config_validator import (
    OPJPO_DEFAULTS,
    ConfigurationError,
    OpjpoSettings,
    load_opjpo_config,
    validate_opjpo_config,
)


class TestValidateOpjpoConfig:
    """Tests for opjpo configuration validation."""

    def test_empty_document_gives_defaults(self) -> None:
        """Test that every key is optional."""
        settings = validate_opjpo_config({})
        assert settings == OpjpoSettings()
        assert settings.search.initial_step == OPJPO_DEFAULTS["initial_step"]
        assert settings.scale_mode is ScaleMode.ORTHO_BBOX

    def test_valid_config(self) -> None:
        """Test that a full configuration is carried into the settings."""
        settings = validate_opjpo_config(
            {
                "schema_version": 1,
                "initial_step": 0.2,
                "min_step": 0.01,
                "shrink_factor": 0.25,
                "max_iterations": 50,
                "use_depth_prior": False,
                "initial_offset": [0.0, 0.1, 2.0],
                "scale_mode": "mask_pixels",
                "scale_mask_dilation": 47,
                "splat_px": 1.5,
                "gaussian_cutoff": 2.0,
                "alpha_epsilon": 1e-5,
            }
        )
        assert settings.search.initial_step == 0.2
        assert settings.search.shrink_factor == 0.25
        assert settings.search.max_iterations == 50
        assert settings.search.initial_offset == (0.0, 0.1, 2.0)
        assert settings.scale_mode is ScaleMode.MASK_PIXELS
        assert settings.scale_mask_dilation == 47
        assert settings.use_depth_prior is False
        assert settings.raster.splat_px == 1.5

    def test_shrink_factor_out_of_range(self) -> None:
        """Test that shrink_factor must lie strictly inside (0, 1)."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config({"shrink_factor": 1.0})
        assert "shrink_factor must lie strictly between 0 and 1" in str(exc_info.value)
        assert "got 1.0" in str(exc_info.value)

    def test_min_step_above_initial_step(self) -> None:
        """Test that the step schedule must shrink."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config({"initial_step": 0.01, "min_step": 0.1})
        assert "must not exceed initial_step" in str(exc_info.value)

    def test_max_iterations_not_integer(self) -> None:
        """Test that max_iterations must be an integer."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config({"max_iterations": 2.5})
        assert "max_iterations must be a non-negative integer" in str(exc_info.value)

    def test_even_dilation_rejected(self) -> None:
        """Test that the scale mask dilation must be odd."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config({"scale_mask_dilation": 4})
        assert "Suggestion" in str(exc_info.value)

    def test_unknown_scale_mode(self) -> None:
        """Test that scale_mode must name a known mode."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config({"scale_mode": "perspective"})
        assert "ortho_bbox" in str(exc_info.value)

    def test_unknown_key_suggests_closest(self) -> None:
        """Test that a misspelled key gets a suggestion."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config({"inital_step": 0.1})
        assert "unknown key 'inital_step'" in str(exc_info.value)
        assert "did you mean 'initial_step'" in str(exc_info.value)

    def test_multiple_errors(self) -> None:
        """Test that all problems are reported together."""
        with pytest.raises(ConfigurationError) as exc_info:
            validate_opjpo_config(
                {"initial_step": -1, "shrink_factor": 0, "max_iterations": -5, "initial_offset": [1, 2]}
            )
        assert len(exc_info.value.problems) == 5
        message = str(exc_info.value)
        assert "initial_step must be a positive number" in message
        assert "shrink_factor" in message
        assert "max_iterations" in message
        assert "initial_offset" in message

    def test_boolean_rejected_for_numbers(self) -> None:
        """Test that true is not accepted as a step."""
        with pytest.raises(ConfigurationError):
            validate_opjpo_config({"initial_step": True})

    def test_wrong_schema_version(self) -> None:
        """Test that an unknown schema version is rejected."""
        with pytest.raises(ConfigurationError, match="schema_version"):
            validate_opjpo_config({"schema_version": 99})

    def test_not_an_object(self) -> None:
        """Test that the document must be a JSON object."""
        with pytest.raises(ConfigurationError, match="JSON object"):
            validate_opjpo_config([])  # type: ignore[arg-type]


class TestLoadOpjpoConfig:
    """Tests for reading configuration files."""

    def test_no_path_gives_defaults(self) -> None:
        """Test that no configuration file means default settings."""
        assert load_opjpo_config(None) == OpjpoSettings()

    def test_read_from_file(self, tmp_path: Path) -> None:
        """Test that a configuration file is read and validated."""
        path = tmp_path / "search.json"
        path.write_text(json.dumps({"max_iterations": 7}))
        assert load_opjpo_config(path).search.max_iterations == 7

    def test_invalid_json(self, tmp_path: Path) -> None:
        """Test that a syntax error is a ConfigurationError."""
        path = tmp_path / "search.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_opjpo_config(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing file raises OSError."""
        with pytest.raises(OSError):
            load_opjpo_config(tmp_path / "absent.json")

    def test_shipped_configuration_is_valid(self) -> None:
        """Test that the example configuration in configs/ validates."""
        path = Path(__file__).resolve().parent.parent / "configs" / "search.json"
        settings = load_opjpo_config(path)
        assert settings.search.max_iterations > 0
