
import logging
import os

from .errors import ConfigError

# Load configuration from environment variables. Every cap below can also be
# overridden per call (keyword arguments) or per run (CLI flags).


class InvalidSetting:
	"""Placeholder for an environment value that did not parse."""

	def __init__(self, name, raw):
		self.name = name
		self.raw = raw

	def __repr__(self):
		return f"InvalidSetting({self.name}={self.raw!r})"


def _int_env(name, default):
	raw = os.getenv(name)
	if raw is None or not raw.strip():
		return default
	try:
		return int(raw)
	except ValueError:
		logging.getLogger(__name__).error("%s=%r is not an integer", name, raw)
		return InvalidSetting(name, raw)


# Resource caps. Dense expansions refuse to grow past MAX_TERMS terms (also
# used for enumerated paths, words and table rows); MAX_DEGREE bounds formal
# degrees, ABP depth and grammar word length.
MAX_TERMS = _int_env("HADAMARD_MAX_TERMS", 2 ** 20)
MAX_DEGREE = _int_env("HADAMARD_MAX_DEGREE", 12)

# Parallel loops are deterministic for any thread count.
THREADS = _int_env("HADAMARD_THREADS", 1)
SEED = _int_env("HADAMARD_SEED", 0)

# The Permanent construction expands n^n terms before the Hadamard product.
PERM_MAX_N = _int_env("HADAMARD_PERM_MAX_N", 5)

LOG_LEVEL = os.getenv("HADAMARD_LOG_LEVEL", "WARNING").upper()


def validate_config(raise_on_missing=False):
	"""Return list of invalid settings. If raise_on_missing is True raise
	ConfigError (a RuntimeError) when any setting is invalid.
	"""
	positive = ["MAX_TERMS", "MAX_DEGREE", "THREADS", "PERM_MAX_N"]
	invalid = [k for k in positive if not isinstance(globals().get(k), int) or globals()[k] < 1]
	if not isinstance(SEED, int) or SEED < 0:
		invalid.append("SEED")
	if not isinstance(logging.getLevelName(LOG_LEVEL), int):
		invalid.append("LOG_LEVEL")
	if invalid and raise_on_missing:
		raise ConfigError(f"Invalid HADAMARD_* settings: {', '.join(invalid)}")
	return invalid


def resolve(value, default):
	"""Return ``value`` unless it is None, else the configured ``default``.

	Raises ConfigError when the configured value did not parse.
	"""
	if value is not None:
		return value
	if isinstance(default, InvalidSetting):
		raise ConfigError(f"{default.name}={default.raw!r} is not an integer")
	return default
