# core/logging.py
import logging
import os
import sys

# Create a single global logger
logger = logging.getLogger("pumptrack")

# Avoid duplicate handlers if file reloads
if not logger.handlers:
    handler = logging.StreamHandler(sys.stdout)
    formatter = logging.Formatter(
        "%(asctime)s [%(levelname)s] %(name)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)


def _env_level() -> str:
    return os.getenv("PUMPTRACK_LOG_LEVEL", "INFO").upper()


logger.setLevel(_env_level())


def set_verbose(verbose: bool) -> None:
    """DEBUG when verbose, otherwise back to PUMPTRACK_LOG_LEVEL."""
    logger.setLevel(logging.DEBUG if verbose else _env_level())
