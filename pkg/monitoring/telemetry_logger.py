import logging
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: str = "WARNING", stream=None) -> logging.Logger:
    """Configure the root logger once; records go to stderr so stdout carries documents only."""
    numeric = getattr(logging, str(level).upper(), None)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(
        format=LOG_FORMAT,
        level=numeric,
        stream=stream or sys.stderr,
        force=True,
    )
    logger = logging.getLogger("jcond")
    logger.debug(f"🔍 logging configured at {logging.getLevelName(numeric)}")
    return logger
