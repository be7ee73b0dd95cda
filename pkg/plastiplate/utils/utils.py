import logging
from typing import Optional

from plastiplate.utils.logging import get_logger


class WarnOnlyOnce:
    """Emit a warning only the first time a given message is seen.

    Repeated line-search activations or probe restrictions would otherwise
    flood the log once per step.
    """
    warnings = set()

    @classmethod
    def warn(cls, logger: logging.Logger, msg: str):
        h = hash(msg)
        if h not in cls.warnings:
            logger.warning(msg)
            cls.warnings.add(h)

    @classmethod
    def reset(cls):
        cls.warnings.clear()


def get_root_logger(log_file: Optional[str] = None,
                    log_level: int = logging.INFO,
                    use_rich: bool = False) -> logging.Logger:
    """Get the package logger.

    Args:
        log_file (str, optional): File path of log. Defaults to None.
        log_level (int, optional): The level of logger.
            Defaults to logging.INFO.
        use_rich (bool): Render console records with ``rich``.

    Returns:
        logging.Logger: The obtained logger
    """
    return get_logger(
        name='plastiplate',
        log_file=log_file,
        log_level=log_level,
        use_rich=use_rich)
