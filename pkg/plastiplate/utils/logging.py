import logging
from typing import Optional

from rich.logging import RichHandler

logger_initialized = {}

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def get_logger(name: str,
               log_file: Optional[str] = None,
               log_level: int = logging.INFO,
               file_mode: str = 'w',
               use_rich: bool = False) -> logging.Logger:
    """Initialize and get a logger by name.

    The first call for a given name attaches a console handler (and a file
    handler when ``log_file`` is given); later calls return the configured
    logger untouched. Children of an initialized logger, e.g.
    ``plastiplate.solver`` once ``plastiplate`` exists, are returned as-is
    so that records propagate to the parent handlers only once.

    Args:
        name (str): Logger name.
        log_file (str | None): If specified, a FileHandler writing to this
            path is added. Defaults to None.
        log_level (int): The logger level. Defaults to ``logging.INFO``.
        file_mode (str): Mode used to open ``log_file``. Defaults to 'w'.
        use_rich (bool): Render console records with ``rich``. Defaults to
            False.

    Returns:
        logging.Logger: The expected logger.
    """
    logger = logging.getLogger(name)
    if name in logger_initialized:
        if log_file is not None:
            _attach_file_handler(logger, log_file, file_mode, log_level)
        return logger
    for logger_name in logger_initialized:
        if name.startswith(logger_name + '.'):
            return logger

    # keep the root console quiet so records are not printed twice
    for handler in logger.root.handlers:
        if type(handler) is logging.StreamHandler:
            handler.setLevel(logging.ERROR)

    if use_rich:
        console = RichHandler(show_path=False, rich_tracebacks=False)
        console.setFormatter(logging.Formatter('%(message)s'))
    else:
        console = logging.StreamHandler()
        console.setFormatter(logging.Formatter(LOG_FORMAT))
    console.setLevel(log_level)
    logger.addHandler(console)

    if log_file is not None:
        _attach_file_handler(logger, log_file, file_mode, log_level)

    logger.setLevel(log_level)
    logger_initialized[name] = True

    return logger


def _attach_file_handler(logger: logging.Logger, log_file: str,
                         file_mode: str, log_level: int) -> None:
    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and \
                handler.baseFilename == _abspath(log_file):
            return
    file_handler = logging.FileHandler(log_file, file_mode)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    file_handler.setLevel(log_level)
    logger.addHandler(file_handler)


def detach_file_handlers(logger: logging.Logger) -> None:
    """Close and remove every file handler of ``logger``."""
    for handler in list(logger.handlers):
        if isinstance(handler, logging.FileHandler):
            handler.close()
            logger.removeHandler(handler)


def _abspath(path: str) -> str:
    import os.path as osp
    return osp.abspath(path)
