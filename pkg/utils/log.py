import logging

from rich.logging import RichHandler


def get_logger(logger_name: str, level: int | str = logging.DEBUG) -> logging.Logger:
    # https://rich.readthedocs.io/en/latest/reference/logging.html#rich.logging.RichHandler
    rich_handler = RichHandler(
        show_time=False,
        rich_tracebacks=False,
        show_path=True,
        tracebacks_show_locals=False,
    )
    rich_handler.setFormatter(logging.Formatter(fmt="%(message)s", datefmt="[%X]"))

    _logger = logging.getLogger(logger_name)
    if not _logger.handlers:
        _logger.addHandler(rich_handler)
    _logger.setLevel(level)
    _logger.propagate = False
    return _logger


def set_log_level(level: int | str) -> None:
    """Change the level of the shared logger, e.g. from `SimSettings.log_level`."""
    logger.setLevel(level.upper() if isinstance(level, str) else level)


logger: logging.Logger = get_logger("gossipnet")
