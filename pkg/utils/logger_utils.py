import logging
import os


DEFAULT_CONSOLE_FORMAT = '%(name)s - %(levelname)s - %(message)s'
DEFAULT_FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _console_handler(level, format_str):
    handler = logging.StreamHandler()
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(format_str or DEFAULT_CONSOLE_FORMAT))
    return handler


def _file_handler(log_dir, name, level, format_str):
    os.makedirs(log_dir, exist_ok=True)
    handler = logging.FileHandler(os.path.join(log_dir, f'{name}.log'))
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(format_str or DEFAULT_FILE_FORMAT))
    return handler


def setup_logger(name, log_dir, console_level=logging.INFO, file_level=logging.DEBUG, console_format_str=None, file_format_str=None):
    """
    Set up a named logger with an optional console handler and an optional file handler.

    Passing None as a level disables the matching handler. The file handler writes to
    `<log_dir>/<name>.log`; `log_dir` may be None when file logging is disabled.

    :param name: Name of the logger, also used as the log file stem.
    :param log_dir: Directory of the log file.
    :param console_level: Logging level for the console output, or None.
    :param file_level: Logging level for the file output, or None.
    :return: Configured logger.
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)
    logger.propagate = False
    if console_level is not None:
        logger.addHandler(_console_handler(console_level, console_format_str))
    if file_level is not None:
        if log_dir is None:
            raise ValueError("log_dir is required when file logging is enabled")
        logger.addHandler(_file_handler(log_dir, name, file_level, file_format_str))
    return logger


def child_logger(parent: logging.Logger, suffix: str) -> logging.Logger:
    """Returns `<parent>.<suffix>`, which reuses the parent's handlers."""
    logger = parent.getChild(suffix)
    logger.propagate = True
    return logger
