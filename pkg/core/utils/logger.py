# core/utils/logger.py

import logging
import os
from datetime import datetime
from typing import Optional


def setup_logger(name: str, log_level: Optional[str] = None, log_dir: Optional[str] = None):
    """
    Create a logger with a console handler and an optional file handler

    Args:
        name (str): Name of the logger
        log_level (str, optional): Logging level. Defaults to LP_HOMOTOPY_LOG_LEVEL or 'WARNING'.
        log_dir (str, optional): Directory for log files. Defaults to LP_HOMOTOPY_LOG_DIR;
            no file handler when neither is set.

    Returns:
        logging.Logger: Configured logger instance
    """
    log_level = log_level or os.getenv('LP_HOMOTOPY_LOG_LEVEL', 'WARNING')
    log_dir = log_dir or os.getenv('LP_HOMOTOPY_LOG_DIR')

    logger = logging.getLogger(name)

    level = getattr(logging, log_level.upper(), logging.WARNING)
    logger.setLevel(level)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Remove existing handlers to prevent duplicate logs
    logger.handlers.clear()
    logger.propagate = False

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(level)
    logger.addHandler(console_handler)

    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f'{name}_{datetime.now().strftime("%Y%m%d")}.log')
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        file_handler.setLevel(level)
        logger.addHandler(file_handler)

    return logger


def set_level(log_level: str):
    """Change the level of every logger created through setup_logger"""
    level = getattr(logging, log_level.upper(), logging.WARNING)
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and not logger.propagate:
            logger.setLevel(level)
            for handler in logger.handlers:
                handler.setLevel(level)
