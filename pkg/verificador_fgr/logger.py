"""
Configuração de logging do verificador.

Nada é configurado no import; apenas a CLI chama setup_logging.
"""
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

_HANDLER_TAG = "_verificador_fgr"


def level_from_verbosity(verbosity: int) -> int:
    """-v gives INFO, -vv gives DEBUG, nothing gives WARNING."""
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def setup_logging(logfile: Optional[str] = None, level: int = logging.INFO) -> logging.Logger:
    logger = logging.getLogger()
    if any(getattr(h, _HANDLER_TAG, False) for h in logger.handlers):
        return logger
    logger.setLevel(level)
    fmt = logging.Formatter(LOG_FORMAT)

    # stderr, so that reports written to stdout stay parseable
    ch = logging.StreamHandler()
    ch.setLevel(level)
    ch.setFormatter(fmt)
    setattr(ch, _HANDLER_TAG, True)
    logger.addHandler(ch)

    if logfile:
        p = Path(logfile)
        p.parent.mkdir(parents=True, exist_ok=True)
        fh = RotatingFileHandler(p, maxBytes=10 * 1024 * 1024, backupCount=5)
        # the file always gets the full trace
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(fmt)
        setattr(fh, _HANDLER_TAG, True)
        logger.addHandler(fh)
        logger.setLevel(min(level, logging.DEBUG))

    return logger


def teardown_logging() -> None:
    """Remove the handlers installed by setup_logging."""
    logger = logging.getLogger()
    for handler in list(logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            logger.removeHandler(handler)
            handler.close()
