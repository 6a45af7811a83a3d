import logging
import sys
from pathlib import Path

# ensure project root is on sys.path so 'verificador_fgr' package can be imported
proj_root = Path(__file__).resolve().parents[1]
if str(proj_root) not in sys.path:
    sys.path.insert(0, str(proj_root))

from verificador_fgr.logger import level_from_verbosity, setup_logging, teardown_logging


def test_verbosity_levels():
    assert level_from_verbosity(0) == logging.WARNING
    assert level_from_verbosity(1) == logging.INFO
    assert level_from_verbosity(3) == logging.DEBUG


def test_setup_is_idempotent_and_writes_the_file(tmp_path):
    teardown_logging()
    previous = logging.getLogger().level
    logfile = tmp_path / "logs" / "run.log"
    try:
        root = setup_logging(logfile=str(logfile), level=logging.WARNING)
        before = len(root.handlers)
        setup_logging(logfile=str(logfile), level=logging.DEBUG)
        assert len(root.handlers) == before

        logging.getLogger("verificador_fgr.test").debug("kernel cache warm")
        for handler in root.handlers:
            handler.flush()
        assert "kernel cache warm" in logfile.read_text(encoding="utf-8")
    finally:
        teardown_logging()
        logging.getLogger().setLevel(previous)
