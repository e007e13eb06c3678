import logging
import os
import sys
from typing import Optional

LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level_name: Optional[str] = None) -> int:
    """Root logger on stderr; level from META_LOG (error, info or debug), default info."""
    level_name = (level_name or os.environ.get("META_LOG", "info")).lower()
    level = LEVELS.get(level_name, logging.INFO)
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_meta_handler", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._meta_handler = True
    root.addHandler(handler)
    root.setLevel(level)
    if level_name not in LEVELS:
        logging.getLogger(__name__).warning("unknown META_LOG level %r, using info", level_name)
    # third-party chatter stays at warning
    for name in ("matplotlib", "PIL", "fontTools"):
        logging.getLogger(name).setLevel(logging.WARNING)
    return level
