import logging
import logging.config
import os
from os import path

# load config
logging.config.fileConfig(path.join(path.dirname(__file__), "logger.conf"))

# create logger
Logger = logging.getLogger("TwoPatchAllee")

# optional level override, e.g. ALLEE_LOG_LEVEL=WARNING for quiet runs
if os.getenv("ALLEE_LOG_LEVEL"):
    Logger.setLevel(os.getenv("ALLEE_LOG_LEVEL").upper())

print = Logger.info
