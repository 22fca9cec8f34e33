from .logger import Logger, print

__all__ = [
    "Logger",
    "print",
]
