from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Tuple, TypeVar

from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import DomainError

T = TypeVar("T")
R = TypeVar("R")


def map_gray(count: int) -> str:
    """
    Map an equilibrium count to its fill in a region map.

    :param count: number of equilibria in a parameter cell
    :return: hex grey for counts 1, 3 and 5, the hatch pattern otherwise
    """
    match count:
        case 1 | 3 | 5:
            level = round(255 * constants.GRAY_BY_COUNT[count])
            return f"#{level:02x}{level:02x}{level:02x}"
        case _:
            return "url(#hatch)"


def format_float(value: float) -> str:
    """
    Format a float losslessly.

    :param value: value to format
    :return: value with 17 significant digits
    """
    return format(value, constants.FLOAT_FORMAT)


def parse_range(text: str) -> Tuple[float, float, int]:
    """
    Parse an axis range written as ``MIN:MAX:STEPS``.

    :param text: range specification
    :return: (min, max, steps)
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"range '{text}' must look like MIN:MAX:STEPS")
    try:
        low, high, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise DomainError(f"range '{text}' is not numeric: {e}") from e
    return low, high, steps


def parse_float_list(text: str) -> List[float]:
    """
    Parse a comma separated list of floats.

    :param text: e.g. ``1,10,100``
    :return: list of floats
    """
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise DomainError(f"'{text}' is not a comma separated list of numbers") from e


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply fn to every item, optionally on a thread pool, keeping input order.

    :param fn: function to apply
    :param items: inputs
    :param threads: worker count; 1 runs inline
    :return: results in input order
    """
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
