from typing import Iterator

from mixingweights.utils.exceptions import ConfigurationError


def compute_chunks(total: int, size: int) -> Iterator[range]:
    """This function will yield consecutive ranges of indices covering 0..total-1,
    each holding at most 'size' indices.

    Parameters
    ----------
    total: int
        Number of items to split (e.g., Monte Carlo repetitions).
    size: int
        Maximum number of items per chunk.

    Yields
    ------
    range
        Indices of one chunk.

    Raises
    ------
    ValueError
        If size is not positive.

    """
    if size < 1:
        raise ValueError(f'chunk size must be positive, got {size}.')
    for start in range(0, total, size):
        yield range(start, min(start + size, total))


def parse_cell(cell: str) -> dict[str, float]:
    """This function will parse a table cell selector such as 'delta=1,n=2000'.

    Parameters
    ----------
    cell: str
        Comma separated key=value pairs, values numeric.

    Returns
    -------
    dict
        Selector keys mapped onto float values.

    Raises
    ------
    ConfigurationError
        If a pair is malformed or a value is not numeric.

    """
    selector: dict[str, float] = {}
    for pair in filter(None, (p.strip() for p in cell.split(','))):
        key, sep, raw = pair.partition('=')
        if not sep or not key.strip():
            raise ConfigurationError(f'malformed cell selector {pair!r}, expected key=value.')
        try:
            selector[key.strip()] = float(raw)
        except ValueError:
            raise ConfigurationError(f'cell selector {key.strip()!r} is not numeric: {raw!r}.') from None
    return selector


def format_cell(selector: dict[str, float]) -> str:
    """Canonical text of a cell selector (sorted keys, integers without decimals)."""
    parts = []
    for key in sorted(selector):
        value = selector[key]
        parts.append(f'{key}={int(value)}' if float(value).is_integer() else f'{key}={value:g}')
    return ','.join(parts)
