from enum import Enum

from mixingweights.utils.exceptions import ConfigurationError


def stringformat(cls_enum: Enum) -> Enum:
    """Class decorator giving an enumeration its command-line spelling.

    str(member) returns the member value as a string, the form used on the command line, in
    configuration files and in the CSV reports. The decorator also adds the classmethod
    parse(raw), the inverse of str(): it accepts a member or a string (surrounding blanks and
    case ignored) and raises ConfigurationError naming the accepted spellings otherwise.

    Parameters
    ----------
    cls_enum:
        Enumerations

    Returns
    -------
    Enumerations

    Raises
    ------
    TypeError
        If cls_enum is not an enumerations a TypeError is raises.

    Examples
    --------
    >>> from enum import Enum, unique
    >>> @unique
    ... @stringformat
    ... class Sample(Enum):
    ...     FIRST = 'first'
    ...     SECOND = 2
    >>> str(Sample.FIRST)
    'first'
    >>> Sample.parse(' First ') is Sample.FIRST, Sample.parse(2) is Sample.SECOND
    (True, True)
    """
    if not issubclass(cls_enum, Enum):
        raise TypeError(f' Class: {cls_enum.__name__}, is not an enumerations.')

    def new__str__(self):
        return str(self.value)

    def parse(cls, raw):
        if isinstance(raw, cls):
            return raw
        spelling = str(raw).strip().lower()
        for member in cls:
            if str(member).lower() == spelling:
                return member
        raise ConfigurationError(f'unknown {cls.__name__.lower()} {raw!r}; expected one of '
                                 f'{", ".join(str(m) for m in cls)}.')

    cls_enum.__str__ = new__str__
    cls_enum.parse = classmethod(parse)
    return cls_enum
