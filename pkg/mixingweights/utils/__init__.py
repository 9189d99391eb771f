from .decorators import stringformat
from .exceptions import (MixingWeightsError, ConfigurationError, DomainError, ContractError, NumericalError,
                         SingularDesignError, DegenerateVarianceError, NotAvailableError, DataError, SchemaError,
                         RowError, EmptyInputError, UnknownGroupError, exit_status_handler)
from .utils import compute_chunks, parse_cell, format_cell
