"""Binary chronic-disease classification: preprocessing, six model families,
evaluation, reporting and a reproducible command-line pipeline."""

from .table import MISSING, ColumnSpec, LabeledMatrix, Table

__version__ = "0.1.0"
__all__ = ["MISSING", "ColumnSpec", "LabeledMatrix", "Table", "__version__"]
