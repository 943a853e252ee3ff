# Utility functions
from .config import Config, Settings, get_settings
from .output import DimTable, write_report, write_rows, write_table
