# Independent cross-checks
from .bar_oracle import compare_with_E2
from .checks import CHECKS, CellResult, CheckReport, CheckTask, run_tasks
