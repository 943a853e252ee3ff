# Operation calculus over F_p
from .errors import (DegreeMismatchError, MixedPrimeError, PartitionOpsError, RelationNotApplicable,
                     ResourceLimitExceeded, RestrictionUndefined, RewriteLimitExceeded,
                     UnsupportedPrimeError, WordSyntaxError)
