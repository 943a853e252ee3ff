# Shifted restricted Lie algebras and the free algebras over the power ring
from .free_partition_lie import FreeBasisElement, FreePartitionLie, BMSequence, bm_basis, dims, free_basis
from .shifted_lie import FreeShiftedLie, LieElement, LieSymbol
