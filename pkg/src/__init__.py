# partition-ops - operations on spectral partition Lie algebras
