"""Exact fGn / fBm sampling module."""
from .random_stream import RandomStream, mix_seed, splitmix64
from .fgn import (
    FgnSample,
    PathSpec,
    circulant_embedding,
    fbm_path,
    fbm_covariance,
    fgn_autocovariance,
    fgn_autocovariances,
    sample_fbm,
    sample_fgn,
    sample_fgn_batch,
    validate_hurst,
)
from .workers import chunk_ranges, replica_chunks, run_ordered
