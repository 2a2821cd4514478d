"""Low-complexity LMMSE filter design for GFDM over block-fading multipath channels."""

from .bench import c_direct, c_sparse, run_sweep
from .counting import OpCounter
from .direct import LmmseFilter, equalize_direct, lmmse_direct
from .fast import (
    FastFilter,
    compute_fast_filter,
    equalize_zak,
    filter_to_frequency_domain,
)
from .linalg import (
    BlockCirculant,
    BlockDiagonal,
    CyclicTridiagonal,
    bc_diagonalize,
    bc_inverse,
    bc_multiply,
    bc_reconstruct,
    dft,
    solve_cyclic_tridiagonal,
    zak_forward,
    zak_inverse,
)
from .model import (
    Channel,
    GfdmParams,
    PrototypeFilter,
    apply_channel,
    build_prototype,
    draw_noise,
    draw_symbols,
    modulate,
    modulation_matrix,
    random_channel,
)
