"""densitylab: finite-horizon experiments on asymptotic density, permutation
steering, reduction maps, density preservation, and series rearrangement.

Every infinite object is a prefix oracle with an explicit horizon; every
verdict is horizon evidence, never a claim about a true limit.
"""

__version__ = "0.1.0"

from .errors import (
    ContainmentError,
    DegenerateCheckpointError,
    DensityLabError,
    HorizonError,
    InconclusiveError,
    IntegrityError,
    PreconditionError,
    ResourceError,
)
from .oracles import (
    IntervalPartition,
    LazyPermutation,
    LazySet,
    Slalom,
    audit_infinite_coinfinite,
    block_permutation,
    block_reversal_permutation,
    doubling_blocks,
    even_odd_split_permutation,
    evens,
    from_mapping,
    geometric_partition,
    identity_permutation,
    multiples,
    naturals,
    odds,
    seeded_block_permutation,
    superincreasing_partition,
    swap_adjacent_pairs,
)
from .density import (
    DensityEstimate,
    DensityProfile,
    StrongDensityReport,
    checkpoint_schedule,
    closure_bound,
    density_profile,
    estimate_density,
    estimate_relative_density,
    image_set,
    relative_density_profile,
    strong_density_check,
)
from .constructions import (
    DiagonalWitness,
    JKSetSpec,
    block_set,
    canonical_sparse_positions,
    diagonal_set,
    disrupted_image,
    disrupting_permutation,
    disruption_checkpoints,
    jk_set_check,
    sigma_mixer,
    sparse_set,
    strided_jk_set,
    to_density_permutation,
    to_oscillation_permutation,
)
from .reductions import (
    ReductionPair,
    REDUCTIONS,
    almost_disjoint_witnesses,
    banakh_phi_plus,
    bernoulli_density_sample,
    check_banakh_reduction,
    check_slalom_reduction,
    covmeager_extension_game,
    reaping_phi_plus,
    run_reduction,
    seeded_unbounding_pair,
    slalom_phi_minus,
    slalom_phi_plus,
    unbounding_osc_witness,
    unbounding_phi_plus,
)
from .preservation import (
    ConditionReport,
    CounterexampleBlocks,
    IntervalDecomposition,
    condition_a_check,
    condition_b_check,
    counterexample_blocks,
    counterexample_checkpoint_rows,
    interval_count,
    preservation_audit,
)
from .series import (
    PccVerdict,
    RearrangementTarget,
    SeriesSpec,
    alternating_harmonic,
    cesaro_mean,
    cesaro_profile,
    mean_rearrange,
    pad_with_zeroes,
    pcc_classify,
    riemann_rearrange,
    shift_series,
    sparse_embed,
)
