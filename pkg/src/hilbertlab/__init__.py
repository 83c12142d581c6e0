"""Discrete and ergodic Hilbert transforms with level-set verification tools."""

__version__ = "0.1.0"

from .core_seq import (
    BilateralSequence,
    IntegerWindow,
    LevelSetReport,
    canonicalize,
    count_exceedances,
    l1_norm,
    translate,
)
from .hilbert import (
    TransformField,
    full_hilbert,
    maximal_hilbert,
    sufficient_window,
    truncated_hilbert,
    weak_type_report,
)
from .boole import (
    LevelRoots,
    RationalPoleSum,
    eval_g,
    level_roots,
    level_set_measure,
    vieta_check,
)
from .cc import (
    CompleteConvergenceReport,
    TranslatedBlockSpec,
    exceedance_set,
    greedy_disjoint_translates,
    hypothesis_test,
    partial_sum_S,
    translated_block_maximal,
)
from .ergodic import (
    FinitePermutationSystem,
    ObservableField,
    ergodic_complete_sum,
    ergodic_level_measure,
    ergodic_maximal,
    ergodic_truncated_hilbert,
    orbit_sequence,
    transference_check,
)
