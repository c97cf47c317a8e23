"""Effective bi-topological spaces, computable quasi-metrics and effective operators."""

from .kernel import (Confirmed, Dyadic, Enumerator, Exhausted, Registry, UnknownCodeError,
                     decode_tuple, encode_tuple, harvest, pair, run, search, unpair)
from .space import (BiSpaceDescriptor, CheckRecord, NotComputable, SpaceDescriptor,
                    check_effective_regularity, converge, join_space, limit_pass,
                    normed_from_section, sb_search)
from .quasimetric import (QuasiMetricDescriptor, RegularityWitness, conjugate, induced_bispace,
                          induced_space)
from .instances import Interval, make_reals, make_sierpinski
from .continuity import (EffectiveOperator, apply_operator, build_noninclusion_witness,
                         friedberg_diagnostic, modulus, operator_from_continuous, real_operator)

__version__ = "0.1.0"
