"""Work extraction, passive-state energy and entanglement for finite quantum systems."""
from .errors import DomainError, ErgotropyError, NumericalError, ValidationError
from .qcore import (
    DensityMatrix,
    Hamiltonian,
    PureState,
    Spectrum,
    dephase,
    eig_hermitian,
    local_sum,
    partial_trace,
    random_pure,
    random_state,
    random_unitary,
    schmidt,
    tensor,
)
from .majorize import Comparability, compare, majorizes
from .passive import (
    ThermalState,
    WorkReport,
    energy,
    ergotropy,
    gibbs_state,
    match_beta_by_entropy,
    passive_energy,
    passive_state,
    renyi_divergence,
    renyi_entropy,
    single_shot_work,
    thermodynamic_work,
    work_report,
)
from .epo import (
    EnvironmentSpec,
    EpoChannel,
    apply,
    monotone_report,
    sample_epo_channel,
    validate_epo,
)
from .entangle import (
    Decomposition,
    MeasureValue,
    asymptotic_measure,
    conversion_probability,
    ergotropic_gap,
    measure_mixed_upper_bound,
    measure_pure,
    per_copy_measure,
    vidal_monotone,
)
from .tripartite import (
    ClassLabel,
    GapSignature,
    classify,
    cut_gap,
    dephased_gap,
    gap_signature,
    make_bisep,
    make_ghz,
    make_w,
    monogamy_decompose,
)

__all__ = [
    "DomainError",
    "ErgotropyError",
    "NumericalError",
    "ValidationError",
    "DensityMatrix",
    "Hamiltonian",
    "PureState",
    "Spectrum",
    "dephase",
    "eig_hermitian",
    "local_sum",
    "partial_trace",
    "random_pure",
    "random_state",
    "random_unitary",
    "schmidt",
    "tensor",
    "Comparability",
    "compare",
    "majorizes",
    "ThermalState",
    "WorkReport",
    "energy",
    "ergotropy",
    "gibbs_state",
    "match_beta_by_entropy",
    "passive_energy",
    "passive_state",
    "renyi_divergence",
    "renyi_entropy",
    "single_shot_work",
    "thermodynamic_work",
    "work_report",
    "EnvironmentSpec",
    "EpoChannel",
    "apply",
    "monotone_report",
    "sample_epo_channel",
    "validate_epo",
    "Decomposition",
    "MeasureValue",
    "asymptotic_measure",
    "conversion_probability",
    "ergotropic_gap",
    "measure_mixed_upper_bound",
    "measure_pure",
    "per_copy_measure",
    "vidal_monotone",
    "ClassLabel",
    "GapSignature",
    "classify",
    "cut_gap",
    "dephased_gap",
    "gap_signature",
    "make_bisep",
    "make_ghz",
    "make_w",
    "monogamy_decompose",
]

__version__ = "0.1.0"
