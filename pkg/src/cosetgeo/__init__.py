"""Low-index subgroups of finitely presented groups, the incidence
geometries of their coset actions, and informationally complete
measurement checks built on the resulting permutation groups."""

from importlib import resources

from .coset import CosetLimitExceeded, CosetTable, coset_representatives, enumerate_cosets
from .fpgroup import (
    ParseError,
    Presentation,
    Word,
    free_reduce,
    parse_presentation,
    parse_word_text,
    read_presentation_file,
    render_word,
    word_concat,
    word_inverse,
)
from .geometry import (
    GeometryName,
    IncidenceGeometry,
    axiom_ii_holds,
    binomial_filtration,
    build_geometry,
    contextuality,
    isomorphic,
    recognize,
    recognize_all,
    reference_model,
)
from .lowindex import (
    SearchBudgetExceeded,
    SubgroupRecord,
    eta_sequence,
    low_index_subgroups,
    schreier_generators,
)
from .mic import (
    Fiducial,
    FiducialReport,
    displacement_operators,
    find_fiducials,
    fiducial_report,
    gram_matrix,
    gram_rank,
    is_mic,
    is_sic,
    pairwise_products,
    pauli_orbit,
    reconstruct_state,
)
from .permgrp import (
    PermutationGroup,
    format_cycles,
    name_group,
    parse_cycles,
    perm_image,
)
from .pipeline import (
    AnalysisOptions,
    PipelineReport,
    analyze_permutation_group,
    analyze_record,
    export_report,
    run_pipeline,
)

__version__ = "0.1.0"


def bundled_presentation(name: str):
    """Path to one of the shipped presentation files (sigma257, wbar, q)."""
    ref = resources.files("cosetgeo").joinpath(f"data/{name}.fp")
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled presentation named {name!r}")
    return ref
