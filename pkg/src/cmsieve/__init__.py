"""cmsieve: class groups of imaginary quadratic orders, effective
Siegel-Tatuzawa bounds, ring-class Galois models, Hilbert class
polynomials, and an exact special-point sieve for plane curves in Y(1)^2.
"""

from .bounds import (
    AndreOortParams,
    AuditEntry,
    BoundReport,
    HeegnerParams,
    andre_oort_c11,
    c7,
    c10,
    heegner_c1,
    replay_audit,
    solve_disc_threshold,
)
from .dirichlet import (
    EffectiveConstant,
    RealCharacter,
    class_number_formula_check,
    genus_c8,
    kronecker,
    l_one,
    tatuzawa_c4,
)
from .errors import (
    CurveParseError,
    DegenerateCurveError,
    InfeasibleGridError,
    PrecisionError,
    ResourceLimitError,
)
from .galois_models import (
    FinAbGroup,
    GenDihedralGroup,
    SubgroupLattice,
    cokernel_of_restriction,
    corollary2_annihilator,
    dihedral_quotient_exponent,
    gen_dihedral,
    ring_class_galois_model,
    theorem1_annihilator,
)
from .hilbert import HilbertPoly, hilbert_class_poly, j_invariant, singular_moduli_up_to
from .quadform import (
    ClassGroupStructure,
    Discriminant,
    QuadForm,
    as_discriminant,
    class_group,
    compose,
    order_class_number,
    principal_form,
    reduce_form,
    reduced_forms,
    two_torsion_size,
)
from .sieve import (
    CurveSpec,
    SieveReport,
    SpecialPointHit,
    derive_c9,
    parse_curve,
    sieve,
    special_point_scan,
    strip_degenerate,
)

__version__ = "0.1.0"

__all__ = [
    "AndreOortParams",
    "AuditEntry",
    "BoundReport",
    "ClassGroupStructure",
    "CurveParseError",
    "CurveSpec",
    "DegenerateCurveError",
    "Discriminant",
    "EffectiveConstant",
    "FinAbGroup",
    "GenDihedralGroup",
    "HeegnerParams",
    "HilbertPoly",
    "InfeasibleGridError",
    "PrecisionError",
    "QuadForm",
    "RealCharacter",
    "ResourceLimitError",
    "SieveReport",
    "SpecialPointHit",
    "SubgroupLattice",
    "andre_oort_c11",
    "as_discriminant",
    "c10",
    "c7",
    "class_group",
    "class_number_formula_check",
    "cokernel_of_restriction",
    "compose",
    "corollary2_annihilator",
    "derive_c9",
    "dihedral_quotient_exponent",
    "gen_dihedral",
    "genus_c8",
    "heegner_c1",
    "hilbert_class_poly",
    "j_invariant",
    "kronecker",
    "l_one",
    "order_class_number",
    "parse_curve",
    "principal_form",
    "reduce_form",
    "reduced_forms",
    "replay_audit",
    "ring_class_galois_model",
    "sieve",
    "singular_moduli_up_to",
    "solve_disc_threshold",
    "special_point_scan",
    "strip_degenerate",
    "tatuzawa_c4",
    "theorem1_annihilator",
    "two_torsion_size",
]
