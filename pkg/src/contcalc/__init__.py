"""Container calculus engine.

Represents n-ary containers, computes their functor extensions, constructs
least fixed points (finite trees with path positions) and greatest fixed
points (finite-state machine seeds with path positions), implements the
universal fold/unfold maps, and checks the defining isomorphisms by
enumeration oracles and bisimulation.
"""

from .core import (Container, EqResult, ExtElement, FamilyAssignment,
                   FamilyMorphism, IndexSet, SplitContainer, ext_contains,
                   ext_enumerate, ext_equal, extend_mor, split_last)
from .domains import (AnyDom, AtomsDom, Budget, Domain, EmptyDom, Enumeration,
                      FinDom, MachineDom, NatDom, PosDom, ProdDom, SumDom,
                      UnitDom, WTreeDom, path_budget)
from .elaborator import (ConstDom, Decl, Exp, FunctorExpr, One, Param, Prod,
                         Rec, Sum, Zero, data_to_element, decl_split,
                         elaborate, parse_decl, parse_decl_file, render_decl,
                         render_expr, to_container)
from .errors import (DomainError, ElaborationError, EngineError, MachineError,
                     ParseError, PayloadError, RetractionError,
                     StateCapExceeded, ValueParseError)
from .mfix import (BisimVerdict, Coalgebra, CoalgebraMachine, ExactVerdict,
                   MachineRegistry, MachineSpec, MorphismVerdict, PhiRetraction,
                   PosEvalResult, PosHandlers, SquareWitness, bisim_bounded,
                   bisim_exact, coalg_morphism_check, identity_retraction,
                   into_nu, nu_container, out, parse_machine_file, pos_eval,
                   pos_induct, render_machine, unfold)
from .values import (AtomV, FinV, InlV, InrV, NatV, PairV, PathV, SeedV,
                     TreeV, UNIT, UnitV, Value, canonical_key, parse_value,
                     render, value_size)
from .wfix import (Algebra, FixedPointW, FLayer, ProbeVerdict, fold, into,
                   into_algebra, mu_container, out_of, pos_enumerate_w,
                   subelement, sup_tree, tree_fixed_point, uniqueness_probe,
                   unsup_tree)

__version__ = "0.1.0"
