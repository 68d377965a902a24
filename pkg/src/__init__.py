import src.grid
import src.FieldTriple
import src.Snapshot
import src.functionals
import src.GroundState
import src.Propagator
import src.CutoffCreator
import src.Morawetz
import src.experiments
