use crate::bloch::Ensemble;
use crate::families;

pub(crate) fn asymmetric_four(h: f64) -> Ensemble {
    families::asymmetric_four(h).unwrap()
}

pub(crate) fn regular_tetrahedron(f: f64) -> Ensemble {
    families::regular_tetrahedron(f).unwrap()
}
