use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fock::{fock_dim, DEFAULT_FULLDUAL_CAP};
use crate::logic::Formula;

use super::SemanticsError;

/// How many layers of each Fock space are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Layers `0..=L` (clipped to the space's dimension).
    Layer(usize),
    /// Every layer; subject to the full-dual cap.
    Full,
}

/// Dimensions of the atomic spaces and the Fock truncation in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceAssignment {
    pub dim_n: usize,
    pub dim_s: usize,
    pub fock_truncation: Truncation,
    /// Largest full Fock dimension `2^d` allowed under [`Truncation::Full`].
    pub fulldual_cap: usize,
}

impl Default for SpaceAssignment {
    fn default() -> Self {
        SpaceAssignment {
            dim_n: 2,
            dim_s: 2,
            fock_truncation: Truncation::Layer(1),
            fulldual_cap: DEFAULT_FULLDUAL_CAP,
        }
    }
}

impl SpaceAssignment {
    pub fn new(dim_n: usize, dim_s: usize) -> Self {
        SpaceAssignment {
            dim_n,
            dim_s,
            ..Self::default()
        }
    }

    pub fn full(mut self) -> Self {
        self.fock_truncation = Truncation::Full;
        self
    }

    pub fn validate(&self) -> Result<(), SemanticsError> {
        if self.dim_n == 0 || self.dim_s == 0 {
            return Err(SemanticsError::ZeroDimension);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Base {
        atom: String,
        dim: usize,
    },
    /// Fock space over the tensor product of `inner`, kept up to `max_layer`.
    Fock {
        inner: Shape,
        max_layer: usize,
    },
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Base { dim, .. } => *dim,
            Factor::Fock { inner, max_layer } => {
                usize::try_from(fock_dim(inner.dim(), *max_layer)).expect("Fock factor too large")
            }
        }
    }

    /// Dimension with every Fock factor replaced by its layer 1.
    pub fn raw_dim(&self) -> usize {
        match self {
            Factor::Base { dim, .. } => *dim,
            Factor::Fock { inner, .. } => inner.raw_dim(),
        }
    }
}

/// An ordered list of tensor factors. Function types list the argument's
/// factors first, then the result's.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Shape(pub Vec<Factor>);

impl Shape {
    pub fn dim(&self) -> usize {
        self.0.iter().map(Factor::dim).product()
    }

    pub fn raw_dim(&self) -> usize {
        self.0.iter().map(Factor::raw_dim).product()
    }

    pub fn concat(&self, other: &Shape) -> Shape {
        Shape(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// Embeds a tensor given in layer-1 form (each Fock factor replaced by
    /// its inner space) into the full space.
    pub fn lift(&self, raw: &[f64]) -> Vec<f64> {
        assert_eq!(raw.len(), self.raw_dim(), "raw tensor length");
        let mut out = vec![0.0; self.dim()];
        for (r, &x) in raw.iter().enumerate() {
            if x != 0.0 {
                out[self.lift_index(r)] = x;
            }
        }
        out
    }

    fn lift_index(&self, mut raw: usize) -> usize {
        // row-major: the last factor varies fastest
        let mut full = 0;
        let mut stride = 1;
        for f in self.0.iter().rev() {
            let r = raw % f.raw_dim();
            raw /= f.raw_dim();
            let i = match f {
                Factor::Base { .. } => r,
                Factor::Fock { inner, .. } => 1 + inner.lift_index(r),
            };
            full += i * stride;
            stride *= f.dim();
        }
        full
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Base { atom, .. } => f.write_str(atom),
            Factor::Fock { inner, .. } => write!(f, "F[{inner}]"),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// The space a formula denotes, as a factor list.
pub fn interpret_formula(f: &Formula, sa: &SpaceAssignment) -> Result<Shape, SemanticsError> {
    sa.validate()?;
    interpret(f, sa)
}

fn interpret(f: &Formula, sa: &SpaceAssignment) -> Result<Shape, SemanticsError> {
    Ok(match f {
        Formula::Atom(a) => {
            let dim = match &**a {
                "N" => sa.dim_n,
                "S" => sa.dim_s,
                other => return Err(SemanticsError::UnknownAtom(other.to_string())),
            };
            Shape(vec![Factor::Base {
                atom: a.to_string(),
                dim,
            }])
        }
        Formula::Under(arg, res) | Formula::Over(res, arg) => {
            interpret(arg, sa)?.concat(&interpret(res, sa)?)
        }
        Formula::Product(a, b) => interpret(a, sa)?.concat(&interpret(b, sa)?),
        Formula::Bang(a) => {
            let inner = interpret(a, sa)?;
            let d = inner.dim();
            let max_layer = match sa.fock_truncation {
                Truncation::Layer(l) => l.min(d),
                Truncation::Full => {
                    if d >= usize::BITS as usize - 1 || (1usize << d) > sa.fulldual_cap {
                        return Err(SemanticsError::CapExceeded {
                            dim: d,
                            cap: sa.fulldual_cap,
                        });
                    }
                    d
                }
            };
            Shape(vec![Factor::Fock { inner, max_layer }])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn shape(text: &str, sa: &SpaceAssignment) -> Shape {
        interpret_formula(&parse_formula(text).unwrap(), sa).unwrap()
    }

    #[test]
    fn functions_and_products() {
        let sa = SpaceAssignment::new(2, 2);
        let s = shape("N\\S", &sa);
        assert_eq!(s.to_string(), "N*S");
        assert_eq!(s.dim(), 4);
        assert_eq!(shape("S/N", &sa), s);
        assert_eq!(shape("S,S", &sa).to_string(), "S*S");
    }

    #[test]
    fn fock_dims() {
        let sa = SpaceAssignment::new(2, 3);
        assert_eq!(shape("!N", &sa.full()).dim(), 4);
        assert_eq!(shape("!N", &sa).dim(), 3);
        assert_eq!(shape("!(N\\S)", &sa).dim(), 7);
        assert_eq!(shape("!(N\\S)", &sa).raw_dim(), 6);
        let err = interpret_formula(
            &parse_formula("!(N\\S)").unwrap(),
            &SpaceAssignment::new(4, 4).full(),
        );
        assert!(matches!(err, Err(SemanticsError::CapExceeded { dim: 16, .. })));
    }

    #[test]
    fn unknown_atom() {
        let sa = SpaceAssignment::default();
        let f = parse_formula("NP").unwrap_or_else(|_| Formula::atom("NP"));
        assert!(matches!(
            interpret_formula(&f, &sa),
            Err(SemanticsError::UnknownAtom(_))
        ));
    }

    #[test]
    fn lifting_places_layer_one() {
        let sa = SpaceAssignment::new(2, 2);
        // !N\N: F[N] (dim 3) then N
        let s = shape("!N\\N", &sa);
        assert_eq!(s.lift(&[1.0, 2.0, 3.0, 4.0]), [0.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        // nested: !(!N\N) has layer 1 of dim 6 at positions 1..7
        let s = shape("!(!N\\N)", &sa);
        let lifted = s.lift(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(lifted, [0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
    }
}
