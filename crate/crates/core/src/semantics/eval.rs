use crate::fock::{counit_eps, delta_apply, DeltaKind, GradedTensor};

use super::shape::{Factor, Shape};
use super::term::{wires_text, Term};
use super::SemanticsError;

/// One pure tensor: a value per wire.
type Wires = Vec<Vec<f64>>;

/// Evaluates `t` on one tensor per input wire, expanding each `Delta` into
/// the formal sum given by `kind`. Returns the output wires' tensor product,
/// flattened row-major.
pub fn evaluate(
    t: &Term,
    inputs: &[Vec<f64>],
    kind: DeltaKind,
    cap: usize,
) -> Result<Vec<f64>, SemanticsError> {
    let want = t.inputs();
    if want.len() != inputs.len() {
        return Err(SemanticsError::InputCount {
            expected: want.len(),
            found: inputs.len(),
        });
    }
    for (i, (s, x)) in want.iter().zip(inputs).enumerate() {
        if s.dim() != x.len() {
            return Err(SemanticsError::InputShape {
                slot: i,
                shape: s.to_string(),
                expected: s.dim(),
                found: x.len(),
            });
        }
    }
    let out_dim: usize = t.outputs().iter().map(Shape::dim).product();
    let mut acc = vec![0.0; out_dim];
    let ctx = Ctx { kind, cap };
    for term in ctx.run(t, inputs.to_vec())? {
        let flat = term.iter().fold(vec![1.0], |a, w| kron(&a, w));
        for (o, x) in acc.iter_mut().zip(flat) {
            *o += x;
        }
    }
    Ok(acc)
}

struct Ctx {
    kind: DeltaKind,
    cap: usize,
}

fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

fn fock_parts(s: &Shape) -> Result<(usize, usize), SemanticsError> {
    match s.0.as_slice() {
        [Factor::Fock { inner, max_layer }] => Ok((inner.dim(), *max_layer)),
        _ => Err(SemanticsError::NotFock(wires_text(std::slice::from_ref(s)))),
    }
}

fn arity(t: &Term) -> usize {
    match t {
        Term::Id(ws) | Term::Join(ws) => ws.len(),
        Term::Cup { .. } => 2,
        Term::Delta(_) | Term::Eps(_) | Term::Incl { .. } | Term::Split(..) => 1,
        Term::Cap(_) => 0,
        Term::Swap(a, b) => a.len() + b.len(),
        Term::Seq(ts) => ts.first().map_or(0, arity),
        Term::Par(ts) => ts.iter().map(arity).sum(),
    }
}

impl Ctx {
    fn run(&self, t: &Term, mut w: Wires) -> Result<Vec<Wires>, SemanticsError> {
        Ok(match t {
            Term::Id(_) => vec![w],
            Term::Cup {
                arg,
                result,
                arg_left,
            } => {
                let (x, fun) = if *arg_left { (&w[0], &w[1]) } else { (&w[1], &w[0]) };
                let db = result.dim();
                let mut out = vec![0.0; db];
                for (a, &xa) in x.iter().enumerate().take(arg.dim()) {
                    if xa == 0.0 {
                        continue;
                    }
                    for (o, f) in out.iter_mut().zip(&fun[a * db..(a + 1) * db]) {
                        *o += xa * f;
                    }
                }
                vec![vec![out]]
            }
            Term::Delta(s) => {
                let (d, l) = fock_parts(s)?;
                let v = GradedTensor::from_flat(d, l, &w[0])?;
                delta_apply(self.kind, &v, self.cap)?
                    .terms
                    .into_iter()
                    .map(|(a, b)| vec![a.flat(), b.flat()])
                    .collect()
            }
            Term::Eps(s) => {
                let (d, l) = fock_parts(s)?;
                vec![vec![counit_eps(&GradedTensor::from_flat(d, l, &w[0])?)]]
            }
            Term::Incl { fock, .. } => {
                let (_, l) = fock_parts(fock)?;
                vec![vec![GradedTensor::embed_layer1_in(&w[0], l).flat()]]
            }
            Term::Cap(s) => {
                let d = s.dim();
                (0..d).map(|i| vec![unit(d, i), unit(d, i)]).collect()
            }
            Term::Swap(a, _) => {
                w.rotate_left(a.len());
                vec![w]
            }
            Term::Join(_) => vec![vec![w.iter().fold(vec![1.0], |a, x| kron(&a, x))]],
            Term::Split(a, b) => {
                let (da, db) = (a.dim(), b.dim());
                (0..da)
                    .filter_map(|i| {
                        let row = &w[0][i * db..(i + 1) * db];
                        row.iter()
                            .any(|&x| x != 0.0)
                            .then(|| vec![unit(da, i), row.to_vec()])
                    })
                    .collect()
            }
            Term::Seq(ts) => {
                let mut sums = vec![w];
                for t in ts {
                    let mut next = Vec::new();
                    for s in sums {
                        next.extend(self.run(t, s)?);
                    }
                    sums = next;
                }
                sums
            }
            Term::Par(ts) => {
                let mut sums: Vec<Wires> = vec![Vec::new()];
                let mut rest = w.into_iter();
                for t in ts {
                    let part: Wires = rest.by_ref().take(arity(t)).collect();
                    let outs = self.run(t, part)?;
                    let mut next = Vec::with_capacity(sums.len() * outs.len());
                    for s in &sums {
                        for o in &outs {
                            let mut joined = s.clone();
                            joined.extend(o.iter().cloned());
                            next.push(joined);
                        }
                    }
                    sums = next;
                }
                sums
            }
        })
    }
}
