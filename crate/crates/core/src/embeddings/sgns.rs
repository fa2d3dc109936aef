//! Skip-gram negative-sampling loss and the SGD step shared by the
//! single-pair API, the trainer and the gradient checks.

use num_traits::Float;

use crate::embeddings::config::Composition;
use crate::embeddings::matrix::Rows;
use crate::error::{Error, Result};

/// Logistic function, branching on sign so `exp` never overflows.
#[inline]
pub fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// `ln(1 + e^x)`, i.e. `-log σ(-x)`.
#[inline]
pub fn softplus<F: Float>(x: F) -> F {
    x.max(F::zero()) + (-x.abs()).exp().ln_1p()
}

/// `-[log σ(pos) + Σ log σ(-neg_i)]`.
pub fn pair_loss<F: Float>(score_pos: F, scores_neg: &[F]) -> F {
    scores_neg
        .iter()
        .fold(softplus(-score_pos), |acc, &s| acc + softplus(s))
}

#[inline]
pub(crate) fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
fn axpy<F: Float>(alpha: F, x: &[F], y: &mut [F]) {
    for (y, &x) in y.iter_mut().zip(x) {
        *y = *y + alpha * x;
    }
}

/// Writes the composition of `ids` rows into `out`.
pub fn compose_into<F: Float, R: Rows<F> + ?Sized>(
    rows: &R,
    ids: &[usize],
    composition: Composition,
    out: &mut [F],
) -> Result<()> {
    out.iter_mut().for_each(|v| *v = F::zero());
    for &id in ids {
        check_id(id, rows.n_rows())?;
        for (o, &v) in out.iter_mut().zip(rows.row(id)) {
            *o = *o + v;
        }
    }
    if composition == Composition::Mean && ids.len() > 1 {
        let n = F::from(ids.len()).unwrap();
        out.iter_mut().for_each(|v| *v = *v / n);
    }
    Ok(())
}

#[inline]
fn check_id(id: usize, rows: usize) -> Result<()> {
    if id < rows {
        Ok(())
    } else {
        Err(Error::InvalidId { id, rows })
    }
}

/// Reusable buffers for [`sgns_step`].
#[derive(Clone, Debug)]
pub struct Scratch<F> {
    hidden: Vec<F>,
    grad: Vec<F>,
    coeffs: Vec<F>,
}

impl<F: Float> Scratch<F> {
    pub fn new(dim: usize) -> Self {
        Scratch {
            hidden: vec![F::zero(); dim],
            grad: vec![F::zero(); dim],
            coeffs: Vec::new(),
        }
    }
}

/// One SGD step on `-[log σ(v·u_c) + Σ log σ(-v·u_n)]`, where `v` composes
/// the `props` rows of `input` and `u` are rows of `output`.
///
/// All coefficients and the input-side gradient are computed from the
/// pre-update rows before anything is written, so repeated negatives
/// accumulate exactly. Returns the pre-update loss.
#[allow(clippy::too_many_arguments)]
pub fn sgns_step<F, I, O>(
    input: &mut I,
    output: &mut O,
    props: &[usize],
    context: usize,
    negatives: &[usize],
    lr: F,
    composition: Composition,
    scratch: &mut Scratch<F>,
) -> Result<F>
where
    F: Float,
    I: Rows<F> + ?Sized,
    O: Rows<F> + ?Sized,
{
    let dim = input.dim();
    if output.dim() != dim {
        return Err(Error::DimMismatch(dim, output.dim()));
    }
    if scratch.hidden.len() != dim {
        *scratch = Scratch::new(dim);
    }
    check_id(context, output.n_rows())?;
    for &n in negatives {
        check_id(n, output.n_rows())?;
    }

    compose_into(&*input, props, composition, &mut scratch.hidden)?;

    let Scratch { hidden, grad, coeffs } = scratch;
    grad.iter_mut().for_each(|g| *g = F::zero());
    coeffs.clear();

    let s = dot(hidden, output.row(context));
    let mut loss = softplus(-s);
    let g = sigmoid(s) - F::one();
    axpy(g, output.row(context), grad);
    coeffs.push(g);
    for &n in negatives {
        let s = dot(hidden, output.row(n));
        loss = loss + softplus(s);
        let g = sigmoid(s);
        axpy(g, output.row(n), grad);
        coeffs.push(g);
    }

    if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite(format!(
            "loss {:?} for context {context}",
            loss.to_f64()
        )));
    }

    axpy(-lr * coeffs[0], hidden, output.row_mut(context));
    for (&n, &g) in negatives.iter().zip(&coeffs[1..]) {
        axpy(-lr * g, hidden, output.row_mut(n));
    }

    let scale = match composition {
        Composition::Mean if props.len() > 1 => -lr / F::from(props.len()).unwrap(),
        _ => -lr,
    };
    for &p in props {
        axpy(scale, grad, input.row_mut(p));
    }

    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::matrix::Matrix;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert!(sigmoid(700.0f64) == 1.0);
        assert!(sigmoid(-700.0f64) > 0.0 && sigmoid(-700.0f64).is_finite());
        assert!(sigmoid(-1000.0f32).is_finite());
        assert!(softplus(700.0f64).is_finite());
        assert!((softplus(700.0f64) - 700.0).abs() < 1e-12);
    }

    #[test]
    fn loss_at_zero_scores() {
        assert!((pair_loss(0.0, &[]) - LN2).abs() < 1e-12);
        assert!((pair_loss(0.0, &[0.0]) - 2.0 * LN2).abs() < 1e-12);
        assert!((pair_loss(0.0f64, &[0.0; 5]) - 6.0 * LN2).abs() < 1e-12);
    }

    #[test]
    fn loss_vanishes_at_asymptote() {
        assert!(pair_loss(700.0f64, &[-700.0, -700.0]) < 1e-300);
        assert!(pair_loss(50.0f64, &[-50.0]) < 1e-20);
    }

    #[test]
    fn derivative_of_positive_term_at_zero() {
        // d/ds -log σ(s) = σ(s) - 1 = -0.5 at s = 0
        let h = 1e-5;
        let fd = (pair_loss(h, &[]) - pair_loss(-h, &[])) / (2.0 * h);
        assert!((fd - (sigmoid(0.0) - 1.0)).abs() < 1e-6);
        assert!((fd + 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let mut input = Matrix::from_vec(2, 2, vec![0.1, 0.2, -0.3, 0.4]);
        let mut output = Matrix::from_vec(2, 2, vec![0.5, -0.1, 0.2, 0.3]);
        let (i0, o0) = (input.clone(), output.clone());
        let mut scratch = Scratch::new(2);
        let loss = sgns_step(
            &mut input,
            &mut output,
            &[0, 1],
            0,
            &[1],
            0.0,
            Composition::Sum,
            &mut scratch,
        )
        .unwrap();
        assert_eq!(input, i0);
        assert_eq!(output, o0);
        let v = [-0.2, 0.6];
        let expected = pair_loss(dot(&v, &[0.5, -0.1]), &[dot(&v, &[0.2, 0.3])]);
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn invalid_ids_are_rejected() {
        let mut input = Matrix::<f64>::zeros(2, 2);
        let mut output = Matrix::<f64>::zeros(2, 2);
        let mut scratch = Scratch::new(2);
        assert!(matches!(
            sgns_step(
                &mut input,
                &mut output,
                &[2],
                0,
                &[],
                0.1,
                Composition::Sum,
                &mut scratch
            ),
            Err(Error::InvalidId { id: 2, rows: 2 })
        ));
        assert!(sgns_step(
            &mut input,
            &mut output,
            &[0],
            5,
            &[],
            0.1,
            Composition::Sum,
            &mut scratch
        )
        .is_err());
    }

    #[test]
    fn non_finite_values_are_caught_before_writing() {
        let mut input = Matrix::from_vec(1, 1, vec![f64::NAN]);
        let mut output = Matrix::from_vec(1, 1, vec![1.0]);
        let mut scratch = Scratch::new(1);
        let err = sgns_step(
            &mut input,
            &mut output,
            &[0],
            0,
            &[],
            0.1,
            Composition::Sum,
            &mut scratch,
        );
        assert!(matches!(err, Err(Error::NonFinite(_))));
        assert_eq!(output.as_slice(), &[1.0]);
    }
}
