use crate::error::{Error, Result};
use crate::metric::{check_index_set, seminorm_of_values, FiniteMetricSpace, ScalarField};
use crate::scalar::Scalar;

/// McShane's extension `Ef(m) = min_s (f(s) + L d(m, s))`, where `L` is the Lipschitz
/// seminorm of `f` on the source set. Nonlinear, and preserves the seminorm.
///
/// `f` holds the values on `source`, in the same order.
pub fn mcshane_extend<T: Scalar>(space: &FiniteMetricSpace<T>, source: &[usize], f: &[T]) -> Result<ScalarField<T>> {
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    check_index_set(space.len(), source)?;
    if f.len() != source.len() {
        return Err(Error::LengthMismatch { expected: source.len(), got: f.len() });
    }
    let sub = space.restrict(source)?;
    let l = seminorm_of_values(f, &sub);
    let mut out: Vec<T> = (0..space.len())
        .map(|m| source.iter().zip(f).map(|(&s, &v)| v + l * space.dist(m, s)).fold(T::infinity(), T::min))
        .collect();
    for (&s, &v) in source.iter().zip(f) {
        out[s] = v;
    }
    Ok(ScalarField::new(out))
}
