//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the map runs on rayon; the runtime
//! [`Execution`] switch still allows a sequential run for comparison.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Parallel if items.len() > 1 => items.into_par_iter().map(f).collect(),
        _ => items.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(_exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..100).collect();
        let a = map(Execution::Parallel, v.clone(), |x| x * x);
        let b = map(Execution::Sequential, v, |x| x * x);
        assert_eq!(a, b);
    }
}
