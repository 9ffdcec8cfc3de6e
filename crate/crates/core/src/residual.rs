use serde::Serialize;

/// Named non-negative residuals from one pointwise check.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResidualRecord {
    entries: Vec<(String, f64)>,
}

impl ResidualRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push((name.into(), value));
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.push(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest entry; NaN propagates so that it can never pass a `< tol` test.
    pub fn max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m: f64, (_, v)| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(*v) })
    }
}
