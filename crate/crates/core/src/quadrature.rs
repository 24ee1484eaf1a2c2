//! Composite Gauss-Legendre rules on `[a, b]`.

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// `panels` equal sub-intervals, each carrying an `order`-point Gauss-Legendre rule.
#[derive(Clone, Debug)]
pub struct CompositeGauss {
    panels: usize,
    reference: Vec<(f64, f64)>,
}

impl CompositeGauss {
    pub fn new(panels: usize, order: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidParameter("quadrature needs >= 1 panel".into()));
        }
        let reference = GaussLegendre::new(order)
            .map_err(|_| Error::InvalidParameter(format!("Gauss-Legendre order {order} < 2")))?
            .into_node_weight_pairs();
        Ok(Self { panels, reference })
    }

    /// Rule with `total` nodes split into 8-point panels (the default layout).
    pub fn with_total_nodes(total: usize) -> Result<Self> {
        if total < 8 || !total.is_multiple_of(8) {
            return Err(Error::InvalidParameter(format!(
                "quadrature node count {total} must be a positive multiple of 8"
            )));
        }
        Self::new(total / 8, 8)
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.reference.len()
    }

    pub fn total_nodes(&self) -> usize {
        self.panels * self.reference.len()
    }

    /// Same panel order, twice as many panels.
    pub fn doubled(&self) -> Self {
        Self {
            panels: self.panels * 2,
            reference: self.reference.clone(),
        }
    }

    /// Physical nodes and weights on `[a, b]`, sorted by node.
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.total_nodes());
        for p in 0..self.panels {
            let lo = a + h * p as f64;
            let mut panel: Vec<(f64, f64)> = self
                .reference
                .iter()
                .map(|&(x, w)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * w))
                .collect();
            panel.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.extend(panel);
        }
        out
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes(a, b).into_iter().map(|(x, w)| w * f(x)).sum()
    }
}
