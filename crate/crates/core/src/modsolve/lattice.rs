//! Uniform node lattices and the fields living on them.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// Role of a lattice node in the condenser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Free,
    /// Pinned to 0 (on `C0` or `∂0`).
    Zero,
    /// Pinned to 1 (on `C1` or `∂1`).
    One,
    /// Outside the computational domain; cells touching it are dropped,
    /// which imposes a no-flux condition there.
    Excluded,
}

/// An axis-aligned lattice `lo + j·h`, `j ∈ [0, dims)`, whose outermost
/// layer is reserved for excluded padding nodes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Lattice {
    pub h: f64,
    pub lo: Vec<f64>,
    pub dims: Vec<usize>,
    pub strides: Vec<usize>,
}

impl Lattice {
    /// Covers the box `[box_lo, box_hi]` with spacing `h` plus one padding
    /// layer on each side.
    pub fn covering(box_lo: &[f64], box_hi: &[f64], h: f64) -> Self {
        let dims: Vec<usize> = box_lo
            .iter()
            .zip(box_hi)
            .map(|(a, b)| ((b - a) / h - 1e-9).ceil().max(1.0) as usize + 3)
            .collect();
        let lo = box_lo.iter().map(|a| a - h).collect();
        let mut strides = vec![1; dims.len()];
        for k in 1..dims.len() {
            strides[k] = strides[k - 1] * dims[k - 1];
        }
        Lattice { h, lo, dims, strides }
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }


    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let j = i % d;
                i /= d;
                j
            })
            .collect()
    }

    pub fn coords(&self, i: usize) -> Vec<f64> {
        self.multi_index(i)
            .iter()
            .zip(&self.lo)
            .map(|(&j, lo)| lo + j as f64 * self.h)
            .collect()
    }

    pub fn on_pad(&self, j: &[usize]) -> bool {
        j.iter().zip(&self.dims).any(|(&a, &d)| a == 0 || a + 1 == d)
    }

    /// Multilinear interpolation of `values` at `x`, clamped to the lattice.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let n = self.n();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for k in 0..n {
            let t = ((x[k] - self.lo[k]) / self.h).clamp(0.0, (self.dims[k] - 1) as f64);
            let j = (t.floor() as usize).min(self.dims[k] - 2);
            base[k] = j;
            frac[k] = t - j as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = 0;
            for k in 0..n {
                let bit = (corner >> k) & 1;
                w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
                idx += (base[k] + bit) * self.strides[k];
            }
            acc += w * values[idx];
        }
        acc
    }
}

/// Potential `u` on a lattice together with the node roles.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub(crate) lattice: Lattice,
    pub(crate) u: Vec<f64>,
    pub(crate) kind: Vec<NodeKind>,
}

impl GridField {
    pub fn h(&self) -> f64 {
        self.lattice.h
    }

    /// Node counts per axis, padding included.
    pub fn dims(&self) -> &[usize] {
        &self.lattice.dims
    }

    /// Lower corner of the lattice (a padding node).
    pub fn origin(&self) -> &[f64] {
        &self.lattice.lo
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kind
    }

    pub fn coords(&self, i: usize) -> Vec<f64> {
        self.lattice.coords(i)
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.kind.iter().filter(|&&k| k == kind).count()
    }

    /// Writes `x_1, …, x_n, u, kind` for every non-excluded node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.lattice.n();
        let header: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
        writeln!(w, "{},u,kind", header.join(","))?;
        for (i, (&u, &kind)) in self.u.iter().zip(&self.kind).enumerate() {
            if kind == NodeKind::Excluded {
                continue;
            }
            let x: Vec<String> = self.coords(i).iter().map(|c| format!("{c:.10e}")).collect();
            let tag = match kind {
                NodeKind::Free => "free",
                NodeKind::Zero => "zero",
                NodeKind::One => "one",
                NodeKind::Excluded => unreachable!(),
            };
            writeln!(w, "{},{u:.16e},{tag}", x.join(","))?;
        }
        Ok(())
    }
}
