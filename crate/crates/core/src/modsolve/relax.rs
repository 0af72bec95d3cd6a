//! Minimisation of the discrete n-energy by coloured nonlinear SOR.
//!
//! Each lattice cell is split into `n!` Kuhn simplices; the simplex for a
//! permutation `σ` follows the path `v_0 = 0`, `v_{k+1} = v_k + e_{σ(k)}`.
//! The linear interpolant has `|∇u|² h² = S = Σ_k (u(v_{k+1}) − u(v_k))²`
//! on it, so its share of `∫|∇u|ⁿ` is `S^{n/2} / n!` for every `h`.

use crate::error::{Error, Result};
use crate::exec::Exec;

use super::lattice::{GridField, Lattice, NodeKind};

/// A simplex seen from one of its vertices.
#[derive(Debug, Clone, Copy)]
struct Entry {
    /// Offset from the node to the lower corner of the cell.
    cell: isize,
    /// Offsets from the node to the path vertices `v_0 … v_n`.
    path: [isize; 4],
    /// Position of the node on the path.
    k: usize,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Cell-relative path offsets for every Kuhn simplex.
fn cell_paths(lat: &Lattice) -> Vec<[isize; 4]> {
    let n = lat.n();
    permutations(n)
        .into_iter()
        .map(|perm| {
            let mut path = [0isize; 4];
            let mut off = 0isize;
            for (k, &axis) in perm.iter().enumerate() {
                off += lat.strides[axis] as isize;
                path[k + 1] = off;
            }
            path
        })
        .collect()
}

/// All simplices containing a node, as offsets from that node.
fn node_entries(lat: &Lattice) -> Vec<Entry> {
    let n = lat.n();
    let mut out = Vec::new();
    for path in cell_paths(lat) {
        for k in 0..=n {
            let shift = path[k];
            let mut rel = [0isize; 4];
            for j in 0..=n {
                rel[j] = path[j] - shift;
            }
            out.push(Entry { cell: -shift, path: rel, k });
        }
    }
    out
}

pub(crate) struct Problem {
    pub field: GridField,
    cell_active: Vec<bool>,
    colors: Vec<Vec<usize>>,
    entries: Vec<Entry>,
    paths: Vec<[isize; 4]>,
    /// Lower corners of active cells.
    cells: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct SolveStats {
    pub sweeps: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

impl Problem {
    pub fn new(field: GridField) -> Self {
        let lat = &field.lattice;
        let n = lat.n();
        let len = lat.len();
        let mut cell_active = vec![false; len];
        let mut cells = Vec::new();
        let mut colors = vec![Vec::new(); 1 << n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..len {
            let j = lat.multi_index(i);
            if field.kind[i] == NodeKind::Free {
                let c: usize = j.iter().enumerate().map(|(k, &a)| a << k).sum::<usize>() % (1 << n);
                colors[c].push(i);
            }
            if j.iter().zip(&lat.dims).any(|(&a, &d)| a + 1 >= d) {
                continue;
            }
            let all = (0..(1usize << n)).all(|corner| {
                let idx: usize = (0..n).map(|k| ((corner >> k) & 1) * lat.strides[k]).sum();
                field.kind[i + idx] != NodeKind::Excluded
            });
            if all {
                cell_active[i] = true;
                cells.push(i);
            }
        }
        let entries = node_entries(lat);
        let paths = cell_paths(lat);
        Problem { field, cell_active, colors, entries, paths, cells }
    }

    pub fn n(&self) -> usize {
        self.field.lattice.n()
    }

    /// `Σ S^{n/2} / n!` over all simplices of active cells.
    pub fn energy(&self, exec: Exec) -> f64 {
        const CHUNK: usize = 4096;
        let n = self.n();
        let u = &self.field.u;
        let fact = if n == 2 { 2.0 } else { 6.0 };
        let chunks = self.cells.len().div_ceil(CHUNK);
        let partial = exec.map(chunks, |c| {
            let mut acc = 0.0;
            for &i in &self.cells[c * CHUNK..((c + 1) * CHUNK).min(self.cells.len())] {
                for p in &self.paths {
                    let mut s = 0.0;
                    for k in 0..n {
                        let d = u[(i as isize + p[k + 1]) as usize] - u[(i as isize + p[k]) as usize];
                        s += d * d;
                    }
                    acc += if n == 2 { s } else { s * s.sqrt() };
                }
            }
            acc
        });
        // Fixed summation order keeps the result independent of threads.
        partial.iter().sum::<f64>() / fact
    }

    /// Newton step `−f'/f''` for the local energy at free node `i`.
    #[inline]
    fn newton_step(&self, u: &[f64], i: usize) -> f64 {
        let n = self.n();
        let (mut g, mut hss) = (0.0, 0.0);
        for e in &self.entries {
            let c = (i as isize + e.cell) as usize;
            if !self.cell_active[c] {
                continue;
            }
            let mut s = 0.0;
            let mut d_in = 0.0;
            let mut d_out = 0.0;
            for k in 0..n {
                let d = u[(i as isize + e.path[k + 1]) as usize] - u[(i as isize + e.path[k]) as usize];
                s += d * d;
                if k + 1 == e.k {
                    d_in = d;
                } else if k == e.k {
                    d_out = d;
                }
            }
            let dd = d_in - d_out;
            let m = f64::from(u8::from(e.k > 0) + u8::from(e.k < n));
            if n == 2 {
                g += dd;
                hss += m;
            } else if s > 0.0 {
                let r = s.sqrt();
                g += r * dd;
                hss += dd * dd / r + m * r;
            }
        }
        if hss > 0.0 {
            -g / hss
        } else {
            0.0
        }
    }

    /// One sweep over all colours; returns the largest nodal change.
    fn sweep(&mut self, omega: f64, exec: Exec) -> f64 {
        let mut residual: f64 = 0.0;
        for c in 0..self.colors.len() {
            let list = &self.colors[c];
            let u = &self.field.u;
            let updates = exec.map(list.len(), |t| {
                let i = list[t];
                (u[i] + omega * self.newton_step(u, i)).clamp(0.0, 1.0)
            });
            let u = &mut self.field.u;
            for (&i, v) in list.iter().zip(updates) {
                residual = residual.max((v - u[i]).abs());
                u[i] = v;
            }
        }
        residual
    }

    /// Relaxes until the largest nodal change is at most `tol`. Sweeps
    /// that would raise the energy are undone and the relaxation factor
    /// is reduced.
    pub fn solve(
        &mut self,
        mut omega: f64,
        tol: f64,
        max_sweeps: usize,
        exec: Exec,
    ) -> Result<SolveStats> {
        let mut history = vec![self.energy(exec)];
        let mut sweeps = 0;
        let mut residual = f64::INFINITY;
        let mut backup = self.field.u.clone();
        while sweeps < max_sweeps {
            backup.copy_from_slice(&self.field.u);
            let r = self.sweep(omega, exec);
            sweeps += 1;
            let e = self.energy(exec);
            let prev = *history.last().expect("history starts non-empty");
            if e > prev * (1.0 + 1e-13) + 1e-300 {
                self.field.u.copy_from_slice(&backup);
                omega = if omega > 1.01 { 1.0 + 0.5 * (omega - 1.0) } else { 0.7 * omega };
                continue;
            }
            history.push(e.min(prev));
            residual = r;
            if r <= tol {
                return Ok(SolveStats { sweeps, residual, history });
            }
        }
        Err(Error::Convergence { sweeps, residual })
    }
}

/// SOR factor that is optimal for the Laplacian on a box with `nodes`
/// points along its longest side.
pub(crate) fn sor_factor(nodes: usize) -> f64 {
    2.0 / (1.0 + (std::f64::consts::PI / nodes.max(2) as f64).sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize, m: usize) -> GridField {
        let lo = vec![0.0; n];
        let hi = vec![1.0; n];
        let lattice = Lattice::covering(&lo, &hi, 1.0 / m as f64);
        let len = lattice.len();
        let mut kind = vec![NodeKind::Free; len];
        let mut u = vec![0.5; len];
        for i in 0..len {
            let j = lattice.multi_index(i);
            if lattice.on_pad(&j) {
                kind[i] = NodeKind::Excluded;
            } else if j[0] == 1 {
                kind[i] = NodeKind::Zero;
                u[i] = 0.0;
            } else if j[0] + 2 == lattice.dims[0] {
                kind[i] = NodeKind::One;
                u[i] = 1.0;
            }
        }
        GridField { lattice, u, kind }
    }

    #[test]
    fn simplex_counts() {
        for (n, per_node) in [(2, 6), (3, 24)] {
            let l = Lattice::covering(&vec![0.0; n], &vec![1.0; n], 0.5);
            assert_eq!(node_entries(&l).len(), per_node);
            assert_eq!(cell_paths(&l).len(), if n == 2 { 2 } else { 6 });
        }
    }

    #[test]
    fn slab_capacitor_is_exact() {
        // Between two parallel faces of the unit cube with no-flux sides
        // the minimiser is linear and the energy is exactly 1.
        for n in [2, 3] {
            let mut p = Problem::new(square(n, 8));
            let stats = p.solve(sor_factor(10), 1e-12, 10_000, Exec::Sequential).unwrap();
            assert!((stats.history.last().unwrap() - 1.0).abs() < 1e-9, "n={n}");
            assert!(stats.history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn colouring_makes_threads_irrelevant() {
        let mut a = Problem::new(square(3, 6));
        let mut b = Problem::new(square(3, 6));
        a.solve(1.5, 1e-10, 10_000, Exec::Sequential).unwrap();
        b.solve(1.5, 1e-10, 10_000, Exec::Parallel).unwrap();
        assert_eq!(a.field.u, b.field.u);
    }
}
