//! Separable 3D complex FFT over the flat lattice layout with per-thread plan
//! caching. Lines that are identically zero are skipped, which matters for
//! the very sparse spectra produced by lacunary plane-wave sums.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::lattice::Lattice;

struct Plan3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
    scratch_len: usize,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static PLANS: RefCell<HashMap<[usize; 3], Rc<Plan3>>> = RefCell::new(HashMap::new());
}

fn plan_for(dims: [usize; 3]) -> Rc<Plan3> {
    PLANS.with(|plans| {
        if let Some(p) = plans.borrow().get(&dims) {
            return p.clone();
        }
        let plan = PLANNER.with(|planner| {
            let mut planner = planner.borrow_mut();
            let forward = dims.map(|n| planner.plan_fft_forward(n));
            let inverse = dims.map(|n| planner.plan_fft_inverse(n));
            let scratch_len = forward
                .iter()
                .chain(inverse.iter())
                .map(|f| f.get_inplace_scratch_len())
                .max()
                .unwrap_or(0);
            Plan3 {
                dims,
                forward,
                inverse,
                scratch_len,
            }
        });
        let plan = Rc::new(plan);
        plans.borrow_mut().insert(dims, plan.clone());
        plan
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

fn transform_axis(
    plan: &Plan3,
    data: &mut [Complex64],
    axis: usize,
    dir: Direction,
    line: &mut Vec<Complex64>,
    scratch: &mut [Complex64],
) {
    let dims = plan.dims;
    let n = dims[axis];
    if n == 1 {
        return;
    }
    let fft = match dir {
        Direction::Forward => &plan.forward[axis],
        Direction::Inverse => &plan.inverse[axis],
    };
    let stride: usize = dims[axis + 1..].iter().product();
    let block = n * stride;
    let zero = Complex64::new(0.0, 0.0);

    if stride == 1 {
        for chunk in data.chunks_exact_mut(n) {
            if chunk.iter().all(|c| *c == zero) {
                continue;
            }
            fft.process_with_scratch(chunk, scratch);
        }
        return;
    }

    line.resize(n, zero);
    for outer in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            let mut nonzero = false;
            for (j, slot) in line.iter_mut().enumerate() {
                let v = data[base + j * stride];
                nonzero |= v != zero;
                *slot = v;
            }
            if !nonzero {
                continue;
            }
            fft.process_with_scratch(line, scratch);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride] = *v;
            }
        }
    }
}

/// Unnormalized forward DFT followed by division by the point count, so that
/// coefficient `m` is the mean of `f(x) e^{-i m.x}`.
pub(crate) fn forward(lattice: &Lattice, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), lattice.len());
    let plan = plan_for(lattice.dims());
    let mut line = Vec::new();
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.scratch_len];
    for axis in 0..3 {
        transform_axis(&plan, data, axis, Direction::Forward, &mut line, &mut scratch);
    }
    let scale = 1.0 / lattice.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Synthesis `f(x) = sum_m c_m e^{i m.x}` (no scaling).
pub(crate) fn inverse(lattice: &Lattice, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), lattice.len());
    let plan = plan_for(lattice.dims());
    let mut line = Vec::new();
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.scratch_len];
    for axis in (0..3).rev() {
        transform_axis(&plan, data, axis, Direction::Inverse, &mut line, &mut scratch);
    }
}
