//! Dense two-phase primal simplex with dual recovery, plus small-instance
//! geometric oracles (vertex enumeration, diameter, Slater point).

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::lp::{LinearProgram, Matrix};

const PIVOT_TOL: f64 = 1e-10;
const VERTEX_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub status: Status,
    /// Primal solution, present iff `Optimal`.
    pub x: Option<Vec<f64>>,
    /// Multipliers of the inequality block, present iff `Optimal`.
    pub mu: Option<Vec<f64>>,
    /// Sign-unrestricted multipliers of the equality block, present iff `Optimal`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,
    #[serde(serialize_with = "finite_or_null")]
    pub objective: f64,
    #[serde(skip)]
    pub pivots: usize,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl SolveResult {
    fn without_solution(status: Status, pivots: usize) -> Self {
        let objective = match status {
            Status::Unbounded => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        };
        Self { status, x: None, mu: None, nu: None, objective, pivots }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Primal solution; panics unless optimal.
    pub fn x(&self) -> &[f64] {
        self.x.as_deref().expect("solve result has no primal solution")
    }

    /// Inequality multipliers; panics unless optimal.
    pub fn mu(&self) -> &[f64] {
        self.mu.as_deref().expect("solve result has no dual solution")
    }

    /// Dual objective `μᵀb + νᵀb_eq`.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let mut v = crate::lp::dot(self.mu(), &lp.b);
        if let (Some(nu), Some((_, b_eq))) = (&self.nu, lp.eq_block()) {
            v += crate::lp::dot(nu, b_eq);
        }
        v
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Simplex tableau over `[x | slacks | artificials | rhs]`.
struct Tableau {
    rows: usize,
    width: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    n_struct: usize,
    pivots: usize,
    d_tol: f64,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r * self.width + self.width - 1]
    }

    fn at(&self, r: usize, j: usize) -> f64 {
        self.t[r * self.width + j]
    }

    /// Current objective value.
    fn value(&self) -> f64 {
        -self.obj[self.width - 1]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width;
        let inv = 1.0 / self.t[r * w + j];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.t[r * w + j] = 1.0;
        let prow: Vec<(usize, f64)> = self.t[r * w..(r + 1) * w]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, &v)| (k, v))
            .collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for &(k, v) in &prow {
                row[k] -= f * v;
            }
            row[j] = 0.0;
        }
        let f = self.obj[j];
        if f != 0.0 {
            for &(k, v) in &prow {
                self.obj[k] -= f * v;
            }
            self.obj[j] = 0.0;
        }
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Maximizes the current objective row; only columns `< allowed` may enter.
    fn run(&mut self, allowed: usize) -> Result<Outcome> {
        let stall_limit = 5 * (self.rows + self.n_struct);
        let max_iter = 50_000 + 200 * (self.rows + self.width);
        let mut bland = false;
        let mut stall = 0usize;
        let mut iters = 0usize;
        loop {
            let entering = if bland {
                (0..allowed).find(|&j| self.obj[j] > self.d_tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..allowed {
                    let d = self.obj[j];
                    if d > self.d_tol && best.map_or(true, |(_, b)| d > b) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(j) = entering else {
                return Ok(Outcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, j);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio {
                            Some((r, ratio))
                        } else if ratio == bratio && bland && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };

            let before = self.value();
            self.pivot(r, j);
            let after = self.value();
            if after > before + 1e-12 * (1.0 + before.abs()) {
                stall = 0;
            } else {
                stall += 1;
                if stall >= stall_limit {
                    bland = true;
                }
            }
            iters += 1;
            if iters > max_iter {
                return Err(Error::IterationLimit(max_iter));
            }
        }
    }
}

/// Solves `maximize cᵀx s.t. Ax ≤ b, A_eq x = b_eq, x ≥ 0`.
///
/// Infeasible and unbounded programs are reported through [`Status`]; errors
/// are reserved for malformed input.
pub fn solve(lp: &LinearProgram) -> Result<SolveResult> {
    lp.validate()?;
    let n = lp.n();
    let m = lp.m();
    let p = lp.p();
    let rows = m + p;

    // Row orientation: rows with negative rhs are negated and get an artificial.
    let mut sign = vec![1.0; rows];
    let mut needs_art = vec![false; rows];
    for i in 0..m {
        if lp.b[i] < 0.0 {
            sign[i] = -1.0;
            needs_art[i] = true;
        }
    }
    if let Some((_, b_eq)) = lp.eq_block() {
        for k in 0..p {
            if b_eq[k] < 0.0 {
                sign[m + k] = -1.0;
            }
            needs_art[m + k] = true;
        }
    }
    let n_art = needs_art.iter().filter(|&&v| v).count();
    let art_start = n + m;
    let cols = n + m + n_art;
    let width = cols + 1;

    let mut t = vec![0.0; rows * width];
    let mut basis = vec![0usize; rows];
    let mut art_of_row = vec![usize::MAX; rows];
    let mut next_art = art_start;
    for r in 0..rows {
        let (coeffs, rhs) = if r < m {
            (lp.a.row(r), lp.b[r])
        } else {
            let (a_eq, b_eq) = lp.eq_block().expect("equality rows present");
            (a_eq.row(r - m), b_eq[r - m])
        };
        let s = sign[r];
        let row = &mut t[r * width..(r + 1) * width];
        for j in 0..n {
            row[j] = s * coeffs[j];
        }
        if r < m {
            row[n + r] = s;
        }
        row[cols] = s * rhs;
        if needs_art[r] {
            row[next_art] = 1.0;
            basis[r] = next_art;
            art_of_row[r] = next_art;
            next_art += 1;
        } else {
            basis[r] = n + r;
        }
    }

    let c_scale = lp.c.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let b_scale = lp
        .b
        .iter()
        .chain(lp.b_eq.iter().flatten())
        .fold(1.0f64, |a, v| a.max(v.abs()));
    let mut tab = Tableau {
        rows,
        width,
        t,
        obj: vec![0.0; width],
        basis,
        n_struct: n,
        pivots: 0,
        d_tol: 1e-9,
    };

    if n_art > 0 {
        // Phase 1: maximize −Σ artificials.
        for r in 0..rows {
            if needs_art[r] {
                for k in 0..width {
                    tab.obj[k] += tab.t[r * width + k];
                }
            }
        }
        for k in art_start..cols {
            tab.obj[k] = 0.0;
        }
        tab.run(art_start)?;
        if tab.value() < -1e-9 * b_scale {
            return Ok(SolveResult::without_solution(Status::Infeasible, tab.pivots));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..rows {
            if tab.basis[r] >= art_start {
                let j = (0..art_start)
                    .filter(|&j| tab.at(r, j).abs() > 1e-9)
                    .max_by(|&a, &b| tab.at(r, a).abs().total_cmp(&tab.at(r, b).abs()));
                if let Some(j) = j {
                    tab.pivot(r, j);
                }
            }
        }
    }

    // Phase 2 objective row.
    let cost = |j: usize| if j < n { lp.c[j] } else { 0.0 };
    tab.d_tol = 1e-9 * c_scale;
    tab.obj.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..n {
        tab.obj[j] = lp.c[j];
    }
    for r in 0..rows {
        let cb = cost(tab.basis[r]);
        if cb != 0.0 {
            for k in 0..width {
                tab.obj[k] -= cb * tab.t[r * width + k];
            }
        }
    }
    for r in 0..rows {
        tab.obj[tab.basis[r]] = 0.0;
    }
    if let Outcome::Unbounded = tab.run(art_start)? {
        return Ok(SolveResult::without_solution(Status::Unbounded, tab.pivots));
    }

    let (x, y) = recover(lp, &tab, &sign, &art_of_row, b_scale);
    let mu = y[..m].to_vec();
    let nu = if p > 0 { Some(y[m..].to_vec()) } else { None };
    let objective = lp.objective(&x);
    Ok(SolveResult { status: Status::Optimal, x: Some(x), mu: Some(mu), nu, objective, pivots: tab.pivots })
}

/// Recomputes primal and dual values from the final basis against the
/// original data, falling back to the tableau values if the basis matrix is
/// numerically singular.
fn recover(
    lp: &LinearProgram,
    tab: &Tableau,
    sign: &[f64],
    art_of_row: &[usize],
    b_scale: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = lp.n();
    let m = lp.m();
    let rows = tab.rows;
    let column = |j: usize, r: usize| -> f64 {
        if j < n {
            if r < m {
                lp.a.get(r, j)
            } else {
                lp.a_eq.as_ref().expect("equality rows present").get(r - m, j)
            }
        } else if j < n + m {
            f64::from(u8::from(j - n == r))
        } else {
            f64::from(u8::from(art_of_row[r] == j)) * sign[r]
        }
    };
    let mut bmat = vec![0.0; rows * rows];
    let mut bt = vec![0.0; rows * rows];
    for (k, &j) in tab.basis.iter().enumerate() {
        for r in 0..rows {
            let v = column(j, r);
            bmat[r * rows + k] = v;
            bt[k * rows + r] = v;
        }
    }
    let rhs: Vec<f64> = lp.b.iter().chain(lp.b_eq.iter().flatten()).copied().collect();
    let cb: Vec<f64> = tab.basis.iter().map(|&j| if j < n { lp.c[j] } else { 0.0 }).collect();

    let refined = solve_square(bmat, rhs, rows, 1e-13).zip(solve_square(bt, cb, rows, 1e-13));
    let clean_tol = 1e-9 * b_scale;
    if let Some((xb, y)) = refined {
        if xb.iter().all(|&v| v > -clean_tol) && y.iter().all(|v| v.is_finite()) {
            let mut x = vec![0.0; n];
            for (k, &j) in tab.basis.iter().enumerate() {
                if j < n {
                    x[j] = xb[k].max(0.0);
                }
            }
            return (x, y);
        }
    }

    let mut x = vec![0.0; n];
    for (r, &j) in tab.basis.iter().enumerate() {
        if j < n {
            x[j] = tab.rhs(r).max(0.0);
        }
    }
    let mut y = vec![0.0; rows];
    for r in 0..rows {
        y[r] = if r < m {
            -tab.obj[n + r]
        } else if art_of_row[r] != usize::MAX {
            -sign[r] * tab.obj[art_of_row[r]]
        } else {
            0.0
        };
    }
    (x, y)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    acc
}

/// All basic feasible solutions of `{Ax ≤ b, A_eq x = b_eq, x ≥ 0}`,
/// deduplicated within `1e-9`.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<Vec<f64>>> {
    lp.validate()?;
    let n = lp.n();
    let m = lp.m();
    let p = lp.p();
    if p > n {
        return Err(Error::Dimension("more equality rows than variables".into()));
    }
    let free = n - p;
    let candidates = m + n;
    let combos = binomial(candidates, free);
    if combos > VERTEX_LIMIT {
        return Err(Error::TooLarge { combinations: combos, limit: VERTEX_LIMIT });
    }
    let scale = lp.b.iter().chain(lp.b_eq.iter().flatten()).fold(1.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-9 * scale;

    // Candidate tight constraint k: k < m is row k of A, otherwise x_{k−m} = 0.
    let candidate_row = |k: usize| -> (Vec<f64>, f64) {
        if k < m {
            (lp.a.row(k).to_vec(), lp.b[k])
        } else {
            let mut e = vec![0.0; n];
            e[k - m] = 1.0;
            (e, 0.0)
        }
    };

    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..free).collect();
    loop {
        let mut sys = Vec::with_capacity(n * n);
        let mut rhs = Vec::with_capacity(n);
        if let Some((a_eq, b_eq)) = lp.eq_block() {
            for k in 0..p {
                sys.extend_from_slice(a_eq.row(k));
                rhs.push(b_eq[k]);
            }
        }
        for &k in &idx {
            let (row, r) = candidate_row(k);
            sys.extend_from_slice(&row);
            rhs.push(r);
        }
        if let Some(x) = solve_square(sys, rhs, n, 1e-12) {
            if lp.max_violation(&x)? <= tol && !out.iter().any(|v| same_point(v, &x, 1e-9)) {
                out.push(x);
            }
        }
        // next combination in lexicographic order
        if free == 0 {
            break;
        }
        let mut i = free;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < candidates - free + i {
                break;
            }
            if i == 0 {
                return Ok(out);
            }
        }
        idx[i] += 1;
        for k in i + 1..free {
            idx[k] = idx[k - 1] + 1;
        }
    }
    Ok(out)
}

fn same_point(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

/// Whether the feasible region contains a nonzero recession direction.
pub fn is_unbounded_region(lp: &LinearProgram) -> Result<bool> {
    let n = lp.n();
    let mut rows: Vec<Vec<f64>> = (0..lp.m()).map(|i| lp.a.row(i).to_vec()).collect();
    rows.push(vec![1.0; n]);
    let mut b = vec![0.0; lp.m()];
    b.push(1.0);
    let mut rec = LinearProgram::new(vec![1.0; n], Matrix::from_rows(&rows)?, b)?;
    if let Some((a_eq, b_eq)) = lp.eq_block() {
        rec = rec.with_equalities(a_eq.clone(), vec![0.0; b_eq.len()])?;
    }
    let r = solve(&rec)?;
    Ok(r.is_optimal() && r.objective > 1e-9)
}

/// Largest Euclidean distance between two points of the (bounded) feasible region.
pub fn diameter(lp: &LinearProgram) -> Result<f64> {
    if is_unbounded_region(lp)? {
        return Err(Error::UnboundedRegion);
    }
    let verts = enumerate_vertices(lp)?;
    if verts.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut best = 0.0f64;
    for (i, u) in verts.iter().enumerate() {
        for v in &verts[i + 1..] {
            let d = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            best = best.max(d);
        }
    }
    Ok(best)
}

/// Componentwise maxima `max_{x ∈ F} x_j` over the feasible region.
pub fn coordinate_maxima(lp: &LinearProgram) -> Result<Vec<f64>> {
    let n = lp.n();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        let probe = LinearProgram { c, ..lp.clone() };
        let r = solve(&probe)?;
        match r.status {
            Status::Optimal => out.push(r.objective),
            Status::Infeasible => return Err(Error::EmptyRegion),
            Status::Unbounded => return Err(Error::UnboundedRegion),
        }
    }
    Ok(out)
}

/// Diagonal of the bounding box `Π [0, max x_j]`; an upper bound on the
/// diameter that stays cheap when vertex enumeration is out of reach.
pub fn box_diameter(lp: &LinearProgram) -> Result<f64> {
    Ok(crate::lp::norm2(&coordinate_maxima(lp)?))
}

/// Point `ω` maximizing the smallest inequality slack, with that slack.
///
/// Solves `max t s.t. Aω + t·1 ≤ b, A_eq ω = b_eq, ω ≥ 0`, with `t` capped at
/// `1 + max|b|` so that a region with unbounded slack still yields a point.
/// A negative optimal slack means the region is empty.
pub fn slater_point(lp: &LinearProgram) -> Result<(Vec<f64>, f64)> {
    lp.validate()?;
    let n = lp.n();
    let m = lp.m();
    let cap = 1.0 + lp.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // variables: ω (n), t⁺, t⁻
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut r = lp.a.row(i).to_vec();
        r.extend([1.0, -1.0]);
        rows.push(r);
    }
    let mut cap_row = vec![0.0; n + 2];
    cap_row[n] = 1.0;
    rows.push(cap_row);
    let mut b = lp.b.clone();
    b.push(cap);
    let mut c = vec![0.0; n + 2];
    c[n] = 1.0;
    c[n + 1] = -1.0;
    let mut aux = LinearProgram::new(c, Matrix::from_rows(&rows)?, b)?;
    if let Some((a_eq, b_eq)) = lp.eq_block() {
        let ext: Vec<Vec<f64>> = (0..a_eq.rows())
            .map(|k| {
                let mut r = a_eq.row(k).to_vec();
                r.extend([0.0, 0.0]);
                r
            })
            .collect();
        aux = aux.with_equalities(Matrix::from_rows(&ext)?, b_eq.to_vec())?;
    }
    let r = solve(&aux)?;
    if !r.is_optimal() {
        return Err(Error::EmptyRegion);
    }
    let omega = r.x()[..n].to_vec();
    let margin = if m == 0 {
        f64::INFINITY
    } else {
        lp.a.mul_vec(&omega)
            .iter()
            .zip(&lp.b)
            .map(|(ax, bi)| bi - ax)
            .fold(f64::INFINITY, f64::min)
    };
    let scale = lp.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if margin < -1e-9 * scale {
        return Err(Error::EmptyRegion);
    }
    Ok((omega, margin))
}
