//! Linear program representations, sensitivity metadata and feasibility checks.
//!
//! Programs are stored in the maximization form
//!
//! ```text
//! maximize cᵀx  subject to  A x ≤ b,  A_eq x = b_eq,  x ≥ 0
//! ```
//!
//! The equality block is public data carried alongside the inequality block;
//! it is never privatized.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Feasibility tolerance used when none is supplied.
pub const DEFAULT_FEAS_TOL: f64 = 1e-9;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Dense row-major binary matrix. Serialized as nested arrays of `0`/`1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mask {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn filled(rows: usize, cols: usize, v: bool) -> Self {
        Self { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Mask of the nonzero pattern of `a`.
    pub fn nonzero_of(a: &Matrix) -> Self {
        Self::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) != 0.0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn any(&self) -> bool {
        self.data.iter().any(|&v| v)
    }

    pub fn row_counts(&self) -> Vec<usize> {
        (0..self.rows).map(|i| (0..self.cols).filter(|&j| self.get(i, j)).count()).collect()
    }

    pub fn col_counts(&self) -> Vec<usize> {
        (0..self.cols).map(|j| (0..self.rows).filter(|&i| self.get(i, j)).count()).collect()
    }
}

impl Serialize for Mask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<u8>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| u8::from(self.get(i, j))).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged mask rows"));
        }
        Ok(Mask {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&v| v != 0).collect(),
        })
    }
}

pub(crate) mod bit_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&b| u8::from(b)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        Ok(Vec::<u8>::deserialize(d)?.into_iter().map(|v| v != 0).collect())
    }
}

mod opt_bit_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<bool>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::bit_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<bool>>, D::Error> {
        Ok(Option::<Vec<u8>>::deserialize(d)?.map(|v| v.into_iter().map(|b| b != 0).collect()))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `maximize cᵀx s.t. Ax ≤ b, A_eq x = b_eq, x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Matrix,
    pub b: Vec<f64>,
    #[serde(rename = "A_eq", default, skip_serializing_if = "Option::is_none")]
    pub a_eq: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_eq: Option<Vec<f64>>,
}

impl LinearProgram {
    pub fn new(c: Vec<f64>, a: Matrix, b: Vec<f64>) -> Result<Self> {
        let lp = Self { c, a, b, a_eq: None, b_eq: None };
        lp.validate()?;
        Ok(lp)
    }

    pub fn from_rows(c: Vec<f64>, a: &[Vec<f64>], b: Vec<f64>) -> Result<Self> {
        let n = c.len();
        let a = if a.is_empty() { Matrix::zeros(0, n) } else { Matrix::from_rows(a)? };
        Self::new(c, a, b)
    }

    pub fn with_equalities(mut self, a_eq: Matrix, b_eq: Vec<f64>) -> Result<Self> {
        self.a_eq = Some(a_eq);
        self.b_eq = Some(b_eq);
        self.validate()?;
        Ok(self)
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Number of inequality rows.
    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// Number of equality rows.
    pub fn p(&self) -> usize {
        self.b_eq.as_ref().map_or(0, Vec::len)
    }

    pub fn eq_block(&self) -> Option<(&Matrix, &[f64])> {
        match (&self.a_eq, &self.b_eq) {
            (Some(a), Some(b)) if !b.is_empty() => Some((a, b.as_slice())),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.a.rows() != self.b.len() || (self.a.cols() != n && self.a.rows() > 0) {
            return Err(Error::Dimension(format!(
                "A is {}x{}, b has {}, c has {}",
                self.a.rows(),
                self.a.cols(),
                self.b.len(),
                n
            )));
        }
        match (&self.a_eq, &self.b_eq) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                if a.rows() != b.len() || (a.cols() != n && a.rows() > 0) {
                    return Err(Error::Dimension(format!(
                        "A_eq is {}x{}, b_eq has {}, c has {}",
                        a.rows(),
                        a.cols(),
                        b.len(),
                        n
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::NonFinite("A_eq"));
                }
                if !b.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite("b_eq"));
                }
            }
            _ => return Err(Error::Dimension("A_eq and b_eq must be given together".into())),
        }
        if !self.c.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("c"));
        }
        if !self.a.is_finite() {
            return Err(Error::NonFinite("A"));
        }
        if !self.b.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("b"));
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }

    /// Largest violation of `Ax ≤ b`, `A_eq x = b_eq` and `x ≥ 0` (zero when feasible).
    pub fn max_violation(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::Dimension(format!("x has {} entries, expected {}", x.len(), self.n())));
        }
        let mut worst = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
        for (ax, bi) in self.a.mul_vec(x).iter().zip(&self.b) {
            worst = worst.max(ax - bi);
        }
        if let Some((a_eq, b_eq)) = self.eq_block() {
            for (ax, bi) in a_eq.mul_vec(x).iter().zip(b_eq) {
                worst = worst.max((ax - bi).abs());
            }
        }
        Ok(worst)
    }

    /// `Ax ≤ b + tol·1`, `|A_eq x − b_eq| ≤ tol` and `x ≥ −tol·1`.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.max_violation(x)? <= tol)
    }

    /// Dual of the inequality-form program, written as a maximization:
    /// `min bᵀμ s.t. Aᵀμ ≥ c, μ ≥ 0` becomes `max (−b)ᵀμ s.t. (−Aᵀ)μ ≤ −c`.
    ///
    /// The objective of the returned program is the negated dual objective.
    pub fn dual_of(&self) -> Result<LinearProgram> {
        if self.p() > 0 {
            return Err(Error::InvalidParameter(
                "dual_of is defined for inequality-form programs only".into(),
            ));
        }
        let at = if self.m() == 0 {
            Matrix::zeros(self.n(), 0)
        } else {
            self.a.transpose().map(|v| -v)
        };
        Ok(LinearProgram {
            c: self.b.iter().map(|v| -v).collect(),
            a: at,
            b: self.c.iter().map(|v| -v).collect(),
            a_eq: None,
            b_eq: None,
        })
    }

    /// Same program with the inequality block replaced.
    pub fn with_inequalities(&self, a: Matrix, b: Vec<f64>) -> LinearProgram {
        LinearProgram { a, b, ..self.clone() }
    }
}

/// Public sensitivity metadata for a database-dependent program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityProfile {
    #[serde(rename = "delta11_A")]
    pub delta11_a: f64,
    pub delta1_b: f64,
    pub delta1_c: f64,
    /// 1 where `A` may be nonzero over the database family.
    #[serde(rename = "mask_A")]
    pub mask_a: Mask,
    #[serde(with = "bit_vec")]
    pub mask_c: Vec<bool>,
    /// Rows of `b` that depend on the database. Absent means every row.
    #[serde(default, with = "opt_bit_vec", skip_serializing_if = "Option::is_none")]
    pub mask_b: Option<Vec<bool>>,
    /// Entrywise supremum of `A` over the database family.
    #[serde(rename = "A_sup")]
    pub a_sup: Matrix,
    /// Entrywise infimum of `b` over the database family.
    pub b_inf: Vec<f64>,
}

impl SensitivityProfile {
    /// Profile with the nonzero pattern of `A` and `c` as masks and the
    /// program's own data as envelope (`A_sup = A`, `b_inf = b`).
    pub fn tight(lp: &LinearProgram, delta11_a: f64, delta1_b: f64, delta1_c: f64) -> Self {
        Self {
            delta11_a,
            delta1_b,
            delta1_c,
            mask_a: Mask::nonzero_of(&lp.a),
            mask_c: lp.c.iter().map(|&v| v != 0.0).collect(),
            mask_b: None,
            a_sup: lp.a.clone(),
            b_inf: lp.b.clone(),
        }
    }

    pub fn b_sensitive(&self, i: usize) -> bool {
        self.mask_b.as_ref().map_or(true, |m| m[i])
    }
}

/// Validates every profile invariant against `lp`; an empty list means consistent.
pub fn validate_profile(lp: &LinearProgram, profile: &SensitivityProfile) -> Vec<String> {
    profile_problems(lp, profile, true)
}

/// The subset of profile problems that make privatization ill-defined.
///
/// A nonzero coefficient outside `mask_A` is reported by
/// [`validate_profile`] but tolerated here: such an entry is public and is
/// copied into the private program unchanged.
pub fn blocking_profile_problems(lp: &LinearProgram, profile: &SensitivityProfile) -> Vec<String> {
    profile_problems(lp, profile, false)
}

fn profile_problems(lp: &LinearProgram, profile: &SensitivityProfile, support: bool) -> Vec<String> {
    let mut out = Vec::new();
    let (m, n) = (lp.m(), lp.n());
    for (name, v) in [
        ("delta11_A", profile.delta11_a),
        ("delta1_b", profile.delta1_b),
        ("delta1_c", profile.delta1_c),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            out.push(format!("{name} = {v} must be finite and nonnegative"));
        }
    }
    let mut shapes_ok = true;
    if (profile.mask_a.rows(), profile.mask_a.cols()) != (m, n) && m > 0 {
        out.push(format!(
            "mask_A is {}x{}, expected {m}x{n}",
            profile.mask_a.rows(),
            profile.mask_a.cols()
        ));
        shapes_ok = false;
    }
    if (profile.a_sup.rows(), profile.a_sup.cols()) != (m, n) && m > 0 {
        out.push(format!(
            "A_sup is {}x{}, expected {m}x{n}",
            profile.a_sup.rows(),
            profile.a_sup.cols()
        ));
        shapes_ok = false;
    }
    if profile.mask_c.len() != n {
        out.push(format!("mask_c has {} entries, expected {n}", profile.mask_c.len()));
    }
    if let Some(mb) = &profile.mask_b {
        if mb.len() != m {
            out.push(format!("mask_b has {} entries, expected {m}", mb.len()));
        }
    }
    if profile.b_inf.len() != m {
        out.push(format!("b_inf has {} entries, expected {m}", profile.b_inf.len()));
    } else {
        for (i, (&lo, &bi)) in profile.b_inf.iter().zip(&lp.b).enumerate() {
            if !lo.is_finite() || lo > bi {
                out.push(format!("b_inf[{i}] = {lo} exceeds b[{i}] = {bi}"));
            }
        }
    }
    if shapes_ok {
        for i in 0..m {
            for j in 0..n {
                let a = lp.a.get(i, j);
                if profile.mask_a.get(i, j) {
                    let sup = profile.a_sup.get(i, j);
                    if !sup.is_finite() || sup < a {
                        out.push(format!("A_sup[{i},{j}] = {sup} is below A[{i},{j}] = {a}"));
                    }
                } else if support && a != 0.0 {
                    out.push(format!("A[{i},{j}] = {a} is nonzero but mask_A[{i},{j}] = 0"));
                }
            }
        }
    }
    out
}

/// Which program components are privatized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

impl Components {
    pub const ALL: Components = Components { a: true, b: true, c: true };
    pub const NONE: Components = Components { a: false, b: false, c: false };

    /// Parses a list such as `"A,b,c"` or `"b"`; case-insensitive, `none` is empty.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Components::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "a" => out.a = true,
                "b" => out.b = true,
                "c" => out.c = true,
                "none" => {}
                other => return Err(Error::Config(format!("unknown component `{other}`"))),
            }
        }
        Ok(out)
    }
}

impl Default for Components {
    fn default() -> Self {
        Self::ALL
    }
}

/// `(ε, δ)` together with its split across the three mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub eps: f64,
    pub delta: f64,
    #[serde(rename = "alpha_A")]
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub alpha_c: f64,
}

impl PrivacyBudget {
    pub fn new(eps: f64, delta: f64, alpha_a: f64, alpha_b: f64, alpha_c: f64) -> Result<Self> {
        let b = Self { eps, delta, alpha_a, alpha_b, alpha_c };
        b.validate()?;
        Ok(b)
    }

    /// Even split across all three components.
    pub fn even(eps: f64, delta: f64) -> Result<Self> {
        Self::new(eps, delta, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps = {} must be positive", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::InvalidParameter(format!("delta = {} must lie in (0, 1/2]", self.delta)));
        }
        for a in [self.alpha_a, self.alpha_b, self.alpha_c] {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!("allocation weight {a} must be nonnegative")));
            }
        }
        let sum = self.alpha_a + self.alpha_b + self.alpha_c;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("allocation weights sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Checks the weights against a component selection: every included
    /// component has a positive weight and every omitted one has zero.
    pub fn validate_for(&self, components: Components) -> Result<()> {
        self.validate()?;
        for (name, on, alpha) in [
            ("A", components.a, self.alpha_a),
            ("b", components.b, self.alpha_b),
            ("c", components.c, self.alpha_c),
        ] {
            if on && alpha <= 0.0 {
                return Err(Error::Config(format!("component {name} is privatized with zero budget")));
            }
            if !on && alpha != 0.0 {
                return Err(Error::Config(format!(
                    "component {name} is not privatized but has allocation {alpha}"
                )));
            }
        }
        Ok(())
    }

    /// `(α ε, α δ)` for one mechanism.
    pub fn share(&self, alpha: f64) -> (f64, f64) {
        (alpha * self.eps, alpha * self.delta)
    }

    /// Total `(ε, δ)` spent by running the selected mechanisms, by sequential composition.
    pub fn consumed(&self, components: Components) -> (f64, f64) {
        let mut total = (0.0, 0.0);
        for (on, alpha) in [
            (components.a, self.alpha_a),
            (components.b, self.alpha_b),
            (components.c, self.alpha_c),
        ] {
            if on {
                let (e, d) = self.share(alpha);
                total.0 += e;
                total.1 += d;
            }
        }
        total
    }
}

/// Contents of a problem-instance JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub lp: LinearProgram,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityProfile>,
}

impl InstanceFile {
    pub fn from_json(s: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(s)?;
        f.lp.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
