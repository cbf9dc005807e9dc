use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactmath::{nullspace_by_free_column, rank, BigRat, Matrix, Poly, RatFunc};
use crate::sequences::SequenceRegistry;

use super::reduce::{constant_recurrence, ShiftReducer};
use super::{GEntry, ShiftWindow, TelescopeError, TelescoperCertificate};

/// Which summand to telescope and over which basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeProblem {
    pub seq_a: String,
    pub seq_b: Option<String>,
    pub window_a: ShiftWindow,
    pub window_b: ShiftWindow,
    pub target_shifts: (i64, i64),
    /// With `seq_a == seq_b` over one window, use one unknown per unordered
    /// basis pair. Equations are always taken over unordered pairs then.
    pub merge_symmetric: bool,
}

impl TelescopeProblem {
    /// `p(k) a_{k+shift}`.
    pub fn single(seq: &str, window: ShiftWindow, shift: i64) -> Self {
        TelescopeProblem {
            seq_a: seq.to_string(),
            seq_b: None,
            window_a: window,
            window_b: ShiftWindow::new(0, 0),
            target_shifts: (shift, 0),
            merge_symmetric: true,
        }
    }

    /// `p(k) a_{k+s_a} b_{k+s_b}`.
    pub fn product(
        seq_a: &str,
        seq_b: &str,
        windows: (ShiftWindow, ShiftWindow),
        target_shifts: (i64, i64),
    ) -> Self {
        TelescopeProblem {
            seq_a: seq_a.to_string(),
            seq_b: Some(seq_b.to_string()),
            window_a: windows.0,
            window_b: windows.1,
            target_shifts,
            merge_symmetric: true,
        }
    }

    /// `p(k) a_{k+s_a} a_{k+s_b}` with one window for both factors.
    pub fn square(seq: &str, window: ShiftWindow, target_shifts: (i64, i64)) -> Self {
        TelescopeProblem::product(seq, seq, (window, window), target_shifts)
    }

    pub fn is_symmetric(&self) -> bool {
        self.seq_b.as_deref() == Some(self.seq_a.as_str()) && self.window_a == self.window_b
    }
}

/// `p(k) = factor(k) * Σ_{m <= degree} α_m k^m` with unknown `α_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTemplate {
    pub factor: Poly,
    pub degree: usize,
}

enum Weight<'a> {
    Fixed(&'a Poly),
    Ansatz(&'a WeightTemplate),
}

/// Meaning of one column of a [`ReducedSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownKind {
    /// Coefficient of `k^power` in `g_{i,j}`.
    G { i: i64, j: i64, power: usize },
    /// Coefficient of `k^power` in the weight ansatz, or the multiplier of a
    /// fixed weight (`power = 0`).
    P { power: usize },
}

/// Exact linear system whose nullspace holds the certificates.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub unknowns: Vec<UnknownKind>,
    pub matrix: Matrix,
    /// `(i, j, power)` for each row: the basis element `a_{k+i} b_{k+j}` and
    /// the power of `k` after clearing denominators.
    pub equations: Vec<(i64, i64, usize)>,
}

/// Reducers and canonical basis for one problem.
pub(crate) struct Setup {
    red_a: ShiftReducer,
    red_b: ShiftReducer,
    symmetric: bool,
    basis: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
    expansions: HashMap<(i64, i64), Vec<RatFunc>>,
}

impl Setup {
    pub(crate) fn new(
        reg: &SequenceRegistry,
        seq_a: &str,
        seq_b: Option<&str>,
        windows: (ShiftWindow, ShiftWindow),
        symmetric: bool,
    ) -> Result<Self, TelescopeError> {
        let rec_a = reg.def(seq_a)?.recurrence.clone();
        let rec_b = match seq_b {
            Some(b) => reg.def(b)?.recurrence.clone(),
            None => constant_recurrence(),
        };
        let red_a = ShiftReducer::new(rec_a, windows.0)?;
        let red_b = ShiftReducer::new(rec_b, windows.1)?;
        let mut basis = Vec::new();
        for i in windows.0.lo..=windows.0.hi {
            for j in windows.1.lo..=windows.1.hi {
                if !symmetric || i <= j {
                    basis.push((i, j));
                }
            }
        }
        let index = basis.iter().enumerate().map(|(n, &p)| (p, n)).collect();
        Ok(Setup {
            red_a,
            red_b,
            symmetric,
            basis,
            index,
            expansions: HashMap::new(),
        })
    }

    pub(crate) fn basis(&self) -> &[(i64, i64)] {
        &self.basis
    }

    pub(crate) fn canonical(&self, i: i64, j: i64) -> usize {
        let key = if self.symmetric && i > j { (j, i) } else { (i, j) };
        self.index[&key]
    }

    /// Coordinates of `a_{k+x} b_{k+y}` in the basis.
    pub(crate) fn expand(&mut self, x: i64, y: i64) -> Result<Vec<RatFunc>, TelescopeError> {
        if let Some(v) = self.expansions.get(&(x, y)) {
            return Ok(v.clone());
        }
        let ra = self.red_a.reduce(x)?;
        let rb = self.red_b.reduce(y)?;
        let (wa, wb) = (self.red_a.window(), self.red_b.window());
        let mut out = vec![RatFunc::zero(); self.basis.len()];
        for (s, ca) in ra.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (t, cb) in rb.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let idx = self.canonical(wa.lo + s as i64, wb.lo + t as i64);
                out[idx] = &out[idx] + &(ca * cb);
            }
        }
        self.expansions.insert((x, y), out.clone());
        Ok(out)
    }
}

fn monomial(power: usize) -> Poly {
    Poly::monomial(BigRat::one(), power)
}

fn shifted_monomial(power: usize) -> Poly {
    (0..power).fold(Poly::one(), |acc, _| acc * Poly::from_ints(&[1, 1]))
}

fn build_system(
    setup: &mut Setup,
    problem: &TelescopeProblem,
    weight: Weight<'_>,
    degree: usize,
) -> Result<ReducedSystem, TelescopeError> {
    let pairs: Vec<(i64, i64)> = if problem.merge_symmetric || !setup.symmetric {
        setup.basis().to_vec()
    } else {
        let (wa, wb) = (problem.window_a, problem.window_b);
        (wa.lo..=wa.hi)
            .flat_map(|i| (wb.lo..=wb.hi).map(move |j| (i, j)))
            .collect()
    };
    let nbasis = setup.basis().len();
    let mut unknowns = Vec::new();
    // per column, contributions to each basis element
    let mut columns: Vec<Vec<RatFunc>> = Vec::new();

    for &(i, j) in &pairs {
        let next = setup.expand(i + 1, j + 1)?;
        let here = setup.canonical(i, j);
        for power in 0..=degree {
            let up = shifted_monomial(power);
            let mut col: Vec<RatFunc> = next.iter().map(|r| -&r.mul_poly(&up)).collect();
            col[here] = &col[here] + &RatFunc::from_poly(monomial(power));
            columns.push(col);
            unknowns.push(UnknownKind::G { i, j, power });
        }
    }

    let (sa, sb) = problem.target_shifts;
    let target = setup.expand(sa, sb)?;
    match weight {
        Weight::Fixed(p) => {
            columns.push(target.iter().map(|r| r.mul_poly(p)).collect());
            unknowns.push(UnknownKind::P { power: 0 });
        }
        Weight::Ansatz(t) => {
            for power in 0..=t.degree {
                let w = &t.factor * &monomial(power);
                columns.push(target.iter().map(|r| r.mul_poly(&w)).collect());
                unknowns.push(UnknownKind::P { power });
            }
        }
    }

    let mut rows: Vec<Vec<BigRat>> = Vec::new();
    let mut equations = Vec::new();
    for e in 0..nbasis {
        let nonzero: Vec<(usize, &RatFunc)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !c[e].is_zero())
            .map(|(ci, c)| (ci, &c[e]))
            .collect();
        if nonzero.is_empty() {
            continue;
        }
        let mut common = Poly::one();
        for (_, r) in &nonzero {
            common = Poly::lcm(&common, r.den())?;
        }
        let mut cleared: BTreeMap<usize, Poly> = BTreeMap::new();
        let mut max_deg = 0;
        for (ci, r) in &nonzero {
            let (scale, _) = common.divmod(r.den())?;
            let p = r.num() * &scale;
            max_deg = max_deg.max(p.degree().unwrap_or(0));
            cleared.insert(*ci, p);
        }
        let (bi, bj) = setup.basis()[e];
        for power in 0..=max_deg {
            let mut row = vec![BigRat::zero(); columns.len()];
            for (ci, p) in &cleared {
                row[*ci] = p.coeff(power);
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
                equations.push((bi, bj, power));
            }
        }
    }
    let matrix = if rows.is_empty() {
        Matrix::zeros(0, columns.len())
    } else {
        Matrix::from_rows(rows)
    };
    Ok(ReducedSystem {
        unknowns,
        matrix,
        equations,
    })
}

fn certificate_from(
    problem: &TelescopeProblem,
    unknowns: &[UnknownKind],
    v: &[BigRat],
    p: Poly,
    scale: &BigRat,
) -> TelescoperCertificate {
    let mut polys: BTreeMap<(i64, i64), Vec<BigRat>> = BTreeMap::new();
    for (u, x) in unknowns.iter().zip(v) {
        if let UnknownKind::G { i, j, power } = *u {
            let cs = polys.entry((i, j)).or_default();
            if cs.len() <= power {
                cs.resize(power + 1, BigRat::zero());
            }
            cs[power] = x / scale;
        }
    }
    let (windows, target_shifts) = match problem.seq_b {
        Some(_) => (
            vec![problem.window_a, problem.window_b],
            vec![problem.target_shifts.0, problem.target_shifts.1],
        ),
        None => (vec![problem.window_a], vec![problem.target_shifts.0]),
    };
    let mut cert = TelescoperCertificate {
        seq_a: problem.seq_a.clone(),
        seq_b: problem.seq_b.clone(),
        windows,
        target_shifts,
        p,
        g: polys
            .into_iter()
            .map(|((i, j), cs)| GEntry {
                i,
                j,
                poly: Poly::from_coeffs(cs),
            })
            .collect(),
    };
    cert.canonicalize();
    cert
}

fn setup_for(reg: &SequenceRegistry, problem: &TelescopeProblem) -> Result<Setup, TelescopeError> {
    if problem.seq_b.is_none() && problem.window_b != ShiftWindow::new(0, 0) {
        return Err(TelescopeError::InvalidCertificate(
            "a single-sequence problem uses the window [0, 0] for the constant factor".into(),
        ));
    }
    Setup::new(
        reg,
        &problem.seq_a,
        problem.seq_b.as_deref(),
        (problem.window_a, problem.window_b),
        problem.is_symmetric(),
    )
}

/// Builds the linear system for a fixed weight and `g`-degree.
pub fn reduced_system(
    reg: &SequenceRegistry,
    problem: &TelescopeProblem,
    p: &Poly,
    degree: usize,
) -> Result<ReducedSystem, TelescopeError> {
    let mut setup = setup_for(reg, problem)?;
    build_system(&mut setup, problem, Weight::Fixed(p), degree)
}

/// Searches for `g` with `deg g <= d`, trying `d = 0, 1, ..., deg_bound`.
///
/// The weight column is placed last, so a solution exists exactly when that
/// column is free in the reduced echelon form. The certificate returned is
/// the nullspace vector attached to it: every other free unknown (the
/// kernel directions, which telescope to zero) is set to zero.
pub fn find_telescoper(
    reg: &SequenceRegistry,
    problem: &TelescopeProblem,
    p: &Poly,
    deg_bound: usize,
) -> Result<TelescoperCertificate, TelescopeError> {
    let mut setup = setup_for(reg, problem)?;
    for degree in 0..=deg_bound {
        let sys = build_system(&mut setup, problem, Weight::Fixed(p), degree)?;
        let last = sys.unknowns.len() - 1;
        let found = nullspace_by_free_column(&sys.matrix)
            .into_iter()
            .find(|(f, _)| *f == last);
        if let Some((_, v)) = found {
            return Ok(certificate_from(problem, &sys.unknowns, &v, p.clone(), &v[last]));
        }
    }
    Err(TelescopeError::NotFound { deg_bound })
}

/// One basis vector of the joint `(p, g)` solution space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Ansatz coefficients `α_0, ..., α_D` (ascending powers of `k`).
    pub weights: Vec<BigRat>,
    pub certificate: TelescoperCertificate,
}

/// Basis of the joint solution space, split by whether the weight vanishes.
#[derive(Clone, Debug, Default)]
pub struct Discovery {
    /// Solutions with `p = 0`: the antidifference is a constant.
    pub kernel: Vec<Solution>,
    pub weighted: Vec<Solution>,
}

impl Discovery {
    /// Whether the ansatz coefficients `dir` (ascending powers of `k`) lie in
    /// the projection of the solution space onto the weights.
    pub fn contains_weight_direction(&self, dir: &[BigRat]) -> bool {
        let rows: Vec<Vec<BigRat>> = self.weighted.iter().map(|s| s.weights.clone()).collect();
        if rows.is_empty() {
            return dir.iter().all(Zero::is_zero);
        }
        let mut with = rows.clone();
        with.push(dir.to_vec());
        rank(&Matrix::from_rows(rows)) == rank(&Matrix::from_rows(with))
    }

    /// Dimension of the projection onto the weights.
    pub fn weight_dimension(&self) -> usize {
        if self.weighted.is_empty() {
            return 0;
        }
        rank(&Matrix::from_rows(
            self.weighted.iter().map(|s| s.weights.clone()).collect(),
        ))
    }
}

/// Solves for the weight and the `g_{i,j}` jointly at `g`-degree `deg_bound`.
///
/// Weight columns come after all `g` columns, so basis vectors attached to
/// free `g` columns have `p = 0` and those attached to free weight columns
/// have `p != 0`.
pub fn discover_weights(
    reg: &SequenceRegistry,
    problem: &TelescopeProblem,
    template: &WeightTemplate,
    deg_bound: usize,
) -> Result<Discovery, TelescopeError> {
    let mut setup = setup_for(reg, problem)?;
    let sys = build_system(&mut setup, problem, Weight::Ansatz(template), deg_bound)?;
    let first_p = sys
        .unknowns
        .iter()
        .position(|u| matches!(u, UnknownKind::P { .. }))
        .expect("weight columns present");
    let mut out = Discovery::default();
    for (free, v) in nullspace_by_free_column(&sys.matrix) {
        let weights: Vec<BigRat> = v[first_p..].to_vec();
        let p = &template.factor * &Poly::from_coeffs(weights.clone());
        let cert = certificate_from(problem, &sys.unknowns, &v, p, &BigRat::one());
        let sol = Solution {
            weights,
            certificate: cert,
        };
        if free < first_p {
            out.kernel.push(sol);
        } else {
            out.weighted.push(sol);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};
    use crate::telescoper::{certify, reference};

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn partial_sums(cert: &TelescoperCertificate, reg: &SequenceRegistry, upto: i64) -> Vec<BigRat> {
        let s0 = cert.antidifference_at(reg, 0).unwrap();
        (1..=upto)
            .map(|n| cert.antidifference_at(reg, n).unwrap() - &s0)
            .collect()
    }

    fn t_problem(lo: i64) -> TelescopeProblem {
        TelescopeProblem::square("T", ShiftWindow::new(lo, lo + 1), (0, 1))
    }

    #[test]
    fn w_square_found_and_certified() {
        let reg = SequenceRegistry::with_builtins();
        let prob = TelescopeProblem::square("W", ShiftWindow::new(-2, 0), (0, 0));
        let cert = find_telescoper(&reg, &prob, &p("8k+9"), 2).unwrap();
        let rep = certify(&cert, &reg, 200).unwrap();
        assert_eq!(rep.spot_values[..2], [int(9), int(26)]);
        assert_eq!(
            partial_sums(&cert, &reg, 200),
            partial_sums(&reference::w_square(), &reg, 200)
        );
    }

    #[test]
    fn t_cross_windows_agree() {
        let reg = SequenceRegistry::with_builtins();
        let weight = p("k(k+1)(8k+9)");
        let lower = find_telescoper(&reg, &t_problem(-1), &weight, 4).unwrap();
        let upper = find_telescoper(&reg, &t_problem(0), &weight, 4).unwrap();
        certify(&lower, &reg, 200).unwrap();
        certify(&upper, &reg, 200).unwrap();
        let sums = partial_sums(&lower, &reg, 200);
        assert_eq!(sums[0], int(0));
        assert_eq!(sums, partial_sums(&upper, &reg, 200));
        assert_eq!(sums, partial_sums(&reference::t_cross_lower(), &reg, 200));
        assert_eq!(sums, partial_sums(&reference::t_cross_upper(), &reg, 200));
    }

    #[test]
    fn t_weighted_found() {
        let reg = SequenceRegistry::with_builtins();
        let cert = find_telescoper(&reg, &t_problem(-1), &p("(k+1)(16k+21)"), 4).unwrap();
        certify(&cert, &reg, 200).unwrap();
        assert_eq!(
            partial_sums(&cert, &reg, 200),
            partial_sums(&reference::t_weighted(), &reg, 200)
        );
    }

    #[test]
    fn constant_sequence_counts() {
        let reg = SequenceRegistry::with_builtins();
        let prob = TelescopeProblem::single("one", ShiftWindow::new(0, 0), 0);
        let cert = find_telescoper(&reg, &prob, &Poly::one(), 1).unwrap();
        assert_eq!(cert.g.len(), 1);
        assert_eq!(cert.g[0].poly, Poly::var());
        certify(&cert, &reg, 50).unwrap();
    }

    #[test]
    fn not_found_below_needed_degree() {
        let reg = SequenceRegistry::with_builtins();
        let prob = TelescopeProblem::square("W", ShiftWindow::new(-2, 0), (0, 0));
        assert!(matches!(
            find_telescoper(&reg, &prob, &p("8k+9"), 1),
            Err(TelescopeError::NotFound { deg_bound: 1 })
        ));
        // outside the one-dimensional weight space at degree 2
        assert!(matches!(
            find_telescoper(&reg, &prob, &p("8k+10"), 2),
            Err(TelescopeError::NotFound { .. })
        ));
    }

    #[test]
    fn merge_does_not_change_values() {
        let reg = SequenceRegistry::with_builtins();
        for (mut prob, weight, deg) in [
            (TelescopeProblem::square("W", ShiftWindow::new(-2, 0), (0, 0)), "8k+9", 2),
            (t_problem(-1), "(k+1)(16k+21)", 4),
        ] {
            let merged = find_telescoper(&reg, &prob, &p(weight), deg).unwrap();
            prob.merge_symmetric = false;
            let split = find_telescoper(&reg, &prob, &p(weight), deg).unwrap();
            certify(&split, &reg, 200).unwrap();
            assert_eq!(partial_sums(&merged, &reg, 200), partial_sums(&split, &reg, 200));
        }
    }

    #[test]
    fn discovers_t_weight() {
        let reg = SequenceRegistry::with_builtins();
        let tmpl = WeightTemplate { factor: p("k+1"), degree: 1 };
        let d = discover_weights(&reg, &t_problem(-1), &tmpl, 3).unwrap();
        assert!(d.contains_weight_direction(&[int(21), int(16)]));
        assert!(!d.contains_weight_direction(&[int(9), int(8)]));
        for s in d.kernel.iter().chain(&d.weighted) {
            certify(&s.certificate, &reg, 100).unwrap();
        }
    }

    #[test]
    fn discovers_w_weight() {
        let reg = SequenceRegistry::with_builtins();
        let prob = TelescopeProblem::square("W", ShiftWindow::new(-2, 0), (0, 0));
        let tmpl = WeightTemplate { factor: Poly::one(), degree: 1 };
        let d = discover_weights(&reg, &prob, &tmpl, 2).unwrap();
        assert!(d.contains_weight_direction(&[int(9), int(8)]));
        assert_eq!(d.weight_dimension(), 1);
        for s in d.kernel.iter().chain(&d.weighted) {
            certify(&s.certificate, &reg, 100).unwrap();
        }
    }

    #[test]
    fn constant_sequence_discovery() {
        let reg = SequenceRegistry::with_builtins();
        let prob = TelescopeProblem::single("one", ShiftWindow::new(0, 0), 0);
        let tmpl = WeightTemplate { factor: Poly::one(), degree: 0 };
        let d = discover_weights(&reg, &prob, &tmpl, 1).unwrap();
        assert_eq!(d.kernel.len(), 1);
        assert!(d.kernel[0].certificate.p.is_zero());
        assert_eq!(d.weighted.len(), 1);
        let s = &d.weighted[0];
        let scale = &s.weights[0];
        assert_eq!(s.certificate.g[0].poly.scale(&(rat(1, 1) / scale)), Poly::var());
    }
}
