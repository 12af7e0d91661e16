//! A small dense two-phase simplex solver.
//!
//! Sized for the oracle layer (a few hundred variables at most). Every
//! variable is non-negative; free variables are split by the caller.
//! Pivoting follows Dantzig's rule and falls back to Bland's rule after a run
//! of degenerate pivots, which rules out cycling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self { coeffs, relation, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.cols]
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, c: usize) {
        let inv = 1.0 / self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row, &pivot_row, c);
            }
        }
        eliminate(obj, &pivot_row, c);
        self.basis[r] = c;
    }

    /// Reduced costs `c_B B^{-1} A − c` and the objective value in the last slot.
    fn price(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = (0..=self.cols).map(|j| if j < self.cols { -cost[j] } else { 0.0 }).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.rows[r]) {
                    *o += cb * v;
                }
            }
        }
        obj
    }

    /// Maximises with the given reduced-cost row over the allowed entering columns.
    fn optimise(&mut self, obj: &mut [f64], allowed: &[bool]) -> Result<()> {
        let mut degenerate = 0usize;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -TOL;
            for j in 0..self.cols {
                if allowed[j] && obj[j] < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = obj[j];
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a > TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - TOL || (ratio <= lratio + TOL && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Err(Error::Unbounded) };
            degenerate = if ratio <= TOL { degenerate + 1 } else { 0 };
            self.pivot(obj, r, c);
        }
        Err(Error::Degenerate("simplex pivot budget exhausted".into()))
    }
}

fn eliminate(row: &mut [f64], pivot_row: &[f64], c: usize) {
    let factor = row[c];
    if factor != 0.0 {
        for (v, p) in row.iter_mut().zip(pivot_row) {
            *v -= factor * p;
        }
        row[c] = 0.0;
    }
}

/// Maximises `objective · x` subject to the constraints and `x ≥ 0`.
pub fn maximize(objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let vars = objective.len();
    if let Some(bad) = constraints.iter().find(|c| c.coeffs.len() != vars) {
        return Err(Error::param("constraints", alloc::format!("row of length {} for {vars} variables", bad.coeffs.len())));
    }
    // Normalise to non-negative right-hand sides.
    let rows: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = vars + slacks + artificials;
    let mut tab = Tableau { rows: Vec::with_capacity(rows.len()), basis: Vec::with_capacity(rows.len()), cols };
    let (mut next_slack, mut next_art) = (vars, vars + slacks);
    for (coeffs, relation, rhs) in rows {
        let mut row = vec![0.0; cols + 1];
        row[..vars].copy_from_slice(&coeffs);
        row[cols] = rhs;
        match relation {
            Relation::Le => {
                row[next_slack] = 1.0;
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }
    let is_art = |j: usize| j >= vars + slacks && j < cols;

    if artificials > 0 {
        let cost: Vec<f64> = (0..cols).map(|j| if is_art(j) { -1.0 } else { 0.0 }).collect();
        let mut obj = tab.price(&cost);
        tab.optimise(&mut obj, &vec![true; cols])?;
        if obj[cols] < -1e-9 {
            return Err(Error::Infeasible);
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..tab.rows.len() {
            if is_art(tab.basis[r]) {
                if let Some(c) = (0..vars + slacks).find(|&j| tab.rows[r][j].abs() > TOL) {
                    tab.pivot(&mut obj, r, c);
                }
            }
        }
    }

    let cost: Vec<f64> = (0..cols).map(|j| if j < vars { objective[j] } else { 0.0 }).collect();
    let mut obj = tab.price(&cost);
    let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
    tab.optimise(&mut obj, &allowed)?;

    let mut x = vec![0.0; vars];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < vars {
            x[b] = tab.rhs(r).max(0.0);
        }
    }
    let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x })
}

/// Minimises `objective · x` subject to the constraints and `x ≥ 0`.
pub fn minimize(objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let negated: Vec<f64> = objective.iter().map(|c| -c).collect();
    let mut sol = maximize(&negated, constraints)?;
    sol.value = -sol.value;
    Ok(sol)
}
