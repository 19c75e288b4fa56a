use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    canonicalize_1d, canonicalize_2d, class_template, representative_1d, representative_2d, CanonicalForm, ClassParams,
    Subalgebra,
};
use crate::liealg::{adjoint_matrix, AlgebraElement, Generator};

/// Parameters must come back within this tolerance.
pub const PARAM_TOL: f64 = 1e-8;
/// Replayed witnesses must land within this relative distance.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class_id: u8,
    pub representative: String,
    pub trials: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSystemReport {
    pub dim: usize,
    pub classes: Vec<ClassReport>,
    pub idempotent: usize,
    pub total_classes: usize,
    pub collisions: usize,
    pub max_witness_error: f64,
}

impl OptimalSystemReport {
    pub fn passed(&self) -> bool {
        self.idempotent == self.total_classes
            && self.collisions == 0
            && self.classes.iter().all(|c| c.failures.is_empty())
    }
}

/// Sample parameter values for every class, covering each normalization
/// branch.
pub fn sample_params(dim: usize) -> Vec<(u8, Vec<ClassParams>)> {
    let a = ClassParams::a;
    let c = ClassParams::c;
    let none = ClassParams::none;
    if dim == 1 {
        vec![
            (1, vec![a(1.0), a(-0.7)]),
            (2, vec![a(0.0), a(1.3)]),
            (3, vec![a(0.5).with_sign(1), a(-2.0).with_sign(-1), a(0.0).with_sign(1)]),
            (4, vec![c(-1), c(0), c(1)]),
            (5, vec![a(0.8).with_c(1), a(0.0).with_c(-1), a(1.0).with_c(0), a(0.0).with_c(0), a(2.5).with_c(-1)]),
            (6, vec![c(0), c(1)]),
            (7, vec![none()]),
        ]
    } else {
        vec![
            (1, vec![none()]),
            (2, vec![a(1.0), a(-0.4)]),
            (3, vec![a(0.0), a(1.5)]),
            (4, vec![a(0.0), a(0.7)]),
            (5, vec![a(2.0), a(-1.0)]),
            (6, vec![a(0.0), a(0.3)]),
            (
                7,
                vec![
                    c(1).with_b(0.6),
                    c(-1).with_b(-2.0),
                    c(0).with_b(1.0),
                    c(0).with_b(-1.0),
                    c(0).with_b(0.0),
                    c(1).with_b(0.0),
                ],
            ),
            (8, vec![c(-1), c(0), c(1)]),
            (
                9,
                vec![
                    a(0.5).with_b(0.7).with_c(1),
                    a(1.0).with_b(0.0).with_c(-1),
                    a(0.3).with_b(1.0).with_c(0),
                    a(-0.4).with_b(1.0).with_c(0),
                    a(1.0).with_b(0.0).with_c(0),
                    a(0.0).with_b(0.0).with_c(0),
                    a(-2.0).with_b(0.5).with_c(1),
                ],
            ),
            (10, vec![a(0.0), a(1.0)]),
            (11, vec![c(0).with_b(0.0), c(1).with_b(0.0)]),
            (12, vec![none()]),
        ]
    }
}

/// `Ad(g)` for `g` a product of up to four random basis flows with ε ∈ [−2, 2].
pub fn random_adjoint(rng: &mut impl Rng) -> [[f64; 6]; 6] {
    let n = rng.random_range(1..=4);
    let mut m = [[0.0; 6]; 6];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..n {
        let g = Generator::ALL[rng.random_range(0..6)];
        let step = adjoint_matrix(&AlgebraElement::basis(g), rng.random_range(-2.0..2.0));
        m = std::array::from_fn(|i| std::array::from_fn(|j| (0..6).map(|k| step[i][k] * m[k][j]).sum()));
    }
    m
}

/// Random conjugate of a subalgebra, including a rescaling (dim 1) or a
/// random nonsingular recombination (dim 2).
pub fn random_conjugate(gens: &[AlgebraElement], rng: &mut impl Rng) -> Vec<AlgebraElement> {
    let m = random_adjoint(rng);
    let moved: Vec<AlgebraElement> = gens.iter().map(|g| g.transformed(&m)).collect();
    if moved.len() == 1 {
        let s = rng.random_range(0.3..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        return vec![moved[0].scale(s)];
    }
    loop {
        let k: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        if (k[0] * k[3] - k[1] * k[2]).abs() > 0.3 {
            return vec![
                moved[0].scale(k[0]).plus(&moved[1].scale(k[1])),
                moved[0].scale(k[2]).plus(&moved[1].scale(k[3])),
            ];
        }
    }
}

fn canonicalize(gens: &[AlgebraElement]) -> Result<CanonicalForm, super::ClassifyError> {
    match gens {
        [v] => canonicalize_1d(v),
        _ => canonicalize_2d(&Subalgebra { generators: gens.to_vec() }),
    }
}

fn representative(dim: usize, class_id: u8, p: &ClassParams) -> Vec<AlgebraElement> {
    if dim == 1 {
        vec![representative_1d(class_id, p).expect("listed class")]
    } else {
        representative_2d(class_id, p).expect("listed class").to_vec()
    }
}

fn check(
    input: &[AlgebraElement],
    class_id: u8,
    p: &ClassParams,
    max_witness: &mut f64,
) -> Result<CanonicalForm, String> {
    let cf = canonicalize(input).map_err(|e| format!("{e}"))?;
    if cf.class_id != class_id || !cf.params.approx_eq(p, PARAM_TOL) {
        return Err(format!("expected class {class_id} {p:?}, got class {} {:?}", cf.class_id, cf.params));
    }
    let err = cf.witness_error(input);
    *max_witness = max_witness.max(err);
    if err > WITNESS_TOL {
        return Err(format!("witness replay off by {err:e}"));
    }
    Ok(cf)
}

/// Idempotence of every listed representative, recovery from `trials`
/// random conjugates per sample, and absence of cross-class collisions.
pub fn verify_optimal_system(dim: usize, trials: usize, seed: u64) -> OptimalSystemReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes = Vec::new();
    let mut idempotent = 0;
    let mut max_witness = 0.0f64;
    let mut forms: Vec<(u8, ClassParams, CanonicalForm)> = Vec::new();
    let samples = sample_params(dim);
    for (class_id, params) in &samples {
        let mut failures = Vec::new();
        let mut all_fixed = true;
        let mut count = 0;
        for p in params {
            let rep = representative(dim, *class_id, p);
            match check(&rep, *class_id, p, &mut max_witness) {
                Ok(cf) => {
                    let drift = cf.representative.iter().zip(&rep).map(|(a, b)| a.minus(b).max_abs()).fold(0.0, f64::max);
                    if drift > WITNESS_TOL {
                        all_fixed = false;
                        failures.push(format!("representative {p:?} moved by {drift:e}"));
                    }
                    forms.push((*class_id, *p, cf));
                }
                Err(e) => {
                    all_fixed = false;
                    failures.push(format!("idempotence {p:?}: {e}"));
                }
            }
            for _ in 0..trials {
                let conj = random_conjugate(&rep, &mut rng);
                count += 1;
                if let Err(e) = check(&conj, *class_id, p, &mut max_witness) {
                    failures.push(format!("conjugate of {p:?}: {e}"));
                }
            }
        }
        if all_fixed {
            idempotent += 1;
        }
        let template = class_template(dim, *class_id).unwrap_or("?");
        classes.push(ClassReport { class_id: *class_id, representative: template.to_string(), trials: count, failures });
    }
    let mut collisions = 0;
    for i in 0..forms.len() {
        for j in (i + 1)..forms.len() {
            let same_input = forms[i].0 == forms[j].0 && forms[i].1.approx_eq(&forms[j].1, PARAM_TOL);
            if !same_input && forms[i].2.same_class(&forms[j].2, PARAM_TOL) {
                collisions += 1;
            }
        }
    }
    OptimalSystemReport { dim, total_classes: samples.len(), classes, idempotent, collisions, max_witness_error: max_witness }
}
