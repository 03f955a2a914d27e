//! Seeded random generators for states, unitaries and channels.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channel::{BlochState, ChannelRep, PauliChannel, Ptm};
use crate::mat::{CMat2, I, PAULI};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn unit_vector<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> [f64; N] {
    loop {
        let v: [f64; N] = std::array::from_fn(|_| normal(rng));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.map(|x| x / norm);
        }
    }
}

/// Uniform unit direction in R^3.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    unit_vector(rng)
}

/// Uniform in the Bloch ball.
pub fn random_bloch_state<R: Rng + ?Sized>(rng: &mut R) -> BlochState {
    let radius = rng.random::<f64>().cbrt();
    let d = random_direction(rng);
    BlochState::new(d.map(|x| x * radius)).expect("inside the ball")
}

/// Uniform on the Bloch sphere.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> BlochState {
    BlochState::new(random_direction(rng)).expect("on the sphere")
}

/// Uniform on the probability simplex.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let w: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
    let sum: f64 = w.iter().sum();
    w.map(|x| x / sum)
}

pub fn random_pauli_channel<R: Rng + ?Sized>(rng: &mut R) -> PauliChannel {
    PauliChannel::new(random_probabilities(rng)).expect("simplex sample")
}

/// Haar-random element of SU(2).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let [w, x, y, z] = unit_vector::<R, 4>(rng);
    PAULI[0].scale(w) - (PAULI[1].scale(x) + PAULI[2].scale(y) + PAULI[3].scale(z)).scale_c(I)
}

/// Uniformly random proper rotation of R^3.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 3]; 3] {
    let [w, x, y, z] = unit_vector::<R, 4>(rng);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Eigenvalues drawn from the Fujiwara-Algoet tetrahedron.
pub fn random_fa_lambda<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    random_pauli_channel(rng).lambda()
}

/// PTM `diag(1, R1 diag(lambda) R2)` with random rotations and random lambda
/// inside the Fujiwara-Algoet set.
pub fn random_unital_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelRep {
    let r1 = random_rotation(rng);
    let r2 = random_rotation(rng);
    let lambda = random_fa_lambda(rng);
    let mut m = [[0.0; 4]; 4];
    m[0][0] = 1.0;
    for i in 0..3 {
        for j in 0..3 {
            m[i + 1][j + 1] = (0..3).map(|k| r1[i][k] * lambda[k] * r2[k][j]).sum();
        }
    }
    ChannelRep::Ptm(Ptm(m))
}
