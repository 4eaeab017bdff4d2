//! Closed forms for the qubit Pauli channel
//! `w_0 σ_0 + w·σ ↦ w_0 σ_0 + (λ_1 w_1, λ_2 w_2, λ_3 w_3)·σ`.

/// Weights `μ_0..μ_3` of `A ↦ Σ_i μ_i σ_i A σ_i`.
pub fn qubit_mu(l: [f64; 3]) -> [f64; 4] {
    let [l1, l2, l3] = l;
    [
        0.25 * (1.0 + l1 + l2 + l3),
        0.25 * (1.0 + l1 - l2 - l3),
        0.25 * (1.0 - l1 + l2 - l3),
        0.25 * (1.0 - l1 - l2 + l3),
    ]
}

/// Inverse of [`qubit_mu`] on trace-preserving weights (`Σ μ = 1`):
/// `λ_k = μ_0 + μ_k − (the other two)`.
pub fn qubit_lambda(mu: [f64; 4]) -> [f64; 3] {
    let [m0, m1, m2, m3] = mu;
    [m0 + m1 - m2 - m3, m0 + m2 - m1 - m3, m0 + m3 - m1 - m2]
}

/// Smallest slack of `1 ± λ_3 ≥ |λ_1 ± λ_2|`; nonnegative iff CP.
pub fn qubit_condition_margin(l: [f64; 3]) -> f64 {
    let [l1, l2, l3] = l;
    let plus = 1.0 + l3 - (l1 + l2).abs();
    let minus = 1.0 - l3 - (l1 - l2).abs();
    plus.min(minus)
}

/// Complete positivity of the qubit channel: the tetrahedron with vertices
/// `(1,1,1), (1,−1,−1), (−1,1,−1), (−1,−1,1)`.
pub fn cp_condition_qubit(l: [f64; 3]) -> bool {
    let [l1, l2, l3] = l;
    1.0 + l3 >= (l1 + l2).abs() && 1.0 - l3 >= (l1 - l2).abs()
}
