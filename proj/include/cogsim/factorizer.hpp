#pragma once

// Iterative resonator that decomposes a bound query vector into per-factor
// codebook indices. Works entirely in the factored space: peak working
// storage is O(sum_f Mc_f * d); the Mc^F product codebook is never built.
//
// Loop per iteration, per factor i:
//   unbind   x~i = q (*) prod_{f != i} x^f        (element-wise, bipolar)
//   search   a_i = x~i . X_i  (+ gaussian noise)
//   project  x^i = sign(a_i . X_i^T (+ gaussian noise)), sign(0) -> +1
// Estimates start from the superposition of all candidates,
// x^f(0) = sign(column sums of X_f).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogsim/precision.hpp"
#include "cogsim/vsa.hpp"

namespace cogsim::factorizer {

struct FactorizerParams {
    std::uint64_t max_iters = 200;
    // Fixed noise levels; used when auto_calibrate is false. Zero disables.
    double noise_std_similarity = 0.0;
    double noise_std_projection = 0.0;
    // When true, noise levels come from the calibration formulas
    //   sigma_sim  = 0.05 * noise_scale * sqrt(d * Mc)
    //   sigma_proj = 0.05 * noise_scale * sqrt(sum_j a_j^2 / Mc)   (per iteration)
    bool auto_calibrate = false;
    double noise_scale = 1.0;
    std::uint64_t convergence_window = 2;
    std::uint64_t rng_seed = 1;
    bool record_trajectory = false;
    // int8/fp8 runs round-trip query and codebooks through the quantizer.
    quant::QuantMode precision = quant::QuantMode::fp32;
};

struct FactorizerResult {
    std::vector<std::size_t> indices;
    std::uint64_t iterations_used = 0;
    bool converged = false;
    // trajectory[t][f] = max noise-free similarity of factor f at iteration t.
    std::vector<std::vector<double>> trajectory;
};

// Element-wise product of the selected codevectors with floor(flip * d)
// uniformly chosen positions sign-flipped. Ground-truth query synthesis.
vsa::Hypervector synth_query(const std::vector<vsa::Codebook>& codebooks,
                             const std::vector<std::size_t>& indices,
                             double noise_flip_fraction, Xoshiro256ss& rng);

FactorizerResult factorize(const vsa::Hypervector& q,
                           const std::vector<vsa::Codebook>& codebooks,
                           const FactorizerParams& params);

// Analytical peak working set of factorize() in elements, for the memory
// contract checks: codebooks + estimates + unbound scratch + similarities.
std::uint64_t working_set_elems(const std::vector<vsa::Codebook>& codebooks);

struct TrialRecord {
    std::uint64_t trial = 0;
    bool success = false;
    std::uint64_t iterations = 0;
    bool converged = false;
};

struct AccuracyReport {
    std::uint64_t trials = 0;
    double accuracy = 0.0;        // all-factors-correct rate
    double convergence_rate = 0.0;
    double mean_iterations = 0.0;
    double p50_iterations = 0.0;
    double p90_iterations = 0.0;
    std::vector<TrialRecord> records;

    std::string to_csv() const;    // columns: trial,success,iterations,converged
    std::string to_json() const;   // summary without per-trial records
};

// Runs synth_query + factorize `trials` times against the given codebooks
// with fresh ground-truth indices per trial. Trial seeds derive from
// base_seed + trial index, so parallel and serial runs agree.
AccuracyReport accuracy_eval(const std::vector<vsa::Codebook>& codebooks,
                             std::uint64_t trials, double flip_fraction,
                             const FactorizerParams& params,
                             std::uint64_t base_seed, unsigned jobs = 1);

struct NoiseComparison {
    std::uint64_t pairs = 0;
    double mean_iters_noisy = 0.0;
    double mean_iters_clean = 0.0;
    std::uint64_t wins_noisy = 0;  // strictly fewer iterations with noise
    std::uint64_t wins_clean = 0;
    std::uint64_t ties = 0;
    double sign_test_p = 1.0;      // one-sided, ties dropped
    double accuracy_noisy = 0.0;
    double accuracy_clean = 0.0;
};

// Paired comparison of calibrated noise vs zero noise on identical
// per-trial codebooks, queries and ground truth. Fresh codebooks per pair.
NoiseComparison compare_noise_iterations(std::size_t factors, std::size_t codes,
                                         std::size_t dim, std::uint64_t pairs,
                                         double flip_fraction,
                                         const FactorizerParams& noisy_params,
                                         std::uint64_t base_seed);

// One-sided exact sign test: P[Binomial(n, 1/2) >= wins].
double sign_test_one_sided(std::uint64_t wins, std::uint64_t n);

}  // namespace cogsim::factorizer
