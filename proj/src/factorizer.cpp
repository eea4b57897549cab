#include "cogsim/factorizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "cogsim/common.hpp"

namespace cogsim::factorizer {

namespace {

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(
        std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

// Noise-free similarity argmax of each current estimate; used both for the
// convergence check bootstrap and for final index extraction.
std::vector<std::size_t> estimate_argmaxes(const std::vector<vsa::Hypervector>& est,
                                           const std::vector<vsa::Codebook>& cbs) {
    std::vector<std::size_t> out(cbs.size());
    for (std::size_t f = 0; f < cbs.size(); ++f) {
        out[f] = argmax(vsa::similarity(est[f], cbs[f]).values);
    }
    return out;
}

vsa::Hypervector maybe_quantize(const vsa::Hypervector& v, quant::QuantMode mode) {
    if (mode == quant::QuantMode::fp32) return v;
    quant::QuantScheme scheme{mode, 1.0};
    return quant::quant_roundtrip(v, scheme);
}

double percentile(std::vector<double> sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

vsa::Hypervector synth_query(const std::vector<vsa::Codebook>& codebooks,
                             const std::vector<std::size_t>& indices,
                             double noise_flip_fraction, Xoshiro256ss& rng) {
    if (codebooks.empty()) throw validation_error("synth_query: no codebooks");
    if (indices.size() != codebooks.size()) {
        throw validation_error("synth_query: one index per codebook required");
    }
    if (noise_flip_fraction < 0.0 || noise_flip_fraction >= 0.5) {
        throw validation_error("synth_query: flip fraction must be in [0, 0.5)");
    }
    const std::size_t d = codebooks.front().dim();
    for (std::size_t f = 0; f < codebooks.size(); ++f) {
        if (codebooks[f].dim() != d) {
            throw validation_error("synth_query: codebook dimension mismatch");
        }
        if (indices[f] >= codebooks[f].num_codes()) {
            throw validation_error("synth_query: index " + std::to_string(indices[f]) +
                                   " out of range for factor " + std::to_string(f));
        }
    }
    vsa::Hypervector q = codebooks[0].row_vector(indices[0]);
    for (std::size_t f = 1; f < codebooks.size(); ++f) {
        q = vsa::elem_bind(q, codebooks[f].row_vector(indices[f]));
    }
    const auto flips = static_cast<std::size_t>(noise_flip_fraction *
                                                static_cast<double>(d));
    // Choose `flips` distinct positions via partial Fisher-Yates.
    std::vector<std::size_t> pos(d);
    std::iota(pos.begin(), pos.end(), 0);
    for (std::size_t i = 0; i < flips; ++i) {
        const std::size_t j = i + rng.uniform_index(d - i);
        std::swap(pos[i], pos[j]);
        q[pos[i]] = -q[pos[i]];
    }
    return q;
}

FactorizerResult factorize(const vsa::Hypervector& q,
                           const std::vector<vsa::Codebook>& codebooks,
                           const FactorizerParams& params) {
    if (codebooks.empty()) throw validation_error("factorize: empty codebook list");
    if (params.max_iters < 1 || params.convergence_window < 1) {
        throw validation_error("factorize: max_iters and convergence_window must be >= 1");
    }
    const std::size_t num_factors = codebooks.size();
    const std::size_t d = q.dim();
    for (const auto& cb : codebooks) {
        if (cb.dim() != d) {
            throw validation_error("factorize: query dim " + std::to_string(d) +
                                   " does not match codebook dim " +
                                   std::to_string(cb.dim()));
        }
    }

    const vsa::Hypervector query = maybe_quantize(q, params.precision);
    std::vector<vsa::Codebook> quantized;
    const std::vector<vsa::Codebook>* cbs = &codebooks;
    if (params.precision != quant::QuantMode::fp32) {
        quantized.reserve(num_factors);
        for (const auto& cb : codebooks) {
            vsa::Hypervector flat(cb.data());
            quantized.emplace_back(cb.factor_index(), cb.num_codes(), cb.dim(),
                                   maybe_quantize(flat, params.precision).elems);
        }
        cbs = &quantized;
    }

    Xoshiro256ss noise_rng(params.rng_seed);
    const bool noisy = params.auto_calibrate ||
                       params.noise_std_similarity > 0.0 ||
                       params.noise_std_projection > 0.0;

    // Superposition start: sign of the codebook column sums.
    std::vector<vsa::Hypervector> est;
    est.reserve(num_factors);
    for (const auto& cb : *cbs) {
        vsa::SimilarityVector ones;
        ones.factor_index = cb.factor_index();
        ones.values.assign(cb.num_codes(), 1.0);
        est.push_back(vsa::project(ones, cb));
    }

    FactorizerResult result;

    // Synchronous sweep: every unbinding at iteration t reads the estimates
    // produced by iteration t-1, matching the t -> t+1 update equations.
    std::vector<vsa::Hypervector> prev = est;
    auto unbind_factor = [&](std::size_t i) {
        if (num_factors == 1) return query;
        std::vector<vsa::Hypervector> others;
        others.reserve(num_factors - 1);
        for (std::size_t f = 0; f < num_factors; ++f) {
            if (f != i) others.push_back(prev[f]);
        }
        return vsa::elem_unbind(query, others);
    };

    // Convergence rule: the noise-free similarity argmax vector must be
    // unchanged for `convergence_window` consecutive iterations. A
    // single-factor problem always unbinds to the query itself, so its
    // argmax sequence is constant from the first evaluation and the loop
    // halts after one iteration.
    std::vector<std::size_t> last_eval;
    std::uint64_t stable_evals = 0;
    auto push_eval = [&](const std::vector<std::size_t>& eval) {
        if (!last_eval.empty() && eval == last_eval) {
            ++stable_evals;
        } else {
            stable_evals = 1;
            last_eval = eval;
        }
    };

    for (std::uint64_t iter = 1; iter <= params.max_iters; ++iter) {
        std::vector<std::size_t> argmaxes(num_factors);
        std::vector<double> max_sims(num_factors);

        for (std::size_t i = 0; i < num_factors; ++i) {
            // Step 1: unbind every other factor's latest estimate.
            const vsa::Hypervector unbound = unbind_factor(i);

            // Step 2: similarity search.
            vsa::SimilarityVector alpha = vsa::similarity(unbound, (*cbs)[i]);
            argmaxes[i] = argmax(alpha.values);
            max_sims[i] = alpha.values[argmaxes[i]];

            if (noisy) {
                double sigma_sim = params.noise_std_similarity;
                if (params.auto_calibrate) {
                    sigma_sim = 0.05 * params.noise_scale *
                                std::sqrt(static_cast<double>(d) *
                                          static_cast<double>((*cbs)[i].num_codes()));
                }
                if (sigma_sim > 0.0) {
                    for (auto& a : alpha.values) a += noise_rng.gaussian(0.0, sigma_sim);
                }
            }

            // Step 3: weighted projection back onto the codebook span.
            double sigma_proj = params.noise_std_projection;
            if (params.auto_calibrate) {
                double sum_sq = 0.0;
                for (double a : alpha.values) sum_sq += a * a;
                sigma_proj = 0.05 * params.noise_scale *
                             std::sqrt(sum_sq /
                                       static_cast<double>((*cbs)[i].num_codes()));
            }
            if (noisy && sigma_proj > 0.0) {
                const auto& cb = (*cbs)[i];
                std::vector<double> acc(d, 0.0);
                for (std::size_t j = 0; j < cb.num_codes(); ++j) {
                    auto row = cb.row(j);
                    const double w = alpha.values[j];
                    for (std::size_t n = 0; n < d; ++n) acc[n] += w * row[n];
                }
                vsa::Hypervector next(std::move(acc), vsa::VectorTag::bipolar);
                for (std::size_t n = 0; n < d; ++n) {
                    next[n] = vsa::sign_plus(next[n] + noise_rng.gaussian(0.0, sigma_proj));
                }
                est[i] = std::move(next);
            } else {
                est[i] = vsa::project(alpha, (*cbs)[i]);
            }
        }

        prev = est;
        if (params.record_trajectory) result.trajectory.push_back(max_sims);
        result.iterations_used = iter;

        push_eval(argmaxes);
        if (num_factors == 1 || stable_evals >= params.convergence_window) {
            result.converged = true;
            break;
        }
    }

    result.indices = estimate_argmaxes(est, *cbs);
    return result;
}

std::uint64_t working_set_elems(const std::vector<vsa::Codebook>& codebooks) {
    std::uint64_t total = 0;
    std::uint64_t d = 0;
    for (const auto& cb : codebooks) {
        total += cb.num_codes() * cb.dim();  // codebook rows
        total += cb.num_codes();             // similarity vector
        d = std::max<std::uint64_t>(d, cb.dim());
    }
    // query + per-factor estimate + unbound scratch + projection accumulator
    total += d * (codebooks.size() + 3);
    return total;
}

std::string AccuracyReport::to_csv() const {
    std::ostringstream os;
    os << "trial,success,iterations,converged\n";
    for (const auto& r : records) {
        os << r.trial << ',' << (r.success ? 1 : 0) << ',' << r.iterations << ','
           << (r.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string AccuracyReport::to_json() const {
    std::ostringstream os;
    os << "{\"trials\":" << trials << ",\"accuracy\":" << accuracy
       << ",\"convergence_rate\":" << convergence_rate
       << ",\"mean_iterations\":" << mean_iterations
       << ",\"p50_iterations\":" << p50_iterations
       << ",\"p90_iterations\":" << p90_iterations << "}";
    return os.str();
}

AccuracyReport accuracy_eval(const std::vector<vsa::Codebook>& codebooks,
                             std::uint64_t trials, double flip_fraction,
                             const FactorizerParams& params,
                             std::uint64_t base_seed, unsigned jobs) {
    if (trials < 1) throw validation_error("accuracy_eval: trials must be >= 1");
    AccuracyReport report;
    report.trials = trials;
    report.records.resize(trials);

    auto run_trial = [&](std::uint64_t t) {
        Xoshiro256ss data_rng(derive_seed(base_seed, t));
        std::vector<std::size_t> truth(codebooks.size());
        for (std::size_t f = 0; f < codebooks.size(); ++f) {
            truth[f] = data_rng.uniform_index(codebooks[f].num_codes());
        }
        const vsa::Hypervector q =
            synth_query(codebooks, truth, flip_fraction, data_rng);
        FactorizerParams p = params;
        p.rng_seed = derive_seed(base_seed ^ 0xabcdef123456ULL, t);
        const FactorizerResult res = factorize(q, codebooks, p);
        TrialRecord rec;
        rec.trial = t;
        rec.success = res.indices == truth;
        rec.iterations = res.iterations_used;
        rec.converged = res.converged;
        report.records[t] = rec;
    };

    if (jobs <= 1) {
        for (std::uint64_t t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint64_t> next{0};
        for (unsigned w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t t = next.fetch_add(1); t < trials;
                     t = next.fetch_add(1)) {
                    run_trial(t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::uint64_t successes = 0, converged = 0;
    std::vector<double> iters;
    iters.reserve(trials);
    for (const auto& r : report.records) {
        successes += r.success ? 1 : 0;
        converged += r.converged ? 1 : 0;
        iters.push_back(static_cast<double>(r.iterations));
    }
    report.accuracy = static_cast<double>(successes) / static_cast<double>(trials);
    report.convergence_rate =
        static_cast<double>(converged) / static_cast<double>(trials);
    report.mean_iterations =
        std::accumulate(iters.begin(), iters.end(), 0.0) / static_cast<double>(trials);
    std::sort(iters.begin(), iters.end());
    report.p50_iterations = percentile(iters, 0.5);
    report.p90_iterations = percentile(iters, 0.9);
    return report;
}

double sign_test_one_sided(std::uint64_t wins, std::uint64_t n) {
    if (n == 0) return 1.0;
    // P[Bin(n, 1/2) >= wins] computed in log space.
    double p = 0.0;
    for (std::uint64_t k = wins; k <= n; ++k) {
        const double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                                std::lgamma(static_cast<double>(k) + 1.0) -
                                std::lgamma(static_cast<double>(n - k) + 1.0) -
                                static_cast<double>(n) * std::log(2.0);
        p += std::exp(log_term);
    }
    return std::min(p, 1.0);
}

NoiseComparison compare_noise_iterations(std::size_t factors, std::size_t codes,
                                         std::size_t dim, std::uint64_t pairs,
                                         double flip_fraction,
                                         const FactorizerParams& noisy_params,
                                         std::uint64_t base_seed) {
    NoiseComparison cmp;
    cmp.pairs = pairs;
    double sum_noisy = 0.0, sum_clean = 0.0;
    std::uint64_t ok_noisy = 0, ok_clean = 0;

    FactorizerParams clean_params = noisy_params;
    clean_params.auto_calibrate = false;
    clean_params.noise_std_similarity = 0.0;
    clean_params.noise_std_projection = 0.0;

    for (std::uint64_t t = 0; t < pairs; ++t) {
        Xoshiro256ss data_rng(derive_seed(base_seed, t));
        std::vector<vsa::Codebook> cbs;
        cbs.reserve(factors);
        for (std::size_t f = 0; f < factors; ++f) {
            cbs.push_back(vsa::Codebook::random(static_cast<int>(f) + 1, codes, dim,
                                                data_rng));
        }
        std::vector<std::size_t> truth(factors);
        for (auto& idx : truth) idx = data_rng.uniform_index(codes);
        const vsa::Hypervector q = synth_query(cbs, truth, flip_fraction, data_rng);

        FactorizerParams noisy = noisy_params;
        noisy.rng_seed = derive_seed(base_seed ^ 0x5eedULL, t);
        const FactorizerResult rn = factorize(q, cbs, noisy);
        const FactorizerResult rc = factorize(q, cbs, clean_params);

        sum_noisy += static_cast<double>(rn.iterations_used);
        sum_clean += static_cast<double>(rc.iterations_used);
        ok_noisy += (rn.indices == truth) ? 1 : 0;
        ok_clean += (rc.indices == truth) ? 1 : 0;
        if (rn.iterations_used < rc.iterations_used) {
            ++cmp.wins_noisy;
        } else if (rn.iterations_used > rc.iterations_used) {
            ++cmp.wins_clean;
        } else {
            ++cmp.ties;
        }
    }
    cmp.mean_iters_noisy = sum_noisy / static_cast<double>(pairs);
    cmp.mean_iters_clean = sum_clean / static_cast<double>(pairs);
    cmp.accuracy_noisy = static_cast<double>(ok_noisy) / static_cast<double>(pairs);
    cmp.accuracy_clean = static_cast<double>(ok_clean) / static_cast<double>(pairs);
    cmp.sign_test_p = sign_test_one_sided(cmp.wins_noisy, cmp.wins_noisy + cmp.wins_clean);
    return cmp;
}

}  // namespace cogsim::factorizer
