#pragma once

// Functional reference for the vector-symbolic operations: circular
// convolution/correlation, element-wise binding/unbinding, codebook
// similarity and projection. Every simulated compute path in the array
// model is checked against these direct-formula implementations.
//
// Elements are stored as double regardless of the precision mode in play.
// A double holds every int32 exactly, so integer-valued inputs (bipolar or
// int8) produce bit-exact integer results up to d = 2^16 with 8-bit
// operands (|partial| <= d * 127^2 < 2^31 << 2^53).

#include <cstdint>
#include <span>
#include <vector>

#include "cogsim/rng.hpp"

namespace cogsim::vsa {

enum class VectorTag { bipolar, real, quantized };

struct Hypervector {
    std::vector<double> elems;
    VectorTag tag = VectorTag::real;

    Hypervector() = default;
    explicit Hypervector(std::vector<double> values, VectorTag t = VectorTag::real)
        : elems(std::move(values)), tag(t) {}

    std::size_t dim() const { return elems.size(); }
    double operator[](std::size_t i) const { return elems[i]; }
    double& operator[](std::size_t i) { return elems[i]; }

    bool operator==(const Hypervector& other) const { return elems == other.elems; }
};

// Per-factor search space: num_codes bipolar codevectors of dimension dim,
// stored row-major.
class Codebook {
public:
    Codebook() = default;
    // Rows must be bipolar and pairwise distinct.
    Codebook(int factor_index, std::size_t num_codes, std::size_t dim,
             std::vector<double> row_major);

    static Codebook random(int factor_index, std::size_t num_codes, std::size_t dim,
                           Xoshiro256ss& rng);

    int factor_index() const { return factor_index_; }
    std::size_t num_codes() const { return num_codes_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> row(std::size_t j) const {
        return {data_.data() + j * dim_, dim_};
    }
    Hypervector row_vector(std::size_t j) const;
    const std::vector<double>& data() const { return data_; }

private:
    int factor_index_ = 0;
    std::size_t num_codes_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

struct SimilarityVector {
    int factor_index = 0;
    std::vector<double> values;
};

// sign with the documented tie-break: sign(0) -> +1.
inline double sign_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

double dot(const Hypervector& a, const Hypervector& b);
double cosine(const Hypervector& a, const Hypervector& b);

// C[n] = sum_k A[k] * B[(n - k) mod d], the direct O(d^2) formula.
Hypervector circ_conv(const Hypervector& a, const Hypervector& b);

// C[n] = sum_k A[k] * B[(n + k) mod d]; equals
// circ_conv(reverse_circular(a), b).
Hypervector circ_corr(const Hypervector& a, const Hypervector& b);

// Keeps index 0 fixed and reverses indices 1..d-1.
Hypervector reverse_circular(const Hypervector& a);

// Element-wise product. Binding of bipolar inputs is bipolar.
Hypervector elem_bind(const Hypervector& a, const Hypervector& b);

// Removes the contribution of `others` from q by element-wise
// multiplication; exact inverse of elem_bind for bipolar vectors.
Hypervector elem_unbind(const Hypervector& q, const std::vector<Hypervector>& others);

// values[j] = dot(x, codebook row j).
SimilarityVector similarity(const Hypervector& x, const Codebook& cb);

// sign(sum_j alpha[j] * row_j); sign(0) -> +1.
Hypervector project(const SimilarityVector& alpha, const Codebook& cb);

// i.i.d. uniform {-1, +1}; deterministic for a fixed rng state.
Hypervector random_bipolar(std::size_t dim, Xoshiro256ss& rng);

Hypervector unit_impulse(std::size_t dim);

}  // namespace cogsim::vsa
