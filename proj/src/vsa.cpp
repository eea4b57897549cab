#include "cogsim/vsa.hpp"

#include <cmath>
#include <set>

#include "cogsim/common.hpp"

namespace cogsim::vsa {

namespace {

void require_same_dim(const Hypervector& a, const Hypervector& b, const char* op) {
    if (a.dim() != b.dim()) {
        throw validation_error(std::string(op) + ": dimension mismatch (" +
                               std::to_string(a.dim()) + " vs " +
                               std::to_string(b.dim()) + ")");
    }
}

bool is_bipolar_values(const std::vector<double>& v) {
    for (double x : v) {
        if (x != 1.0 && x != -1.0) return false;
    }
    return true;
}

}  // namespace

Codebook::Codebook(int factor_index, std::size_t num_codes, std::size_t dim,
                   std::vector<double> row_major)
    : factor_index_(factor_index), num_codes_(num_codes), dim_(dim),
      data_(std::move(row_major)) {
    if (num_codes_ == 0 || dim_ == 0) {
        throw validation_error("Codebook: num_codes and dim must be positive");
    }
    if (data_.size() != num_codes_ * dim_) {
        throw validation_error("Codebook: data size does not match num_codes * dim");
    }
    if (!is_bipolar_values(data_)) {
        throw validation_error("Codebook: rows must be bipolar (+1/-1)");
    }
    std::set<std::vector<double>> seen;
    for (std::size_t j = 0; j < num_codes_; ++j) {
        auto r = row(j);
        if (!seen.insert(std::vector<double>(r.begin(), r.end())).second) {
            throw validation_error("Codebook: rows must be pairwise distinct (row " +
                                   std::to_string(j) + " repeats)");
        }
    }
}

Codebook Codebook::random(int factor_index, std::size_t num_codes, std::size_t dim,
                          Xoshiro256ss& rng) {
    std::vector<double> data;
    data.reserve(num_codes * dim);
    std::set<std::vector<double>> seen;
    for (std::size_t j = 0; j < num_codes; ++j) {
        std::vector<double> r(dim);
        do {
            for (auto& x : r) x = rng.bipolar();
        } while (!seen.insert(r).second);
        data.insert(data.end(), r.begin(), r.end());
    }
    return Codebook(factor_index, num_codes, dim, std::move(data));
}

Hypervector Codebook::row_vector(std::size_t j) const {
    auto r = row(j);
    return Hypervector(std::vector<double>(r.begin(), r.end()), VectorTag::bipolar);
}

double dot(const Hypervector& a, const Hypervector& b) {
    require_same_dim(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
    return acc;
}

double cosine(const Hypervector& a, const Hypervector& b) {
    require_same_dim(a, b, "cosine");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return ab / std::sqrt(aa * bb);
}

Hypervector circ_conv(const Hypervector& a, const Hypervector& b) {
    require_same_dim(a, b, "circ_conv");
    const std::size_t d = a.dim();
    Hypervector c(std::vector<double>(d, 0.0), VectorTag::real);
    for (std::size_t n = 0; n < d; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            acc += a[k] * b[(n + d - k) % d];
        }
        c[n] = acc;
    }
    return c;
}

Hypervector circ_corr(const Hypervector& a, const Hypervector& b) {
    require_same_dim(a, b, "circ_corr");
    const std::size_t d = a.dim();
    Hypervector c(std::vector<double>(d, 0.0), VectorTag::real);
    for (std::size_t n = 0; n < d; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            acc += a[k] * b[(n + k) % d];
        }
        c[n] = acc;
    }
    return c;
}

Hypervector reverse_circular(const Hypervector& a) {
    const std::size_t d = a.dim();
    Hypervector r(std::vector<double>(d, 0.0), a.tag);
    if (d == 0) return r;
    r[0] = a[0];
    for (std::size_t i = 1; i < d; ++i) r[i] = a[d - i];
    return r;
}

Hypervector elem_bind(const Hypervector& a, const Hypervector& b) {
    require_same_dim(a, b, "elem_bind");
    Hypervector c(std::vector<double>(a.dim(), 0.0),
                  (a.tag == VectorTag::bipolar && b.tag == VectorTag::bipolar)
                      ? VectorTag::bipolar
                      : VectorTag::real);
    for (std::size_t i = 0; i < a.dim(); ++i) c[i] = a[i] * b[i];
    return c;
}

Hypervector elem_unbind(const Hypervector& q, const std::vector<Hypervector>& others) {
    if (others.empty()) {
        throw validation_error("elem_unbind: empty factor list");
    }
    Hypervector out = q;
    for (const auto& o : others) {
        require_same_dim(q, o, "elem_unbind");
        for (std::size_t i = 0; i < q.dim(); ++i) out[i] *= o[i];
    }
    out.tag = q.tag;
    return out;
}

SimilarityVector similarity(const Hypervector& x, const Codebook& cb) {
    if (x.dim() != cb.dim()) {
        throw validation_error("similarity: dimension mismatch (" +
                               std::to_string(x.dim()) + " vs codebook " +
                               std::to_string(cb.dim()) + ")");
    }
    SimilarityVector alpha;
    alpha.factor_index = cb.factor_index();
    alpha.values.resize(cb.num_codes());
    for (std::size_t j = 0; j < cb.num_codes(); ++j) {
        auto r = cb.row(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < x.dim(); ++i) acc += x[i] * r[i];
        alpha.values[j] = acc;
    }
    return alpha;
}

Hypervector project(const SimilarityVector& alpha, const Codebook& cb) {
    if (alpha.values.size() != cb.num_codes()) {
        throw validation_error("project: similarity length " +
                               std::to_string(alpha.values.size()) +
                               " does not match codebook num_codes " +
                               std::to_string(cb.num_codes()));
    }
    const std::size_t d = cb.dim();
    std::vector<double> acc(d, 0.0);
    for (std::size_t j = 0; j < cb.num_codes(); ++j) {
        auto r = cb.row(j);
        const double w = alpha.values[j];
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < d; ++i) acc[i] += w * r[i];
    }
    Hypervector out(std::move(acc), VectorTag::bipolar);
    for (std::size_t i = 0; i < d; ++i) out[i] = sign_plus(out[i]);
    return out;
}

Hypervector random_bipolar(std::size_t dim, Xoshiro256ss& rng) {
    if (dim == 0) throw validation_error("random_bipolar: dim must be >= 1");
    Hypervector v(std::vector<double>(dim, 0.0), VectorTag::bipolar);
    for (std::size_t i = 0; i < dim; ++i) v[i] = rng.bipolar();
    return v;
}

Hypervector unit_impulse(std::size_t dim) {
    Hypervector v(std::vector<double>(dim, 0.0), VectorTag::real);
    if (dim > 0) v[0] = 1.0;
    return v;
}

}  // namespace cogsim::vsa
