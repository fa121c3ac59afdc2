#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "svote/geometry.hpp"
#include "svote/linalg.hpp"
#include "svote/parallel.hpp"
#include "svote/rng.hpp"
#include "svote/util.hpp"

namespace svote {

// Equicorrelated multivariate normal: unit variances, common pairwise rho.
// For d = 1 the correlation is irrelevant and any value is accepted.
struct CorrelationSpec {
    std::size_t dim = 1;
    double rho = 0.0;

    CorrelationSpec(std::size_t d, double r) : dim(d), rho(r) { validate(); }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("CorrelationSpec: dimension must be >= 1");
        if (dim >= 2) {
            const double lo = -1.0 / static_cast<double>(dim - 1);
            if (!(rho > lo && rho < 1.0))
                throw std::invalid_argument("CorrelationSpec: rho must lie in (" +
                                            format_double(lo) + ", 1) for dim " +
                                            std::to_string(dim));
        }
    }
};

inline Matrix equicorrelation_matrix(const CorrelationSpec& spec) {
    spec.validate();
    Matrix m(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i)
        for (std::size_t j = 0; j < spec.dim; ++j) m(i, j) = (i == j) ? 1.0 : spec.rho;
    return m;
}

// A sampled voter population. Flat row-major storage; immutable after
// construction and safe to share across workers.
class Electorate {
public:
    Electorate(std::size_t dim, std::vector<double> data, std::optional<CorrelationSpec> spec,
               std::uint64_t seed)
        : dim_(dim), data_(std::move(data)), spec_(spec), seed_(seed) {
        if (dim_ < 1) throw std::invalid_argument("Electorate: dimension must be >= 1");
        if (data_.empty() || data_.size() % dim_ != 0)
            throw std::invalid_argument("Electorate: need at least one full voter row");
        if (spec_ && spec_->dim != dim_)
            throw std::invalid_argument("Electorate: spec dimension mismatch");
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return data_.size() / dim_; }
    std::span<const double> voter(std::size_t i) const {
        return std::span<const double>(data_.data() + i * dim_, dim_);
    }
    IdealPoint voter_point(std::size_t i) const {
        const auto v = voter(i);
        return IdealPoint(std::vector<double>(v.begin(), v.end()));
    }
    const std::optional<CorrelationSpec>& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t dim_;
    std::vector<double> data_;
    std::optional<CorrelationSpec> spec_;
    std::uint64_t seed_;
};

// i.i.d. draws from N(0, Sigma(spec)). Voter i depends only on (seed, i), so
// prefixes agree across sample sizes and worker counts.
inline Electorate sample_electorate(const CorrelationSpec& spec, std::size_t n, std::uint64_t seed,
                                    unsigned n_workers = 1) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("sample_electorate: need n >= 1");
    const std::size_t d = spec.dim;
    const Matrix L = cholesky_lower(equicorrelation_matrix(spec));

    std::vector<double> data(n * d);
    parallel_for(n, n_workers, [&](unsigned, std::size_t lo, std::size_t hi) {
        std::vector<double> z(d);
        for (std::size_t i = lo; i < hi; ++i) {
            CounterRng g(substream(seed, {stream::kElectorate, i}));
            for (std::size_t j = 0; j < d; ++j) z[j] = g.next_normal();
            for (std::size_t j = 0; j < d; ++j) {
                double x = 0.0;
                for (std::size_t k = 0; k <= j; ++k) x += L(j, k) * z[k];
                data[i * d + j] = x;
            }
        }
    });
    return Electorate(d, std::move(data), spec, seed);
}

// CSV export: header v0,...,v{d-1}, one voter per row, exact decimals.
inline void write_electorate_csv(std::ostream& os, const Electorate& e) {
    for (std::size_t j = 0; j < e.dim(); ++j) os << (j ? ",v" : "v") << j;
    os << '\n';
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto v = e.voter(i);
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j) os << ',';
            os << format_double(v[j]);
        }
        os << '\n';
    }
}

inline Electorate read_electorate_csv(std::istream& is) {
    std::string line;
    std::size_t d = 0;
    bool header_seen = false;
    std::vector<double> data;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (is_comment_line(line)) continue;
        const auto fields = split(line);
        if (!header_seen) {
            d = fields.size();
            for (std::size_t j = 0; j < d; ++j)
                if (trim(fields[j]) != "v" + std::to_string(j))
                    throw std::invalid_argument("electorate csv: expected header v0,...,v" +
                                                std::to_string(d - 1));
            header_seen = true;
            continue;
        }
        if (fields.size() != d)
            throw std::invalid_argument("electorate csv: wrong field count at line " +
                                        std::to_string(line_no));
        for (const auto f : fields) {
            const auto x = parse_double(f);
            if (!x || !std::isfinite(*x))
                throw std::invalid_argument("electorate csv: bad value at line " +
                                            std::to_string(line_no));
            data.push_back(*x);
        }
    }
    if (!header_seen) throw std::invalid_argument("electorate csv: missing header");
    return Electorate(d, std::move(data), std::nullopt, 0);
}

}  // namespace svote
