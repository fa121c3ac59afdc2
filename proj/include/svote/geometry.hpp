#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace svote {

// A voter's or candidate's position in d-dimensional issue space.
// By convention dimension 0 is the economic axis.
struct IdealPoint {
    std::vector<double> coords;

    IdealPoint() = default;
    IdealPoint(std::initializer_list<double> c) : coords(c) { validate(); }
    explicit IdealPoint(std::vector<double> c) : coords(std::move(c)) { validate(); }

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t j) const { return coords[j]; }
    double& operator[](std::size_t j) { return coords[j]; }
    std::span<const double> span() const { return coords; }
    bool operator==(const IdealPoint&) const = default;

    void validate() const {
        if (coords.empty()) throw std::invalid_argument("IdealPoint: dimension must be >= 1");
        for (const double c : coords)
            if (!std::isfinite(c)) throw std::invalid_argument("IdealPoint: coordinates must be finite");
    }
};

enum class MetricKind { SquaredEuclidean, AbsoluteValue };

// Distance metric with per-dimension weights (all 1 unless set).
struct Metric {
    MetricKind kind = MetricKind::SquaredEuclidean;
    std::vector<double> weights;

    static Metric squared_euclidean(std::size_t d) {
        return weighted(MetricKind::SquaredEuclidean, std::vector<double>(d, 1.0));
    }
    static Metric absolute_value(std::size_t d) {
        return weighted(MetricKind::AbsoluteValue, std::vector<double>(d, 1.0));
    }
    static Metric weighted(MetricKind k, std::vector<double> w) {
        if (w.empty()) throw std::invalid_argument("Metric: dimension must be >= 1");
        for (const double x : w)
            if (!(x > 0.0) || !std::isfinite(x))
                throw std::invalid_argument("Metric: weights must be positive and finite");
        Metric m;
        m.kind = k;
        m.weights = std::move(w);
        return m;
    }

    std::size_t dim() const { return weights.size(); }
};

// Additive non-spatial utility term; positive favors the Democrats.
struct Valence {
    double shift = 0.0;

    Valence() = default;
    explicit Valence(double s) : shift(s) {
        if (!std::isfinite(s)) throw std::invalid_argument("Valence: shift must be finite");
    }
};

enum class Preference { Democrat, Republican, Split };

// Behavior at an exact utility tie. Split counts half a vote for each party.
enum class TieRule { Split, Democrat, Republican };

inline double distance(std::span<const double> a, std::span<const double> b, const Metric& m) {
    if (a.size() != b.size() || a.size() != m.weights.size())
        throw std::invalid_argument("distance: dimension mismatch");
    double acc = 0.0;
    if (m.kind == MetricKind::SquaredEuclidean) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double dx = a[j] - b[j];
            acc += m.weights[j] * dx * dx;
        }
    } else {
        for (std::size_t j = 0; j < a.size(); ++j)
            acc += m.weights[j] * std::abs(a[j] - b[j]);
    }
    return acc;
}

inline double distance(const IdealPoint& a, const IdealPoint& b, const Metric& m) {
    return distance(a.span(), b.span(), m);
}

// Utility of D minus utility of R for this voter; positive prefers D.
inline double relative_utility(std::span<const double> voter, std::span<const double> d_pos,
                               std::span<const double> r_pos, const Metric& m, const Valence& v) {
    return distance(voter, r_pos, m) - distance(voter, d_pos, m) + v.shift;
}

inline double relative_utility(const IdealPoint& voter, const IdealPoint& d_pos,
                               const IdealPoint& r_pos, const Metric& m, const Valence& v) {
    return relative_utility(voter.span(), d_pos.span(), r_pos.span(), m, v);
}

inline Preference preferred_party(std::span<const double> voter, std::span<const double> d_pos,
                                  std::span<const double> r_pos, const Metric& m, const Valence& v,
                                  TieRule tie = TieRule::Split) {
    const double u = relative_utility(voter, d_pos, r_pos, m, v);
    if (u > 0.0) return Preference::Democrat;
    if (u < 0.0) return Preference::Republican;
    switch (tie) {
        case TieRule::Democrat: return Preference::Democrat;
        case TieRule::Republican: return Preference::Republican;
        default: return Preference::Split;
    }
}

inline Preference preferred_party(const IdealPoint& voter, const IdealPoint& d_pos,
                                  const IdealPoint& r_pos, const Metric& m, const Valence& v,
                                  TieRule tie = TieRule::Split) {
    return preferred_party(voter.span(), d_pos.span(), r_pos.span(), m, v, tie);
}

}  // namespace svote
