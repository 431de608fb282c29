#pragma once

#include <vector>

namespace gaussmiss {

/// One odd-frequency term a*cos(k*theta) + b*sin(k*theta).
struct HarmonicTerm {
    int k = 1;
    double a = 0.0;
    double b = 0.0;
};

/// Height function z(theta) built only from odd frequencies, so that
/// z(theta + pi) == -z(theta) holds term by term.
class OddHarmonicSeries {
  public:
    OddHarmonicSeries() = default;

    /// Throws std::invalid_argument if any k is even or non-positive.
    explicit OddHarmonicSeries(std::vector<HarmonicTerm> terms);

    static OddHarmonicSeries zero() { return {}; }

    double operator()(double theta) const;
    double derivative(double theta) const;
    double second_derivative(double theta) const;

    /// Coefficient bound sum(|a_k| + |b_k|) >= sup |z|.
    double sup_bound() const;
    /// sum(k * (|a_k| + |b_k|)) >= sup |z'|.
    double derivative_bound() const;

    int max_degree() const { return max_degree_; }
    const std::vector<HarmonicTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// theta |-> -z(theta): used to move between the two sides of the curve.
    OddHarmonicSeries negated() const;

  private:
    std::vector<HarmonicTerm> terms_;
    int max_degree_ = 0;
};

}  // namespace gaussmiss
