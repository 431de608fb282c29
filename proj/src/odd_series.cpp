#include "gaussmiss/odd_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gaussmiss {

OddHarmonicSeries::OddHarmonicSeries(std::vector<HarmonicTerm> terms) {
    for (const auto& t : terms) {
        if (t.k <= 0 || t.k % 2 == 0) {
            throw std::invalid_argument("odd harmonic series: frequency " + std::to_string(t.k) +
                                        " is not a positive odd integer");
        }
    }
    std::sort(terms.begin(), terms.end(),
              [](const HarmonicTerm& l, const HarmonicTerm& r) { return l.k < r.k; });
    for (const auto& t : terms) {
        if (!terms_.empty() && terms_.back().k == t.k) {
            terms_.back().a += t.a;
            terms_.back().b += t.b;
        } else {
            terms_.push_back(t);
        }
    }
    std::erase_if(terms_, [](const HarmonicTerm& t) { return t.a == 0.0 && t.b == 0.0; });
    max_degree_ = terms_.empty() ? 0 : terms_.back().k;
}

double OddHarmonicSeries::operator()(double theta) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        s += t.a * std::cos(t.k * theta) + t.b * std::sin(t.k * theta);
    }
    return s;
}

double OddHarmonicSeries::derivative(double theta) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        s += t.k * (t.b * std::cos(t.k * theta) - t.a * std::sin(t.k * theta));
    }
    return s;
}

double OddHarmonicSeries::second_derivative(double theta) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        s -= t.k * t.k * (t.a * std::cos(t.k * theta) + t.b * std::sin(t.k * theta));
    }
    return s;
}

double OddHarmonicSeries::sup_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.a) + std::abs(t.b);
    return s;
}

double OddHarmonicSeries::derivative_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.k * (std::abs(t.a) + std::abs(t.b));
    return s;
}

OddHarmonicSeries OddHarmonicSeries::negated() const {
    auto terms = terms_;
    for (auto& t : terms) {
        t.a = -t.a;
        t.b = -t.b;
    }
    return OddHarmonicSeries(std::move(terms));
}

}  // namespace gaussmiss
