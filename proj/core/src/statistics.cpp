#include "spde_mlmc/statistics.hpp"

#include <algorithm>

#include "spde_mlmc/error.hpp"

namespace spde_mlmc {

void ScalarAccumulator::add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void ScalarAccumulator::merge(const ScalarAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
}

double ScalarAccumulator::variance() const {
    return count_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(count_ - 1));
}

FieldAccumulator::FieldAccumulator(const TridiagonalMatrix* mass) : mass_(mass), mean_(mass ? mass->size() : 0, 0.0) {
    if (!mass) throw UsageError("FieldAccumulator: mass matrix required");
}

void FieldAccumulator::add(std::span<const double> x) {
    if (x.size() != mean_.size()) throw UsageError("FieldAccumulator: field has wrong size");
    ++count_;
    const double n = static_cast<double>(count_);
    std::vector<double> before(x.size()), after(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        before[i] = x[i] - mean_[i];
        mean_[i] += before[i] / n;
        after[i] = x[i] - mean_[i];
    }
    m2_ += mass_inner(*mass_, before, after);
}

void FieldAccumulator::merge(const FieldAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    if (other.mean_.size() != mean_.size()) throw UsageError("FieldAccumulator: merging fields of different size");
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    std::vector<double> delta(mean_.size());
    for (std::size_t i = 0; i < mean_.size(); ++i) delta[i] = other.mean_[i] - mean_[i];
    for (std::size_t i = 0; i < mean_.size(); ++i) mean_[i] += delta[i] * nb / n;
    m2_ += other.m2_ + mass_inner(*mass_, delta, delta) * na * nb / n;
    count_ += other.count_;
}

double FieldAccumulator::variance() const {
    return count_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(count_ - 1));
}

}  // namespace spde_mlmc
