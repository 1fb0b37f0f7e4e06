#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dynwalk {

/// Probability vector over a labeled finite set (nodes, configurations or
/// components). Construction checks nonnegativity and unit mass.
class Distribution {
public:
    Distribution() = default;
    Distribution(std::vector<std::string> labels, Eigen::VectorXd values, double tol = 1e-9);

    static Distribution uniform(std::vector<std::string> labels);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::span<const double> span() const noexcept { return {values_.data(), size()}; }

private:
    std::vector<std::string> labels_;
    Eigen::VectorXd values_;
};

/// Largest componentwise absolute difference, max_i |p_i - q_i|.
///
/// Note this is not the 1/2 L1 convention; the asymptotic comparisons in
/// this library are all reported in this max-norm form.
double total_variation(std::span<const double> p, std::span<const double> q);
double total_variation(const Distribution& p, const Distribution& q);
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// "1".."n", used when a caller has no better names.
std::vector<std::string> index_labels(std::size_t n, const std::string& prefix = "");

}  // namespace dynwalk
