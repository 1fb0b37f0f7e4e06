#include "dynwalk/distribution.hpp"

#include <cmath>
#include <sstream>

#include "dynwalk/error.hpp"

namespace dynwalk {

Distribution::Distribution(std::vector<std::string> labels, Eigen::VectorXd values, double tol)
    : labels_(std::move(labels)), values_(std::move(values))
{
    if (labels_.size() != size())
        throw ValidationError("distribution: label count does not match value count");
    if (values_.size() == 0)
        throw ValidationError("distribution: empty support");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < -tol) {
            std::ostringstream os;
            os << "distribution: entry " << i << " is " << values_[i];
            throw ValidationError(os.str());
        }
    }
    const double mass = values_.sum();
    if (std::abs(mass - 1.0) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "distribution: total mass " << mass << " differs from 1";
        throw ValidationError(os.str());
    }
}

Distribution Distribution::uniform(std::vector<std::string> labels)
{
    const auto n = static_cast<Eigen::Index>(labels.size());
    return {std::move(labels), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

double total_variation(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) {
        std::ostringstream os;
        os << "total_variation: length mismatch (" << p.size() << " vs " << q.size() << ")";
        throw ValidationError(os.str());
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        tv = std::max(tv, std::abs(p[i] - q[i]));
    return tv;
}

double total_variation(const Distribution& p, const Distribution& q)
{
    return total_variation(p.span(), q.span());
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    return total_variation(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                           std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

std::vector<std::string> index_labels(std::size_t n, const std::string& prefix)
{
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(prefix + std::to_string(i + 1));
    return out;
}

}  // namespace dynwalk
