#include "hfrac/hgroup.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace hfrac {

namespace {

void require_same_dim(const GroupPoint& a, const GroupPoint& b)
{
    if (a.x.size() != b.x.size() || a.y.size() != b.y.size())
        throw std::invalid_argument("GroupPoint dimension mismatch");
}

}  // namespace

GroupPoint::GroupPoint(Eigen::VectorXd x_, Eigen::VectorXd y_, double t_)
    : x(std::move(x_)), y(std::move(y_)), t(t_)
{
    if (x.size() != y.size())
        throw std::invalid_argument("GroupPoint: x and y must have equal length");
}

GroupPoint GroupPoint::identity(std::size_t n)
{
    const auto k = static_cast<Eigen::Index>(n);
    return {Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k), 0.0};
}

GroupPoint GroupPoint::h1(double x, double y, double t)
{
    return {Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, y), t};
}

bool GroupPoint::finite() const
{
    return x.allFinite() && y.allFinite() && std::isfinite(t);
}

bool operator==(const GroupPoint& a, const GroupPoint& b)
{
    return a.x.size() == b.x.size() && a.x == b.x && a.y == b.y && a.t == b.t;
}

ModelParams::ModelParams(int n, double s, double p) : n_(n), s_(s), p_(p)
{
    if (n < 1)
        throw std::invalid_argument("N must be a positive integer");
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("s must lie in (0,1)");
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("p must lie in (1,inf)");
    if (!(s * p < q())) {
        std::ostringstream os;
        os << "sp < Q violated (" << s * p << " ≥ " << q() << ")";
        throw std::invalid_argument(os.str());
    }
}

GroupPoint compose(const GroupPoint& a, const GroupPoint& b)
{
    require_same_dim(a, b);
    return {a.x + b.x, a.y + b.y, a.t + b.t + 2.0 * a.y.dot(b.x) - 2.0 * a.x.dot(b.y)};
}

GroupPoint inverse(const GroupPoint& a) { return {-a.x, -a.y, -a.t}; }

GroupPoint dilate(double lambda, const GroupPoint& a)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("dilation factor must be positive");
    return {lambda * a.x, lambda * a.y, lambda * lambda * a.t};
}

double koranyi_norm(const GroupPoint& a)
{
    const double r2 = a.x.squaredNorm() + a.y.squaredNorm();
    return std::pow(r2 * r2 + a.t * a.t, 0.25);
}

double distance(const GroupPoint& a, const GroupPoint& b)
{
    require_same_dim(a, b);
    // Expanded form of koranyi_norm(compose(inverse(b), a)) without temporaries.
    double r2 = 0.0;
    double twist = 0.0;
    for (Eigen::Index k = 0; k < a.x.size(); ++k) {
        const double dx = a.x[k] - b.x[k];
        const double dy = a.y[k] - b.y[k];
        r2 += dx * dx + dy * dy;
        twist += b.x[k] * a.y[k] - b.y[k] * a.x[k];
    }
    const double dt = a.t - b.t + 2.0 * twist;
    return std::pow(r2 * r2 + dt * dt, 0.25);
}

double kernel(const GroupPoint& a, const GroupPoint& b, const ModelParams& params)
{
    const double d = distance(a, b);
    if (!(d > 0.0))
        throw std::invalid_argument("kernel evaluated at coincident points");
    return std::pow(d, -params.kernel_exponent());
}

}  // namespace hfrac
