#pragma once

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

namespace hfrac {

/// Point of the Heisenberg group H^N in exponential coordinates (x, y, t).
/// Haar measure in these coordinates is Lebesgue measure on R^{2N+1}.
struct GroupPoint {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    double t = 0.0;

    GroupPoint() = default;
    GroupPoint(Eigen::VectorXd x_, Eigen::VectorXd y_, double t_);

    /// Origin of H^N.
    static GroupPoint identity(std::size_t n);
    /// N = 1 convenience constructor.
    static GroupPoint h1(double x, double y, double t);

    std::size_t dim() const { return static_cast<std::size_t>(x.size()); }
    bool finite() const;
};

bool operator==(const GroupPoint& a, const GroupPoint& b);

/// Fixed problem constants: N, Q = 2N + 2, s in (0,1), p in (1, inf), with sp < Q.
class ModelParams {
public:
    ModelParams(int n, double s, double p);

    int n() const { return n_; }
    int q() const { return 2 * n_ + 2; }
    double s() const { return s_; }
    double p() const { return p_; }
    double sp() const { return s_ * p_; }
    /// Exponent of the kernel |eta^{-1} o xi|^{-(Q+sp)}.
    double kernel_exponent() const { return q() + sp(); }

private:
    int n_;
    double s_;
    double p_;
};

/// Group law (x+x', y+y', t+t'+2<y,x'>-2<x,y'>).
GroupPoint compose(const GroupPoint& a, const GroupPoint& b);
GroupPoint inverse(const GroupPoint& a);
/// Anisotropic dilation (lambda x, lambda y, lambda^2 t).
GroupPoint dilate(double lambda, const GroupPoint& a);
/// Koranyi norm ((|x|^2+|y|^2)^2 + t^2)^{1/4}.
double koranyi_norm(const GroupPoint& a);
/// Left-invariant gauge distance |b^{-1} o a|.
double distance(const GroupPoint& a, const GroupPoint& b);
/// Singular kernel distance(a,b)^{-(Q+sp)}; throws on coincident points.
double kernel(const GroupPoint& a, const GroupPoint& b, const ModelParams& params);

}  // namespace hfrac
