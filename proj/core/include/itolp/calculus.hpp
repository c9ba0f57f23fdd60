#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace itolp {

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm(std::span<const double> x) noexcept;

/// r^e for r >= 0 with the convention 0/0 := 0: a negative power of zero is 0,
/// 0^0 is 1.
double guarded_pow(double r, double e) noexcept;

/// A C^2 function on R^M given by its value, gradient and Hessian contraction.
class C2Function {
public:
    virtual ~C2Function() = default;

    virtual double value(std::span<const double> x) const = 0;
    virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
    /// a^T D^2 phi(x) b
    virtual double hessian_contract(std::span<const double> x, std::span<const double> a,
                                    std::span<const double> b) const = 0;
};

/// phi(x) = |x|^p, p >= 2.
///   D_i |x|^p     = p |x|^{p-2} x^i
///   D_i D_j |x|^p = p (p-2) |x|^{p-4} x^i x^j + p |x|^{p-2} delta_ij
class PNormJet final : public C2Function {
public:
    explicit PNormJet(double p);

    double p() const noexcept { return p_; }
    double value(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::span<double> out) const override;
    double hessian_contract(std::span<const double> x, std::span<const double> a,
                            std::span<const double> b) const override;
    /// Operator norm of the Hessian: p (p-1) |x|^{p-2}.
    double hessian_operator_norm(std::span<const double> x) const;

private:
    double p_;
};

/// User-supplied C^2 test function.
class ClosureJet final : public C2Function {
public:
    using ValueFn = std::function<double(std::span<const double>)>;
    using GradFn = std::function<void(std::span<const double>, std::span<double>)>;
    using HessFn = std::function<double(std::span<const double>, std::span<const double>,
                                        std::span<const double>)>;

    ClosureJet(ValueFn value, GradFn gradient, HessFn hessian)
        : value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian))
    {
    }

    double value(std::span<const double> x) const override { return value_(x); }
    void gradient(std::span<const double> x, std::span<double> out) const override
    {
        gradient_(x, out);
    }
    double hessian_contract(std::span<const double> x, std::span<const double> a,
                            std::span<const double> b) const override
    {
        return hessian_(x, a, b);
    }

private:
    ValueFn value_;
    GradFn gradient_;
    HessFn hessian_;
};

/// p |x|^{p-2} x; the zero vector at x = 0. Throws DomainError for p < 2.
std::vector<double> p_norm_grad(double p, std::span<const double> x);

/// I^a phi(v) = phi(v + a) - phi(v)
double i_operator(const C2Function& phi, std::span<const double> v, std::span<const double> a);

/// J^a phi(v) = I^a phi(v) - D_i phi(v) a^i
double j_operator(const C2Function& phi, std::span<const double> v, std::span<const double> a);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept { return lhs <= rhs; }
};

/// Constant N(p) of |J^a |v|^p| <= N (|v|^{p-2} |a|^2 + |a|^p).
///
/// Obtained from the integral Taylor remainder |J| <= 1/2 sup_seg |D^2 phi|_op |a|^2:
/// the segment v + s a is sampled at 64 points, the ratio to the right-hand
/// side is maximised over a fixed set of |a|/|v| and angles (the ratio is
/// scale invariant), and the maximum is inflated by 10%.
double taylor_constant(double p);

/// (|J^a |v|^p|, N(p) (|v|^{p-2}|a|^2 + |a|^p))
BoundCheck j_bound_check(double p, std::span<const double> v, std::span<const double> a);

}  // namespace itolp
