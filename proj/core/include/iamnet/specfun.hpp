#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace iamnet {

struct QuadSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    unsigned max_depth = 15;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double estimate, double error_bound);
    double estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

// Gauss hypergeometric 2F1(a, b; c; z) for z <= 0.
double gauss_2f1(double a, double b, double c, double z);

// Upper incomplete gamma Gamma(s, x), s > 0, x >= 0 (not regularized).
double upper_incomplete_gamma(double s, double x);

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
double integrate(const Integrand& f, double a, double b, const QuadSpec& q = {});

// Sum of integrals over consecutive breakpoints (sorted, duplicates ignored).
// The error check applies to the total.
double integrate_piecewise(const Integrand& f, std::vector<double> points, const QuadSpec& q = {});

// Iterated integral of f(x, y) over a <= x <= b, ylo(x) <= y <= yhi(x).
double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                    const Integrand& ylo, const Integrand& yhi, const QuadSpec& q = {});

// lo, lo*ratio, lo*ratio^2, ... capped at hi (hi included).
std::vector<double> geometric_points(double lo, double hi, double ratio = 2.0);

}  // namespace iamnet
