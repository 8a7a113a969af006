#pragma once

#include <span>

namespace conceptgen {

// Regularized incomplete beta I_x(a, b), evaluated with Lentz's continued
// fraction; accurate to ~1e-12 over the ranges used here.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with (possibly fractional)
// degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct WelchResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

// Welch's unequal-variance two-sample t-test, two-sided. Two groups with
// zero variance each get p = 1 when their means agree and p = 0 otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b,
                         double alpha = 0.05);

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

}  // namespace conceptgen
