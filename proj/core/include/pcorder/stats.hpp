#pragma once

namespace pcorder::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

/// Deterministic 64-bit mixer used to derive per-window RNG streams.
unsigned long long splitmix64(unsigned long long x);

}  // namespace pcorder::stats
