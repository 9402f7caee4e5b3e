#pragma once

#include "weq/types.hpp"

namespace weq {

/// Logistic regression fit by iteratively reweighted least squares.
/// `design` carries the covariates without an intercept column; the
/// intercept is the first fitted coefficient.
struct LogisticModel {
    Vec coef;        // [intercept, slopes...]
    int iterations = 0;
    Scalar grad_norm = 0.0; // max-norm of the mean score at exit

    /// Predicted probabilities for new covariate rows.
    Vec predict(const Mat& design) const;
};

/// Throws ValidationError on a single-class outcome and on separation or
/// non-convergence (max-norm of the mean gradient above `tol` after
/// `max_iter` Newton steps).
LogisticModel fit_logistic(const Mat& design, const Vec& outcome,
                           Scalar tol = 1e-8, int max_iter = 100);

} // namespace weq
