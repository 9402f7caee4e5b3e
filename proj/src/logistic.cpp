#include "weq/logistic.hpp"

#include "weq/errors.hpp"

#include <cmath>

namespace weq {

namespace {

Vec sigmoid(const Vec& x) {
    Vec out(x.size());
    for (Index i = 0; i < x.size(); ++i) out[i] = expit(x[i]);
    return out;
}

Mat with_intercept(const Mat& design) {
    Mat x(design.rows(), design.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(design.cols()) = design;
    return x;
}

} // namespace

Vec LogisticModel::predict(const Mat& design) const {
    const Mat x = with_intercept(design);
    return sigmoid((x * coef.matrix()).array());
}

LogisticModel fit_logistic(const Mat& design, const Vec& outcome, Scalar tol,
                           int max_iter) {
    const Index n = design.rows();
    if (n == 0) throw ValidationError("logistic fit: empty training set");
    const Scalar y_mean = outcome.mean();
    if (y_mean <= 0.0 || y_mean >= 1.0) {
        throw ValidationError(
            "logistic fit: outcome has a single class; cannot fit");
    }

    const Mat x = with_intercept(design);
    const Index p = x.cols();
    LogisticModel model;
    model.coef = Vec::Zero(p);

    for (int iter = 1; iter <= max_iter; ++iter) {
        const Vec eta = (x * model.coef.matrix()).array();
        const Vec mu = sigmoid(eta);
        const Vec score = ((outcome - mu).matrix().transpose() * x).array() /
                          static_cast<Scalar>(n);
        model.iterations = iter;
        model.grad_norm = score.abs().maxCoeff();
        if (model.grad_norm <= tol) {
            // A strictly separating fit has no finite maximizer; the small
            // gradient is underflow, not convergence.
            if (((2.0 * outcome - 1.0) * eta > 0.0).all()) {
                throw ValidationError(
                    "logistic fit: training data are completely separated; "
                    "the maximum likelihood estimate does not exist");
            }
            return model;
        }

        const Vec w = mu * (1.0 - mu);
        const Mat xtwx = x.transpose() * w.matrix().asDiagonal() * x;
        Eigen::LDLT<Mat> solver(xtwx);
        if (solver.info() != Eigen::Success) {
            throw ValidationError(
                "logistic fit: weighted normal equations are singular "
                "(possible separation)");
        }
        const Vec step =
            solver.solve((x.transpose() * (outcome - mu).matrix())).array();
        if (!step.isFinite().all()) {
            throw ValidationError(
                "logistic fit: non-finite Newton step (possible separation)");
        }
        model.coef += step;
        if (model.coef.abs().maxCoeff() > 1e4) {
            throw ValidationError(
                "logistic fit: coefficients diverging (separation)");
        }
    }
    throw ValidationError("logistic fit: no convergence after " +
                          std::to_string(max_iter) + " iterations");
}

} // namespace weq
