#pragma once

#include <span>
#include <string>
#include <vector>

#include "coastcast/score.hpp"

namespace coastcast {

// Regularized incomplete beta I_x(a, b) by continued fraction (Lentz).
// Absolute error <= 1e-10 over a, b > 0, x in [0, 1].
double reg_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Survival function P(F > f) for the F distribution.
double f_survival(double f, double df1, double df2);

struct TestResult {
    double statistic = 0.0; // t or F
    double df1 = 0.0;       // t: Welch-Satterthwaite df; F: k-1
    double df2 = 0.0;       // F only: N-k
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false; // p_value <= alpha
};

// Welch (unequal variance) t-test, two-sided.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                        double alpha = 0.05);

TestResult anova_oneway(const std::vector<std::vector<double>>& groups,
                        double alpha = 0.05);

struct ComparisonStep {
    std::string name;
    TestResult result;
    std::string note;
};

// Decision record of the model-selection procedure: ANOVA across the models'
// fold R^2 lists; when rejected, the best-mean model is flagged and its RFE
// feature-count variants are compared (ANOVA, then Welch t of best-RFE vs
// scaled). With exactly two reports the procedure is a single t-test.
struct ModelComparison {
    std::vector<ComparisonStep> steps;
    std::string best_model;      // empty when no difference was found
    std::string best_rfe_variant;
    double alpha = 0.05;

    std::string to_text() const;
    std::string to_csv() const; // comparison,statistic,df1,df2,p,reject
};

ModelComparison compare_models(const std::vector<ScoreReport>& reports,
                               double alpha = 0.05);

} // namespace coastcast
