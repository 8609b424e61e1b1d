#include "coastcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace coastcast {

namespace {

// Continued fraction for the incomplete beta (Numerical Recipes style
// modified Lentz evaluation).
double incbeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double sample_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

} // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0) || !(x <= 1.0) ||
        !std::isfinite(a) || !std::isfinite(b)) {
        raise(errc::domain_error, "reg_incomplete_beta requires a,b > 0 and x in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * incbeta_cf(a, b, x) / a;
    }
    return 1.0 - front * incbeta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) raise(errc::domain_error, "t distribution needs df > 0");
    const double x = df / (df + t * t);
    return reg_incomplete_beta(df / 2.0, 0.5, x);
}

double f_survival(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0)) raise(errc::domain_error, "F needs df > 0");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = df2 / (df2 + df1 * f);
    return reg_incomplete_beta(df2 / 2.0, df1 / 2.0, x);
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b,
                        double alpha) {
    if (a.size() < 2 || b.size() < 2) {
        raise(errc::degenerate_sample, "each sample needs at least 2 values");
    }
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    const double va = sample_variance(a, ma);
    const double vb = sample_variance(b, mb);
    if (va <= 0.0 || vb <= 0.0) {
        raise(errc::degenerate_sample, "each sample needs positive variance");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double sea = va / na;
    const double seb = vb / nb;
    const double se2 = sea + seb;

    TestResult res;
    res.alpha = alpha;
    res.statistic = (ma - mb) / std::sqrt(se2);
    res.df1 = se2 * se2 / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    res.df2 = std::numeric_limits<double>::quiet_NaN();
    res.p_value = res.statistic == 0.0 ? 1.0
                                       : student_t_two_sided_p(res.statistic, res.df1);
    res.reject = res.p_value <= alpha;
    return res;
}

TestResult anova_oneway(const std::vector<std::vector<double>>& groups, double alpha) {
    if (groups.size() < 2) raise(errc::bad_argument, "anova needs >= 2 groups");
    std::size_t total_n = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) raise(errc::bad_argument, "anova group needs >= 2 values");
        total_n += g.size();
    }

    double grand = 0.0;
    for (const auto& g : groups)
        for (double v : g) grand += v;
    grand /= static_cast<double>(total_n);

    double ssb = 0.0;
    double ssw = 0.0;
    for (const auto& g : groups) {
        const double m = sample_mean(g);
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ssw += (v - m) * (v - m);
    }

    TestResult res;
    res.alpha = alpha;
    res.df1 = static_cast<double>(groups.size() - 1);
    res.df2 = static_cast<double>(total_n - groups.size());

    if (ssw == 0.0 && ssb == 0.0) {
        raise(errc::degenerate_groups, "all values identical everywhere");
    }
    if (ssw == 0.0) { // perfectly separated constant groups
        res.statistic = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
        res.reject = true;
        return res;
    }
    res.statistic = (ssb / res.df1) / (ssw / res.df2);
    res.p_value = f_survival(res.statistic, res.df1, res.df2);
    res.reject = res.p_value <= alpha;
    return res;
}

namespace {

std::string fmt_df(double v) {
    return std::isnan(v) ? std::string("-") : format_double(v);
}

} // namespace

std::string ModelComparison::to_text() const {
    std::string out = "model comparison (alpha = " + format_double(alpha) + ")\n";
    for (const ComparisonStep& s : steps) {
        out += "  " + s.name + ": statistic = " + format_double(s.result.statistic) +
               ", df = (" + fmt_df(s.result.df1) + ", " + fmt_df(s.result.df2) +
               "), p = " + format_double(s.result.p_value) +
               (s.result.reject ? " -> reject H0" : " -> fail to reject H0") + "\n";
        if (!s.note.empty()) out += "    " + s.note + "\n";
    }
    if (!best_model.empty()) out += "  best model: " + best_model + "\n";
    if (!best_rfe_variant.empty()) out += "  best rfe variant: " + best_rfe_variant + "\n";
    return out;
}

std::string ModelComparison::to_csv() const {
    CsvWriter w({"comparison", "statistic", "df1", "df2", "p", "reject"});
    for (const ComparisonStep& s : steps) {
        w.field(s.name);
        w.field(s.result.statistic);
        w.field(fmt_df(s.result.df1));
        w.field(fmt_df(s.result.df2));
        w.field(s.result.p_value);
        w.field(s.result.reject ? "true" : "false");
        w.end_row();
    }
    return w.str();
}

ModelComparison compare_models(const std::vector<ScoreReport>& reports, double alpha) {
    if (reports.size() < 2) raise(errc::bad_argument, "need at least 2 reports");

    ModelComparison cmp;
    cmp.alpha = alpha;

    // Two reports only: straight to the t-test.
    if (reports.size() == 2) {
        const auto a = reports[0].r2_list();
        const auto b = reports[1].r2_list();
        ComparisonStep step;
        step.name = reports[0].model + "[" + reports[0].input_variant + "] vs " +
                    reports[1].model + "[" + reports[1].input_variant + "]";
        step.result = welch_t_test(a, b, alpha);
        if (step.result.reject) {
            cmp.best_model = reports[0].mean_r2() >= reports[1].mean_r2()
                                 ? reports[0].model
                                 : reports[1].model;
        }
        cmp.steps.push_back(std::move(step));
        return cmp;
    }

    // Stage 1: ANOVA across models on the scaled variant.
    std::vector<const ScoreReport*> scaled;
    for (const auto& r : reports) {
        if (r.input_variant == "scaled") scaled.push_back(&r);
    }
    if (scaled.size() < 2) raise(errc::bad_argument, "need >= 2 scaled reports");

    std::vector<std::vector<double>> groups;
    for (const auto* r : scaled) groups.push_back(r->r2_list());
    ComparisonStep stage1;
    stage1.name = "anova: scores across models (scaled)";
    stage1.result = anova_oneway(groups, alpha);
    if (!stage1.result.reject) {
        stage1.note = "no significant difference; no best model declared";
        cmp.steps.push_back(std::move(stage1));
        return cmp;
    }

    const ScoreReport* best = scaled[0];
    for (const auto* r : scaled) {
        if (r->mean_r2() > best->mean_r2()) best = r;
    }
    cmp.best_model = best->model;
    stage1.note = "best mean R^2: " + best->model;
    cmp.steps.push_back(std::move(stage1));

    // Stage 2: ANOVA across the best model's RFE feature counts.
    std::vector<const ScoreReport*> rfe_reports;
    for (const auto& r : reports) {
        if (r.model == best->model && r.input_variant.rfind("rfe(", 0) == 0) {
            rfe_reports.push_back(&r);
        }
    }
    if (rfe_reports.empty()) return cmp;

    const ScoreReport* best_rfe = rfe_reports[0];
    for (const auto* r : rfe_reports) {
        if (r->mean_r2() > best_rfe->mean_r2()) best_rfe = r;
    }
    cmp.best_rfe_variant = best_rfe->input_variant;

    if (rfe_reports.size() >= 2) {
        std::vector<std::vector<double>> rfe_groups;
        for (const auto* r : rfe_reports) rfe_groups.push_back(r->r2_list());
        ComparisonStep stage2;
        stage2.name = "anova: " + best->model + " across rfe feature counts";
        stage2.result = anova_oneway(rfe_groups, alpha);
        stage2.note = stage2.result.reject
                          ? "significant difference across feature counts"
                          : "no significant difference; using highest mean " +
                                best_rfe->input_variant;
        cmp.steps.push_back(std::move(stage2));
    }

    // Stage 3: Welch t of best RFE variant vs scaled.
    ComparisonStep stage3;
    stage3.name = "t-test: " + best->model + "[" + best_rfe->input_variant +
                  "] vs " + best->model + "[scaled]";
    stage3.result = welch_t_test(best_rfe->r2_list(), best->r2_list(), alpha);
    stage3.note = stage3.result.reject
                      ? "feature selection changes the score distribution"
                      : "no significant difference from feature selection";
    cmp.steps.push_back(std::move(stage3));
    return cmp;
}

} // namespace coastcast
