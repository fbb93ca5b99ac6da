#pragma once

#include "gazeflow/features.hpp"
#include "gazeflow/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gazeflow {

// Ranks starting at 1; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation clamped to [-1, 1]; nullopt when either side is constant.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct SpearmanResult {
    std::optional<double> rho;
    std::size_t pairs_used = 0;
    std::string diagnostic;  // set when rho is undefined
};

/// Spearman's rho over the pairs where both sides are present. Needs at least
/// three complete pairs. Throws InputError on length mismatch.
SpearmanResult spearman(std::span<const std::optional<double>> x,
                        std::span<const std::optional<double>> y);
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

struct ComparisonRow {
    std::string language;
    std::string text_id;
    std::optional<double> trt_a;
    std::optional<double> trt_b;
    double nfix_a = 0.0;
    double nfix_b = 0.0;
    std::optional<double> rho;
    std::size_t words_correlated = 0;
};

/// Per text shared by both datasets: mean TRT (fixated words), mean nfix (all
/// words), and Spearman's rho between the per-word relative fixation averaged
/// over readers. Words nobody fixated in a dataset are left out of rho.
/// Throws InputError when a shared text has different token sets.
/// `languages` maps text_id to a language label (optional).
std::vector<ComparisonRow> compare_datasets(std::span<const WordFeatureRow> a,
                                            std::span<const WordFeatureRow> b,
                                            const std::map<std::string, std::string>& languages = {});

struct TTestResult {
    std::string feature;
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
    double mean1 = 0.0;  // group 1 (incorrect)
    double mean2 = 0.0;  // group 2 (correct)
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    // Zero variance in both groups with different means: t is infinite, p = 0.
    bool degenerate = false;
};

enum class VarianceModel { pooled, welch };

/// Two-sided independent two-sample t-test. Throws InputError when a group has
/// fewer than two values or contains non-finite values.
TTestResult independent_t_test(std::span<const double> group1, std::span<const double> group2,
                               VarianceModel variance = VarianceModel::pooled);

// I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double x, double a, double b);
// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;  // sample (n-1); 0 when n < 2
};

Moments moments(std::span<const double> values);

struct Quartiles {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

// Linear interpolation between order statistics. Throws on empty input.
Quartiles quartiles(std::span<const double> values);

struct LanguageSummary {
    std::size_t participants = 0;
    std::optional<Quartiles> accuracy_pct;
    std::optional<Quartiles> total_time_ms;
};

struct CohortSummary {
    Moments age;
    Moments sample_rate_hz;
    std::map<std::string, LanguageSummary> by_language;
};

// Missing fields are skipped per statistic.
CohortSummary cohort_summary(std::span<const ParticipantRecord> participants);

/// t-tests of features (1)-(7) for one task, incorrect vs correct trials.
/// Trials with an undefined ratio are left out of that feature's test only.
std::vector<TTestResult> feature_t_tests(std::span<const TrialFeatures> trials, Task task,
                                         VarianceModel variance = VarianceModel::pooled);

// language,text_id,trt_a,trt_b,nfix_a,nfix_b,rho,words
void write_comparison(std::ostream& out, std::span<const ComparisonRow> rows);
std::vector<ComparisonRow> parse_comparison(std::string_view source);
// task,feature,n1,n2,mean1,mean2,t,df,p
void write_t_tests(std::ostream& out, Task task, std::span<const TTestResult> rows, bool header = true);
void write_cohort_summary(std::ostream& out, const CohortSummary& summary);

} // namespace gazeflow
