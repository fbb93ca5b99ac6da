#pragma once

#include "gazeflow/aoi.hpp"
#include "gazeflow/features.hpp"
#include "gazeflow/forest.hpp"
#include "gazeflow/logistic.hpp"
#include "gazeflow/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow {

/// Trial-level design matrix. Cells may be missing until imputation.
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
    std::vector<int> labels;  // 1 = answered correctly
    // Index of each row in the matrix it was drawn from (identity for a fresh matrix).
    std::vector<std::size_t> source_rows;

    std::size_t size() const { return rows.size(); }
    void add_row(std::vector<std::optional<double>> row, int label, std::size_t source);
};

struct TextStats {
    std::size_t token_count = 0;
    double avg_token_length = 0.0;
};

std::map<std::string, TextStats> text_stats(std::span<const TextLayout> layouts);

/// Rows: trials of `task` (run drop_empty_trials first).
/// Columns: f1..f6, avg word TRT in/out of target; with `text` set, also
/// token_count and avg_token_length of the trial's text.
FeatureMatrix build_feature_matrix(std::span<const TrialFeatures> trials, Task task,
                                   const std::map<std::string, TextStats>* text = nullptr);

struct TrainTestSplit {
    FeatureMatrix train;  // minority class up-sampled to parity
    FeatureMatrix test;
    std::uint64_t seed_used = 0;
};

/// Seeded shuffle, 80/20 split (test gets ceil(n/5) rows), then the minority
/// class of the training part is duplicated by uniform draws with replacement
/// until both classes have the same count. If the training part lacks a class,
/// the split is retried once with seed + 1; a second failure throws InputError.
TrainTestSplit split_and_balance(const FeatureMatrix& matrix, std::uint64_t seed);

/// Median imputation and z-scoring with statistics taken from one matrix.
class Standardizer {
public:
    static Standardizer fit(const FeatureMatrix& train);
    DenseMatrix apply(const FeatureMatrix& m) const;

    const std::vector<double>& medians() const { return medians_; }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& scales() const { return scales_; }

private:
    std::vector<double> medians_;
    std::vector<double> means_;
    std::vector<double> scales_;
};

enum class Model { random, logistic, forest };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

struct ModelSettings {
    LogisticParams logistic;
    ForestParams forest;
};

struct RunScore {
    Model model = Model::random;
    double accuracy = 0.0;     // percent
    double weighted_f1 = 0.0;  // percent
    bool converged = true;
};

// Percent of matching labels.
double accuracy_pct(std::span<const int> predictions, std::span<const int> labels);
// Per-class F1 weighted by class support in `labels`, in percent.
double weighted_f1(std::span<const int> predictions, std::span<const int> labels);

/// Standardizes from the training part, fits `model`, and scores the test part.
RunScore train_eval(const TrainTestSplit& split, Model model, std::uint64_t seed,
                    const ModelSettings& settings = {});

struct EvalReport {
    Model model = Model::random;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    double f1_mean = 0.0;
    double f1_std = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> accuracies;
    std::vector<double> f1s;
    bool all_converged = true;
};

/// Runs seeds seed0 .. seed0 + runs - 1. Every model sees the same split in a
/// given run. Std is the sample std over runs (0 for a single run).
std::vector<EvalReport> run_experiment(const FeatureMatrix& matrix, std::span<const Model> models,
                                       std::size_t runs, std::uint64_t seed0,
                                       const ModelSettings& settings = {});

// model,acc_mean,acc_std,f1_mean,f1_std,runs,converged
void write_eval_reports(std::ostream& out, std::string_view task, std::string_view features,
                        std::span<const EvalReport> reports, bool header = true);

} // namespace gazeflow
